//! Integer solutions of `A x = b` for small dense systems, by unimodular
//! column reduction to echelon form.

use num_integer::Integer;
use num_rational::Rational64;

use super::CrystalError;

fn overflow() -> CrystalError {
    CrystalError::Overflow
}

fn mul(a: i128, b: i128) -> Result<i128, CrystalError> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn sub(a: i128, b: i128) -> Result<i128, CrystalError> {
    a.checked_sub(b).ok_or_else(overflow)
}

fn add(a: i128, b: i128) -> Result<i128, CrystalError> {
    a.checked_add(b).ok_or_else(overflow)
}

/// Finds integers `x` with `Σⱼ xⱼ·columns[j] = target`, or `None` when the
/// target is outside the integer span.
pub fn solve_integer_system(columns: &[Vec<i128>], target: &[i128]) -> Result<Option<Vec<i128>>, CrystalError> {
    let rows = target.len();
    let k = columns.len();
    if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
        return Err(CrystalError::DimensionMismatch {
            left: bad.len(),
            right: rows,
        });
    }
    let mut h: Vec<Vec<i128>> = columns.to_vec();
    let mut u: Vec<Vec<i128>> = (0..k).map(|c| (0..k).map(|i| i128::from(i == c)).collect()).collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for r in 0..rows {
        loop {
            let nonzero: Vec<usize> = (next..k).filter(|&c| h[c][r] != 0).collect();
            let Some(&best) = nonzero.iter().min_by_key(|&&c| (h[c][r].unsigned_abs(), c)) else {
                break;
            };
            if nonzero.len() == 1 {
                h.swap(best, next);
                u.swap(best, next);
                pivots.push((r, next));
                next += 1;
                break;
            }
            for &c in nonzero.iter().filter(|&&c| c != best) {
                let q = h[c][r] / h[best][r];
                let (hb, ub) = (h[best].clone(), u[best].clone());
                for (x, b) in h[c].iter_mut().zip(&hb) {
                    *x = sub(*x, mul(q, *b)?)?;
                }
                for (x, b) in u[c].iter_mut().zip(&ub) {
                    *x = sub(*x, mul(q, *b)?)?;
                }
            }
        }
    }

    let mut y = vec![0i128; k];
    let mut pivot_iter = pivots.iter().peekable();
    let mut solved = 0;
    for r in 0..rows {
        let mut acc = 0i128;
        for c in 0..solved {
            acc = add(acc, mul(h[c][r], y[c])?)?;
        }
        let residual = sub(target[r], acc)?;
        match pivot_iter.peek() {
            Some(&&(pr, pc)) if pr == r => {
                let (quot, rem) = residual.div_rem(&h[pc][r]);
                if rem != 0 {
                    return Ok(None);
                }
                y[pc] = quot;
                solved = pc + 1;
                pivot_iter.next();
            }
            _ => {
                if residual != 0 {
                    return Ok(None);
                }
            }
        }
    }

    let mut x = vec![0i128; k];
    for (c, yc) in y.iter().enumerate() {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = add(*xi, mul(u[c][i], *yc)?)?;
        }
    }
    for r in 0..rows {
        let mut acc = 0i128;
        for (c, xc) in x.iter().enumerate() {
            acc = add(acc, mul(columns[c][r], *xc)?)?;
        }
        assert_eq!(acc, target[r], "integer solve failed verification");
    }
    Ok(Some(x))
}

/// Rational front end: clears denominators, then solves over the integers.
pub fn solve_rational_combination(
    columns: &[Vec<Rational64>],
    target: &[Rational64],
) -> Result<Option<Vec<i64>>, CrystalError> {
    let denom = columns
        .iter()
        .flatten()
        .chain(target)
        .fold(1i64, |acc, q| acc.lcm(q.denom()));
    let scale = |q: &Rational64| -> Result<i128, CrystalError> {
        let v = mul(i128::from(*q.numer()), i128::from(denom / q.denom()))?;
        Ok(v)
    };
    let int_cols = columns
        .iter()
        .map(|c| c.iter().map(scale).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let int_target = target.iter().map(scale).collect::<Result<Vec<_>, _>>()?;
    match solve_integer_system(&int_cols, &int_target)? {
        None => Ok(None),
        Some(x) => x
            .into_iter()
            .map(|v| i64::try_from(v).map_err(|_| overflow()))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_gcd_combination() {
        let cols = vec![vec![6], vec![10], vec![15]];
        let x = solve_integer_system(&cols, &[1]).unwrap().unwrap();
        assert_eq!(6 * x[0] + 10 * x[1] + 15 * x[2], 1);
        assert!(solve_integer_system(&[vec![4], vec![6]], &[3]).unwrap().is_none());
    }

    #[test]
    fn detects_inconsistent_rows() {
        let cols = vec![vec![1, 1], vec![2, 2]];
        assert!(solve_integer_system(&cols, &[1, 2]).unwrap().is_none());
        assert!(solve_integer_system(&cols, &[3, 3]).unwrap().is_some());
    }

    #[test]
    fn empty_span() {
        assert_eq!(solve_integer_system(&[], &[0, 0]).unwrap(), Some(vec![]));
        assert!(solve_integer_system(&[], &[0, 1]).unwrap().is_none());
    }

    #[test]
    fn rational_lattice() {
        let half = Rational64::new(1, 2);
        let cols = vec![vec![half]];
        assert_eq!(
            solve_rational_combination(&cols, &[Rational64::new(-3, 2)]).unwrap(),
            Some(vec![-3])
        );
        assert!(solve_rational_combination(&cols, &[Rational64::new(1, 4)])
            .unwrap()
            .is_none());
    }
}
