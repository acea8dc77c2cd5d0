//! Torsion-freeness certificates and the odd-involution decision.
//!
//! An element of finite order squares to a translation of finite order, hence
//! to the identity, so both questions reduce to solving `α² = id`. For the
//! normal form this is constraint propagation over sign patterns: `α² = id`
//! forces `cᵢ = 0` wherever `sᵢ = +1`, while the sign rule ties `sᵢ` to the
//! integrality of `c_{i−1}`.

use serde::{Deserialize, Serialize};

use super::affine::{AffineMap, ElementOrder, Sign};
use super::gamma::GammaElement;
use super::CrystalError;

/// A linear constraint on the translation part. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum Constraint {
    Zero {
        coord: usize,
    },
    Integral {
        coord: usize,
    },
    NonIntegral {
        coord: usize,
    },
    /// `tᵢ = value` for a lattice translation `t` (generated groups).
    LatticeCoordinate {
        coord: usize,
        value: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `s_source = +1` and `α² = id` give `c_source = 0`.
    Involution,
    /// The sign rule at `source` fixes the integrality of `c_{source−1}`.
    SignRule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub rule: Rule,
    pub source: usize,
    pub derived: Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Steps `zero_step` and `non_integral_step` of the chain disagree about `coord`.
    Contradiction {
        coord: usize,
        zero_step: usize,
        non_integral_step: usize,
    },
    /// The chain forces `c = 0`: only the identity has this pattern.
    Identity,
    /// The lattice system has no integer solution.
    NoLatticeSolution,
    /// An explicit element of order two.
    Counterexample { element: AffineMap, odd: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub pattern: Vec<Sign>,
    /// Declared parity of the coset (generated groups only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<u8>,
    pub constraints: Vec<Constraint>,
    pub chain: Vec<ChainStep>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    TorsionFree,
    Torsion { witness: AffineMap },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    NormalForm,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionCertificate {
    pub dim: usize,
    pub group: GroupKind,
    pub entries: Vec<PatternEntry>,
    pub verdict: Verdict,
}

impl TorsionCertificate {
    pub fn is_torsion_free(&self) -> bool {
        self.verdict == Verdict::TorsionFree
    }

    /// Re-checks every step of a normal-form certificate against its sign
    /// pattern and confirms the patterns cover all `2^{n−1}` admissible ones.
    /// Generated-group entries are re-checked by squaring the counterexample.
    pub fn replay(&self) -> Result<(), CrystalError> {
        let fail = |msg: String| Err(CrystalError::CertificateReplay(msg));
        match self.group {
            GroupKind::NormalForm => {
                let mut seen: Vec<Vec<Sign>> = self.entries.iter().map(|e| e.pattern.clone()).collect();
                seen.sort();
                seen.dedup();
                let mut expected = admissible_patterns(self.dim);
                expected.sort();
                if seen != expected || self.entries.len() != expected.len() {
                    return fail(format!("patterns do not cover the {} admissible ones", expected.len()));
                }
                for entry in &self.entries {
                    replay_normal_form_entry(entry)?;
                }
                if self.verdict != Verdict::TorsionFree {
                    return fail("normal-form verdict must be torsion-free".into());
                }
            }
            GroupKind::Generated => {
                let mut witness = None;
                for entry in &self.entries {
                    if let Outcome::Counterexample { element, .. } = &entry.outcome {
                        if element.is_identity() || !element.compose(element)?.is_identity() {
                            return fail(format!("{element} is not an element of order two"));
                        }
                        if element.signs() != entry.pattern {
                            return fail(format!("{element} does not have the entry's pattern"));
                        }
                        witness.get_or_insert(element.clone());
                    }
                }
                let expected = match witness {
                    None => Verdict::TorsionFree,
                    Some(w) => Verdict::Torsion { witness: w },
                };
                if expected != self.verdict {
                    return fail("verdict does not match entries".into());
                }
            }
        }
        Ok(())
    }
}

/// All sign patterns with `s₁ = +1`, in binary order of the remaining slots.
pub fn admissible_patterns(dim: usize) -> Vec<Vec<Sign>> {
    (0u64..1 << (dim - 1))
        .map(|mask| {
            (0..dim)
                .map(|i| {
                    if i > 0 && mask >> (i - 1) & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                })
                .collect()
        })
        .collect()
}

fn forced_constraints(pattern: &[Sign]) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (i, s) in pattern.iter().enumerate() {
        if s.is_plus() {
            out.push(Constraint::Zero { coord: i + 1 });
        }
        if i > 0 {
            out.push(sign_rule_fact(pattern, i));
        }
    }
    out
}

// sign rule at 0-based slot i ≥ 1, about coordinate i (1-based) = slot i−1
fn sign_rule_fact(pattern: &[Sign], i: usize) -> Constraint {
    if pattern[i].is_plus() {
        Constraint::Integral { coord: i }
    } else {
        Constraint::NonIntegral { coord: i }
    }
}

/// Propagates constraints from `s₁ = +1` upward, stopping at the first conflict.
fn propagate(pattern: &[Sign]) -> PatternEntry {
    let n = pattern.len();
    let mut chain: Vec<ChainStep> = Vec::new();
    let mut zero_at: Vec<Option<usize>> = vec![None; n];
    let mut non_integral_at: Vec<Option<usize>> = vec![None; n];
    let conflict = |zero_at: &[Option<usize>], ni: &[Option<usize>], i: usize| match (zero_at[i], ni[i]) {
        (Some(z), Some(x)) => Some(Outcome::Contradiction {
            coord: i + 1,
            zero_step: z,
            non_integral_step: x,
        }),
        _ => None,
    };
    for i in 0..n {
        if pattern[i].is_plus() {
            zero_at[i] = Some(chain.len());
            chain.push(ChainStep {
                rule: Rule::Involution,
                source: i + 1,
                derived: Constraint::Zero { coord: i + 1 },
            });
            if let Some(outcome) = conflict(&zero_at, &non_integral_at, i) {
                return entry(pattern, chain, outcome);
            }
        }
        if i + 1 < n {
            let fact = sign_rule_fact(pattern, i + 1);
            if matches!(fact, Constraint::NonIntegral { .. }) {
                non_integral_at[i] = Some(chain.len());
            }
            chain.push(ChainStep {
                rule: Rule::SignRule,
                source: i + 2,
                derived: fact,
            });
            if let Some(outcome) = conflict(&zero_at, &non_integral_at, i) {
                return entry(pattern, chain, outcome);
            }
        }
    }
    // No clash: realize the constraints with the smallest values and check the result.
    let twice: Vec<i64> = (0..n)
        .map(|i| i64::from(zero_at[i].is_none() && non_integral_at[i].is_some()))
        .collect();
    let candidate = GammaElement::from_twice(&twice).expect("positive dimension");
    let outcome = if candidate.is_identity() && zero_at.iter().all(Option::is_some) {
        Outcome::Identity
    } else {
        assert_eq!(candidate.signs(), pattern, "realized element has the wrong pattern");
        assert_eq!(candidate.element_order(), ElementOrder::Two);
        Outcome::Counterexample {
            odd: candidate.is_odd(),
            element: candidate.to_affine(),
        }
    };
    entry(pattern, chain, outcome)
}

fn entry(pattern: &[Sign], chain: Vec<ChainStep>, outcome: Outcome) -> PatternEntry {
    PatternEntry {
        pattern: pattern.to_vec(),
        parity: None,
        constraints: forced_constraints(pattern),
        chain,
        outcome,
    }
}

fn replay_normal_form_entry(entry: &PatternEntry) -> Result<(), CrystalError> {
    let fail = |msg: String| Err(CrystalError::CertificateReplay(msg));
    let pattern = &entry.pattern;
    let n = pattern.len();
    if n == 0 || !pattern[0].is_plus() {
        return fail("pattern must start with +1".into());
    }
    let forced = forced_constraints(pattern);
    if entry.constraints != forced {
        return fail(format!("constraint list mismatch for {pattern:?}"));
    }
    for (k, step) in entry.chain.iter().enumerate() {
        let ok = match step.rule {
            Rule::Involution => {
                step.source >= 1
                    && step.source <= n
                    && pattern[step.source - 1].is_plus()
                    && step.derived == Constraint::Zero { coord: step.source }
            }
            Rule::SignRule => {
                step.source >= 2 && step.source <= n && step.derived == sign_rule_fact(pattern, step.source - 1)
            }
        };
        if !ok {
            return fail(format!("step {k} of {pattern:?} does not follow from its rule"));
        }
    }
    match &entry.outcome {
        Outcome::Contradiction {
            coord,
            zero_step,
            non_integral_step,
        } => {
            let zero = entry.chain.get(*zero_step).map(|s| &s.derived);
            let non = entry.chain.get(*non_integral_step).map(|s| &s.derived);
            if zero != Some(&Constraint::Zero { coord: *coord })
                || non != Some(&Constraint::NonIntegral { coord: *coord })
            {
                return fail(format!("contradiction in {pattern:?} is not a 0 / non-integer clash"));
            }
        }
        Outcome::Identity => {
            for coord in 1..=n {
                if !entry.chain.iter().any(|s| s.derived == Constraint::Zero { coord }) {
                    return fail(format!("coordinate {coord} of {pattern:?} not forced to zero"));
                }
            }
            let solution = GammaElement::identity(n);
            if solution.signs() != *pattern {
                return fail("forced solution has the wrong pattern".into());
            }
        }
        other => return fail(format!("unexpected outcome {other:?} in a normal-form certificate")),
    }
    Ok(())
}

/// Certificate that the deck group of dimension `dim` has no non-trivial torsion.
pub fn torsion_free_certificate(dim: usize) -> Result<TorsionCertificate, CrystalError> {
    if dim == 0 {
        return Err(CrystalError::ZeroDimension);
    }
    let entries: Vec<PatternEntry> = admissible_patterns(dim).iter().map(|p| propagate(p)).collect();
    let witness = entries.iter().find_map(|e| match &e.outcome {
        Outcome::Counterexample { element, .. } => Some(element.clone()),
        _ => None,
    });
    Ok(TorsionCertificate {
        dim,
        group: GroupKind::NormalForm,
        entries,
        verdict: match witness {
            None => Verdict::TorsionFree,
            Some(witness) => Verdict::Torsion { witness },
        },
    })
}

/// Decides whether some odd `α` satisfies `α² = id`.
///
/// Every pattern is propagated; patterns that survive force `c = 0`, and the
/// forced solution is kept only if it is odd and squares to the identity.
pub fn find_odd_involution(dim: usize) -> Result<Option<GammaElement>, CrystalError> {
    if dim == 0 {
        return Err(CrystalError::ZeroDimension);
    }
    for pattern in admissible_patterns(dim) {
        let entry = propagate(&pattern);
        if entry.outcome != Outcome::Identity {
            continue;
        }
        let candidate = GammaElement::identity(dim);
        debug_assert_eq!(candidate.signs(), pattern);
        if candidate.is_odd() && candidate.compose(&candidate)?.is_identity() {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}
