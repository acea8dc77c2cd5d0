//! Mod-2 cohomology of Δ-complexes: Betti numbers, cup products on ordered
//! simplices, coboundary tests, and the height of `w₁`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_rational::Rational64;

use crate::complex::{holonomy_cocycle, ComplexError, DeltaComplex, QuotientModel};
use crate::crystal::TaggedMap;
use crate::gf2::{BitMatrix, BitVector, Gf2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("cochain of degree {degree} has {got} values but the complex has {expected} simplices")]
    LengthMismatch { degree: usize, expected: usize, got: usize },
    #[error("expected a cochain of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("cochain of degree {degree} is not a cocycle")]
    NotCocycle { degree: usize },
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("path lifting disagrees with the edge parities: {0}")]
    LiftMismatch(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A `k`-cochain: one bit per `k`-simplex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cochain {
    degree: usize,
    values: BitVector,
}

impl Cochain {
    pub fn new(complex: &DeltaComplex, degree: usize, values: BitVector) -> Result<Self, CohomologyError> {
        let expected = complex.count(degree);
        if values.len() != expected {
            return Err(CohomologyError::LengthMismatch {
                degree,
                expected,
                got: values.len(),
            });
        }
        Ok(Self { degree, values })
    }

    pub fn zero(complex: &DeltaComplex, degree: usize) -> Self {
        Self {
            degree,
            values: BitVector::zeros(complex.count(degree)),
        }
    }

    /// The unit: `1` on every vertex.
    pub fn unit(complex: &DeltaComplex) -> Self {
        Self {
            degree: 0,
            values: BitVector::ones(complex.count(0)),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &BitVector {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_zero()
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, CohomologyError> {
        if self.degree != other.degree || self.values.len() != other.values.len() {
            return Err(CohomologyError::LengthMismatch {
                degree: other.degree,
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(Cochain {
            degree: self.degree,
            values: self.values.xor(&other.values),
        })
    }
}

pub fn coboundary(complex: &DeltaComplex, u: &Cochain) -> Result<Cochain, CohomologyError> {
    let values = complex.boundary_matrix(u.degree + 1).mul_vec(&u.values)?;
    Ok(Cochain {
        degree: u.degree + 1,
        values,
    })
}

pub fn is_cocycle(complex: &DeltaComplex, u: &Cochain) -> Result<bool, CohomologyError> {
    Ok(coboundary(complex, u)?.is_zero())
}

fn require_cocycle(complex: &DeltaComplex, u: &Cochain) -> Result<(), CohomologyError> {
    if is_cocycle(complex, u)? {
        Ok(())
    } else {
        Err(CohomologyError::NotCocycle { degree: u.degree })
    }
}

/// `(u ⌣ v)(σ) = u(front p-face of σ) · v(back q-face of σ)`. Both inputs
/// must be cocycles.
pub fn cup(complex: &DeltaComplex, u: &Cochain, v: &Cochain) -> Result<Cochain, CohomologyError> {
    require_cocycle(complex, u)?;
    require_cocycle(complex, v)?;
    let (p, q) = (u.degree, v.degree);
    let k = p + q;
    let mut values = BitVector::zeros(complex.count(k));
    for s in 0..complex.count(k) {
        if u.values.get(complex.front_face(k, s, p)) && v.values.get(complex.back_face(k, s, q)) {
            values.set(s, true);
        }
    }
    Ok(Cochain { degree: k, values })
}

/// A cochain `b` with `δb = u`, if one exists.
pub fn coboundary_preimage(complex: &DeltaComplex, u: &Cochain) -> Result<Option<Cochain>, CohomologyError> {
    if u.degree == 0 {
        return Ok(u.is_zero().then(|| Cochain::zero(complex, 0)));
    }
    // rows of ∂ₖᵀ are the coboundaries of the (k−1)-simplices
    let rows = complex.boundary_matrix(u.degree).transpose();
    let x = rows.solve_in_span(&u.values)?;
    Ok(x.map(|values| Cochain {
        degree: u.degree - 1,
        values,
    }))
}

pub fn is_coboundary(complex: &DeltaComplex, u: &Cochain) -> Result<bool, CohomologyError> {
    Ok(coboundary_preimage(complex, u)?.is_some())
}

/// `bₖ = Nₖ − rank ∂ₖ₊₁ − rank ∂ₖ` for `k = 0..=dim`.
pub fn betti_mod2(complex: &DeltaComplex) -> Vec<usize> {
    let n = complex.dim();
    let ranks: Vec<usize> = (0..=n + 1).map(|k| complex.boundary_matrix(k).rank()).collect();
    (0..=n).map(|k| complex.count(k) - ranks[k + 1] - ranks[k]).collect()
}

/// Cocycle representatives of a basis of `Hᵏ`.
pub fn cohomology_basis(complex: &DeltaComplex, k: usize) -> Result<Vec<Cochain>, CohomologyError> {
    let cocycles = complex.boundary_matrix(k + 1).transpose().kernel_basis();
    let mut span: Vec<BitVector> = if k == 0 {
        Vec::new()
    } else {
        let coboundaries = complex.boundary_matrix(k).transpose();
        (0..coboundaries.rows()).map(|i| coboundaries.row(i).clone()).collect()
    };
    let mut basis = Vec::new();
    for z in cocycles {
        let current = BitMatrix::from_rows(complex.count(k), span.clone())?;
        if !current.in_row_space(&z)? {
            span.push(z.clone());
            basis.push(Cochain { degree: k, values: z });
        }
    }
    Ok(basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerVerdict {
    pub k: usize,
    pub is_coboundary: bool,
}

/// Cup powers of `w₁` and the resulting height.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightReport {
    pub dim: usize,
    pub betti: Vec<usize>,
    pub height: usize,
    pub powers: Vec<PowerVerdict>,
    /// `⟨w₁ⁿ, sum of all n-simplices⟩`.
    pub pairing: u8,
}

impl HeightReport {
    /// Once a power vanishes, every higher power does.
    pub fn is_monotone(&self) -> bool {
        self.powers
            .windows(2)
            .all(|w| !w[0].is_coboundary || w[1].is_coboundary)
    }

    /// The top power is nonzero exactly when it pairs to 1 with the fundamental cycle.
    pub fn pairing_agrees(&self) -> bool {
        self.powers
            .iter()
            .find(|p| p.k == self.dim)
            .is_some_and(|p| p.is_coboundary == (self.pairing == 0))
    }
}

pub fn sw_height(model: &QuotientModel) -> Result<HeightReport, CohomologyError> {
    let complex = model.complex();
    let w = Cochain::new(complex, 1, holonomy_cocycle(model)?)?;
    height_of(complex, &w)
}

/// Height of an arbitrary 1-cocycle, with powers up to `dim + 1`.
pub fn height_of(complex: &DeltaComplex, w: &Cochain) -> Result<HeightReport, CohomologyError> {
    if w.degree != 1 {
        return Err(CohomologyError::WrongDegree {
            expected: 1,
            got: w.degree,
        });
    }
    require_cocycle(complex, w)?;
    let n = complex.dim();
    let mut powers = Vec::with_capacity(n + 1);
    let mut power = w.clone();
    let mut pairing = 0;
    for k in 1..=n + 1 {
        if k > 1 {
            power = cup(complex, &power, w)?;
        }
        if k == n {
            pairing = (power.values.count_ones() % 2) as u8;
        }
        powers.push(PowerVerdict {
            k,
            is_coboundary: is_coboundary(complex, &power)?,
        });
    }
    let height = powers
        .iter()
        .filter(|p| !p.is_coboundary)
        .map(|p| p.k)
        .max()
        .unwrap_or(0);
    Ok(HeightReport {
        dim: n,
        betti: betti_mod2(complex),
        height,
        powers,
        pairing,
    })
}

/// One step of an edge path: along `edge` from tail to head, or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopStep {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLoop {
    pub base: usize,
    pub steps: Vec<LoopStep>,
}

impl EdgeLoop {
    pub fn constant(base: usize) -> Self {
        Self {
            base,
            steps: Vec::new(),
        }
    }

    /// Traverse `self` and then `other`; both must start at the same vertex.
    pub fn concat(&self, other: &EdgeLoop) -> Option<EdgeLoop> {
        (self.base == other.base).then(|| EdgeLoop {
            base: self.base,
            steps: self.steps.iter().chain(&other.steps).copied().collect(),
        })
    }

    /// Vertices visited, starting and ending at the base when closed.
    pub fn vertices(&self, complex: &DeltaComplex) -> Result<Vec<usize>, CohomologyError> {
        if self.base >= complex.count(0) {
            return Err(CohomologyError::InvalidLoop(format!("no vertex {}", self.base)));
        }
        let mut at = self.base;
        let mut visited = vec![at];
        for (i, step) in self.steps.iter().enumerate() {
            if step.edge >= complex.count(1) {
                return Err(CohomologyError::InvalidLoop(format!("step {i}: no edge {}", step.edge)));
            }
            let (tail, head) = complex.edge_endpoints(step.edge);
            let (from, to) = if step.forward { (tail, head) } else { (head, tail) };
            if from != at {
                return Err(CohomologyError::InvalidLoop(format!(
                    "step {i}: edge {} does not start at vertex {at}",
                    step.edge
                )));
            }
            at = to;
            visited.push(at);
        }
        Ok(visited)
    }
}

/// Parity of a closed edge loop: the sum of its edge parities, confirmed by
/// lifting the loop to `Rⁿ` and locating the deck element joining its ends.
pub fn loop_parity(model: &QuotientModel, path: &EdgeLoop) -> Result<u8, CohomologyError> {
    let complex = model.complex();
    let visited = path.vertices(complex)?;
    if visited.last() != Some(&path.base) {
        return Err(CohomologyError::InvalidLoop("path does not return to its base".into()));
    }
    let parities = model.edge_parities();
    let sum = path.steps.iter().filter(|s| parities.get(s.edge)).count() % 2;
    let lifted = lift_loop_parity(model, path)?;
    if lifted != sum as u8 {
        return Err(CohomologyError::LiftMismatch(format!(
            "edge sum {sum}, lifted endpoint parity {lifted}"
        )));
    }
    Ok(lifted)
}

fn to_ticks(x: &[Rational64], scale: i64) -> Result<Vec<i64>, CohomologyError> {
    x.iter()
        .map(|v| {
            let t = *v * scale;
            t.is_integer()
                .then(|| t.to_integer())
                .ok_or_else(|| CohomologyError::LiftMismatch(format!("lifted point {v} is off the grid")))
        })
        .collect()
}

/// Walks the loop in `Rⁿ`, using only vertex lifts, edge displacements and
/// point location, and returns the parity of the element that carries the
/// base lift to the endpoint.
fn lift_loop_parity(model: &QuotientModel, path: &EdgeLoop) -> Result<u8, CohomologyError> {
    let complex = model.complex();
    let space = model.space();
    let scale = model.scale();
    let locate = |from: &[i64], to: &[i64]| -> Result<TaggedMap, CohomologyError> {
        space
            .locate(from, to, scale)
            .ok_or_else(|| CohomologyError::LiftMismatch("lifted points lie in different orbits".into()))
    };
    let shifted = |v: usize, d: &[i64], sign: i64| -> Vec<i64> {
        model
            .vertex_lift_ticks(v)
            .iter()
            .zip(d)
            .map(|(x, y)| x + sign * y)
            .collect()
    };
    let mut at = path.base;
    let mut x = model.vertex_lift(at);
    for step in &path.steps {
        let (tail, head) = complex.edge_endpoints(step.edge);
        let d = &model.edge_holonomy(step.edge).displacement;
        // frame: the element placing the current vertex's lift at x
        let frame = locate(model.vertex_lift_ticks(at), &to_ticks(&x, scale)?)?;
        let local = if step.forward {
            at = head;
            ratios(&shifted(tail, d, 1), scale)
        } else {
            // the edge lifted at its tail puts the head at tail + d; undo that placement
            let placed = locate(model.vertex_lift_ticks(head), &shifted(tail, d, 1))?;
            at = tail;
            placed
                .map
                .inverse()
                .apply(&model.vertex_lift(tail))
                .map_err(ComplexError::from)?
        };
        x = frame.map.apply(&local).map_err(ComplexError::from)?;
    }
    let end = locate(model.vertex_lift_ticks(path.base), &to_ticks(&x, scale)?)?;
    Ok(u8::from(end.odd))
}

fn ratios(ticks: &[i64], scale: i64) -> Vec<Rational64> {
    ticks.iter().map(|&t| Rational64::new(t, scale)).collect()
}

/// Whether the height of the higher model exceeds that of the lower by one.
/// The two models are built independently by the caller.
pub fn verify_height_shift(low: &QuotientModel, high: &QuotientModel) -> Result<bool, CohomologyError> {
    Ok(sw_height(high)?.height == sw_height(low)?.height + 1)
}
