use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::crystal::{GammaElement, TaggedMap};
use crate::gf2::{BitMatrix, BitVector};

use super::delta::DeltaComplex;
use super::equivariant::EquivariantComplex;
use super::space::{FlatSpace, Resolution};
use super::ComplexError;

/// Which point of each vertex orbit (reduced into the fundamental box of the
/// lattice) serves as its lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftRule {
    #[default]
    LexLeast,
    LexGreatest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Maximum number of barycentric subdivisions.
    pub subdivision_cap: usize,
    /// Subdivide at least this often, even if the action is already regular.
    pub min_subdivisions: usize,
    pub lift_rule: LiftRule,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            subdivision_cap: 3,
            min_subdivisions: 0,
            lift_rule: LiftRule::LexLeast,
        }
    }
}

/// The group element attached to an edge `a → b`: it carries the lift of
/// `b` to the head of the edge lifted with its tail at the lift of `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeHolonomy {
    pub element: TaggedMap,
    /// Head minus tail of the lifted edge, in ticks.
    pub displacement: Vec<i64>,
}

/// A Δ-complex model of `Rⁿ/Γ` with lift data for every vertex and the
/// connecting group element of every edge.
#[derive(Debug, Clone)]
pub struct QuotientModel {
    space: FlatSpace,
    resolution: Resolution,
    scale: i64,
    subdivisions: usize,
    lift_rule: LiftRule,
    complex: DeltaComplex,
    vertex_lifts: Vec<Vec<i64>>,
    edges: Vec<EdgeHolonomy>,
}

/// Model of the deck-group quotient in dimension `dim` with default options.
pub fn build_quotient_model(dim: usize, resolution: Resolution) -> Result<QuotientModel, ComplexError> {
    if dim == 0 {
        return Err(ComplexError::InvalidInput("dimension must be positive".into()));
    }
    build_quotient_model_with(&FlatSpace::deck(dim)?, resolution, &BuildOptions::default())
}

pub fn build_quotient_model_with(
    space: &FlatSpace,
    resolution: Resolution,
    options: &BuildOptions,
) -> Result<QuotientModel, ComplexError> {
    if options.min_subdivisions > options.subdivision_cap {
        return Err(ComplexError::InvalidInput(format!(
            "at least {} subdivisions requested but the cap is {}",
            options.min_subdivisions, options.subdivision_cap
        )));
    }
    let mut cover = EquivariantComplex::triangulated_torus(space, resolution)?;
    for _ in 0..options.min_subdivisions {
        cover = cover.barycentric_subdivision()?;
    }
    loop {
        let regularity = cover.regularity();
        if regularity.is_regular() {
            break;
        }
        if cover.subdivisions() >= options.subdivision_cap {
            return Err(ComplexError::RegularityNotAchieved {
                cap: options.subdivision_cap,
                regularity,
            });
        }
        log::debug!("action not regular ({regularity:?}); subdividing");
        cover = cover.barycentric_subdivision()?;
    }
    let model = quotient(space.clone(), resolution, &cover, options.lift_rule)?;
    model.check_integrity()?;
    Ok(model)
}

fn quotient(
    space: FlatSpace,
    resolution: Resolution,
    cover: &EquivariantComplex,
    lift_rule: LiftRule,
) -> Result<QuotientModel, ComplexError> {
    let k_cover = cover.complex();
    let action = cover.action();
    let n = k_cover.dim();

    // orbit representative = least index in the orbit
    let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let count = k_cover.count(k);
        let rep_of: Vec<usize> = (0..count)
            .map(|i| *action.orbit(k, i).iter().min().expect("group is nonempty"))
            .collect();
        let level: Vec<usize> = (0..count).filter(|&i| rep_of[i] == i).collect();
        let mut class = vec![usize::MAX; count];
        for (q, &i) in level.iter().enumerate() {
            class[i] = q;
        }
        let class: Vec<usize> = rep_of.iter().map(|&r| class[r]).collect();
        class_of.push(class);
        reps.push(level);
    }

    let mut simplices = Vec::with_capacity(n + 1);
    let mut faces = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut s_level = Vec::with_capacity(reps[k].len());
        let mut f_level = Vec::with_capacity(reps[k].len());
        for &i in &reps[k] {
            s_level.push(
                k_cover
                    .vertices(k, i)
                    .iter()
                    .map(|&v| class_of[0][v])
                    .collect::<Vec<_>>(),
            );
            f_level.push(if k == 0 {
                Vec::new()
            } else {
                k_cover.faces(k, i).iter().map(|&f| class_of[k - 1][f]).collect()
            });
        }
        simplices.push(s_level);
        faces.push(f_level);
    }
    let complex = DeltaComplex::new(simplices, faces)?;

    let chosen: Vec<usize> = reps[0]
        .iter()
        .map(|&v| {
            let orbit = action.orbit(0, v);
            let by_position = |a: &&usize, b: &&usize| cover.positions[**a].cmp(&cover.positions[**b]);
            let pick = match lift_rule {
                LiftRule::LexLeast => orbit.iter().min_by(by_position),
                LiftRule::LexGreatest => orbit.iter().max_by(by_position),
            };
            *pick.expect("group is nonempty")
        })
        .collect();
    let vertex_lifts: Vec<Vec<i64>> = chosen.iter().map(|&v| cover.positions[v].clone()).collect();

    let mut edges = Vec::with_capacity(reps.get(1).map_or(0, Vec::len));
    for (q, &e) in reps.get(1).into_iter().flatten().enumerate() {
        let (tail, head) = complex.edge_endpoints(q);
        let member = action
            .orbit(1, e)
            .into_iter()
            .find(|&m| k_cover.vertices(1, m)[0] == chosen[tail])
            .ok_or_else(|| ComplexError::Integrity(format!("edge {q} has no lift at its tail")))?;
        let lift = &cover.lifts[1][member];
        let (p0, p1) = (&lift[0], &lift[1]);
        let tail_pos = &vertex_lifts[tail];
        for ((a, b), period) in p0.iter().zip(tail_pos).zip(&cover.period_ticks) {
            if (a - b) % period != 0 {
                return Err(ComplexError::Integrity(format!(
                    "edge {q}: lifted tail is not a lattice translate"
                )));
            }
        }
        let displacement: Vec<i64> = p1.iter().zip(p0).map(|(b, a)| b - a).collect();
        let head_at: Vec<i64> = tail_pos.iter().zip(&displacement).map(|(t, d)| t + d).collect();
        let element = space
            .locate(&vertex_lifts[head], &head_at, cover.scale)
            .ok_or_else(|| ComplexError::Integrity(format!("edge {q}: head lift is in the wrong orbit")))?;
        edges.push(EdgeHolonomy { element, displacement });
    }

    Ok(QuotientModel {
        space,
        resolution,
        scale: cover.scale,
        subdivisions: cover.subdivisions(),
        lift_rule,
        complex,
        vertex_lifts,
        edges,
    })
}

impl QuotientModel {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &FlatSpace {
        &self.space
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    /// Ticks per unit length; finer than the resolution after subdivision.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn lift_rule(&self) -> LiftRule {
        self.lift_rule
    }

    pub fn complex(&self) -> &DeltaComplex {
        &self.complex
    }

    /// Lift of vertex `v`, in ticks.
    pub fn vertex_lift_ticks(&self, v: usize) -> &[i64] {
        &self.vertex_lifts[v]
    }

    pub fn vertex_lift(&self, v: usize) -> Vec<Rational64> {
        self.vertex_lifts[v]
            .iter()
            .map(|&x| Rational64::new(x, self.scale))
            .collect()
    }

    pub fn edge_holonomy(&self, e: usize) -> &EdgeHolonomy {
        &self.edges[e]
    }

    /// The connecting element of an edge in normal form, for deck-group models.
    pub fn connecting_element(&self, e: usize) -> Option<GammaElement> {
        if !self.space.is_deck_group() {
            return None;
        }
        GammaElement::from_affine(&self.edges[e].element.map).ok()
    }

    /// Parity of each edge's connecting element.
    pub fn edge_parities(&self) -> BitVector {
        BitVector::from_bits(self.edges.iter().map(|e| e.element.odd))
    }

    /// Checks the lift data: each connecting element moves the head lift to
    /// the lifted head, parities agree with the group, and elements compose
    /// around every triangle.
    pub fn check_integrity(&self) -> Result<(), ComplexError> {
        let fail = |msg: String| Err(ComplexError::Integrity(msg));
        for (e, hol) in self.edges.iter().enumerate() {
            let (tail, head) = self.complex.edge_endpoints(e);
            let image = hol.element.map.apply(&self.vertex_lift(head))?;
            let expected: Vec<Rational64> = self.vertex_lifts[tail]
                .iter()
                .zip(&hol.displacement)
                .map(|(t, d)| Rational64::new(t + d, self.scale))
                .collect();
            if image != expected {
                return fail(format!("edge {e}: connecting element misses the lifted head"));
            }
            if self.space.parity_of(&hol.element.map) != Some(hol.element.odd) {
                return fail(format!("edge {e}: parity disagrees with the group"));
            }
            if self.space.is_deck_group() {
                let gamma = GammaElement::from_affine(&hol.element.map)?;
                if gamma.is_odd() != hol.element.odd {
                    return fail(format!("edge {e}: parity disagrees with the normal form"));
                }
            }
        }
        if self.complex.dim() >= 2 {
            for t in 0..self.complex.count(2) {
                let e12 = self.complex.face(2, t, 0);
                let e02 = self.complex.face(2, t, 1);
                let e01 = self.complex.face(2, t, 2);
                let composed = self.edges[e01].element.compose(&self.edges[e12].element)?;
                if composed != self.edges[e02].element {
                    return fail(format!("triangle {t}: connecting elements do not compose"));
                }
            }
        }
        Ok(())
    }
}

/// Edge parities after an integrity check; a representative of `w₁`.
pub fn holonomy_cocycle(model: &QuotientModel) -> Result<BitVector, ComplexError> {
    model.check_integrity()?;
    Ok(model.edge_parities())
}

pub fn boundary_matrices(complex: &DeltaComplex) -> Vec<BitMatrix> {
    complex.boundary_matrices()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_model() {
        let m = build_quotient_model(1, Resolution::QUARTER).unwrap();
        assert_eq!(m.complex().cells_per_dim(), vec![2, 2]);
        assert_eq!(m.complex().euler_characteristic(), 0);
        let w = holonomy_cocycle(&m).unwrap();
        assert_eq!(w.count_ones() % 2, 1);
        assert_eq!(m.complex().boundary_matrix(1).rank(), 1);
    }

    #[test]
    fn klein_model() {
        let m = build_quotient_model(2, Resolution::QUARTER).unwrap();
        assert_eq!(m.complex().euler_characteristic(), 0);
        assert!(m.complex().is_closed_pseudomanifold());
        assert_eq!(m.subdivisions(), 0);
        let w = holonomy_cocycle(&m).unwrap();
        for t in 0..m.complex().count(2) {
            let sum = m.complex().faces(2, t).iter().filter(|&&e| w.get(e)).count();
            assert_eq!(sum % 2, 0);
        }
    }

    #[test]
    fn identity_edges_are_even() {
        let m = build_quotient_model(2, Resolution::QUARTER).unwrap();
        for e in 0..m.complex().count(1) {
            let g = m.connecting_element(e).unwrap();
            if g.is_identity() {
                assert!(!m.edge_parities().get(e));
            }
        }
    }

    #[test]
    fn reflected_circle_fails_loudly() {
        let err = build_quotient_model_with(
            &FlatSpace::reflected_circle(),
            Resolution::QUARTER,
            &BuildOptions::default(),
        );
        assert!(matches!(err, Err(ComplexError::RegularityNotAchieved { cap: 3, .. })));
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(matches!(
            build_quotient_model(0, Resolution::QUARTER),
            Err(ComplexError::InvalidInput(_))
        ));
    }
}
