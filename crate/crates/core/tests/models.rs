mod common;

use nontidy::cohomology::{betti_mod2, coboundary_preimage, sw_height, Cochain};
use nontidy::complex::{
    build_quotient_model, build_quotient_model_with, export_text, holonomy_cocycle, BuildOptions, ComplexError,
    ComplexSummary, DeltaComplex, FlatSpace, LiftRule, QuotientModel, Resolution,
};

fn all_models() -> Vec<&'static QuotientModel> {
    (1..=3)
        .map(common::model)
        .chain((1..=3).map(common::fine_model))
        .collect()
}

fn boundary_squares_vanish(k: &DeltaComplex) -> bool {
    (2..=k.dim()).all(|d| k.boundary_matrix(d).mul(&k.boundary_matrix(d - 1)).unwrap().is_zero())
}

#[test]
fn circle_model_counts() {
    let m = common::model(1);
    assert_eq!(m.complex().cells_per_dim(), vec![2, 2]);
    assert_eq!(m.complex().euler_characteristic(), 0);
    assert_eq!(m.complex().boundary_matrix(1).rank(), 1);
    assert!(m.complex().boundary_matrix(0).is_zero());
}

#[test]
fn klein_model_is_a_closed_surface() {
    let m = common::model(2);
    assert_eq!(m.complex().euler_characteristic(), 0);
    assert!(m.complex().is_closed_pseudomanifold());
    assert!(boundary_squares_vanish(m.complex()));
}

#[test]
fn three_dimensional_model_is_a_closed_manifold() {
    let m = common::model(3);
    assert_eq!(m.complex().euler_characteristic(), 0);
    assert!(m.complex().is_closed_pseudomanifold());
}

/// In a closed 3-manifold the link of every edge is a circle: each triangle
/// around the edge meets exactly two others through tetrahedra.
#[test]
fn edge_links_are_circles_in_dimension_three() {
    let k = common::model(3).complex();
    for e in 0..k.count(1) {
        // triangles around e, glued along tetrahedra
        let triangles: Vec<usize> = (0..k.count(2)).filter(|&t| k.faces(2, t).contains(&e)).collect();
        assert!(triangles.len() >= 3, "edge {e} lies in {} triangles", triangles.len());
        let mut degree = vec![0usize; triangles.len()];
        for tet in 0..k.count(3) {
            let local: Vec<usize> = k
                .faces(3, tet)
                .iter()
                .filter_map(|f| triangles.iter().position(|t| t == f))
                .collect();
            for &p in &local {
                degree[p] += local.len() - 1;
            }
        }
        assert!(degree.iter().all(|&d| d == 2), "edge {e} link degrees {degree:?}");
    }
}

#[test]
fn every_model_satisfies_the_structural_invariants() {
    for m in all_models() {
        let k = m.complex();
        assert!(boundary_squares_vanish(k), "dim {}", m.dim());
        assert_eq!(k.euler_characteristic(), 0, "dim {}", m.dim());
        assert!(k.is_closed_pseudomanifold(), "dim {}", m.dim());
        let w = holonomy_cocycle(m).unwrap();
        assert!(
            k.boundary_matrix(2).mul_vec(&w).unwrap().is_zero(),
            "δw₁ ≠ 0 in dim {}",
            m.dim()
        );
        m.check_integrity().unwrap();
    }
}

#[test]
fn circle_loop_is_odd() {
    let w = holonomy_cocycle(common::model(1)).unwrap();
    assert_eq!(w.count_ones() % 2, 1);
}

#[test]
fn klein_triangles_have_even_parity_sums() {
    let m = common::model(2);
    let w = holonomy_cocycle(m).unwrap();
    for t in 0..m.complex().count(2) {
        let odd = m.complex().faces(2, t).iter().filter(|&&e| w.get(e)).count();
        assert_eq!(odd % 2, 0, "triangle {t}");
    }
}

#[test]
fn connecting_elements_match_parities() {
    for n in 1..=3 {
        let m = common::model(n);
        for e in 0..m.complex().count(1) {
            let g = m.connecting_element(e).expect("deck-group model");
            assert_eq!(g.is_odd(), m.edge_parities().get(e));
        }
    }
}

#[test]
fn lift_rule_changes_w1_by_a_coboundary() {
    for n in 1..=3 {
        let least = common::model(n);
        let options = BuildOptions {
            lift_rule: LiftRule::LexGreatest,
            ..BuildOptions::default()
        };
        let greatest = build_quotient_model_with(&FlatSpace::deck(n).unwrap(), Resolution::QUARTER, &options).unwrap();
        assert_eq!(least.complex(), greatest.complex());
        let k = least.complex();
        let a = holonomy_cocycle(least).unwrap();
        let b = holonomy_cocycle(&greatest).unwrap();
        if n == 1 {
            // trivial point group: one lift per orbit
            assert_eq!(a, b);
            continue;
        }
        assert_ne!(
            (0..k.count(0))
                .map(|v| least.vertex_lift_ticks(v).to_vec())
                .collect::<Vec<_>>(),
            (0..k.count(0))
                .map(|v| greatest.vertex_lift_ticks(v).to_vec())
                .collect::<Vec<_>>(),
            "lift rules should pick different points in dim {n}"
        );
        let diff = Cochain::new(k, 1, a.xor(&b)).unwrap();
        let potential = coboundary_preimage(k, &diff).unwrap();
        assert!(potential.is_some(), "lift change is not a coboundary in dim {n}");
    }
}

#[test]
fn resolution_does_not_change_betti_numbers_or_height() {
    for n in 1..=3 {
        let coarse = sw_height(common::model(n)).unwrap();
        let fine = sw_height(common::fine_model(n)).unwrap();
        assert_eq!(coarse.betti, fine.betti, "dim {n}");
        assert_eq!(coarse.height, fine.height, "dim {n}");
    }
}

#[test]
fn forced_subdivision_does_not_change_betti_numbers_or_height() {
    for n in 1..=3 {
        let options = BuildOptions {
            min_subdivisions: 1,
            ..BuildOptions::default()
        };
        let m = build_quotient_model_with(&FlatSpace::deck(n).unwrap(), Resolution::QUARTER, &options).unwrap();
        assert_eq!(m.subdivisions(), 1);
        assert_eq!(m.complex().euler_characteristic(), 0);
        assert!(m.complex().is_closed_pseudomanifold());
        let factorial: usize = (1..=n + 1).product();
        assert_eq!(m.complex().count(n), common::model(n).complex().count(n) * factorial);
        let report = sw_height(&m).unwrap();
        let reference = sw_height(common::model(n)).unwrap();
        assert_eq!(report.betti, reference.betti);
        assert_eq!(report.height, reference.height);
    }
}

#[test]
fn flat_torus_control() {
    let options = BuildOptions::default();
    for n in 1..=3 {
        let m = build_quotient_model_with(&FlatSpace::torus(n).unwrap(), Resolution::QUARTER, &options).unwrap();
        let k = m.complex();
        assert_eq!(k.euler_characteristic(), 0);
        assert!(holonomy_cocycle(&m).unwrap().is_zero());
        let binomial: Vec<usize> = (0..=n)
            .map(|j| (0..j).fold(1, |acc, i| acc * (n - i) / (i + 1)))
            .collect();
        assert_eq!(betti_mod2(k), binomial, "torus of dim {n}");
    }
}

#[test]
fn reflected_circle_never_becomes_regular() {
    let err = build_quotient_model_with(
        &FlatSpace::reflected_circle(),
        Resolution::QUARTER,
        &BuildOptions::default(),
    )
    .unwrap_err();
    match err {
        ComplexError::RegularityNotAchieved { cap, regularity } => {
            assert_eq!(cap, 3);
            assert!(regularity.fixed_vertices > 0);
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn half_grid_is_rejected() {
    let r = Resolution::from_denominator(2).unwrap();
    assert!(matches!(
        build_quotient_model(2, r),
        Err(ComplexError::IncompatibleResolution { .. })
    ));
}

#[test]
fn export_formats() {
    let m = common::model(2);
    let text = export_text(m);
    let cells = m.complex().cells_per_dim();
    for (k, count) in cells.iter().enumerate() {
        let prefix = format!("simplex {k} ");
        let lines: Vec<&str> = text.lines().filter(|l| l.starts_with(&prefix)).collect();
        assert_eq!(lines.len(), *count);
        assert!(lines.iter().all(|l| l.split_whitespace().count() == k + 3));
    }
    let holonomy: Vec<&str> = text.lines().filter(|l| l.starts_with("holonomy ")).collect();
    assert_eq!(holonomy.len(), cells[1]);
    let summary = ComplexSummary::of(m);
    let json = serde_json::to_string(&summary).unwrap();
    assert_eq!(
        json,
        format!(r#"{{"dim":2,"resolution":"1/4","cells_per_dim":{cells:?},"euler":0}}"#).replace(' ', "")
    );
    let back: ComplexSummary = serde_json::from_str(&json).unwrap();
    assert_eq!(back, summary);
}
