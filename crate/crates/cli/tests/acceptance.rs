//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p nontidy-cli --test acceptance`.

use std::collections::{HashMap, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nontidy::cohomology::{
    betti_mod2, coboundary, height_of, loop_parity, sw_height, verify_height_shift, Cochain, EdgeLoop, LoopStep,
};
use nontidy::complex::{build_quotient_model, holonomy_cocycle, QuotientModel, Resolution};
use nontidy::crystal::{
    coindex_one_witness, find_odd_involution, torsion_free_certificate, AffineMap, ElementOrder, GammaElement,
    GeneratedGroup, Sign, Verdict,
};
use nontidy::gf2::BitVector;
use nontidy_cli::{run_pipeline, Mode, PipelineConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn model(n: usize, r: Resolution) -> Result<QuotientModel, String> {
    build_quotient_model(n, r).map_err(|e| format!("dim {n} at {r}: {e}"))
}

fn height_equals_dimension() -> Outcome {
    let mut timings = Vec::new();
    for (n, budget) in [
        (1, Duration::from_secs(10)),
        (2, Duration::from_secs(10)),
        (3, Duration::from_secs(600)),
    ] {
        let start = Instant::now();
        let m = model(n, Resolution::QUARTER)?;
        let report = sw_height(&m).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(report.height == n, || format!("dim {n}: height {}", report.height))?;
        ensure(report.pairing_agrees(), || {
            format!("dim {n}: top pairing disagrees with the coboundary test")
        })?;
        ensure(elapsed < budget, || format!("dim {n}: {elapsed:?} exceeds {budget:?}"))?;
        timings.push(format!("n={n}: h={} in {:.1?}", report.height, elapsed));
    }
    Ok(timings.join(", "))
}

fn coindex_one() -> Outcome {
    let start = Instant::now();
    for n in 1..=8 {
        let found = find_odd_involution(n).map_err(|e| e.to_string())?;
        ensure(found.is_none(), || format!("dim {n}: odd involution {found:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("involution search took {elapsed:?}")
    })?;
    for n in 1..=8 {
        let w = coindex_one_witness(n).map_err(|e| e.to_string())?;
        let round_trip = GammaElement::from_affine(&w.to_affine()).map_err(|e| e.to_string())?;
        ensure(w.is_odd() && round_trip == w, || {
            format!("dim {n}: witness {w} is not a valid odd element")
        })?;
        let report = run_pipeline(&PipelineConfig {
            dim: n,
            resolution: Resolution::QUARTER,
            mode: Mode::GroupOnly,
        })
        .map_err(|e| e.to_string())?;
        ensure(report.conclusion == "coind = 1" && report.passed(), || {
            format!("dim {n}: report concludes {:?}", report.conclusion)
        })?;
    }
    Ok(format!(
        "no odd involution for n ≤ 8 ({elapsed:.1?}); odd witnesses validated"
    ))
}

fn torsion_free() -> Outcome {
    let mut patterns = 0;
    for n in 1..=8 {
        let cert = torsion_free_certificate(n).map_err(|e| e.to_string())?;
        ensure(cert.verdict == Verdict::TorsionFree, || {
            format!("dim {n}: verdict {:?}", cert.verdict)
        })?;
        ensure(cert.entries.len() == 1 << (n - 1), || {
            format!("dim {n}: {} entries", cert.entries.len())
        })?;
        cert.replay().map_err(|e| format!("dim {n}: {e}"))?;
        patterns += cert.entries.len();
    }
    let control = GeneratedGroup::reflection_control();
    let cert = control.torsion_certificate().map_err(|e| e.to_string())?;
    cert.replay().map_err(|e| format!("control: {e}"))?;
    let witness = match &cert.verdict {
        Verdict::Torsion { witness } => witness.clone(),
        Verdict::TorsionFree => return Err("control group reported torsion-free".into()),
    };
    ensure(witness.order() == ElementOrder::Two, || {
        format!("control witness {witness} is not of order two")
    })?;
    Ok(format!(
        "{patterns} sign patterns replayed for n ≤ 8; control counterexample {witness}"
    ))
}

fn height_shift() -> Outcome {
    let m1 = model(1, Resolution::QUARTER)?;
    let m2 = model(2, Resolution::QUARTER)?;
    let m3 = model(3, Resolution::QUARTER)?;
    let shift = |a: &QuotientModel, b: &QuotientModel| verify_height_shift(a, b).map_err(|e| e.to_string());
    ensure(shift(&m1, &m2)?, || "heights of X̄₁ and X̄₂ do not differ by one".into())?;
    ensure(shift(&m2, &m3)?, || "heights of X̄₂ and X̄₃ do not differ by one".into())?;
    ensure(!shift(&m2, &m2)?, || "degenerate control passed".into())?;
    Ok("1 → 2 and 2 → 3; same-model control rejected".into())
}

fn random_element(rng: &mut ChaCha8Rng, dim: usize) -> GammaElement {
    let twice: Vec<i64> = (0..dim).map(|_| rng.gen_range(-10..=10)).collect();
    GammaElement::from_twice(&twice).expect("any half-integer vector is an element")
}

fn group_axioms(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let triples = 10_000;
    for _ in 0..triples {
        let dim = rng.gen_range(1..=6);
        let (g, h, k) = (
            random_element(rng, dim),
            random_element(rng, dim),
            random_element(rng, dim),
        );
        let c = |a: &GammaElement, b: &GammaElement| a.compose(b).expect("same dimension");
        ensure(c(&c(&g, &h), &k) == c(&g, &c(&h, &k)), || {
            format!("associativity fails at {g}, {h}, {k}")
        })?;
        ensure(c(&g, &GammaElement::identity(dim)) == g, || {
            format!("identity fails at {g}")
        })?;
        ensure(c(&g, &g.inverse()).is_identity(), || format!("inverse fails at {g}"))?;
        let x: Vec<Rational64> = (0..dim)
            .map(|_| Rational64::new(rng.gen_range(-40..=40), rng.gen_range(1..=9)))
            .collect();
        let lhs = c(&g, &h).act(&x).expect("same dimension");
        let rhs = g.act(&h.act(&x).expect("same dimension")).expect("same dimension");
        ensure(lhs == rhs, || format!("action incompatible at {g}, {h}"))?;
    }
    Ok(format!("{triples} triples"))
}

fn averaging(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..100 {
        let dim = rng.gen_range(1..=5);
        let signs: Vec<Sign> = (0..dim)
            .map(|_| if rng.gen_bool(0.5) { Sign::Minus } else { Sign::Plus })
            .collect();
        let shift = signs
            .iter()
            .map(|s| match s {
                Sign::Plus => Rational64::from_integer(0),
                Sign::Minus => Rational64::new(rng.gen_range(-20..=20), rng.gen_range(1..=6)),
            })
            .collect();
        let m = AffineMap::new(signs, shift).expect("consistent lengths");
        let k = match m.order() {
            ElementOrder::One => 1,
            ElementOrder::Two => 2,
            ElementOrder::Infinite => return Err(format!("{m} has infinite order")),
        };
        let x: Vec<Rational64> = (0..dim)
            .map(|_| Rational64::new(rng.gen_range(-40..=40), rng.gen_range(1..=9)))
            .collect();
        let y = m.average_orbit(&x, k).map_err(|e| e.to_string())?;
        ensure(m.apply(&y).expect("same dimension") == y, || {
            format!("average of {m} is not fixed")
        })?;
    }
    Ok("100 controls".into())
}

fn random_loop(m: &QuotientModel, rng: &mut ChaCha8Rng) -> EdgeLoop {
    let k = m.complex();
    let mut incident: Vec<Vec<LoopStep>> = vec![Vec::new(); k.count(0)];
    for e in 0..k.count(1) {
        let (a, b) = k.edge_endpoints(e);
        incident[a].push(LoopStep { edge: e, forward: true });
        incident[b].push(LoopStep {
            edge: e,
            forward: false,
        });
    }
    let end = |s: &LoopStep| {
        let (a, b) = k.edge_endpoints(s.edge);
        if s.forward {
            b
        } else {
            a
        }
    };
    let base = rng.gen_range(0..k.count(0));
    let mut steps = Vec::new();
    let mut at = base;
    for _ in 0..rng.gen_range(0..30) {
        let s = incident[at][rng.gen_range(0..incident[at].len())];
        at = end(&s);
        steps.push(s);
    }
    // shortest way home
    let mut prev: HashMap<usize, LoopStep> = HashMap::new();
    let mut queue = VecDeque::from([at]);
    let mut seen = vec![false; k.count(0)];
    seen[at] = true;
    while let Some(v) = queue.pop_front() {
        for s in &incident[v] {
            let w = end(s);
            if !seen[w] {
                seen[w] = true;
                prev.insert(w, *s);
                queue.push_back(w);
            }
        }
    }
    let mut home = Vec::new();
    let mut v = base;
    while v != at {
        let s = prev[&v];
        home.push(s);
        let (a, b) = k.edge_endpoints(s.edge);
        v = if s.forward { a } else { b };
    }
    steps.extend(home.into_iter().rev());
    EdgeLoop { base, steps }
}

fn model_properties(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut models = Vec::new();
    for n in 1..=3 {
        models.push(model(n, Resolution::QUARTER)?);
        models.push(model(n, Resolution::EIGHTH)?);
    }
    let mut loops = 0;
    for m in &models {
        let k = m.complex();
        let n = m.dim();
        let tag = format!("dim {n} at {}", m.resolution());
        for d in 2..=n {
            let product = k
                .boundary_matrix(d)
                .mul(&k.boundary_matrix(d - 1))
                .map_err(|e| e.to_string())?;
            ensure(product.is_zero(), || format!("{tag}: ∂∂ ≠ 0 in degree {d}"))?;
        }
        let w = holonomy_cocycle(m).map_err(|e| e.to_string())?;
        let dw = k.boundary_matrix(2).mul_vec(&w).map_err(|e| e.to_string())?;
        ensure(dw.is_zero(), || format!("{tag}: δw₁ ≠ 0"))?;
        let b = betti_mod2(k);
        ensure((0..=n).all(|i| b[i] == b[n - i]), || {
            format!("{tag}: betti {b:?} violate duality")
        })?;
        ensure(k.euler_characteristic() == 0, || {
            format!("{tag}: χ = {}", k.euler_characteristic())
        })?;
        for _ in 0..100 {
            let l = random_loop(m, rng);
            loop_parity(m, &l).map_err(|e| format!("{tag}: {e}"))?;
            loops += 1;
        }
    }
    for n in 1..=2 {
        let coarse = sw_height(&models[2 * (n - 1)]).map_err(|e| e.to_string())?;
        let fine = sw_height(&models[2 * (n - 1) + 1]).map_err(|e| e.to_string())?;
        ensure(coarse.betti == fine.betti && coarse.height == fine.height, || {
            format!("dim {n}: 1/4 gives {coarse:?}, 1/8 gives {fine:?}")
        })?;
    }
    let mut perturbations = 0;
    for m in models.iter().step_by(2) {
        let k = m.complex();
        let reference = sw_height(m).map_err(|e| e.to_string())?;
        let w = Cochain::new(k, 1, m.edge_parities()).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let f = Cochain::new(k, 0, BitVector::from_bits((0..k.count(0)).map(|_| rng.gen_bool(0.5))))
                .map_err(|e| e.to_string())?;
            let shifted = w
                .add(&coboundary(k, &f).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let r = height_of(k, &shifted).map_err(|e| e.to_string())?;
            ensure(r.height == reference.height && r.powers == reference.powers, || {
                format!("dim {}: height changed under a coboundary", m.dim())
            })?;
            perturbations += 1;
        }
    }
    Ok(format!(
        "{} models; {loops} random loops; {perturbations} coboundary perturbations",
        models.len()
    ))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let parts = [
        group_axioms(&mut rng)?,
        averaging(&mut rng)?,
        model_properties(&mut rng)?,
    ];
    Ok(parts.join("; "))
}

/// `dim Hom(Γₙ, Z₂)` from the generators of `Γₙ` as maps of `Rⁿ` (step `j`
/// translates `uⱼ` by 1/2 and reflects `uⱼ₊₁`). Homomorphisms to `Z₂` factor
/// through `Γₙ/2L` with `2L = (2Z)ⁿ⁻¹ × Z`; an assignment on generators
/// extends iff it is consistent on the Cayley graph of that finite group.
fn first_betti_oracle(n: usize) -> usize {
    let generators: Vec<AffineMap> = (0..n)
        .map(|j| {
            let signs = (0..n)
                .map(|i| if i == j + 1 { Sign::Minus } else { Sign::Plus })
                .collect();
            let shift = (0..n).map(|i| Rational64::new(i64::from(i == j), 2)).collect();
            AffineMap::new(signs, shift).expect("consistent lengths")
        })
        .collect();
    let modulus = |i: usize| Rational64::from_integer(if i + 1 < n { 2 } else { 1 });
    let reduce = |m: AffineMap| {
        let shift = m
            .shift()
            .iter()
            .enumerate()
            .map(|(i, v)| *v - (*v / modulus(i)).floor() * modulus(i))
            .collect();
        AffineMap::new(m.signs().to_vec(), shift).expect("consistent lengths")
    };
    let mut extendable = 0usize;
    for assignment in 0u32..1 << n {
        let mut label: HashMap<AffineMap, bool> = HashMap::from([(AffineMap::identity(n), false)]);
        let mut queue = VecDeque::from([AffineMap::identity(n)]);
        let mut consistent = true;
        while let Some(x) = queue.pop_front() {
            for (j, g) in generators.iter().enumerate() {
                let y = reduce(g.compose(&x).expect("same dimension"));
                let value = label[&x] ^ (assignment >> j & 1 == 1);
                match label.get(&y) {
                    Some(&seen) => consistent &= seen == value,
                    None => {
                        label.insert(y.clone(), value);
                        queue.push_back(y);
                    }
                }
            }
        }
        extendable += usize::from(consistent);
    }
    extendable.trailing_zeros() as usize
}

fn betti_golden_values() -> Outcome {
    // derived before any model is built
    let b1 = first_betti_oracle(3);
    ensure(b1 == 3, || format!("generator oracle gives b₁ = {b1} for n = 3"))?;
    let oracle3 = vec![1, b1, b1, 1];
    let golden: [Vec<usize>; 3] = [vec![1, 1], vec![1, 2, 1], oracle3];
    let mut seen = Vec::new();
    for n in 1..=3 {
        for r in [Resolution::QUARTER, Resolution::EIGHTH] {
            let b = betti_mod2(model(n, r)?.complex());
            ensure(b == golden[n - 1], || {
                format!("dim {n} at {r}: {b:?}, expected {:?}", golden[n - 1])
            })?;
        }
        seen.push(format!("{:?}", golden[n - 1]));
    }
    Ok(format!("{} at 1/4 and 1/8", seen.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("height equals dimension for n = 1, 2, 3", height_equals_dimension),
        ("coindex one: no odd involution, odd witness", coindex_one),
        ("torsion-free certificates and torsion control", torsion_free),
        ("height rises by one per twisted factor", height_shift),
        ("property suites", property_suites),
        ("mod-2 betti golden values", betti_golden_values),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS  {name} ({detail}) [{:.2?}]", start.elapsed()),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {name}: {reason} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
