//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test --test acceptance`. Exits nonzero if any criterion
//! fails. Every tolerance is a named constant below.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use equinorm::equivariant::{structure_bracket, structure_constant_mismatches, BasisElement, QuasilinearField, Slot};
use equinorm::flow::{default_radii, flow_check, FlowCheckOptions};
use equinorm::homological::{replay, Generator};
use equinorm::liealg::{builtin_rep, compute_centralizer, verify_quaternion_relations, SchurType};
use equinorm::normalform::{classify_case, normalize, off_axis_part, resonance_check, CaseTag, Verdict};
use equinorm::polyvf::PolyVectorField;
use equinorm::rational::q;
use equinorm::renorm::{renormalize_lemma2, renormalize_zero_linear, RenormCase};

/// Required fitted order margin below `N + 1` for the flow check.
const FLOW_ORDER_MARGIN: f64 = 0.5;
/// Wall-clock budget of the flow-check criterion.
const FLOW_TIME_BUDGET: Duration = Duration::from_secs(10);
/// Radii `0.1 * 2^-j`, `j = 0..FLOW_RADII`.
const FLOW_RADII: usize = 5;
/// Random fields per bracket-axiom run.
const BRACKET_SAMPLES: usize = 50;
/// Random inputs per case in the shape suites.
const SHAPE_SAMPLES: usize = 20;
/// Transforms per suite that are also replayed through the polynomial bracket.
const POLY_REPLAY_SAMPLES: usize = 2;

type Outcome = Result<String, String>;

/// A recorded transform for the replay criterion.
struct Transform {
    label: String,
    input: QuasilinearField,
    generators: Vec<Generator>,
    output: QuasilinearField,
    max_k: usize,
}

#[derive(Default)]
struct Ledger {
    transforms: Vec<Transform>,
}

impl Ledger {
    fn record(&mut self, label: impl Into<String>, input: &QuasilinearField, gens: &[Generator], out: &QuasilinearField, max_k: usize) {
        self.transforms.push(Transform {
            label: label.into(),
            input: input.clone(),
            generators: gens.to_vec(),
            output: out.clone(),
            max_k,
        });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_bracket_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..BRACKET_SAMPLES {
        let n = rng.gen_range(1..=4);
        let f = random_poly(n, 3, 4, &mut rng);
        let g = random_poly(n, 3, 4, &mut rng);
        let h = random_poly(n, 3, 4, &mut rng);
        let fg = f.bracket(&g).unwrap();
        ensure(fg == g.bracket(&f).unwrap().scale(&q(-1)), || format!("antisymmetry failed on sample {i}"))?;
        let (a, b) = (rand_q(&mut rng), rand_q(&mut rng));
        let lhs = PolyVectorField::linear_combination(&a, &f, &b, &g).unwrap().bracket(&h).unwrap();
        let rhs = PolyVectorField::linear_combination(&a, &f.bracket(&h).unwrap(), &b, &g.bracket(&h).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("bilinearity failed on sample {i}"))?;
        let jac = f
            .bracket(&g.bracket(&h).unwrap())
            .unwrap()
            .add(&g.bracket(&h.bracket(&f).unwrap()).unwrap())
            .unwrap()
            .add(&h.bracket(&fg).unwrap())
            .unwrap();
        ensure(jac.is_zero(), || format!("Jacobi failed on sample {i}"))?;
        for (k, fk) in f.grade_decompose() {
            for (m, gm) in g.grade_decompose() {
                let b = fk.bracket(&gm).unwrap();
                ensure(b.is_zero() || b.homogeneous_grade() == Some(k + m), || {
                    format!("grading failed on sample {i}: V_{k} x V_{m}")
                })?;
            }
        }
    }
    Ok(format!("{BRACKET_SAMPLES} random triples, n <= 4, degree <= 3, exact"))
}

fn levi_civita(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

fn c2_structure_constants() -> Outcome {
    let mut total = 0;
    for g in ["so2", "so3", "su2"] {
        let b = basis(g);
        let bad = structure_constant_mismatches(&b, 4).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("{g}: {} mismatching pairs, first {} x {}", bad.len(), bad[0].0, bad[0].1))?;
        total += (b.len() * 5).pow(2);
    }
    // closed forms, checked directly against the polynomial bracket
    let b = basis("su2");
    for k in 0..=4 {
        for m in 0..=4 {
            let psi_k = QuasilinearField::single(b.clone(), Slot::new(0, k), q(1)).unwrap().expand();
            let psi_m = QuasilinearField::single(b.clone(), Slot::new(0, m), q(1)).unwrap().expand();
            let want = QuasilinearField::single(b.clone(), Slot::new(0, k + m), q(2 * (m as i64 - k as i64))).unwrap();
            ensure(psi_k.bracket(&psi_m).unwrap() == want.expand(), || format!("{{Psi_{k}, Psi_{m}}}"))?;
            for p in 1..=3 {
                let phi_m = QuasilinearField::single(b.clone(), Slot::new(p, m), q(1)).unwrap().expand();
                let want = QuasilinearField::single(b.clone(), Slot::new(p, k + m), q(2 * m as i64)).unwrap();
                ensure(psi_k.bracket(&phi_m).unwrap() == want.expand(), || format!("{{Psi_{k}, Phi^({p})_{m}}}"))?;
                for r in 1..=3 {
                    let phi_k = QuasilinearField::single(b.clone(), Slot::new(r, k), q(1)).unwrap().expand();
                    let mut want = QuasilinearField::zero(b.clone());
                    for s in 1..=3 {
                        want.add_to(Slot::new(s, k + m), q(-2 * levi_civita(r, p, s)));
                    }
                    ensure(phi_k.bracket(&phi_m).unwrap() == want.expand(), || {
                        format!("{{Phi^({r})_{k}, Phi^({p})_{m}}} != -2 eps Phi_{{k+m}}")
                    })?;
                }
            }
        }
    }
    let sample = structure_bracket(BasisElement::Phi { p: 1, k: 0 }, BasisElement::Phi { p: 2, k: 0 }, &b).unwrap();
    ensure(sample == vec![(q(-2), BasisElement::Phi { p: 3, k: 0 })], || format!("{sample:?}"))?;
    Ok(format!(
        "{total} basis pairs exact; verified su2: {{Phi^a_k, Phi^b_m}} = -2 eps_abc Phi^c_(k+m), no Psi term"
    ))
}

fn c3_centralizers() -> Outcome {
    let expect = [("so3", 1, SchurType::Real), ("so2", 2, SchurType::Complex), ("su2", 4, SchurType::Quaternionic)];
    for (g, d, t) in expect {
        let b = compute_centralizer(&builtin_rep(g).unwrap()).map_err(|e| e.to_string())?;
        ensure(b.len() == d && b.schur_type() == t, || format!("{g}: dim {} {:?}", b.len(), b.schur_type()))?;
    }
    let b = basis("su2");
    ensure(verify_quaternion_relations(&b).map_err(|e| e.to_string())?, || "quaternion relations".into())?;
    Ok("so3 -> 1 REAL, so2 -> 2 COMPLEX, su2 -> 4 QUATERNIONIC; K_a K_b = eps_abc K_c - delta_ab I exact".into())
}

fn c4_case_table() -> Outcome {
    // (group, beta, expected)
    let fixtures: Vec<(&str, Vec<i64>, CaseTag)> = vec![
        ("so3", vec![1], CaseTag::A),
        ("so3", vec![0], CaseTag::ZeroLinear),
        ("so2", vec![1, 0], CaseTag::B1),
        ("so2", vec![1, 1], CaseTag::B2),
        ("so2", vec![0, 1], CaseTag::B3),
        ("so2", vec![0, 0], CaseTag::ZeroLinear),
        ("su2", vec![1, 0, 0, 0], CaseTag::C1),
        ("su2", vec![1, 1, 0, 0], CaseTag::C2),
        ("su2", vec![1, 0, 1, 0], CaseTag::C2),
        ("su2", vec![0, 1, 0, 0], CaseTag::C3),
        ("su2", vec![0, 0, 0, 1], CaseTag::C3),
        ("su2", vec![0, 0, 0, 0], CaseTag::ZeroLinear),
    ];
    const MAX_ORDER: usize = 8;
    for (g, beta, want) in &fixtures {
        let b = basis(g);
        let mut f = QuasilinearField::zero(b.clone());
        for (p, c) in beta.iter().enumerate() {
            f.set(Slot::new(p, 0), q(*c));
        }
        f.set(Slot::new(0, 1), q(1));
        let (case, spec) = classify_case(&f);
        ensure(case == *want, || format!("{g} beta {beta:?}: got {case}, expected {want}"))?;
        let res = resonance_check(&spec, MAX_ORDER);
        if case.is_hyperbolic() {
            ensure(res.is_empty(), || format!("{g} {case}: unexpected resonances"))?;
        }
        if matches!(case, CaseTag::B3 | CaseTag::C3) {
            let orders: BTreeSet<u32> = res.iter().map(|r| r.order()).collect();
            let odd: BTreeSet<u32> = (2..=MAX_ORDER as u32 + 1).filter(|o| o % 2 == 1).collect();
            ensure(orders == odd, || format!("{g} {case}: resonance orders {orders:?}"))?;
        }
    }
    Ok(format!("{} fixtures; no resonances for A/B1/B2/C1/C2, every odd order for B3/C3 (|m| <= {})", fixtures.len(), MAX_ORDER + 1))
}

fn c5_normal_forms(ledger: &mut Ledger) -> Outcome {
    const N: usize = 6;
    let max_k = N / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let linear_cases = [
        ("so3", vec![true], CaseTag::A),
        ("so2", vec![true, false], CaseTag::B1),
        ("so2", vec![true, true], CaseTag::B2),
        ("su2", vec![true, false, false, false], CaseTag::C1),
        ("su2", vec![true, true, true, true], CaseTag::C2),
    ];
    for (g, on, want) in &linear_cases {
        let b = basis(g);
        for i in 0..SHAPE_SAMPLES {
            let mut f = random_field(&b, &vec![Some(1); b.len()], max_k, &mut rng);
            for (p, active) in on.iter().enumerate() {
                if *active {
                    f.set(Slot::new(p, 0), rand_q(&mut rng));
                }
            }
            let r = normalize(&f, N).map_err(|e| e.to_string())?;
            ensure(r.case == *want, || format!("{g} sample {i}: case {}", r.case))?;
            ensure(r.nf == f.truncate(0), || format!("{g} {want} sample {i}: normal form not linear"))?;
            ledger.record(format!("nf {want}"), &f, &r.generators, &r.nf, max_k);
        }
    }
    let b = basis("so2");
    for i in 0..SHAPE_SAMPLES {
        let mut f = random_field(&b, &[Some(1), Some(1)], max_k, &mut rng);
        f.set(Slot::new(1, 0), rand_q(&mut rng));
        let r = normalize(&f, N).map_err(|e| e.to_string())?;
        ensure(r.case == CaseTag::B3 && r.nf == f && r.generators.is_empty(), || format!("B3 sample {i} changed"))?;
        ledger.record("nf B3", &f, &r.generators, &r.nf, max_k);
    }
    let b = basis("su2");
    for i in 0..SHAPE_SAMPLES {
        let mut f = random_field(&b, &[Some(1); 4], max_k, &mut rng);
        for p in 1..4 {
            f.set(Slot::new(p, 0), rand_q_or_zero(&mut rng));
        }
        if f.slice(0)[1..].iter().all(|c| c == &q(0)) {
            f.set(Slot::new(2, 0), q(1));
        }
        let r = normalize(&f, N).map_err(|e| e.to_string())?;
        ensure(r.case == CaseTag::C3, || format!("C3 sample {i}: case {}", r.case))?;
        ensure(off_axis_part(&r.nf).is_empty(), || format!("C3 sample {i}: terms outside span{{I, J}}"))?;
        ensure(r.nf.linear_part() == f.linear_part(), || format!("C3 sample {i}: linear part changed"))?;
        // kernel condition via the polynomial oracle
        let a = r.nf.truncate(0).expand();
        for k in 1..=max_k {
            let mut piece = QuasilinearField::zero(b.clone());
            piece.set_slice(k, &r.nf.slice(k));
            ensure(a.bracket(&piece.expand()).unwrap().is_zero(), || format!("C3 sample {i}: slice {k} not in kernel"))?;
        }
        ledger.record("nf C3", &f, &r.generators, &r.nf, max_k);
    }
    Ok(format!(
        "N = {N}: A/B1/B2/C1/C2 linear, B3 unchanged, C3 in span{{I, J}} ({SHAPE_SAMPLES} random inputs per case)"
    ))
}

fn c6_rotation_renorm(ledger: &mut Ledger) -> Outcome {
    const N: usize = 10;
    let max_k = N / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (g, tag) in [("so2", RenormCase::B3Lemma2), ("su2", RenormCase::C3Lemma2)] {
        let b = basis(g);
        for i in 0..SHAPE_SAMPLES {
            let mu = rng.gen_range(1..=3);
            let mut start = vec![Some(mu)];
            start.extend(std::iter::repeat(Some(0)).take(b.len() - 1));
            let mut f = random_field(&b, &start, max_k, &mut rng);
            if g == "su2" {
                for p in 1..4 {
                    f.set(Slot::new(p, 0), rand_q_or_zero(&mut rng));
                }
                if f.slice(0)[1..].iter().all(|c| c == &q(0)) {
                    f.set(Slot::new(3, 0), rand_q(&mut rng));
                }
            }
            let a_mu = f.coeff(0, mu);
            let nf = normalize(&f, N).map_err(|e| e.to_string())?;
            let r = renormalize_lemma2(&nf, N).map_err(|e| e.to_string())?;
            ensure(r.case == tag && r.mu == mu, || format!("{g} sample {i}: {} mu {}", r.case.label(), r.mu))?;
            rotation_case_shape(&r.form, mu, max_k).map_err(|e| format!("{g} sample {i} (mu = {mu}): {e}"))?;
            ensure(r.c1 == a_mu, || format!("{g} sample {i}: c1 {} != a_mu {a_mu}", r.c1))?;
            ensure(r.form.slice(0) == nf.nf.slice(0), || format!("{g} sample {i}: d_0 changed"))?;
            let mut chain = nf.generators.clone();
            chain.extend(r.generators.iter().cloned());
            ledger.record(format!("renorm {g}"), &f, &chain, &r.form, max_k);
        }
    }
    Ok(format!("N = {N}, mu <= 3, {SHAPE_SAMPLES} B3 + {SHAPE_SAMPLES} C3: survivors Psi_mu, Psi_2mu, J-aligned Phi_k (k <= mu); c1 = a_mu"))
}

fn c7_zero_linear(ledger: &mut Ledger) -> Outcome {
    const N: usize = 10;
    let max_k = N / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut count = 0;
    let run = |g: &str, start: Vec<Option<usize>>, want_case: RenormCase, want: BTreeSet<(usize, usize)>, rng: &mut ChaCha8Rng, ledger: &mut Ledger| -> Result<(), String> {
        let b = basis(g);
        let f = random_field(&b, &start, max_k, rng);
        let mu = start[0].unwrap();
        let r = renormalize_zero_linear(&f, N).map_err(|e| e.to_string())?;
        ensure(r.case == want_case, || format!("{g} {start:?}: case {}", r.case.label()))?;
        let got = slot_set(&r.form);
        ensure(got == want, || format!("{g} {start:?}: survivors {got:?}, expected {want:?}"))?;
        ensure(r.c1 == f.coeff(0, mu), || format!("{g} {start:?}: leading coefficient changed"))?;
        ensure(replay(&r.input, &r.generators, max_k).map_err(|e| e.to_string())? == r.form, || {
            format!("{g} {start:?}: replay mismatch")
        })?;
        ledger.record(format!("zero-linear {}", want_case.label()), &f, &r.generators, &r.form, max_k);
        Ok(())
    };
    for _ in 0..SHAPE_SAMPLES {
        let mu = rng.gen_range(1..=3);
        run("so3", vec![Some(mu)], RenormCase::A0, psi_pair(mu, max_k), &mut rng, ledger)?;

        let mu = rng.gen_range(1..=2);
        let nu = rng.gen_range(mu + 1..=max_k);
        run("so2", vec![Some(mu), Some(nu)], RenormCase::B0MuLtNu, expected_complex(mu, Some(nu), max_k), &mut rng, ledger)?;

        let mu = rng.gen_range(2..=4);
        let nu = rng.gen_range(1..mu);
        run("so2", vec![Some(mu), Some(nu)], RenormCase::B0NuLtMu, expected_complex(mu, Some(nu), max_k), &mut rng, ledger)?;

        let mu = rng.gen_range(1..=3);
        run("so2", vec![Some(mu), Some(mu)], RenormCase::B0MuEqNu, expected_complex(mu, Some(mu), max_k), &mut rng, ledger)?;

        let mu = rng.gen_range(1..=2);
        let nu: Vec<Option<usize>> = (0..3).map(|_| Some(rng.gen_range(mu..=max_k))).collect();
        let mut start = vec![Some(mu)];
        start.extend(nu.iter().copied());
        run("su2", start, RenormCase::C0MuMin, expected_quaternionic(mu, &nu, max_k), &mut rng, ledger)?;

        let mu = rng.gen_range(2..=4);
        let s = rng.gen_range(0..3);
        let nu_s = rng.gen_range(1..mu);
        let nu: Vec<Option<usize>> = (0..3)
            .map(|p| if p == s { Some(nu_s) } else { Some(rng.gen_range(nu_s + 1..=max_k)) })
            .collect();
        let mut start = vec![Some(mu)];
        start.extend(nu.iter().copied());
        run("su2", start, RenormCase::C0NuMin, expected_quaternionic(mu, &nu, max_k), &mut rng, ledger)?;
        count += 6;
    }
    Ok(format!(
        "N = {N}, {count} random inputs: two-term REAL form; COMPLEX mu<nu, nu<mu, mu=nu; QUATERNIONIC mu minimal and strict nu_s minimal"
    ))
}

fn c8_replay(ledger: &Ledger) -> Outcome {
    let mut poly_checked: std::collections::BTreeMap<&str, usize> = Default::default();
    for t in &ledger.transforms {
        let got = replay(&t.input, &t.generators, t.max_k).map_err(|e| e.to_string())?;
        ensure(got == t.output, || format!("{}: structure-constant replay mismatch", t.label))?;
        let seen = poly_checked.entry(t.label.as_str()).or_default();
        if *seen < POLY_REPLAY_SAMPLES {
            *seen += 1;
            let gens: Vec<QuasilinearField> = t.generators.iter().map(|g| g.field.clone()).collect();
            let poly = replay_polynomial(&t.input, &gens, 2 * t.max_k);
            ensure(poly == t.output.expand(), || format!("{}: polynomial replay mismatch", t.label))?;
        }
    }
    Ok(format!(
        "{} transforms replayed exactly; {} also through the polynomial Lie series",
        ledger.transforms.len(),
        poly_checked.values().sum::<usize>()
    ))
}

fn c9_flow() -> Outcome {
    const N: usize = 4;
    let start = Instant::now();
    let mut orders = Vec::new();
    let fixtures: [(&str, &[(usize, usize, i64)]); 2] = [
        ("so3", &[(0, 0, 1), (0, 1, 1)]),
        ("so2", &[(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1), (0, 2, -1), (1, 2, 2)]),
    ];
    for (g, coeffs) in fixtures {
        let b = basis(g);
        let f = field(&b, coeffs);
        let r = normalize(&f, N).map_err(|e| e.to_string())?;
        let gens: Vec<PolyVectorField> = r.generators.iter().map(|g| g.field.expand()).collect();
        let rep = flow_check(&f.expand(), &r.nf.expand(), &gens, N, &default_radii(FLOW_RADII), &FlowCheckOptions::default())
            .map_err(|e| e.to_string())?;
        let order = rep.fitted_order.ok_or_else(|| format!("{g}: no fitted order"))?;
        ensure(order >= N as f64 + 1.0 - FLOW_ORDER_MARGIN, || format!("{g} {}: fitted order {order:.3}", r.case))?;
        orders.push(format!("{} {order:.2}", r.case));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < FLOW_TIME_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("N = {N}, fitted orders [{}] >= {}, {:.2?}", orders.join(", "), N as f64 + 1.0 - FLOW_ORDER_MARGIN, elapsed))
}

fn c10_verdicts() -> Outcome {
    let cases: Vec<(&str, Vec<(usize, usize, i64)>, Verdict, bool)> = vec![
        ("so3", vec![(0, 0, 1), (0, 1, 1)], Verdict::Convergent, false),
        ("so2", vec![(0, 0, 1), (0, 1, 1), (1, 1, 2)], Verdict::Convergent, false),
        ("so2", vec![(0, 0, -1), (1, 0, 2), (1, 1, 1)], Verdict::Convergent, false),
        ("su2", vec![(0, 0, 1), (2, 1, 1)], Verdict::Convergent, false),
        ("su2", vec![(0, 0, 2), (1, 0, 1), (3, 0, 1), (0, 1, 1)], Verdict::Convergent, false),
        // alpha_0 = 0, alpha_1 = 3 (1 + r^2 - 2 r^4)
        ("so2", vec![(1, 0, 3), (1, 1, 3), (1, 2, -6)], Verdict::Convergent, true),
        ("su2", vec![(1, 0, 1), (0, 1, 1), (1, 1, 2), (2, 2, 1)], Verdict::ExpectDivergent, false),
        ("su2", vec![(2, 0, 3), (3, 0, 4), (0, 1, -1), (0, 2, 1), (2, 1, 1)], Verdict::ExpectDivergent, false),
    ];
    for (g, coeffs, want, assumption) in &cases {
        let b = basis(g);
        let r = normalize(&field(&b, coeffs), 6).map_err(|e| e.to_string())?;
        let d = &r.diagnostics;
        ensure(d.verdict == *want, || format!("{g} {}: verdict {:?}, expected {want:?}", r.case, d.verdict))?;
        ensure(d.condition_a == *assumption || r.case.is_hyperbolic(), || format!("{g} {}: condition A", r.case))?;
        ensure(!assumption || !d.assumptions.is_empty(), || format!("{g} {}: missing arithmetic assumption", r.case))?;
        ensure(d.poincare_domain == r.case.is_hyperbolic(), || format!("{g} {}: Poincare domain flag", r.case))?;
    }
    Ok("A/B1/B2/C1/C2 CONVERGENT (Poincare domain); B3 condition A CONVERGENT with assumption; generic C3 EXPECT_DIVERGENT".into())
}

fn report(i: usize, name: &str, outcome: Outcome, started: Instant) -> bool {
    let took = started.elapsed();
    match outcome {
        Ok(detail) => {
            println!("PASS {i:>2} {name}: {detail} [{took:.2?}]");
            true
        }
        Err(why) => {
            println!("FAIL {i:>2} {name}: {why} [{took:.2?}]");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ledger = Ledger::default();
    let start = Instant::now();
    let criteria: Vec<(&str, Box<dyn Fn(&mut Ledger) -> Outcome>)> = vec![
        ("bracket axioms", Box::new(|_| c1_bracket_axioms())),
        ("structure-constant oracle", Box::new(|_| c2_structure_constants())),
        ("centralizer dimensions", Box::new(|_| c3_centralizers())),
        ("case table and resonances", Box::new(|_| c4_case_table())),
        ("normal-form shapes", Box::new(c5_normal_forms)),
        ("B3/C3 renormalized shapes", Box::new(c6_rotation_renorm)),
        ("zero-linear renormalization", Box::new(c7_zero_linear)),
        ("generator replay", Box::new(|l: &mut Ledger| c8_replay(l))),
        ("flow conjugacy", Box::new(|_| c9_flow())),
        ("convergence verdicts", Box::new(|_| c10_verdicts())),
    ];
    let total = criteria.len();
    let mut passed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        if report(i + 1, name, run(&mut ledger), t) {
            passed += 1;
        }
    }
    println!("{passed} of {total} criteria passed in {:.2?}", start.elapsed());
    if passed == total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
