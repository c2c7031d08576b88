//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};
use std::process::ExitCode;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weakmetro::dynamics::{
    dynamic_report, k_operator_quadrature, k_operator_spectral, k_operators, linear_grid, locate_crossings, locate_minimum,
    scan_time,
};
use weakmetro::linalg::{hermitian_eig, max_abs_entry};
use weakmetro::models::{
    build, reference_anharmonic_dynamic, reference_anharmonic_static, reference_qubit_dynamic_qfi, reference_qutrit_dynamic,
    reference_qutrit_static, ModelKind, ModelSpec,
};
use weakmetro::oracle::{exact_evolved_family, exact_ground_family, fd_qfim, fidelity_qfi, DEFAULT_STEP};
use weakmetro::perturbation::{
    angle_decomposition, AngleDecomposition, FirstOrderCorrection, PerturbationProblem,
};
use weakmetro::statics::{
    analyze_static, pure_state_sld, qfim_static, quantumness_r, sld_two_param_explicit, uhlmann_static, QfiMatrix,
};
use weakmetro::{Error, HermitianOperator, StateVector, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

fn run(results: &mut Vec<bool>, label: &str, f: impl FnOnce() -> Outcome) {
    let out = f();
    println!("{label}: {} ({})", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    results.push(out.pass);
}

fn problem(kind: ModelKind, alpha: f64) -> PerturbationProblem {
    build(&ModelSpec::new(kind).with_alpha(alpha)).expect("preset builds")
}

fn qubit_static() -> Outcome {
    let p = problem(ModelKind::Qubit1Param, 0.0);
    let a = match analyze_static(&p) {
        Ok(a) => a,
        Err(e) => return Outcome::error(e),
    };
    let engine = a.report.qfim.get(0, 0);
    let fam = exact_ground_family(&p);
    let fid = match fidelity_qfi(|l| fam(&[l]), 1e-3, DEFAULT_STEP) {
        Ok(f) => f.value,
        Err(e) => return Outcome::error(e),
    };
    let pass = engine == 1.0 && (fid - 1.0).abs() <= 0.01;
    Outcome::new(pass, format!("engine Q = {engine}, fidelity Q = {fid:.6}"))
}

fn qutrit_static() -> Outcome {
    let mut worst_b: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for i in 0..50 {
        let alpha = PI * (i as f64 + 0.5) / 50.0;
        let a = match analyze_static(&problem(ModelKind::Qutrit2Param, alpha)) {
            Ok(a) => a,
            Err(e) => return Outcome::error(e),
        };
        let want = reference_qutrit_static(alpha);
        worst_b = worst_b.max((a.report.bound_b - want.b).abs());
        worst_r = worst_r.max(a.report.quantumness_r.map_or(f64::INFINITY, f64::abs));
    }
    let half = analyze_static(&problem(ModelKind::Qutrit2Param, FRAC_PI_2))
        .map(|a| a.report.bound_b)
        .unwrap_or(f64::NAN);
    let pass = worst_b <= 1e-10 && worst_r <= 1e-10 && (half - 0.5).abs() <= 1e-10;
    Outcome::new(
        pass,
        format!("max |dB| = {worst_b:.2e}, max |R| = {worst_r:.2e}, B(pi/2) = {half}"),
    )
}

fn qubit_two_param() -> Outcome {
    let p = problem(ModelKind::Qubit2Param, FRAC_PI_3);
    let cs = match p.corrections() {
        Ok(c) => c,
        Err(e) => return Outcome::error(e),
    };
    let parallel = matches!(angle_decomposition(&cs[0], &cs[1]), Err(Error::ParallelCorrections { .. }));
    let r = qfim_static(&cs)
        .and_then(|q| Ok((q, uhlmann_static(&cs)?)))
        .and_then(|(q, d)| quantumness_r(&q, &d));
    match r {
        Ok(r) => Outcome::new(
            parallel && (r - 1.0).abs() <= 1e-9,
            format!("parallel corrections rejected: {parallel}, R = {r:.12}"),
        ),
        Err(e) => Outcome::error(e),
    }
}

fn anharmonic_static() -> Outcome {
    let (n1_want, n2_want, b_want) = reference_anharmonic_static();
    let mut detail = Vec::new();
    let mut pass = true;
    for dim in [8, 12, 16, 24] {
        let p = build(&ModelSpec::new(ModelKind::Anharmonic2Param).with_fock_dim(dim)).expect("preset builds");
        let a = match analyze_static(&p) {
            Ok(a) => a,
            Err(e) => return Outcome::error(e),
        };
        let n = a.squared_norms();
        let dn = (n[0] - n1_want).abs().max((n[1] - n2_want).abs());
        let db = (a.report.bound_b - b_want).abs();
        let d = a.report.uhlmann.matrix().amax();
        pass &= dn <= 1e-10 && db <= 1e-9 && d <= 1e-12;
        detail.push(format!("dim {dim}: |dN| = {dn:.1e}, |dB| = {db:.1e}, |D| = {d:.1e}"));
    }
    Outcome::new(pass, detail.join("; "))
}

/// Maximizer of a smooth function on `[lo, hi]` by bisection on its central-difference slope.
fn argmax_by_slope(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let h = 1e-4;
    let slope = |t: f64| f(t + h) - f(t - h);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn qubit_dynamic() -> Outcome {
    let spec = ModelSpec::new(ModelKind::Qubit1Param);
    let p = build(&spec).expect("preset builds");
    let engine = |t: f64, theta: f64, phi: f64| -> weakmetro::Result<f64> {
        let psi = spec.probe_state(theta, phi)?;
        Ok(dynamic_report(&p, &psi, t)?.qfim.get(0, 0))
    };
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let t = TAU * (i as f64 + 1.0) / 10.0;
        for j in 0..10 {
            let theta = PI * j as f64 / 9.0;
            for k in 0..10 {
                let phi = TAU * k as f64 / 10.0;
                match engine(t, theta, phi) {
                    Ok(q) => worst = worst.max((q - reference_qubit_dynamic_qfi(t, theta, phi)).abs()),
                    Err(e) => return Outcome::error(e),
                }
            }
        }
    }
    let q_at = |t: f64| engine(t, 0.0, 0.0).unwrap_or(f64::NAN);
    let t_star = argmax_by_slope(q_at, 0.5, 2.5);
    let q_max = q_at(t_star);
    let pass = worst <= 1e-9 && (t_star - FRAC_PI_2).abs() <= 1e-9 && (q_max - 4.0).abs() <= 1e-9;
    Outcome::new(
        pass,
        format!("max |dQ| over 1000 points = {worst:.2e}, argmax t = {t_star:.12}, max Q = {q_max:.12}"),
    )
}

fn qutrit_dynamic() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let mut singular_ok = true;
    for j in 1..=20 {
        let alpha = PI * j as f64 / 21.0;
        let spec = ModelSpec::new(ModelKind::Qutrit2Param).with_alpha(alpha);
        let p = build(&spec).expect("preset builds");
        let psi = spec.probe_state(0.0, 0.0).expect("probe");
        for i in 1..=20 {
            let t = TAU * i as f64 / 20.0;
            let r = match dynamic_report(&p, &psi, t) {
                Ok(r) => r,
                Err(e) => return Outcome::error(e),
            };
            let want = reference_qutrit_dynamic(t, alpha);
            for m in 0..2 {
                for n in 0..2 {
                    worst = worst.max((r.qfim.get(m, n) - want.q[m][n]).abs());
                }
            }
            worst = worst.max(r.uhlmann.matrix().amax());
            if want.q[0][0] < 1e-12 {
                singular_ok &= r.is_singular();
            } else {
                worst = worst.max(r.quantumness_r.map_or(f64::INFINITY, f64::abs));
                worst_b = worst_b.max((r.bound_b - want.b).abs());
            }
        }
    }
    let pass = worst <= 1e-9 && worst_b <= 1e-9 && singular_ok;
    Outcome::new(
        pass,
        format!("max |dQ|, |D|, |R| = {worst:.2e}, max |dB| = {worst_b:.2e}, t = 2pi flagged singular: {singular_ok}"),
    )
}

fn anharmonic_dynamic() -> Outcome {
    let p = problem(ModelKind::Anharmonic2Param, 0.0);
    let psi = p.unperturbed_state();
    let mut worst_q: f64 = 0.0;
    let mut worst_k: f64 = 0.0;
    for i in 1..=200 {
        let t = TAU * i as f64 / 200.0;
        let ks = match k_operators(&p, t) {
            Ok(k) => k,
            Err(e) => return Outcome::error(e),
        };
        let k1 = ks[0].op.matrix()[(0, 0)];
        let k2 = ks[1].op.matrix()[(0, 0)];
        worst_k = worst_k.max(k1.norm()).max((k2 - C64::new(0.75 * t, 0.0)).norm());
        let r = match dynamic_report(&p, &psi, t) {
            Ok(r) => r,
            Err(e) => return Outcome::error(e),
        };
        let (q11, q22, q12) = reference_anharmonic_dynamic(t);
        worst_q = worst_q
            .max((r.qfim.get(0, 0) - q11).abs())
            .max((r.qfim.get(1, 1) - q22).abs())
            .max((r.qfim.get(0, 1) - q12).abs());
    }
    let pass = worst_q <= 1e-8 && worst_k <= 1e-10;
    Outcome::new(pass, format!("max |dQ| = {worst_q:.2e}, max vacuum K error = {worst_k:.2e}"))
}

fn fig_b2() -> Outcome {
    let p = problem(ModelKind::Anharmonic2Param, 0.0);
    let psi = p.unperturbed_state();
    let times = linear_grid(0.01, PI, 314).expect("grid");
    let scan = match scan_time(&p, &psi, &times) {
        Ok(s) => s,
        Err(e) => return Outcome::error(e),
    };
    let Some(level) = scan.static_reference else {
        return Outcome::new(false, "no static reference");
    };
    let crossings = locate_crossings(&p, &psi, &scan, level, 1e-10);
    let Some((t_min, b_min)) = locate_minimum(&p, &psi, &scan, 1e-8) else {
        return Outcome::new(false, "no finite minimum");
    };
    let cross_ok = crossings.len() == 2 && (crossings[0] - 0.721).abs() <= 0.01 && (crossings[1] - 2.79).abs() <= 0.01;
    let pass = cross_ok && (t_min - 2.0).abs() <= 0.05 && (b_min - 0.1418).abs() <= 0.001;
    Outcome::new(
        pass,
        format!("static B = {level:.6}, crossings at {crossings:.6?}, minimum B = {b_min:.6} at t = {t_min:.6}"),
    )
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Orthonormal triple by Gram-Schmidt on random vectors.
fn random_triple(rng: &mut ChaCha8Rng, dim: usize) -> [StateVector; 3] {
    let mut out: Vec<DVector<C64>> = Vec::new();
    while out.len() < 3 {
        let mut v = random_unit(rng, dim);
        for u in &out {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let n = v.norm();
        if n > 1e-3 {
            out.push(v / C64::new(n, 0.0));
        }
    }
    let [a, b, c]: [DVector<C64>; 3] = out.try_into().expect("three vectors");
    [a, b, c].map(|v| StateVector::new(v).expect("finite"))
}

fn appendix_slds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51d5);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..100 {
        let dim = rng.gen_range(3..=6);
        let [psi0, j, k] = random_triple(&mut rng, dim);
        let dec = AngleDecomposition {
            unperturbed: psi0.clone(),
            basis_j: j,
            basis_k: k,
            theta1: rng.gen_range(0.0..TAU),
            theta2: rng.gen_range(0.0..TAU),
            gamma: rng.gen_range(0.0..TAU),
            varphi: rng.gen_range(0.0..TAU),
        };
        let n1: f64 = rng.gen_range(0.1..3.0);
        let n2: f64 = rng.gen_range(0.1..3.0);
        let lam = [rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3)];
        let (phi1, phi2) = dec.reconstruct().expect("reconstruct");
        let c1 = FirstOrderCorrection::from_raw(phi1.scale(C64::new(n1.sqrt(), 0.0)), psi0.clone()).expect("correction");
        let c2 = FirstOrderCorrection::from_raw(phi2.scale(C64::new(n2.sqrt(), 0.0)), psi0.clone()).expect("correction");
        let psi = psi0
            .axpy(C64::new(lam[0], 0.0), c1.raw())
            .and_then(|s| s.axpy(C64::new(lam[1], 0.0), c2.raw()))
            .expect("state");
        let (l1, l2) = match sld_two_param_explicit(&dec, n1, n2, lam[0], lam[1]) {
            Ok(l) => l,
            Err(e) => return Outcome::error(e),
        };
        let g1 = pure_state_sld(&psi, c1.raw()).expect("sld");
        let g2 = pure_state_sld(&psi, c2.raw()).expect("sld");
        let resid = max_abs_entry(&(l1.matrix() - g1.matrix())).max(max_abs_entry(&(l2.matrix() - g2.matrix())));
        let lam2 = lam[0] * lam[0] + lam[1] * lam[1];
        worst_ratio = worst_ratio.max(resid / lam2);
    }
    Outcome::new(worst_ratio <= 10.0, format!("max residual / |lambda|^2 = {worst_ratio:.2e}"))
}

fn compare_to_engine(engine: &QfiMatrix, fd: &QfiMatrix) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for m in 0..engine.dim() {
        for n in 0..engine.dim() {
            let e = engine.get(m, n);
            if e.abs() > 1e-3 {
                worst = worst.max((fd.get(m, n) - e).abs() / e.abs());
                compared += 1;
            }
        }
    }
    (worst, compared)
}

/// Smooth phase attached to every member of a family.
fn gauge_phase(lam: &[f64]) -> C64 {
    let theta = 0.7 + 3.0 * lam[0] - 2.0 * lam.iter().map(|l| l * l).sum::<f64>();
    C64::from_polar(1.0, theta)
}

fn oracle_equivalence(results: &mut Vec<bool>) {
    let presets = [
        ("qubit", ModelKind::Qubit1Param, 0.0, FRAC_PI_2),
        ("qubit2", ModelKind::Qubit2Param, FRAC_PI_3, FRAC_PI_2),
        ("qutrit", ModelKind::Qutrit2Param, FRAC_PI_2, PI),
        ("anharmonic", ModelKind::Anharmonic2Param, 0.0, 2.0),
    ];
    for (name, kind, alpha, t) in presets {
        let spec = ModelSpec::new(kind).with_alpha(alpha);
        let p = build(&spec).expect("preset builds");
        let lam = vec![1e-3; p.parameter_count()];
        run(results, &format!("criterion 10 [{name}, static]"), || {
            let engine = match p.corrections().and_then(|c| qfim_static(&c)) {
                Ok(q) => q,
                Err(e) => return Outcome::error(e),
            };
            let fam = exact_ground_family(&p);
            let (fd, _) = match fd_qfim(&fam, &lam, DEFAULT_STEP) {
                Ok(r) => r,
                Err(e) => return Outcome::error(e),
            };
            let gauged = |l: &[f64]| fam(l).map(|s| s.scale(gauge_phase(l)));
            let gauge = match fd_qfim(gauged, &lam, DEFAULT_STEP) {
                Ok((g, _)) => (g.matrix() - fd.matrix()).amax(),
                Err(e) => return Outcome::error(e),
            };
            let (worst, n) = compare_to_engine(&engine, &fd);
            Outcome::new(
                worst <= 0.01 && gauge <= 1e-6,
                format!("max relative deviation {worst:.3e} over {n} entries, gauge shift {gauge:.1e}"),
            )
        });
        run(results, &format!("criterion 10 [{name}, dynamic t = {t}]"), || {
            let psi = spec.probe_state(0.0, 0.0).expect("probe");
            let engine = match dynamic_report(&p, &psi, t) {
                Ok(r) => r.qfim,
                Err(e) => return Outcome::error(e),
            };
            let fam = exact_evolved_family(&p, &psi, t);
            let (fd, _) = match fd_qfim(&fam, &lam, DEFAULT_STEP) {
                Ok(r) => r,
                Err(e) => return Outcome::error(e),
            };
            let gauged = |l: &[f64]| fam(l).map(|s| s.scale(gauge_phase(l)));
            let gauge = match fd_qfim(gauged, &lam, DEFAULT_STEP) {
                Ok((g, _)) => (g.matrix() - fd.matrix()).amax(),
                Err(e) => return Outcome::error(e),
            };
            let (worst, n) = compare_to_engine(&engine, &fd);
            Outcome::new(
                worst <= 0.01 && gauge <= 1e-6,
                format!("max relative deviation {worst:.3e} over {n} entries, gauge shift {gauge:.1e}"),
            )
        });
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator {
    let m = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    HermitianOperator::hermitian_part(&m).expect("finite")
}

fn k_dual_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4b0b);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dim = rng.gen_range(2..=20);
        let h0 = random_hermitian(&mut rng, dim);
        let h1 = random_hermitian(&mut rng, dim);
        let t = rng.gen_range(0.0..10.0);
        let spec = hermitian_eig(&h0).expect("eig");
        let a = k_operator_spectral(&spec, &h1, t, 0);
        let b = k_operator_quadrature(&h0, &h1, t, None, 0);
        match (a, b) {
            (Ok(a), Ok(b)) => worst = worst.max(max_abs_entry(&(a.op.matrix() - b.op.matrix()))),
            (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
        }
    }
    Outcome::new(worst <= 1e-8, format!("max |K_spectral - K_quadrature| = {worst:.2e}"))
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    run(&mut results, "criterion 1 [qubit static]", qubit_static);
    run(&mut results, "criterion 2 [qutrit static]", qutrit_static);
    run(&mut results, "criterion 3 [qubit two-parameter]", qubit_two_param);
    run(&mut results, "criterion 4 [anharmonic static]", anharmonic_static);
    run(&mut results, "criterion 5 [qubit dynamic]", qubit_dynamic);
    run(&mut results, "criterion 6 [qutrit dynamic]", qutrit_dynamic);
    run(&mut results, "criterion 7 [anharmonic dynamic]", anharmonic_dynamic);
    run(&mut results, "criterion 8 [bound versus time scan]", fig_b2);
    run(&mut results, "criterion 9 [explicit two-parameter SLDs]", appendix_slds);
    oracle_equivalence(&mut results);
    run(&mut results, "criterion 11 [K operator dual construction]", k_dual_construction);
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} checks, {} passed, {failed} failed", results.len(), results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
