//! End-to-end acceptance checks, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::time::Instant;

use vortexlab::asymptotics::*;
use vortexlab::kernels::f_tau;
use vortexlab::radial::curve::linspace;
use vortexlab::radial::shooter::{DEFAULT_R_MAX, DEFAULT_TOL};
use vortexlab::radial::topological::{topological_bracket, topological_shooter};
use vortexlab::radial::*;
use vortexlab::stability::*;
use vortexlab::torus::*;
use vortexlab::{Kernel, ModelParams, Nonlinearity, Vortex, VortexSet, VortexSign};

type Outcome = (bool, String);

fn sci(xs: &[f64]) -> String {
    let v: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", v.join(", "))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn one_vortex_set(l: f64) -> VortexSet {
    VortexSet::single([l / 2.0, l / 2.0], 1, VortexSign::Positive)
}

fn newton(d: &TorusDomain, v: &VortexSet, p: &ModelParams) -> TorusField {
    solve_newton(d, v, p, None, None, &NewtonOptions::default()).unwrap()
}

fn beta_curves() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for tau in [0.5, 1.0, 2.0] {
        let t = Instant::now();
        let neg = compute_beta_curve(tau, &linspace(-8.0, -0.25, 16), DEFAULT_R_MAX, DEFAULT_TOL).unwrap();
        let pos = compute_beta_curve(tau, &linspace(0.25, 8.0, 16), DEFAULT_R_MAX, DEFAULT_TOL).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let bn: Vec<f64> = neg.samples.iter().map(|p| p.beta).collect();
        let bp: Vec<f64> = pos.samples.iter().map(|p| p.beta).collect();
        let this = neg.failures() == 0
            && pos.failures() == 0
            && bn.iter().all(|&b| b > 4.0)
            && neg.monotone_violations == 0
            && bn[0] - 4.0 < bn[15] - 4.0
            && bp.iter().all(|&b| b < -4.0)
            && pos.monotone_violations == 0
            && bp[15] > -4.5
            && secs < 240.0;
        ok &= this;
        notes.push(format!(
            "tau={tau}: beta(-8)={:.6} beta(-0.25)={:.6} beta(0.25)={:.6} beta(8)={:.6} ({secs:.1}s)",
            bn[0], bn[15], bp[0], bp[15]
        ));
    }
    (ok, notes.join("; "))
}

fn zero_height() -> Outcome {
    let sol = integrate_radial(0.0, 0.0, 1.0, DEFAULT_R_MAX, DEFAULT_TOL).unwrap();
    let max_u = sol.samples.iter().fold(0.0f64, |m, p| m.max(p.u.abs()));
    (sol.beta == 0.0 && max_u == 0.0, format!("beta={} max|u|={max_u}", sol.beta))
}

fn quantization() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (nu, tau) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let sh = topological_shooter(nu, Kernel::sigma(tau));
        let br = topological_bracket(&sh).unwrap();
        let sol = find_topological_with(sh, br).unwrap();
        let q = mass_integral(&sol, MassKind::Quantization).unwrap().value;
        let expect = 4.0 * (tau + 1.0) * PI * nu * nu;
        let rel = (q - expect).abs() / expect;
        ok &= rel < 5e-3;
        notes.push(format!("(nu={nu},tau={tau}) rel={rel:.2e}"));
    }
    (ok, notes.join(" "))
}

fn total_mass() -> Outcome {
    let d = TorusDomain::square(2.0, 128).unwrap();
    let vx = |x: f64, y: f64, m: u32| Vortex {
        point: [x, y],
        multiplicity: m,
    };
    let configs = [
        (VortexSet::single([1.0, 1.0], 1, VortexSign::Positive), 1.0, 0.1),
        (VortexSet::single([1.0, 1.0], 2, VortexSign::Positive), 1.0, 0.07),
        (VortexSet::single([0.7, 1.2], 1, VortexSign::Negative), 0.5, 0.1),
        (VortexSet::new(vec![vx(0.5, 1.0, 1)], vec![vx(1.5, 1.0, 1)]).unwrap(), 1.0, 0.1),
        (
            VortexSet::new(vec![vx(0.5, 0.5, 1), vx(1.5, 1.5, 1)], vec![vx(0.5, 1.5, 1)]).unwrap(),
            2.0,
            0.04,
        ),
    ];
    let mut worst = 0.0f64;
    for (v, tau, eps) in configs.iter() {
        let f = newton(&d, v, &ModelParams::new(*tau, *eps).unwrap());
        let target = 4.0 * PI * (v.n1() as f64 - v.n2() as f64);
        let err = (f.total_mass() - target).abs() / target.abs().max(4.0 * PI);
        worst = worst.max(err);
    }
    (worst < 1e-6, format!("{} configurations, worst rel err {worst:.2e}", configs.len()))
}

fn identity() -> Outcome {
    let t = Instant::now();
    let d = TorusDomain::square(2.0, 256).unwrap();
    let f = newton(&d, &one_vortex_set(2.0), &ModelParams::new(1.0, 0.1).unwrap());
    let mut ok = true;
    let mut notes = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        let c = identity_check(&f, a).unwrap();
        ok &= c.rel_err < 1e-3 && c.rhs == 4.0 * PI / a;
        notes.push(format!("a={a} rel={:.2e}", c.rel_err));
    }
    let secs = t.elapsed().as_secs_f64();
    (ok && secs < 60.0, format!("{} ({secs:.1}s)", notes.join(" ")))
}

fn stability(sweep: &[SweepRecord]) -> Outcome {
    let d = TorusDomain::square(1.0, 32).unwrap();
    let mut oracle = 0.0f64;
    for tau in [0.5, 1.0, 2.0] {
        let eps = 0.1;
        let f = TorusField::zero(d, ModelParams::new(tau, eps).unwrap());
        let e = principal_eigen_torus(&f).unwrap();
        let closed = 1.0 / (eps * eps * (tau + 1.0f64).powi(3));
        oracle = oracle.max((e.eigenvalue - closed).abs() / closed);
    }
    let n = sweep.len();
    let stable: Vec<Stability> = sweep[n - 2..]
        .iter()
        .map(|r| r.eigen.as_ref().map_or(Stability::Marginal, |e| e.classification))
        .collect();
    let mut radial = Vec::new();
    let mut radial_ok = true;
    for s in [-1.0, -3.0] {
        let sol = integrate_radial(s, 0.0, 1.0, DEFAULT_R_MAX, DEFAULT_TOL).unwrap();
        let e = weighted_eigen_radial(&sol).unwrap();
        radial_ok &= classify_stability(&e.result, 0.0) == Stability::Unstable && e.sensitivity < 0.05;
        radial.push(format!("s={s} mu*={:.5} sens={:.1e}", e.result.eigenvalue, e.sensitivity));
    }
    let ok = oracle < 1e-10 && stable.iter().all(|&s| s == Stability::StrictlyStable) && radial_ok;
    (ok, format!("oracle rel {oracle:.1e}; torus {stable:?}; {}", radial.join(" ")))
}

fn sweep_config() -> SweepConfig {
    // far enough from the periodic images that the first step is already
    // in the exponential regime
    let l = 6.0;
    SweepConfig {
        domain: TorusDomain::square(l, 256).unwrap(),
        vortices: one_vortex_set(l),
        tau: 1.0,
        nonlinearity: Nonlinearity::SigmaO3,
        epsilons: vec![0.25, 0.25 * 0.2f64.sqrt(), 0.05],
        k_radius: Some(1.25),
        ball_radius: None,
        eigen: true,
        newton: NewtonOptions::default(),
    }
}

fn sweep_verdict(recs: &[SweepRecord], secs: f64) -> Outcome {
    let v = classify_alternative(recs, &VerdictThresholds::default());
    let sup: Vec<f64> = recs.iter().map(|r| r.sup_abs_k()).collect();
    let decreasing = sup.windows(2).all(|w| w[1] < w[0]);
    let ratio = squared_ratio_test(&sup);
    let bounded = recs.iter().all(|r| r.total_abs_mass.is_finite() && r.total_abs_mass < 100.0 * 4.0 * PI);
    let ok = v.kind == AlternativeKind::UniformZero
        && decreasing
        && ratio.as_ref().is_some_and(|t| t.passed)
        && bounded
        && secs < 600.0;
    let bound = ratio.map_or(f64::NAN, |t| t.predicted_bound);
    (
        ok,
        format!(
            "verdict {:?}; sup_K|u| {} (bound {bound:.3e}); sup_K u {}; inf_K u {}; max abs mass {:.4} ({secs:.0}s)",
            v.kind,
            sci(&sup),
            sci(&v.evidence.sup_k),
            sci(&v.evidence.inf_k),
            v.evidence.total_abs_mass_max
        ),
    )
}

fn pohozaev() -> Outcome {
    let mut res = Vec::new();
    for spd in [50, 100, 200] {
        let sh = topological_shooter(1.0, Kernel::sigma(1.0)).samples_per_decade(spd);
        let br = topological_bracket(&sh).unwrap();
        let sol = find_topological_with(sh, br).unwrap();
        res.push(pohozaev_radial(&sol, 20.0, MassKind::F2Mass).unwrap().residual);
    }
    let ok = res.iter().all(|&r| r < 1e-4) && res.windows(2).all(|w| w[1] <= w[0] / 2.0);
    (ok, format!("residuals at 50/100/200 samples per decade {}", sci(&res)))
}

fn duality() -> Outcome {
    let mut worst = 0.0f64;
    for tau in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for i in 0..=600 {
            let u = -30.0 + 0.1 * i as f64;
            let a = f_tau(u, tau).unwrap();
            let b = -f_tau(-u, 1.0 / tau).unwrap() / tau.powi(3);
            if a != b {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
            }
        }
    }
    let d = TorusDomain::square(2.0, 128).unwrap();
    let v = one_vortex_set(2.0);
    let p = ModelParams::new(2.0, 0.05).unwrap();
    let a = newton(&d, &v, &p);
    let b = newton(&d, &v.sign_swapped(), &p.dual().unwrap());
    let neg: Vec<f64> = b.u().iter().map(|x| -x).collect();
    let diff = max_abs_diff(&a.u(), &neg);
    (worst < 1e-12 && diff < 1e-8, format!("kernel rel {worst:.1e}; torus max|u_a + u_b| {diff:.1e}"))
}

fn cross_solver() -> Outcome {
    let d = TorusDomain::square(2.0, 256).unwrap();
    let p = ModelParams::new(1.0, 0.1).unwrap();
    let v = one_vortex_set(2.0);
    let a = newton(&d, &v, &p);
    let (b, _) = solve_monotone(&d, &v, &p, None, None, &MonotoneOptions::default()).unwrap();
    let diff = max_abs_diff(&a.u(), &b.u());
    (diff < 1e-8, format!("max|u_newton - u_monotone| {diff:.2e}"))
}

fn main() {
    let t = Instant::now();
    let sweep = run_sweep(&sweep_config());
    let sweep_secs = t.elapsed().as_secs_f64();

    let (sweep_stab, sweep_res) = match &sweep {
        Ok(r) => (stability(r), sweep_verdict(r, sweep_secs)),
        Err(e) => ((false, format!("sweep failed: {e}")), (false, format!("sweep failed: {e}"))),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("beta-curve structure", beta_curves()),
        ("zero height", zero_height()),
        ("quantization", quantization()),
        ("exact total mass", total_mass()),
        ("integral identity", identity()),
        ("stability trichotomy", sweep_stab),
        ("epsilon sweep", sweep_res),
        ("pohozaev residuals", pohozaev()),
        ("duality", duality()),
        ("cross-solver agreement", cross_solver()),
    ];
    let mut failed = 0;
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {detail}", if *ok { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
