use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexlab::linalg::norm_inf;
use vortexlab::torus::io::{csv_row_slice, read_field, write_field};
use vortexlab::torus::*;
use vortexlab::{Error, ModelParams, Vortex, VortexSet, VortexSign};

// unit torus, source at the origin: Ewald lattice sums in 50-digit arithmetic
const G_HALF_HALF: f64 = -0.055_158_900_038_162_9;
const G_QUARTER_ZERO: f64 = 0.028_173_878_266_428_4;
const GAMMA_UNIT: f64 = -0.208_577_793_243_501_38;

fn vx(x: f64, y: f64, m: u32) -> Vortex {
    Vortex {
        point: [x, y],
        multiplicity: m,
    }
}

fn newton(d: &TorusDomain, v: &VortexSet, tau: f64, eps: f64) -> TorusField {
    let p = ModelParams::new(tau, eps).unwrap();
    solve_newton(d, v, &p, None, None, &NewtonOptions::default()).unwrap()
}

fn one_vortex(n: usize, eps: f64) -> TorusField {
    let d = TorusDomain::square(2.0, n).unwrap();
    newton(&d, &VortexSet::single([1.0, 1.0], 1, VortexSign::Positive), 1.0, eps)
}

#[test]
fn green_matches_lattice_sum_oracle() {
    let d = TorusDomain::square(1.0, 1024).unwrap();
    let g = green_function(&d, [0.0, 0.0]).unwrap();
    let at = g.values[d.index(512, 512)];
    assert!((at - G_HALF_HALF).abs() < 1e-12, "{at} vs {G_HALF_HALF}");

    // band-limited values near the source converge at second order
    let mut last = f64::INFINITY;
    for n in [128, 256, 512] {
        let d = TorusDomain::square(1.0, n).unwrap();
        let g = green_function(&d, [0.0, 0.0]).unwrap();
        let err = (g.values[d.index(n / 4, 0)] - G_QUARTER_ZERO).abs();
        assert!(err < 3.0 / (n * n) as f64, "n={n}: {err:e}");
        assert!(err < last / 3.5, "n={n}: {err:e} after {last:e}");
        last = err;
        let gerr = (g.regular_part_at_source - GAMMA_UNIT).abs();
        assert!(gerr < 1e-2 / (n * n) as f64, "n={n}: gamma off by {gerr:e}");
    }
}

#[test]
fn green_has_zero_mean_and_is_symmetric() {
    let d = TorusDomain::new([1.5, 1.0], [64, 32]).unwrap();
    let s = Spectral::new(d);
    let g = green::green_function_with(&s, [0.3, 0.7]).unwrap();
    let mean = g.values.iter().sum::<f64>() / d.len() as f64;
    assert!(mean.abs() < 1e-12);
    assert!(g.snapped_by > 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = rng.gen_range(0..d.len());
        let b = rng.gen_range(0..d.len());
        let (pa, pb) = (d.point(a), d.point(b));
        let ga = green::green_function_with(&s, pa).unwrap();
        let gb = green::green_function_with(&s, pb).unwrap();
        assert!((ga.values[b] - gb.values[a]).abs() < 1e-10);
    }
}

#[test]
fn green_rejects_source_outside_domain() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    assert!(matches!(green_function(&d, [1.0, 0.5]), Err(Error::Geometry(_))));
}

#[test]
fn domain_validation() {
    assert!(TorusDomain::square(1.0, 16).is_err());
    assert!(TorusDomain::square(1.0, 48).is_err());
    assert!(TorusDomain::new([0.0, 1.0], [32, 32]).is_err());
    let d = TorusDomain::new([2.0, 1.0], [64, 32]).unwrap();
    assert_eq!(d.area(), 2.0);
    assert_eq!(d.point(d.index(3, 5)), [3.0 / 32.0, 5.0 / 32.0]);
}

#[test]
fn u0_without_vortices_is_zero() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    let u0 = build_u0(&d, &VortexSet::empty()).unwrap();
    assert!(u0.values.iter().all(|&x| x == 0.0));
}

#[test]
fn u0_has_logarithmic_singularity_with_bounded_remainder() {
    // u0 - 2 ln r = -4 pi gamma - pi r^2 / |Omega| + O(r^4) on rings
    let n = 256;
    let d = TorusDomain::square(1.0, n).unwrap();
    let s = Spectral::new(d);
    let p = [0.5, 0.5];
    let u0 = build_u0(&d, &VortexSet::single(p, 1, VortexSign::Positive)).unwrap();
    let c = s.forward(&u0.values);
    let mut prev = None;
    for r in [0.2, 0.1, 0.05] {
        let m = 256;
        let avg = (0..m)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / m as f64;
                s.interpolate(&c, [p[0] + r * th.cos(), p[1] + r * th.sin()]).0
            })
            .sum::<f64>()
            / m as f64
            - 2.0 * r.ln();
        let expect = -4.0 * PI * GAMMA_UNIT - PI * r * r;
        assert!((avg - expect).abs() < 1e-3, "r={r}: {avg} vs {expect}");
        if let Some(q) = prev {
            assert!((avg - q as f64).abs() < 0.2);
        }
        prev = Some(avg);
    }
}

#[test]
fn u0_for_mirror_pair_is_odd() {
    let n = 64;
    let d = TorusDomain::square(1.0, n).unwrap();
    let v = VortexSet::new(vec![vx(0.25, 0.5, 1)], vec![vx(0.75, 0.5, 1)]).unwrap();
    let u0 = build_u0(&d, &v).unwrap().values;
    let mean = u0.iter().sum::<f64>() / u0.len() as f64;
    assert!(mean.abs() < 1e-12);
    for j in 0..n {
        for i in 0..n {
            let a = u0[d.index(i, j)];
            let b = u0[d.index((n - i) % n, j)];
            assert!((a + b).abs() < 1e-10, "({i},{j}): {a} {b}");
        }
    }
}

#[test]
fn u0_reports_snapping_and_rejects_shared_nodes() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    let u0 = build_u0(&d, &VortexSet::single([0.51, 0.5], 1, VortexSign::Positive)).unwrap();
    assert_eq!(u0.warnings.len(), 1);
    assert_eq!(u0.vortices.positive()[0].point, [0.5, 0.5]);
    let v = VortexSet::new(vec![vx(0.5, 0.5, 1)], vec![vx(0.505, 0.5, 1)]).unwrap();
    assert!(matches!(build_u0(&d, &v), Err(Error::Geometry(_))));
}

#[test]
fn newton_without_vortices_returns_zero_immediately() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    for eps in [0.3, 0.05] {
        let f = newton(&d, &VortexSet::empty(), 1.0, eps);
        assert!(f.v.iter().all(|&x| x == 0.0));
        assert_eq!(f.newton_history, vec![0.0]);
        assert_eq!(f.total_mass(), 0.0);
        assert_eq!(f.mass_bound_report(), 0.0);
    }
}

#[test]
fn total_mass_is_exact_on_several_configurations() {
    let d = TorusDomain::square(2.0, 128).unwrap();
    let configs = [
        (VortexSet::single([1.0, 1.0], 1, VortexSign::Positive), 1.0, 0.1),
        (VortexSet::single([1.0, 1.0], 2, VortexSign::Positive), 1.0, 0.07),
        (VortexSet::single([0.5, 1.5], 1, VortexSign::Negative), 0.5, 0.1),
        (VortexSet::new(vec![vx(0.5, 1.0, 1)], vec![vx(1.5, 1.0, 1)]).unwrap(), 1.0, 0.1),
        (VortexSet::new(vec![vx(0.5, 0.5, 1), vx(1.5, 1.5, 1)], vec![vx(0.5, 1.5, 1)]).unwrap(), 2.0, 0.04),
    ];
    for (v, tau, eps) in configs {
        let f = newton(&d, &v, tau, eps);
        let target = 4.0 * PI * (v.n1() as f64 - v.n2() as f64);
        let m = f.total_mass();
        assert!(f.total_mass_error() < 1e-6, "N1={} N2={}: {m} vs {target}", v.n1(), v.n2());
        assert!(f.mass_bound_report() >= m.abs() * (1.0 - 1e-12));
        assert!(f.residual_norm < 1e-10 / (eps * eps));
    }
}

#[test]
fn residual_is_reproducible_from_returned_field() {
    let f = one_vortex(128, 0.1);
    let s = Spectral::new(f.domain);
    let r = norm_inf(&f.residual(&s));
    assert!((r - f.residual_norm).abs() < 1e-12, "{r} vs {}", f.residual_norm);
    assert_eq!(*f.newton_history.last().unwrap(), f.residual_norm);
    assert_eq!(f.solver, SolverKind::Newton);
}

#[test]
fn mass_is_stable_under_grid_refinement() {
    let a = one_vortex(64, 0.1).total_mass();
    let b = one_vortex(128, 0.1).total_mass();
    assert!((a - b).abs() < 1e-6 * 4.0 * PI, "{a} vs {b}");
}

#[test]
fn resolution_warning_when_grid_is_coarse() {
    let f = one_vortex(32, 0.1);
    assert!(f.warnings.iter().any(|w| w.contains("grid spacing")));
    let f = one_vortex(128, 0.1);
    assert!(f.warnings.is_empty(), "{:?}", f.warnings);
}

#[test]
fn continuation_reaches_the_same_solution() {
    let d = TorusDomain::square(2.0, 128).unwrap();
    let v = VortexSet::single([1.0, 1.0], 1, VortexSign::Positive);
    let p = ModelParams::new(1.0, 0.08).unwrap();
    // a one-vortex solution on this torus needs eps below about 0.17
    let sched = geometric_schedule(0.15, 0.08, 0.8);
    assert_eq!(sched.first(), Some(&0.15));
    assert_eq!(sched.last(), Some(&0.08));
    let a = solve_newton(&d, &v, &p, None, Some(&sched), &NewtonOptions::default()).unwrap();
    let b = solve_newton(&d, &v, &p, None, None, &NewtonOptions::default()).unwrap();
    let diff = a.v.iter().zip(&b.v).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff < 1e-8, "{diff:e}");
    let bad = [0.1, 0.2];
    assert!(solve_newton(&d, &v, &p, None, Some(&bad), &NewtonOptions::default()).is_err());
}

#[test]
fn topological_branch_decays_away_from_vortex() {
    // far half of the torus from a vortex at (0.5, 1)
    let d = TorusDomain::square(2.0, 128).unwrap();
    let v = VortexSet::single([0.5, 1.0], 1, VortexSign::Positive);
    let p = ModelParams::new(1.0, 0.15).unwrap();
    let s = Spectral::new(d);
    let mut warm: Option<Vec<f64>> = None;
    let mut last = f64::INFINITY;
    for eps in [0.15, 0.1, 0.07, 0.05] {
        let p = ModelParams { epsilon: eps, ..p };
        let f = newton::solve_newton_with(&s, &v, &p, warm.as_deref(), None, &NewtonOptions::default()).unwrap();
        let u = f.u();
        let far = (0..d.len())
            .filter(|&i| d.point(i)[0] >= 1.0)
            .map(|i| u[i].abs())
            .fold(0.0, f64::max);
        assert!(far < last, "eps={eps}: {far} after {last}");
        last = far;
        warm = Some(f.v);
    }
}

#[test]
fn identity_holds_for_several_test_parameters() {
    let f = one_vortex(128, 0.1);
    for a in [0.5, 1.0, 2.0, 3.0] {
        let c = identity_check(&f, a).unwrap();
        assert_eq!(c.rhs, 4.0 * PI / a);
        assert!(c.rel_err < 1e-5, "a={a}: {c:?}");
    }
    assert!(identity_check(&f, 0.0).is_err());
}

#[test]
fn identity_on_zero_solution_and_balanced_pair() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    let z = TorusField::zero(d, ModelParams::new(1.0, 0.1).unwrap());
    let c = identity_check(&z, 1.0).unwrap();
    assert_eq!((c.lhs, c.rhs), (0.0, 0.0));

    let d = TorusDomain::square(2.0, 128).unwrap();
    let pair = VortexSet::new(vec![vx(0.5, 1.0, 1)], vec![vx(1.5, 1.0, 1)]).unwrap();
    let negative = VortexSet::single([1.0, 1.0], 1, VortexSign::Negative);
    for v in [pair, negative] {
        let f = newton(&d, &v, 1.0, 0.1);
        for a in [0.5, 1.0, 2.0] {
            let c = identity_check(&f, a).unwrap();
            let rhs = 4.0 * PI * (v.n1() as f64 / a + v.n2() as f64);
            assert!((c.rhs - rhs).abs() < 1e-12);
            assert!(c.rel_err < 1e-5, "a={a}: {c:?}");
        }
    }
}

#[test]
fn duality_maps_solutions_to_negatives() {
    // (tau, eps, Z) and (1/tau, eps tau^{3/2}, swapped Z) give u and -u
    let d = TorusDomain::square(2.0, 128).unwrap();
    for (tau, eps) in [(2.0, 0.05), (1.0, 0.1), (0.5, 0.14)] {
        let v = VortexSet::single([1.0, 1.0], 1, VortexSign::Positive);
        let p = ModelParams::new(tau, eps).unwrap();
        let q = p.dual().unwrap();
        let a = solve_newton(&d, &v, &p, None, None, &NewtonOptions::default()).unwrap();
        let b = solve_newton(&d, &v.sign_swapped(), &q, None, None, &NewtonOptions::default()).unwrap();
        let diff = a.u().iter().zip(b.u()).fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
        assert!(diff < 1e-8, "tau={tau}: {diff:e}");
    }
}

#[test]
fn monotone_agrees_with_newton() {
    let f = one_vortex(128, 0.1);
    let (g, check) = solve_monotone(&f.domain, &f.vortices, &f.params, None, None, &MonotoneOptions::default()).unwrap();
    assert!(check.super_ok && check.ordered);
    assert_eq!(g.solver, SolverKind::Monotone);
    let diff = f.v.iter().zip(&g.v).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff < 1e-8, "{diff:e}");
    // iterates decrease from the supersolution
    assert!(g.newton_history.len() > 2);
}

#[test]
fn monotone_fixed_point_is_returned_unchanged() {
    let f = one_vortex(64, 0.1);
    let (g, check) = solve_monotone(
        &f.domain,
        &f.vortices,
        &f.params,
        Some(&f.v),
        Some(&f.v),
        &MonotoneOptions::default(),
    )
    .unwrap();
    assert!(check.sub_ok && check.super_ok);
    assert_eq!(g.v, f.v);
    assert_eq!(g.newton_history.len(), 1);
}

#[test]
fn monotone_zero_problem_in_small_bracket() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    let p = ModelParams::new(1.0, 0.2).unwrap();
    let delta = 0.3;
    let sub = vec![-delta; d.len()];
    let sup = vec![delta; d.len()];
    let (g, check) = solve_monotone(&d, &VortexSet::empty(), &p, Some(&sub), Some(&sup), &MonotoneOptions::default()).unwrap();
    assert!(check.sub_ok && check.super_ok);
    // residual below 1e-10 eps^-2 with |f'(0)| = 1/8 leaves |u| around 1e-9
    assert!(norm_inf(&g.u()) < 1e-8, "{}", norm_inf(&g.u()));
}

#[test]
fn monotone_rejects_bad_brackets() {
    let d = TorusDomain::square(1.0, 32).unwrap();
    let p = ModelParams::new(1.0, 0.2).unwrap();
    let z = VortexSet::empty();
    let opts = MonotoneOptions::default();
    let lo = vec![0.1; d.len()];
    let hi = vec![-0.1; d.len()];
    assert!(matches!(
        solve_monotone(&d, &z, &p, Some(&lo), Some(&hi), &opts),
        Err(Error::InvalidParameter(_))
    ));
    // -0.1 is not a supersolution: the iteration climbs away from it
    let sub = vec![-0.2; d.len()];
    let sup = vec![-0.1; d.len()];
    assert!(matches!(
        solve_monotone(&d, &z, &p, Some(&sub), Some(&sup), &opts),
        Err(Error::Monotonicity { .. })
    ));
    assert!(solve_monotone(&d, &z, &p, Some(&sub[..10]), None, &opts).is_err());
}

#[test]
fn default_bracket_reports_its_checks() {
    let f = one_vortex(64, 0.1);
    let (sub, sup) = default_bracket(&f.u0);
    assert!(sub.iter().zip(&sup).all(|(a, b)| a < b));
    let (_, check) = solve_monotone(&f.domain, &f.vortices, &f.params, None, None, &MonotoneOptions::default()).unwrap();
    assert!(check.super_ok);
    assert_eq!(check.sub_ok, check.sub_violation <= 1e-9 / 0.01);
}

fn scratch_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("vortexlab-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn field_export_round_trips() {
    let f = one_vortex(64, 0.1);
    let dir = scratch_dir("io");
    let (bin, json) = write_field(&f, &dir.join("field")).unwrap();
    assert_eq!(std::fs::metadata(&bin).unwrap().len(), 2 * 8 * 64 * 64);
    let side: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(side["shape"], serde_json::json!([64, 64]));
    assert_eq!(side["dtype"], "f64le");
    let g = read_field(&dir.join("field")).unwrap();
    assert_eq!(g, f);
    let g = read_field(&json).unwrap();
    assert_eq!(g.v, f.v);

    let csv = csv_row_slice(&f, 32).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,u0,v,u"));
    assert_eq!(lines.count(), 64);
    assert!(csv_row_slice(&f, 64).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reading_missing_or_corrupt_field_fails() {
    let dir = scratch_dir("corrupt");
    assert!(read_field(&dir.join("nothing")).is_err());
    let f = one_vortex(32, 0.1);
    let (bin, _) = write_field(&f, &dir.join("field")).unwrap();
    std::fs::write(&bin, [0u8; 16]).unwrap();
    assert!(read_field(&dir.join("field")).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
