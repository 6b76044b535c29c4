use std::f64::consts::PI;

use proptest::prelude::*;
use vortexlab::asymptotics::ball::{ball_weights, disk_rect_area};
use vortexlab::kernels::{df_tau, f1_tau, f2_tau, f_tau};
use vortexlab::radial::integrate_radial;
use vortexlab::radial::shooter::{DEFAULT_R_MAX, DEFAULT_TOL};
use vortexlab::stability::{classify_value, Stability};
use vortexlab::torus::TorusDomain;
use vortexlab::Kernel;

fn tau_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.25), Just(0.5), Just(1.0), Just(2.0), Just(4.0), 0.1f64..10.0]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) || (a - b).abs() < 1e-300
}

fn rank(s: Stability) -> u8 {
    match s {
        Stability::Unstable => 0,
        Stability::Marginal => 1,
        Stability::StrictlyStable => 2,
    }
}

proptest! {
    #[test]
    fn kernel_duality(u in -30.0f64..30.0, tau in tau_strategy()) {
        let a = f_tau(u, tau).unwrap();
        let b = -f_tau(-u, 1.0 / tau).unwrap() / tau.powi(3);
        prop_assert!(close(a, b, 1e-12), "{a} {b}");
    }

    #[test]
    fn kernel_sign_and_bounds(u in -40.0f64..40.0, tau in tau_strategy()) {
        let k = Kernel::sigma(tau);
        let f = k.f(u);
        if u < 0.0 {
            prop_assert!(f >= 0.0);
        } else if u > 0.0 {
            prop_assert!(f <= 0.0);
        }
        prop_assert!(k.df(u).abs() <= k.df_sup());
        prop_assert!(k.f1(u) <= 0.0);
        prop_assert!(k.f1(u) >= -1.0 / (2.0 * (tau + 1.0) * tau.min(1.0).powi(2)));
        // F2 rises from 0 while f > 0 and falls to (1 - tau) / (2 tau^2) after
        let f2 = k.f2(u);
        if u <= 0.0 {
            prop_assert!(f2 >= 0.0);
        } else {
            prop_assert!(f2 >= (1.0 - tau) / (2.0 * tau * tau) - 1e-15);
        }
        let q = k.quantization_density(u);
        prop_assert!((0.0..=1.0f64.max(1.0 / (tau * tau))).contains(&q));
    }

    #[test]
    fn antiderivatives_differentiate_back(u in -20.0f64..20.0, tau in tau_strategy()) {
        let h = 1e-5;
        let f = f_tau(u, tau).unwrap();
        let (f1, f2) = (f1_tau(u, tau).unwrap(), f2_tau(u, tau).unwrap());
        let d1 = (f1_tau(u + h, tau).unwrap() - f1_tau(u - h, tau).unwrap()) / (2.0 * h);
        let d2 = (f2_tau(u + h, tau).unwrap() - f2_tau(u - h, tau).unwrap()) / (2.0 * h);
        // central difference: rounding ~ |F| 1e-16 / h, truncation ~ h^2
        prop_assert!((d1 - f).abs() < 1e-8 * (1.0 + f1.abs()) + 1e-6 * f.abs(), "{d1} {f}");
        prop_assert!((d2 - f).abs() < 1e-8 * (1.0 + f2.abs()) + 1e-6 * f.abs(), "{d2} {f}");
        let df = (f + 0.0 - f_tau(u - h, tau).unwrap()) / h;
        prop_assert!((df - df_tau(u, tau).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn disk_rect_area_partitions(r in 0.01f64..2.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let full = PI * r * r;
        let big = 10.0;
        let quads = [
            disk_rect_area(r, -big, x, -big, y),
            disk_rect_area(r, x, big, -big, y),
            disk_rect_area(r, -big, x, y, big),
            disk_rect_area(r, x, big, y, big),
        ];
        prop_assert!(quads.iter().all(|&a| a >= 0.0));
        let sum: f64 = quads.iter().sum();
        prop_assert!((sum - full).abs() < 1e-12 * full.max(1.0), "{sum} vs {full}");
        prop_assert!((disk_rect_area(r, -big, big, -big, big) - full).abs() < 1e-13 * full.max(1.0));
    }

    #[test]
    fn ball_weights_sum_to_disk_area(
        cx in 0.0f64..2.0,
        cy in 0.0f64..1.0,
        frac in 0.01f64..0.49,
        px in 5u32..8,
        py in 5u32..8,
    ) {
        let d = TorusDomain::new([2.0, 1.0], [1 << px, 1 << py]).unwrap();
        let r = frac;
        let w = ball_weights(&d, [cx, cy], r).unwrap();
        let area: f64 = w.iter().map(|x| x.1).sum();
        prop_assert!((area - PI * r * r).abs() < 1e-12);
        prop_assert!(w.iter().all(|&(i, a)| i < d.len() && a > 0.0 && a <= d.cell_area() * (1.0 + 1e-12)));
    }

    #[test]
    fn classification_is_monotone(a in -10.0f64..10.0, b in -10.0f64..10.0, m in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(rank(classify_value(lo, m)) <= rank(classify_value(hi, m)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn beta_is_odd_in_the_height_at_tau_one(s in 0.05f64..6.0) {
        let a = integrate_radial(s, 0.0, 1.0, DEFAULT_R_MAX, DEFAULT_TOL).unwrap().beta;
        let b = integrate_radial(-s, 0.0, 1.0, DEFAULT_R_MAX, DEFAULT_TOL).unwrap().beta;
        prop_assert!((a + b).abs() < 1e-8 * b.abs(), "{a} {b}");
        prop_assert!(a < 0.0 && b > 0.0);
    }
}
