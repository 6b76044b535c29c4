use super::shooter::{BcType, RadialShooter, RadialSolution, DEFAULT_R_MAX};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, Nonlinearity};
use crate::vortex::VortexSign;

pub const BISECTION_REL_WIDTH: f64 = 1e-13;
pub const BISECTION_MAX_ITER: usize = 200;
/// integrator tolerance used while shooting for the topological profile
pub const TOPOLOGICAL_TOL: f64 = 1e-12;

/// Topological entire solution of `Delta u + f(u) = -4 pi nu delta_0`, found by
/// bisection on the regular-part value `s = v(0)`.
pub fn find_topological(nu: f64, tau: f64, bracket: (f64, f64)) -> Result<RadialSolution> {
    find_topological_with(
        RadialShooter::new(tau)
            .source(VortexSign::Negative, nu)
            .tol(TOPOLOGICAL_TOL),
        bracket,
    )
}

/// Same search for an arbitrary shooter configuration (source sign, kernel,
/// tolerance, `r_max`).
///
/// The two ends of the bracket must lock onto opposite tails. Once the bracket
/// has collapsed, the profile is integrated at its midpoint and cut at the
/// radius where `|u| + r|u'|` is smallest: beyond that point the computed
/// trajectory only reflects the amplified bisection error, and the true
/// solution is zero to within the reported tail values.
pub fn find_topological_with(shooter: RadialShooter, bracket: (f64, f64)) -> Result<RadialSolution> {
    if shooter.kernel.kind == Nonlinearity::Csh && shooter.nu > 0.0 {
        return Err(Error::Unsupported("topological shooting with a vortex source in CSH mode"));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Bracket {
            lo,
            hi,
            detail: "bracket must be finite with lo < hi".into(),
        });
    }
    let mut shooter = shooter;
    shooter.retry_undetermined = false;

    let side_lo = shooter.tail_side(lo)?;
    let side_hi = shooter.tail_side(hi)?;
    let s = match (side_lo, side_hi) {
        (None, _) => lo,
        (_, None) => hi,
        (Some(a), Some(b)) if a == b => {
            return Err(Error::Bracket {
                lo,
                hi,
                detail: format!("both ends lock onto {a:?}"),
            })
        }
        (Some(a), Some(_)) => {
            let mut found = None;
            for _ in 0..BISECTION_MAX_ITER {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= BISECTION_REL_WIDTH * mid.abs().max(1.0) || mid == lo || mid == hi {
                    break;
                }
                match shooter.tail_side(mid)? {
                    None => {
                        found = Some(mid);
                        break;
                    }
                    Some(side) if side == a => lo = mid,
                    Some(_) => hi = mid,
                }
            }
            found.unwrap_or(0.5 * (lo + hi))
        }
    };

    let mut sol = shooter.integrate(s)?;
    truncate_at_departure(&mut sol);
    Ok(sol)
}

fn truncate_at_departure(sol: &mut RadialSolution) {
    let score = |i: usize| {
        let p = &sol.samples[i];
        p.u.abs() + (p.r * p.du_dr).abs()
    };
    let mut best = 0;
    for i in 1..sol.samples.len() {
        if score(i) < score(best) {
            best = i;
        }
    }
    // u = 0 exactly everywhere (no source, s = 0): nothing departs
    if score(best) == 0.0 && sol.samples.iter().all(|p| p.u == 0.0) {
        sol.bc_type = BcType::Topological;
        sol.beta = 0.0;
        return;
    }
    sol.samples.truncate(best + 1);
    let last = *sol.last();
    sol.bc_type = BcType::Topological;
    sol.beta = -last.w;
    sol.diagnostics.r_end = last.r;
    sol.diagnostics.lock_radius = None;
    sol.diagnostics.stopped_on_overflow = false;
}

/// Bracket for [`find_topological`] found by doubling outward from `[-1, 1]`
/// until the two ends lock onto opposite tails.
pub fn topological_bracket(shooter: &RadialShooter) -> Result<(f64, f64)> {
    let mut sh = shooter.clone();
    sh.retry_undetermined = false;
    let mut half = 1.0;
    for _ in 0..12 {
        let (lo, hi) = (-half, half);
        let a = sh.tail_side(lo)?;
        let b = sh.tail_side(hi)?;
        if a.is_none() || b.is_none() || a != b {
            return Ok((lo, hi));
        }
        half *= 2.0;
    }
    Err(Error::Bracket {
        lo: -half,
        hi: half,
        detail: "no sign change of the tail found".into(),
    })
}

/// Shooter defaults used by [`find_topological`], for callers that need to
/// tweak a field before searching.
pub fn topological_shooter(nu: f64, kernel: Kernel) -> RadialShooter {
    RadialShooter::with_kernel(kernel)
        .source(VortexSign::Negative, nu)
        .tol(TOPOLOGICAL_TOL)
        .r_max(DEFAULT_R_MAX)
}

/// Topological profile for vortex order `nu` with an automatically located
/// bracket.
pub fn find_topological_auto(nu: f64, tau: f64) -> Result<RadialSolution> {
    let sh = topological_shooter(nu, Kernel::sigma(tau));
    let br = topological_bracket(&sh)?;
    find_topological_with(sh, br)
}
