//! Krylov solvers on plain vectors with caller-supplied operators.

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||` as tracked by the iteration
    pub rel_residual: f64,
    pub converged: bool,
    /// CG met a direction with `p.Ap <= 0`
    pub indefinite: bool,
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Preconditioned conjugate gradients for symmetric `A` and SPD `M^-1`.
/// Stops early, flagged `indefinite`, if a non-positive curvature direction
/// shows up.
pub fn pcg(
    a: impl Fn(&[f64]) -> Vec<f64>,
    m_inv: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Option<&[f64]>,
    rtol: f64,
    max_iter: usize,
) -> KrylovOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], |v| v.to_vec());
    if bnorm == 0.0 {
        return KrylovOutcome {
            x: vec![0.0; n],
            iterations: 0,
            rel_residual: 0.0,
            converged: true,
            indefinite: false,
        };
    }
    let mut r = b.to_vec();
    if x0.is_some() {
        let ax = a(&x);
        axpy(&mut r, -1.0, &ax);
    }
    let mut z = m_inv(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut rel = norm2(&r) / bnorm;
    let mut it = 0;
    while rel > rtol && it < max_iter {
        let ap = a(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return KrylovOutcome {
                x,
                iterations: it,
                rel_residual: rel,
                converged: false,
                indefinite: true,
            };
        }
        let alpha = rz / pap;
        axpy(&mut x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        z = m_inv(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        rel = norm2(&r) / bnorm;
        it += 1;
    }
    KrylovOutcome {
        x,
        iterations: it,
        rel_residual: rel,
        converged: rel <= rtol,
        indefinite: false,
    }
}

/// Restarted GMRES with right preconditioning, for when `A` is indefinite.
pub fn gmres(
    a: impl Fn(&[f64]) -> Vec<f64>,
    m_inv: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Option<&[f64]>,
    rtol: f64,
    restart: usize,
    max_iter: usize,
) -> KrylovOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], |v| v.to_vec());
    if bnorm == 0.0 {
        return KrylovOutcome {
            x: vec![0.0; n],
            iterations: 0,
            rel_residual: 0.0,
            converged: true,
            indefinite: false,
        };
    }
    let mut total = 0;
    let mut rel;
    loop {
        let mut r = b.to_vec();
        let ax = a(&x);
        axpy(&mut r, -1.0, &ax);
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= rtol || total >= max_iter {
            break;
        }
        let m = restart.min(max_iter - total).max(1);
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let zk = m_inv(&v[k]);
            let mut w = a(&zk);
            z.push(zk);
            for i in 0..=k {
                h[i][k] = dot(&w, &v[i]);
                axpy(&mut w, -h[i][k], &v[i]);
            }
            h[k + 1][k] = norm2(&w);
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let den = h[k][k].hypot(h[k + 1][k]);
            if den == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / den;
            sn[k] = h[k + 1][k] / den;
            h[k][k] = den;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            let lucky = w.iter().all(|&wi| wi == 0.0);
            if !lucky {
                let wn = norm2(&w);
                v.push(w.iter().map(|wi| wi / wn).collect());
            }
            if g[k + 1].abs() / bnorm <= rtol || lucky {
                break;
            }
        }
        // back substitution
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(&mut x, *yj, &z[j]);
        }
        if k_used == 0 {
            break;
        }
    }
    KrylovOutcome {
        x,
        iterations: total,
        rel_residual: rel,
        converged: rel <= rtol,
        indefinite: false,
    }
}
