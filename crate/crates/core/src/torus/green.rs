use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::TorusDomain;
use super::spectral::Spectral;
use crate::error::{Error, Result};

/// Ring radius, in grid spacings, used to extract the regular part.
pub const RING_CELLS: f64 = 4.0;
const RING_POINTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenField {
    pub domain: TorusDomain,
    /// source after snapping to the nearest grid node
    pub source: [f64; 2],
    pub values: Vec<f64>,
    /// `gamma(p, p) = lim G(x, p) + ln|x - p| / (2 pi)`
    pub regular_part_at_source: f64,
    pub snapped_by: f64,
}

/// DFT coefficients of the zero-mean Green's function with source at grid node
/// `node`: `e^{-i k.p} / (h1 h2 |k|^2)`, zero at `k = 0`.
pub(crate) fn green_coefficients(s: &Spectral, node: (usize, usize)) -> Vec<Complex64> {
    let d = s.domain();
    let [n1, n2] = d.grid_shape;
    let inv_cell = 1.0 / d.cell_area();
    (0..d.len())
        .map(|idx| {
            let k2 = s.k2(idx);
            if k2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let (i, j) = (idx % n1, idx / n1);
            let phase = -2.0 * PI
                * ((i * node.0) as f64 / n1 as f64 + (j * node.1) as f64 / n2 as f64);
            Complex64::from_polar(inv_cell / k2, phase)
        })
        .collect()
}

/// Ring average of the band-limited `G + ln r / (2 pi)` at `r = 4h`, with the
/// `r^2 / (4 |Omega|)` drift of the regular part removed.
pub(crate) fn regular_part(s: &Spectral, coeffs: &[Complex64], p: [f64; 2]) -> f64 {
    let d = s.domain();
    let r = RING_CELLS * d.h_min();
    let mut acc = 0.0;
    for m in 0..RING_POINTS {
        let th = 2.0 * PI * m as f64 / RING_POINTS as f64;
        acc += s.interpolate(coeffs, [p[0] + r * th.cos(), p[1] + r * th.sin()]).0;
    }
    acc / RING_POINTS as f64 + r.ln() / (2.0 * PI) - r * r / (4.0 * d.area())
        - truncation_bias(d.spacing(), r)
}

/// Ring average at radius `r` of the Fourier modes that the grid cannot
/// carry, `-(1/4 pi^2) int_{k outside box} J0(|k| r) / |k|^2 dk`, which is the
/// offset between the band-limited and the exact Green's function on the ring.
fn truncation_bias(h: [f64; 2], r: f64) -> f64 {
    let (a1, a2) = (PI / h[0], PI / h[1]);
    let kc = a1.hypot(a2);
    let k0 = a1.min(a2);
    let outside = |k: f64| {
        let inside = ((a2 / k).min(1.0).asin() - (a1 / k).min(1.0).acos()).max(0.0);
        2.0 * PI - 4.0 * inside
    };
    let partial = simpson(|k| bessel_j0(k * r) / k * outside(k), k0, kc, 4000);
    let x = kc * r;
    let far = -EULER_GAMMA - (x / 2.0).ln()
        + simpson(
            |t| if t == 0.0 { 0.0 } else { (1.0 - bessel_j0(t)) / t },
            0.0,
            x,
            4000,
        );
    -(partial + 2.0 * PI * far) / (4.0 * PI * PI)
}

fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = g(a) + g(b);
    for i in 1..n {
        acc += g(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Power series of `J0`; accurate to ~1e-10 for `|x| <= 20`, which covers
/// every argument used here.
fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 10 {
            break;
        }
    }
    sum
}

pub fn green_function(domain: &TorusDomain, source: [f64; 2]) -> Result<GreenField> {
    domain.validate()?;
    for k in 0..2 {
        if !(0.0..domain.periods[k]).contains(&source[k]) {
            return Err(Error::Geometry(format!(
                "source {source:?} outside the fundamental domain"
            )));
        }
    }
    let s = Spectral::new(*domain);
    green_function_with(&s, source)
}

pub fn green_function_with(s: &Spectral, source: [f64; 2]) -> Result<GreenField> {
    let d = *s.domain();
    let node = d.nearest_node(source);
    let snapped = d.point(d.index(node.0, node.1));
    let coeffs = green_coefficients(s, node);
    let gamma = regular_part(s, &coeffs, snapped);
    let values = s.inverse(coeffs);
    Ok(GreenField {
        domain: d,
        source: snapped,
        values,
        regular_part_at_source: gamma,
        snapped_by: d.distance(source, snapped),
    })
}

/// Exact periodic Green's function with source at a grid node, sampled on
/// the grid together with its gradient. The node value is replaced by the
/// regular part `gamma(p, p)` and the node gradient by zero.
#[derive(Debug, Clone)]
pub(crate) struct ExactGreen {
    pub values: Vec<f64>,
    pub grad: [Vec<f64>; 2],
    pub node: usize,
}

/// Ewald split tied to the grid: the Gaussian-filtered Fourier part is
/// summed by FFT (modes beyond the grid box are below `e^-36`) and the
/// real-space part `E1(alpha r^2) / 4 pi` is added on the nodes within
/// `alpha r^2 < 40`.
pub(crate) fn exact_green_on_grid(s: &Spectral, node: (usize, usize)) -> ExactGreen {
    let d = *s.domain();
    let [n1, n2] = d.grid_shape;
    let [h1, h2] = d.spacing();
    let alpha = ewald_alpha(&d);
    let mut coeffs = green_coefficients(s, node);
    for (idx, c) in coeffs.iter_mut().enumerate() {
        *c *= (-s.k2(idx) / (4.0 * alpha)).exp();
    }
    let [mut gx, mut gy] = s.gradient_from_coeffs(&coeffs);
    let mut values = s.inverse(coeffs);
    let center = d.index(node.0, node.1);
    let smooth_at_node = values[center];
    let offset = -1.0 / (4.0 * alpha * d.area());
    let reach = (40.0 / alpha).sqrt();
    let (r1, r2) = ((reach / h1).ceil() as i64, (reach / h2).ceil() as i64);
    let mut self_images = 0.0;
    for v in values.iter_mut() {
        *v += offset;
    }
    for dj in -r2..=r2 {
        for di in -r1..=r1 {
            let y = [di as f64 * h1, dj as f64 * h2];
            let r2y = y[0] * y[0] + y[1] * y[1];
            let z = alpha * r2y;
            if z > 40.0 {
                continue;
            }
            let i = (node.0 as i64 + di).rem_euclid(n1 as i64) as usize;
            let j = (node.1 as i64 + dj).rem_euclid(n2 as i64) as usize;
            let idx = d.index(i, j);
            if idx == center {
                if di != 0 || dj != 0 {
                    self_images += exp_integral_e1(z) / (4.0 * PI);
                }
                continue;
            }
            values[idx] += exp_integral_e1(z) / (4.0 * PI);
            let c = -(-z).exp() / (2.0 * PI * r2y);
            gx[idx] += c * y[0];
            gy[idx] += c * y[1];
        }
    }
    let regular_part = (-EULER_GAMMA - alpha.ln()) / (4.0 * PI) + offset + smooth_at_node + self_images;
    values[center] = regular_part;
    gx[center] = 0.0;
    gy[center] = 0.0;
    ExactGreen {
        values,
        grad: [gx, gy],
        node: center,
    }
}

/// Splitting parameter for which the filtered Fourier part lives inside the
/// grid box up to `e^-36`.
fn ewald_alpha(d: &TorusDomain) -> f64 {
    let [h1, h2] = d.spacing();
    let kn = PI / h1.max(h2);
    kn * kn / 144.0
}

/// Pointwise evaluation of `u0 = sum_j w_j G(., p_j)` and its gradient with
/// the same Ewald split as [`exact_green_on_grid`], for points off the grid.
#[derive(Debug, Clone)]
pub struct SingularEval {
    domain: TorusDomain,
    alpha: f64,
    coeffs: Vec<Complex64>,
    sources: Vec<([f64; 2], f64)>,
}

impl SingularEval {
    /// `sources` are `(grid node point, weight)`.
    pub fn new(s: &Spectral, sources: &[([f64; 2], f64)]) -> Self {
        let d = *s.domain();
        let alpha = ewald_alpha(&d);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d.len()];
        for &(p, w) in sources {
            let node = d.nearest_node(p);
            for (c, g) in coeffs.iter_mut().zip(green_coefficients(s, node)) {
                *c += w * g;
            }
        }
        for (idx, c) in coeffs.iter_mut().enumerate() {
            *c *= (-s.k2(idx) / (4.0 * alpha)).exp();
        }
        Self {
            domain: d,
            alpha,
            coeffs,
            sources: sources.to_vec(),
        }
    }

    /// `(u0(x), grad u0(x))`; `x` must not coincide with a source.
    pub fn eval(&self, s: &Spectral, x: [f64; 2]) -> (f64, [f64; 2]) {
        let (mut val, mut grad) = s.interpolate(&self.coeffs, x);
        let [l1, l2] = self.domain.periods;
        let reach = (40.0 / self.alpha).sqrt();
        let (m1, m2) = ((reach / l1).ceil() as i64 + 1, (reach / l2).ceil() as i64 + 1);
        for &(p, w) in &self.sources {
            val -= w / (4.0 * self.alpha * self.domain.area());
            let d = self.domain.displacement(x, p);
            for i in -m1..=m1 {
                for j in -m2..=m2 {
                    let y = [d[0] + i as f64 * l1, d[1] + j as f64 * l2];
                    let r2 = y[0] * y[0] + y[1] * y[1];
                    let z = self.alpha * r2;
                    if z > 40.0 {
                        continue;
                    }
                    val += w * exp_integral_e1(z) / (4.0 * PI);
                    let c = -w * (-z).exp() / (2.0 * PI * r2);
                    grad[0] += c * y[0];
                    grad[1] += c * y[1];
                }
            }
        }
        (val, grad)
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(z)` for `z > 0`.
pub(crate) fn exp_integral_e1(z: f64) -> f64 {
    if z <= 1.0 {
        // -gamma - ln z - sum (-z)^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() - sum
    } else {
        // continued fraction, modified Lentz
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / tiny;
        let mut dd = 1.0 / b;
        let mut h = dd;
        for i in 1..200 {
            let an = -((i * i) as f64);
            b += 2.0;
            dd = 1.0 / (an * dd + b);
            c = b + an / c;
            let del = c * dd;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    }
}
