//! Fourier operators on the periodic grid.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::domain::TorusDomain;

#[derive(Clone)]
pub struct Spectral {
    domain: TorusDomain,
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
    /// angular wavenumbers per axis; the Nyquist entry is stored positive
    k: [Vec<f64>; 2],
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("domain", &self.domain).finish()
    }
}

fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            2.0 * PI * m / l
        })
        .collect()
}

impl Spectral {
    pub fn new(domain: TorusDomain) -> Self {
        let mut planner = FftPlanner::new();
        let [n1, n2] = domain.grid_shape;
        Self {
            domain,
            fwd: [planner.plan_fft_forward(n1), planner.plan_fft_forward(n2)],
            inv: [planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2)],
            k: [
                wavenumbers(n1, domain.periods[0]),
                wavenumbers(n2, domain.periods[1]),
            ],
        }
    }

    pub fn domain(&self) -> &TorusDomain {
        &self.domain
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let [n1, n2] = self.domain.grid_shape;
        let plans = if inverse { &self.inv } else { &self.fwd };
        plans[0].process(data);
        let mut cols = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for j in 0..n2 {
            for i in 0..n1 {
                cols[i * n2 + j] = data[j * n1 + i];
            }
        }
        plans[1].process(&mut cols);
        for j in 0..n2 {
            for i in 0..n1 {
                data[j * n1 + i] = cols[i * n2 + j];
            }
        }
    }

    /// Unnormalized DFT `X_k = sum_x x e^{-i k.x}`.
    pub fn forward(&self, x: &[f64]) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut c, false);
        c
    }

    /// Inverse of [`forward`](Self::forward), keeping the real part.
    pub fn inverse(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut c, true);
        let scale = 1.0 / self.domain.len() as f64;
        c.iter().map(|z| z.re * scale).collect()
    }

    #[inline]
    fn axes(&self, idx: usize) -> (usize, usize) {
        let n1 = self.domain.grid_shape[0];
        (idx % n1, idx / n1)
    }

    /// `|k|^2` of coefficient `idx`.
    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        let (i, j) = self.axes(idx);
        self.k[0][i].powi(2) + self.k[1][j].powi(2)
    }

    /// Wavevector used for first derivatives (Nyquist modes zeroed so that
    /// derivatives of real data stay real).
    #[inline]
    pub fn derivative_k(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.axes(idx);
        let [n1, n2] = self.domain.grid_shape;
        [
            if i == n1 / 2 { 0.0 } else { self.k[0][i] },
            if j == n2 / 2 { 0.0 } else { self.k[1][j] },
        ]
    }

    pub fn apply(&self, x: &[f64], mult: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut c = self.forward(x);
        for (idx, z) in c.iter_mut().enumerate() {
            *z *= mult(idx);
        }
        self.inverse(c)
    }

    pub fn laplacian(&self, x: &[f64]) -> Vec<f64> {
        self.apply(x, |idx| -self.k2(idx))
    }

    pub fn gradient(&self, x: &[f64]) -> [Vec<f64>; 2] {
        self.gradient_from_coeffs(&self.forward(x))
    }

    pub fn gradient_from_coeffs(&self, c: &[Complex64]) -> [Vec<f64>; 2] {
        let i = Complex64::new(0.0, 1.0);
        let mut gx = c.to_vec();
        let mut gy = c.to_vec();
        for idx in 0..c.len() {
            let k = self.derivative_k(idx);
            gx[idx] *= i * k[0];
            gy[idx] *= i * k[1];
        }
        [self.inverse(gx), self.inverse(gy)]
    }

    /// Solves `(-Delta + shift) x = rhs`. For `shift = 0` the mean of `rhs` is
    /// dropped and the zero-mean solution returned.
    pub fn solve_shifted(&self, rhs: &[f64], shift: f64) -> Vec<f64> {
        self.apply(rhs, |idx| {
            let d = self.k2(idx) + shift;
            if d == 0.0 {
                0.0
            } else {
                1.0 / d
            }
        })
    }

    fn axis_phases(&self, axis: usize, x: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.domain.grid_shape[axis];
        let mut e = Vec::with_capacity(n);
        let mut de = Vec::with_capacity(n);
        for (m, &k) in self.k[axis].iter().enumerate() {
            if m == n / 2 {
                // split Nyquist mode: real cosine
                e.push(Complex64::new((k * x).cos(), 0.0));
                de.push(Complex64::new(-k * (k * x).sin(), 0.0));
            } else {
                let z = Complex64::from_polar(1.0, k * x);
                e.push(z);
                de.push(z * Complex64::new(0.0, k));
            }
        }
        (e, de)
    }

    /// Value and gradient at an arbitrary point of the trigonometric
    /// interpolant with DFT coefficients `c`.
    pub fn interpolate(&self, c: &[Complex64], p: [f64; 2]) -> (f64, [f64; 2]) {
        let [n1, n2] = self.domain.grid_shape;
        let (ex, dex) = self.axis_phases(0, p[0]);
        let (ey, dey) = self.axis_phases(1, p[1]);
        let zero = Complex64::new(0.0, 0.0);
        let (mut val, mut gx, mut gy) = (zero, zero, zero);
        for j in 0..n2 {
            let row = &c[j * n1..(j + 1) * n1];
            let mut s = zero;
            let mut sd = zero;
            for i in 0..n1 {
                s += row[i] * ex[i];
                sd += row[i] * dex[i];
            }
            val += s * ey[j];
            gx += sd * ey[j];
            gy += s * dey[j];
        }
        let scale = 1.0 / (n1 * n2) as f64;
        (val.re * scale, [gx.re * scale, gy.re * scale])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_polynomial_derivatives_are_exact() {
        let d = TorusDomain::new([2.0, 3.0], [32, 64]).unwrap();
        let s = Spectral::new(d);
        let (a, b) = (2.0 * PI / 2.0, 2.0 * PI / 3.0);
        let f = |x: [f64; 2]| (a * x[0]).sin() * (2.0 * b * x[1]).cos() + 0.3;
        let vals: Vec<f64> = (0..d.len()).map(|i| f(d.point(i))).collect();
        let lap = s.laplacian(&vals);
        let [gx, _] = s.gradient(&vals);
        for idx in 0..d.len() {
            let x = d.point(idx);
            let expect = -(a * a + 4.0 * b * b) * (f(x) - 0.3);
            assert!((lap[idx] - expect).abs() < 1e-11);
            assert!((gx[idx] - a * (a * x[0]).cos() * (2.0 * b * x[1]).cos()).abs() < 1e-12);
        }
        let c = s.forward(&vals);
        let p = [0.37, 1.91];
        let (v, g) = s.interpolate(&c, p);
        assert!((v - f(p)).abs() < 1e-12);
        assert!((g[1] + 2.0 * b * (a * p[0]).sin() * (2.0 * b * p[1]).sin()).abs() < 1e-11);
        let back = s.solve_shifted(&lap, 0.0);
        for idx in 0..d.len() {
            assert!((back[idx] + vals[idx] - 0.3).abs() < 1e-12);
        }
    }
}
