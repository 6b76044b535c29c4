use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

pub const MIN_POINTS: usize = 32;

/// Flat torus `[0, L1) x [0, L2)` sampled on a uniform periodic grid.
///
/// Grid values are stored row-major with `x` fastest: index `j * n1 + i` holds
/// the value at `(i L1 / n1, j L2 / n2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusDomain {
    pub periods: [f64; 2],
    pub grid_shape: [usize; 2],
}

impl TorusDomain {
    pub fn new(periods: [f64; 2], grid_shape: [usize; 2]) -> Result<Self> {
        let d = Self {
            periods,
            grid_shape,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn square(l: f64, n: usize) -> Result<Self> {
        Self::new([l, l], [n, n])
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("L1", self.periods[0])?;
        ensure_positive("L2", self.periods[1])?;
        for n in self.grid_shape {
            if n < MIN_POINTS || !n.is_power_of_two() {
                return Err(Error::InvalidParameter(format!(
                    "grid sizes must be powers of two >= {MIN_POINTS}, got {:?}",
                    self.grid_shape
                )));
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.periods[0] * self.periods[1]
    }

    pub fn len(&self) -> usize {
        self.grid_shape[0] * self.grid_shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 2] {
        [
            self.periods[0] / self.grid_shape[0] as f64,
            self.periods[1] / self.grid_shape[1] as f64,
        ]
    }

    pub fn h_min(&self) -> f64 {
        let [h1, h2] = self.spacing();
        h1.min(h2)
    }

    pub fn cell_area(&self) -> f64 {
        let [h1, h2] = self.spacing();
        h1 * h2
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.grid_shape[0] + i
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let n1 = self.grid_shape[0];
        let [h1, h2] = self.spacing();
        [(idx % n1) as f64 * h1, (idx / n1) as f64 * h2]
    }

    /// Nearest grid node to `p` (periodically wrapped).
    pub fn nearest_node(&self, p: [f64; 2]) -> (usize, usize) {
        let [h1, h2] = self.spacing();
        let [n1, n2] = self.grid_shape;
        let i = (p[0] / h1).round().rem_euclid(n1 as f64) as usize;
        let j = (p[1] / h2).round().rem_euclid(n2 as f64) as usize;
        (i % n1, j % n2)
    }

    /// Shortest periodic displacement `x - p`.
    #[inline]
    pub fn displacement(&self, x: [f64; 2], p: [f64; 2]) -> [f64; 2] {
        let mut d = [x[0] - p[0], x[1] - p[1]];
        for k in 0..2 {
            let l = self.periods[k];
            d[k] -= l * (d[k] / l).round();
        }
        d
    }

    pub fn distance(&self, x: [f64; 2], p: [f64; 2]) -> f64 {
        let d = self.displacement(x, p);
        d[0].hypot(d[1])
    }

    /// Trapezoidal (equal-weight) integral of grid values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_area()
    }
}
