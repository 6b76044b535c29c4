use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::torus::TorusDomain;

/// `int_{-R}^{x} sqrt(R^2 - s^2) ds` for `|x| <= R`.
fn half_chord_integral(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    0.5 * (x * (r * r - x * x).max(0.0).sqrt() + r * r * (x / r).asin()) + 0.25 * PI * r * r
}

/// Area of the disk of radius `r` centred at the origin intersected with the
/// rectangle `[x0, x1] x [y0, y1]`, integrated exactly piece by piece.
pub fn disk_rect_area(r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (a, b) = (x0.max(-r), x1.min(r));
    if a >= b || y0 >= r || y1 <= -r {
        return 0.0;
    }
    let mut cuts = vec![a, b];
    for y in [y0, y1] {
        if y.abs() < r {
            let c = (r * r - y * y).sqrt();
            for x in [-c, c] {
                if x > a && x < b {
                    cuts.push(x);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (l, h) = (w[0], w[1]);
        if h <= l {
            continue;
        }
        let m = 0.5 * (l + h);
        let c = (r * r - m * m).max(0.0).sqrt();
        // chord [-c, c] clipped to [y0, y1]; on this piece each end is either
        // the circle or the rectangle throughout
        let top_circle = c < y1;
        let bottom_circle = -c > y0;
        if (if top_circle { c } else { y1 }) <= (if bottom_circle { -c } else { y0 }) {
            continue;
        }
        let circ = half_chord_integral(h, r) - half_chord_integral(l, r);
        let len = h - l;
        let top = if top_circle { circ } else { y1 * len };
        let bottom = if bottom_circle { -circ } else { y0 * len };
        area += top - bottom;
    }
    area
}

/// Quadrature weights (cell area inside the ball) for the periodic grid
/// cells centred at the nodes, as `(index, weight)` pairs.
pub fn ball_weights(domain: &TorusDomain, center: [f64; 2], r: f64) -> Result<Vec<(usize, f64)>> {
    let [l1, l2] = domain.periods;
    if !(r > 0.0) || 2.0 * r >= l1.min(l2) {
        return Err(Error::Geometry(format!(
            "ball radius {r} must be positive and below half the shortest period"
        )));
    }
    let [h1, h2] = domain.spacing();
    let [n1, n2] = domain.grid_shape;
    let ci = (center[0] / h1).round() as i64;
    let cj = (center[1] / h2).round() as i64;
    let (ri, rj) = ((r / h1).ceil() as i64 + 1, (r / h2).ceil() as i64 + 1);
    let mut out = Vec::new();
    for dj in -rj..=rj {
        for di in -ri..=ri {
            let x = (ci + di) as f64 * h1 - center[0];
            let y = (cj + dj) as f64 * h2 - center[1];
            let w = disk_rect_area(r, x - 0.5 * h1, x + 0.5 * h1, y - 0.5 * h2, y + 0.5 * h2);
            if w > 0.0 {
                let i = (ci + di).rem_euclid(n1 as i64) as usize;
                let j = (cj + dj).rem_euclid(n2 as i64) as usize;
                out.push((domain.index(i, j), w));
            }
        }
    }
    Ok(out)
}

pub fn ball_integral(weights: &[(usize, f64)], values: &[f64]) -> f64 {
    weights.iter().map(|&(i, w)| w * values[i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area_pieces() {
        let r = 1.3;
        let full = disk_rect_area(r, -2.0, 2.0, -2.0, 2.0);
        assert!((full - PI * r * r).abs() < 1e-13);
        let quarter = disk_rect_area(r, 0.0, 2.0, 0.0, 2.0);
        assert!((quarter - PI * r * r / 4.0).abs() < 1e-13);
        // inscribed square
        let a = r / 2f64.sqrt();
        assert!((disk_rect_area(r, -a, a, -a, a) - 2.0 * r * r).abs() < 1e-13);
        // split into four tiles and re-add
        let parts = disk_rect_area(r, -2.0, 0.3, -2.0, -0.2)
            + disk_rect_area(r, 0.3, 2.0, -2.0, -0.2)
            + disk_rect_area(r, -2.0, 0.3, -0.2, 2.0)
            + disk_rect_area(r, 0.3, 2.0, -0.2, 2.0);
        assert!((parts - PI * r * r).abs() < 1e-13);
        assert_eq!(disk_rect_area(r, 1.5, 2.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn weights_sum_to_ball_area() {
        let d = TorusDomain::square(2.0, 64).unwrap();
        for (c, r) in [([1.0, 1.0], 0.37), ([0.01, 1.99], 0.5), ([0.5, 0.25], 0.9)] {
            let w = ball_weights(&d, c, r).unwrap();
            let s: f64 = w.iter().map(|x| x.1).sum();
            assert!((s - PI * r * r).abs() < 1e-12, "{s}");
        }
        assert!(ball_weights(&d, [1.0, 1.0], 1.0).is_err());
    }
}
