//! Signed vortex data on the torus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::ModelParams;

/// Which side of the equation a vortex sits on.
///
/// Positive vortices carry `+4 pi m delta_p` (the solution tends to `-inf`
/// there), negative ones `-4 pi m delta_p` (the solution tends to `+inf`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VortexSign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl VortexSign {
    /// Coefficient `kappa` with `u ~ 2 kappa m ln|x - p|` near the vortex.
    pub fn log_coefficient(self) -> f64 {
        match self {
            VortexSign::Positive => 1.0,
            VortexSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            VortexSign::Positive => VortexSign::Negative,
            VortexSign::Negative => VortexSign::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    pub point: [f64; 2],
    pub multiplicity: u32,
}

/// Index into [`VortexSet::iter`]: positive vortices first, then negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VortexId(pub usize);

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VortexSet {
    positive: Vec<Vortex>,
    negative: Vec<Vortex>,
}

impl VortexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(positive: Vec<Vortex>, negative: Vec<Vortex>) -> Result<Self> {
        let set = Self { positive, negative };
        set.check_distinct()?;
        Ok(set)
    }

    pub fn single(point: [f64; 2], multiplicity: u32, sign: VortexSign) -> Self {
        let v = vec![Vortex {
            point,
            multiplicity,
        }];
        match sign {
            VortexSign::Positive => Self {
                positive: v,
                negative: vec![],
            },
            VortexSign::Negative => Self {
                positive: vec![],
                negative: v,
            },
        }
    }

    pub fn push(&mut self, vortex: Vortex, sign: VortexSign) -> Result<VortexId> {
        match sign {
            VortexSign::Positive => self.positive.push(vortex),
            VortexSign::Negative => self.negative.push(vortex),
        }
        if let Err(e) = self.check_distinct() {
            match sign {
                VortexSign::Positive => self.positive.pop(),
                VortexSign::Negative => self.negative.pop(),
            };
            return Err(e);
        }
        let id = match sign {
            VortexSign::Positive => self.positive.len() - 1,
            VortexSign::Negative => self.positive.len() + self.negative.len() - 1,
        };
        Ok(VortexId(id))
    }

    fn check_distinct(&self) -> Result<()> {
        let pts: Vec<[f64; 2]> = self.iter().map(|(_, _, v)| v.point).collect();
        for v in self.positive.iter().chain(&self.negative) {
            if !(v.point[0].is_finite() && v.point[1].is_finite()) {
                return Err(Error::Geometry(format!("non-finite vortex point {:?}", v.point)));
            }
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i] == pts[j] {
                    return Err(Error::Geometry(format!("vortex points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn positive(&self) -> &[Vortex] {
        &self.positive
    }

    pub fn negative(&self) -> &[Vortex] {
        &self.negative
    }

    pub fn n1(&self) -> u32 {
        self.positive.iter().map(|v| v.multiplicity).sum()
    }

    pub fn n2(&self) -> u32 {
        self.negative.iter().map(|v| v.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (VortexId, VortexSign, &Vortex)> + '_ {
        self.positive
            .iter()
            .map(|v| (VortexSign::Positive, v))
            .chain(self.negative.iter().map(|v| (VortexSign::Negative, v)))
            .enumerate()
            .map(|(i, (s, v))| (VortexId(i), s, v))
    }

    pub fn get(&self, id: VortexId) -> Option<(VortexSign, &Vortex)> {
        self.iter().nth(id.0).map(|(_, s, v)| (s, v))
    }

    /// Same points with every sign swapped.
    pub fn sign_swapped(&self) -> Self {
        Self {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    /// Checks every point lies in `[0, L1) x [0, L2)`.
    pub fn validate_in(&self, periods: [f64; 2]) -> Result<()> {
        for (id, _, v) in self.iter() {
            for d in 0..2 {
                if !(0.0..periods[d]).contains(&v.point[d]) {
                    return Err(Error::Geometry(format!(
                        "vortex {} at {:?} lies outside the fundamental domain {:?}",
                        id.0, v.point, periods
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn map_points(&self, mut g: impl FnMut([f64; 2]) -> [f64; 2]) -> Self {
        let mut m = |v: &Vortex| Vortex {
            point: g(v.point),
            multiplicity: v.multiplicity,
        };
        Self {
            positive: self.positive.iter().map(&mut m).collect(),
            negative: self.negative.iter().map(&mut m).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h1_holds: bool,
    pub h2_holds: bool,
    pub detail: String,
}

/// Evaluates the two structural hypotheses under which stable solutions are
/// known to be topological: `N1 != N2`, and either `tau = 1` or every
/// multiplicity on the side with the larger total is at most one.
pub fn check_hypotheses(vortices: &VortexSet, params: &ModelParams) -> HypothesisReport {
    let (n1, n2) = (vortices.n1(), vortices.n2());
    let h1 = n1 != n2;
    let larger: &[Vortex] = match n1.cmp(&n2) {
        std::cmp::Ordering::Greater => vortices.positive(),
        std::cmp::Ordering::Less => vortices.negative(),
        std::cmp::Ordering::Equal => &[],
    };
    let offending: Vec<u32> = larger
        .iter()
        .map(|v| v.multiplicity)
        .filter(|&m| m > 1)
        .collect();
    let h2 = params.tau == 1.0 || offending.is_empty();
    let mut detail = format!("N1 = {n1}, N2 = {n2}, tau = {}", params.tau);
    if !h1 {
        detail.push_str("; H1 fails (N1 = N2)");
    }
    if !h2 {
        detail.push_str(&format!(
            "; H2 fails (tau != 1 and multiplicities {offending:?} > 1 on the larger side)"
        ));
    }
    HypothesisReport {
        h1_holds: h1,
        h2_holds: h2,
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vx(x: f64, m: u32) -> Vortex {
        Vortex {
            point: [x, 0.5],
            multiplicity: m,
        }
    }

    #[test]
    fn hypotheses() {
        let p1 = ModelParams::new(1.0, 0.1).unwrap();
        let p2 = ModelParams::new(2.0, 0.1).unwrap();

        let v = VortexSet::new(vec![vx(0.1, 2)], vec![vx(0.5, 1)]).unwrap();
        let r = check_hypotheses(&v, &p1);
        assert!(r.h1_holds && r.h2_holds);

        let v = VortexSet::new(vec![vx(0.1, 2), vx(0.2, 1)], vec![vx(0.5, 1)]).unwrap();
        let r = check_hypotheses(&v, &p2);
        assert!(r.h1_holds && !r.h2_holds);

        let v = VortexSet::new(vec![vx(0.1, 1)], vec![vx(0.5, 1)]).unwrap();
        assert!(!check_hypotheses(&v, &p1).h1_holds);

        // m = 2 only on the smaller side is allowed
        let v = VortexSet::new(vec![vx(0.1, 1), vx(0.2, 1), vx(0.3, 1)], vec![vx(0.5, 2)]).unwrap();
        assert!(check_hypotheses(&v, &p2).h2_holds);
    }

    #[test]
    fn counts_and_ids() {
        let mut v = VortexSet::empty();
        assert_eq!((v.n1(), v.n2()), (0, 0));
        let a = v.push(vx(0.1, 2), VortexSign::Positive).unwrap();
        let b = v.push(vx(0.3, 3), VortexSign::Negative).unwrap();
        let c = v.push(vx(0.2, 1), VortexSign::Positive).unwrap();
        assert_eq!((v.n1(), v.n2()), (3, 3));
        assert_eq!(a, VortexId(0));
        assert_eq!(b, VortexId(1));
        assert_eq!(c, VortexId(1));
        assert_eq!(v.get(VortexId(2)).unwrap().0, VortexSign::Negative);
        assert!(v.push(vx(0.1, 1), VortexSign::Negative).is_err());
        assert_eq!(v.len(), 3);
        let s = v.sign_swapped();
        assert_eq!((s.n1(), s.n2()), (3, 3));
        assert_eq!(s.negative().len(), 2);
    }

    #[test]
    fn domain_check() {
        let v = VortexSet::single([1.5, 0.2], 1, VortexSign::Positive);
        assert!(v.validate_in([1.0, 1.0]).is_err());
        assert!(v.validate_in([2.0, 1.0]).is_ok());
    }
}
