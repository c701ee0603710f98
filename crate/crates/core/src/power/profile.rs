use crate::{Error, Result};

/// Piecewise-linear grid-voltage magnitude, held constant outside its breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageProfile {
    points: Vec<(f64, f64)>,
}

impl VoltageProfile {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("voltage profile needs at least one breakpoint".into()));
        }
        if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidArgument("voltage profile breakpoints must be finite".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("voltage profile times must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn constant(v: f64) -> Self {
        Self { points: vec![(0.0, v)] }
    }

    /// 1.0 pu, ramp to 0.5 pu over [0.05, 0.06] s, hold, ramp back over
    /// [0.12, 0.13] s, hold to 0.2 s.
    pub fn reference_dip() -> Self {
        Self {
            points: vec![(0.0, 1.0), (0.05, 1.0), (0.06, 0.5), (0.12, 0.5), (0.13, 1.0), (0.2, 1.0)],
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn at(&self, t: f64) -> f64 {
        let pts = &self.points;
        let i = pts.partition_point(|&(tp, _)| tp <= t);
        if i == 0 {
            return pts[0].1;
        }
        if i == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (t0, v0) = pts[i - 1];
        let (t1, v1) = pts[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Covers `[0, horizon]` when the first breakpoint is at or before 0 and
    /// the last at or after `horizon`.
    pub fn covers(&self, horizon: f64) -> bool {
        self.points[0].0 <= 0.0 && self.points[self.points.len() - 1].0 >= horizon
    }
}
