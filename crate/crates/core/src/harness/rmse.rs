use crate::{Error, Result, State};

/// Closed time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }
}

const ALIGN_TOL: f64 = 1e-12;

/// Per-state root-mean-square error, optionally restricted to samples whose
/// time lies in one of `windows`.
pub fn rmse(estimates: &[(f64, State)], truth: &[(f64, State)], windows: Option<&[Window]>) -> Result<Vec<f64>> {
    if estimates.len() != truth.len() {
        return Err(Error::InvalidArgument(format!(
            "estimate series has {} samples, truth has {}",
            estimates.len(),
            truth.len()
        )));
    }
    let Some((_, first)) = truth.first() else {
        return Err(Error::InvalidArgument("rmse of an empty series".into()));
    };
    let n = first.len();
    let mut sum = vec![0.0; n];
    let mut count = 0usize;
    for (k, ((te, xe), (tt, xt))) in estimates.iter().zip(truth).enumerate() {
        if (te - tt).abs() > ALIGN_TOL * tt.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!("sample {k}: estimate at t = {te}, truth at t = {tt}")));
        }
        if xe.len() != n || xt.len() != n {
            return Err(Error::Dimension(format!("sample {k}: state length differs from {n}")));
        }
        if windows.is_some_and(|ws| !ws.iter().any(|w| w.contains(*tt))) {
            continue;
        }
        for (s, (a, b)) in sum.iter_mut().zip(xe.iter().zip(xt.iter())) {
            *s += (a - b) * (a - b);
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidArgument("no samples fall inside the windows".into()));
    }
    Ok(sum.into_iter().map(|s| (s / count as f64).sqrt()).collect())
}

/// `[t − half_width, t + half_width]` around each instant, clipped to
/// `[0, horizon]`, with overlapping windows merged.
pub fn near_switch_windows(instants: &[f64], half_width: f64, horizon: f64) -> Vec<Window> {
    let mut ws: Vec<Window> = instants
        .iter()
        .map(|&t| Window {
            start: (t - half_width).max(0.0),
            end: (t + half_width).min(horizon),
        })
        .collect();
    ws.sort_by(|a, b| a.start.total_cmp(&b.start));
    let mut merged: Vec<Window> = Vec::with_capacity(ws.len());
    for w in ws {
        match merged.last_mut() {
            Some(last) if w.start <= last.end => last.end = last.end.max(w.end),
            _ => merged.push(w),
        }
    }
    merged
}
