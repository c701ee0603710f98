use std::cmp::Ordering;

use super::system::ModeId;
use crate::State;

/// Position on a hybrid time domain: ordinary time and jump count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridTime {
    pub t: f64,
    pub j: usize,
}

impl HybridTime {
    pub fn new(t: f64, j: usize) -> Self {
        Self { t, j }
    }
}

impl PartialOrd for HybridTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.t.partial_cmp(&other.t)? {
            Ordering::Equal => Some(self.j.cmp(&other.j)),
            ord => Some(ord),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: HybridTime,
    pub mode: ModeId,
    pub state: State,
}

/// One applied reset. `time` is the post-jump hybrid time.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    pub time: HybridTime,
    pub edge: String,
    pub from: ModeId,
    pub to: ModeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    HorizonReached,
    /// Jump budget exhausted, either `max_jumps` overall or the per-instant
    /// Zeno budget.
    MaxJumpsReached,
    LeftFlowSet,
}

/// Samples of a hybrid arc, ordered by hybrid time.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridTrajectory {
    pub mode_names: Vec<String>,
    pub samples: Vec<Sample>,
    pub jumps: Vec<JumpRecord>,
    pub termination: Termination,
}

impl HybridTrajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    pub fn jump_times(&self) -> Vec<f64> {
        self.jumps.iter().map(|r| r.time.t).collect()
    }

    pub fn mode_name(&self, mode: ModeId) -> &str {
        &self.mode_names[mode]
    }

    /// Post-jump sample at every distinct ordinary time; collapses the
    /// pre-/post-jump pair at each jump instant into the post-jump state.
    pub fn settled(&self) -> Vec<&Sample> {
        let mut out: Vec<&Sample> = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            match out.last_mut() {
                Some(prev) if prev.time.t == s.time.t => *prev = s,
                _ => out.push(s),
            }
        }
        out
    }

    /// Checks hybrid-time ordering: `(t, j)` lexicographically non-decreasing,
    /// `j` increasing by exactly one across a jump, `t` constant across a jump.
    pub fn check_time_domain(&self) -> Result<(), String> {
        for (i, w) in self.samples.windows(2).enumerate() {
            let (a, b) = (&w[0].time, &w[1].time);
            if b.j == a.j {
                if b.t < a.t {
                    return Err(format!("sample {}: time decreased from {} to {}", i + 1, a.t, b.t));
                }
                if w[0].mode != w[1].mode {
                    return Err(format!("sample {}: mode changed without a jump", i + 1));
                }
            } else if b.j == a.j + 1 {
                if b.t != a.t {
                    return Err(format!("sample {}: time changed across a jump", i + 1));
                }
            } else {
                return Err(format!("sample {}: jump counter went from {} to {}", i + 1, a.j, b.j));
            }
        }
        Ok(())
    }
}
