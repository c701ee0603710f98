use std::sync::Arc;

use super::inverter::{blended_flow, inverter_automaton, InverterParams, GFL, GFM};
use super::noise::{covariance_factor, GaussianStream};
use super::profile::VoltageProfile;
use crate::estimation::{EkfSettings, GaussianBelief, Measurement, NoiseModel};
use crate::hybrid::{simulate, HybridAutomaton, HybridTrajectory, Sample, SimOptions, StepGrid};
use crate::{Error, Matrix, Result, State};

pub const DEFAULT_SEED: u64 = 42;

/// Inverter experiment: grid profile, truth initial state, noise and seed.
#[derive(Debug, Clone)]
pub struct InverterScenario {
    pub horizon: f64,
    pub dt: f64,
    pub profile: VoltageProfile,
    pub seed: u64,
    pub initial: State,
    /// Filter prior covariance is `initial_variance · I`.
    pub initial_variance: f64,
    pub params: InverterParams,
    pub noise: NoiseModel,
}

impl InverterScenario {
    /// Voltage dip and recovery over 0.2 s at `dt = 1e-4`, `Q = 1e-2·I`,
    /// `R_y = diag(0.004², 0.004², 0.01², 0.01²)`, `H = I`, `P₀ = 1e-3·I`.
    pub fn reference(seed: u64) -> Self {
        Self {
            horizon: 0.2,
            dt: 1e-4,
            profile: VoltageProfile::reference_dip(),
            seed,
            initial: State::from_vec(vec![0.0, 0.0, 1.0, 0.0]),
            initial_variance: 1e-3,
            params: InverterParams::default(),
            noise: NoiseModel::diagonal(&[1e-2; 4], &[0.004 * 0.004, 0.004 * 0.004, 0.01 * 0.01, 0.01 * 0.01])
                .expect("reference noise model is valid"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.horizon > 0.0 && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon and dt must be positive, got {} and {}",
                self.horizon, self.dt
            )));
        }
        let n = (self.horizon / self.dt).round();
        if (n * self.dt - self.horizon).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "dt = {} does not divide the horizon {}",
                self.dt, self.horizon
            )));
        }
        if !self.profile.covers(self.horizon) {
            return Err(Error::InvalidArgument(format!(
                "voltage profile must be defined on [0, {}]",
                self.horizon
            )));
        }
        if self.initial.len() != 4 || self.noise.state_dim() != 4 {
            return Err(Error::Dimension("inverter scenarios have four states".into()));
        }
        if !(self.initial_variance > 0.0) {
            return Err(Error::InvalidArgument("initial variance must be positive".into()));
        }
        Ok(())
    }

    pub fn automaton(&self) -> Result<HybridAutomaton> {
        inverter_automaton(&self.params, Arc::new(self.profile.clone()))
    }

    /// Mode the truth and the hybrid filter start in.
    pub fn initial_mode(&self) -> usize {
        if self.profile.at(0.0) < self.params.v_low {
            GFM
        } else {
            GFL
        }
    }

    /// Sigmoid-blended single-field counterpart of the automaton.
    pub fn blended_field(&self) -> impl Fn(f64, &State) -> State + Send + Sync + 'static {
        let p = self.params;
        let profile = self.profile.clone();
        move |t, x| blended_flow(x, profile.at(t), &p)
    }

    pub fn filter_settings(&self) -> Result<EkfSettings> {
        Ok(EkfSettings {
            t0: 0.0,
            horizon: self.horizon,
            dt: self.dt,
            initial: GaussianBelief::isotropic(self.initial.clone(), self.initial_variance)?,
            noise: self.noise.clone(),
        })
    }

    pub fn grid(&self) -> Result<StepGrid> {
        StepGrid::new(0.0, self.horizon, self.dt)
    }
}

/// Ground truth and its noisy measurements.
#[derive(Debug, Clone)]
pub struct ScenarioData {
    pub truth: HybridTrajectory,
    /// Post-jump truth sample at each grid node.
    pub truth_on_grid: Vec<Sample>,
    pub measurements: Vec<Measurement>,
}

/// Simulates the automaton and draws `z_k = H x_k + n_k` at every grid node.
pub fn generate_truth_and_measurements(scenario: &InverterScenario) -> Result<ScenarioData> {
    scenario.validate()?;
    let model = scenario.automaton()?;
    let opts = SimOptions::new(scenario.horizon, scenario.dt);
    let truth = simulate(&model, scenario.initial_mode(), &scenario.initial, &opts)?;
    let grid = scenario.grid()?;
    let truth_on_grid = on_grid(&truth, &grid)?;

    let h = &scenario.noise.observation;
    let factor: Matrix = covariance_factor(&scenario.noise.measurement)?;
    let mut gauss = GaussianStream::new(scenario.seed);
    let measurements = truth_on_grid
        .iter()
        .map(|s| {
            let n = &factor * gauss.standard_normal_vector(factor.ncols());
            Measurement {
                t: s.time.t,
                z: h * &s.state + n,
            }
        })
        .collect();
    Ok(ScenarioData {
        truth,
        truth_on_grid,
        measurements,
    })
}

/// Picks the last sample at each grid node time.
pub fn on_grid(traj: &HybridTrajectory, grid: &StepGrid) -> Result<Vec<Sample>> {
    let settled = traj.settled();
    let mut out = Vec::with_capacity(grid.steps() + 1);
    let mut it = settled.into_iter().peekable();
    for k in 0..=grid.steps() {
        let tk = grid.time(k);
        loop {
            match it.peek() {
                Some(s) if s.time.t < tk => {
                    it.next();
                }
                Some(s) if s.time.t == tk => {
                    out.push((*s).clone());
                    break;
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "trajectory has no sample at grid node {k} (t = {tk})"
                    )))
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless() -> InverterScenario {
        let mut s = InverterScenario::reference(42);
        s.noise = NoiseModel::diagonal(&[1e-2; 4], &[0.0; 4]).unwrap();
        s
    }

    #[test]
    fn noiseless_measurements_are_truth() {
        let d = generate_truth_and_measurements(&noiseless()).unwrap();
        assert_eq!(d.measurements.len(), 2001);
        for (m, s) in d.measurements.iter().zip(&d.truth_on_grid) {
            assert_eq!(m.t, s.time.t);
            assert_eq!(m.z, s.state);
        }
    }

    #[test]
    fn seeded_generation_repeats() {
        let a = generate_truth_and_measurements(&InverterScenario::reference(42)).unwrap();
        let b = generate_truth_and_measurements(&InverterScenario::reference(42)).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.measurements, b.measurements);
    }

    #[test]
    fn reference_dip_switches_twice_at_crossings() {
        let d = generate_truth_and_measurements(&InverterScenario::reference(1)).unwrap();
        let edges: Vec<&str> = d.truth.jumps.iter().map(|j| j.edge.as_str()).collect();
        assert_eq!(edges, ["GFL->GFM", "GFM->GFL"]);
        // 1 − 50 (t − 0.05) = 0.8 and 0.5 + 50 (t − 0.12) = 0.9
        let times = d.truth.jump_times();
        assert!((times[0] - 0.054).abs() < 1e-9, "{}", times[0]);
        assert!((times[1] - 0.128).abs() < 1e-9, "{}", times[1]);
    }

    #[test]
    fn measurement_noise_matches_variance() {
        let d = generate_truth_and_measurements(&InverterScenario::reference(42)).unwrap();
        for (idx, sd_expected) in [(0, 0.004), (2, 0.01)] {
            let errs: Vec<f64> = d
                .measurements
                .iter()
                .zip(&d.truth_on_grid)
                .skip(1)
                .map(|(m, s)| m.z[idx] - s.state[idx])
                .collect();
            let n = errs.len() as f64;
            let sd = (errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
            assert!((sd - sd_expected).abs() < 0.15 * sd_expected, "state {idx}: {sd}");
        }
    }

    #[test]
    fn bad_step_is_rejected() {
        let mut s = InverterScenario::reference(0);
        s.dt = 3e-4 * 1.01;
        assert!(s.validate().is_err());
    }
}
