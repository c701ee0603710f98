use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{ExperimentConfig, FilterChoice, ModelKind};
use super::csv::{format_float, TrajectoryTable};
use super::rmse::{near_switch_windows, rmse, Window};
use crate::estimation::{run_ekf, EkfRun, ProcessModel};
use crate::hybrid::{HybridTrajectory, Sample};
use crate::power::inverter::STATE_NAMES;
use crate::power::{generate_truth_and_measurements, InverterScenario, ScenarioData};
use crate::{Error, Result, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Hybrid,
    Continuous,
}

impl FilterKind {
    pub fn key(self) -> &'static str {
        match self {
            FilterKind::Hybrid => "hybrid",
            FilterKind::Continuous => "continuous",
        }
    }

    fn table_label(self) -> &'static str {
        match self {
            FilterKind::Hybrid => "HA",
            FilterKind::Continuous => "Continuous model",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterRmse {
    pub filter: FilterKind,
    pub overall: Vec<f64>,
    /// `None` when the truth never switches.
    pub near_switch: Option<Vec<f64>>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    pub state_names: Vec<String>,
    pub filters: Vec<FilterRmse>,
    pub switching_times: Vec<f64>,
    pub windows: Vec<Window>,
    pub seed: u64,
    /// Resolved configuration echo.
    pub settings: Vec<(&'static str, String)>,
}

impl RmseReport {
    pub fn get(&self, filter: FilterKind) -> Option<&FilterRmse> {
        self.filters.iter().find(|f| f.filter == filter)
    }

    /// Aligned table with near-switch and overall blocks per state.
    pub fn table(&self) -> String {
        let n = self.state_names.len();
        let cell = 11;
        let mut s = String::new();
        let heading = format!("{:<18}{:<w$}  {}", "", "Near-switch RMSE", "Overall RMSE", w = cell * n);
        let _ = write!(s, "{:<18}", "Underlying model");
        for _ in 0..2 {
            for name in &self.state_names {
                let _ = write!(s, "{name:<cell$}");
            }
            s.push_str("  ");
        }
        let mut out = format!("{heading}\n{}\n", s.trim_end());
        for f in &self.filters {
            let mut line = format!("{:<18}", f.filter.table_label());
            match &f.near_switch {
                Some(v) => v.iter().for_each(|x| line.push_str(&format!("{:<cell$}", format!("{x:.3e}")))),
                None => (0..n).for_each(|_| line.push_str(&format!("{:<cell$}", "n/a"))),
            }
            line.push_str("  ");
            f.overall.iter().for_each(|x| line.push_str(&format!("{:<cell$}", format!("{x:.3e}"))));
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// Comment header (settings, switching instants, table) followed by
    /// `filter,state,window,rmse` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("# filter comparison report\n");
        let _ = writeln!(s, "# resolved_seed = {}", self.seed);
        for (k, v) in &self.settings {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let times: Vec<String> = self.switching_times.iter().map(|t| format_float(*t)).collect();
        let _ = writeln!(s, "# switching_times = {}", times.join(", "));
        let ws: Vec<String> = self
            .windows
            .iter()
            .map(|w| format!("{}:{}", format_float(w.start), format_float(w.end)))
            .collect();
        let _ = writeln!(s, "# near_switch_windows = {}", ws.join(", "));
        s.push_str("#\n");
        for line in self.table().lines() {
            let _ = writeln!(s, "# {line}");
        }
        s.push_str("filter,state,window,rmse\n");
        for f in &self.filters {
            for (label, values) in [("near_switch", f.near_switch.as_ref()), ("overall", Some(&f.overall))] {
                for (i, name) in self.state_names.iter().enumerate() {
                    let v = values.map_or("nan".to_string(), |v| format_float(v[i]));
                    let _ = writeln!(s, "{},{name},{label},{v}", f.filter.key());
                }
            }
        }
        s
    }
}

/// Truth, measurements, filter runs and their RMSE report.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub scenario: InverterScenario,
    pub data: ScenarioData,
    pub hybrid: Option<EkfRun>,
    pub continuous: Option<EkfRun>,
    pub report: RmseReport,
}

fn timed(f: impl FnOnce() -> Result<EkfRun>) -> Result<(EkfRun, f64)> {
    let start = Instant::now();
    let run = f()?;
    Ok((run, start.elapsed().as_secs_f64()))
}

/// One truth and measurement stream from `seed`, then the selected filters on
/// that identical stream.
pub fn run_comparison(config: &ExperimentConfig, seed: u64) -> Result<Comparison> {
    if config.model != ModelKind::Inverter {
        return Err(Error::InvalidArgument("filter comparison is defined for the inverter model".into()));
    }
    let mut scenario = config.inverter.clone();
    scenario.seed = seed;
    let data = generate_truth_and_measurements(&scenario)?;
    let settings = scenario.filter_settings()?;
    let model = scenario.automaton()?;
    let field = scenario.blended_field();
    let hybrid_process = ProcessModel::Hybrid {
        model: &model,
        initial_mode: scenario.initial_mode(),
    };
    let continuous_process = ProcessModel::Continuous {
        label: "blend",
        field: &field,
    };

    let (hybrid, continuous) = std::thread::scope(|s| {
        let h = config
            .filter
            .runs_hybrid()
            .then(|| s.spawn(|| timed(|| run_ekf(&hybrid_process, &settings, &data.measurements))));
        let c = config
            .filter
            .runs_continuous()
            .then(|| s.spawn(|| timed(|| run_ekf(&continuous_process, &settings, &data.measurements))));
        let join = |j: Option<std::thread::ScopedJoinHandle<'_, Result<(EkfRun, f64)>>>| {
            j.map(|j| j.join().expect("filter thread panicked")).transpose()
        };
        (join(h), join(c))
    });
    let hybrid = hybrid?;
    let continuous = continuous?;

    let truth: Vec<(f64, State)> = data.truth_on_grid.iter().map(|s| (s.time.t, s.state.clone())).collect();
    let switching_times = data.truth.jump_times();
    let windows = near_switch_windows(&switching_times, config.near_switch_window, scenario.horizon);
    let mut filters = Vec::new();
    for (kind, run) in [(FilterKind::Hybrid, &hybrid), (FilterKind::Continuous, &continuous)] {
        let Some((run, runtime)) = run else { continue };
        let est = run.means();
        let near_switch = if windows.is_empty() {
            None
        } else {
            Some(rmse(&est, &truth, Some(&windows))?)
        };
        filters.push(FilterRmse {
            filter: kind,
            overall: rmse(&est, &truth, None)?,
            near_switch,
            runtime_seconds: *runtime,
        });
    }
    let mut resolved = config.clone();
    resolved.seed = Some(seed);
    let report = RmseReport {
        state_names: STATE_NAMES.iter().map(|s| s.to_string()).collect(),
        filters,
        switching_times,
        windows,
        seed,
        settings: resolved.entries(),
    };
    Ok(Comparison {
        scenario,
        data,
        hybrid: hybrid.map(|(r, _)| r),
        continuous: continuous.map(|(r, _)| r),
        report,
    })
}

/// Every sample of a hybrid arc, jump instants included.
pub fn trajectory_table(traj: &HybridTrajectory, columns: &[&str]) -> Result<TrajectoryTable> {
    let mut table = TrajectoryTable::new(columns.iter().copied());
    for s in &traj.samples {
        table.push(s.time.t, s.time.j, traj.mode_name(s.mode), s.state.iter().copied().collect())?;
    }
    Ok(table)
}

/// Truth at the grid nodes beside the filter's posterior mean and `tr P`.
pub fn estimate_table(truth: &HybridTrajectory, truth_on_grid: &[Sample], run: &EkfRun) -> Result<TrajectoryTable> {
    let mut table = TrajectoryTable::new(
        STATE_NAMES
            .iter()
            .copied()
            .chain(["ihat_d", "ihat_q", "vhat_d", "vhat_q", "p_trace"]),
    );
    if truth_on_grid.len() != run.beliefs.len() {
        return Err(Error::Dimension("filter output does not match the truth grid".into()));
    }
    for (s, b) in truth_on_grid.iter().zip(&run.beliefs) {
        let mut values: Vec<f64> = s.state.iter().chain(b.mean.iter()).copied().collect();
        values.push(b.trace());
        table.push(s.time.t, s.time.j, truth.mode_name(s.mode), values)?;
    }
    Ok(table)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes one trajectory CSV per filter run and `report.csv`.
pub fn write_comparison(out_dir: &Path, cmp: &Comparison) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    let mut written = Vec::new();
    for (kind, run) in [(FilterKind::Hybrid, &cmp.hybrid), (FilterKind::Continuous, &cmp.continuous)] {
        if let Some(run) = run {
            let path = out_dir.join(format!("trajectory_{}.csv", kind.key()));
            estimate_table(&cmp.data.truth, &cmp.data.truth_on_grid, run)?.write(&path)?;
            written.push(path);
        }
    }
    let path = out_dir.join("report.csv");
    std::fs::write(&path, cmp.report.to_csv()).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Resolves the filter for single-filter runs.
pub fn single_filter(choice: FilterChoice) -> Result<FilterChoice> {
    match choice {
        FilterChoice::Both => Err(Error::Config(
            "estimate runs one filter; choose hybrid or continuous".into(),
        )),
        c => Ok(c),
    }
}
