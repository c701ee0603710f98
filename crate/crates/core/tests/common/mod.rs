// Shared property checks and oracles for the integration and acceptance tests.
#![allow(dead_code)]

use std::sync::Arc;

use hds::estimation::{
    ekf_predict, ekf_update, numerical_jacobian, propagate_belief_through_jump, GaussianBelief, NoiseModel,
    SaltationMatrix,
};
use hds::hybrid::{
    lift_switched, lifted_initial, mld_step, rk4_step, simulate, FlowJumpSystem, HybridAutomaton, HybridModel,
    HybridTrajectory, MldDims, MldSystem, PwaSystem, Region, SimOptions, StepGrid, SwitchedSystem, VectorField,
    AffineUpdate,
};
use hds::{Matrix, State};
use nalgebra::{dvector, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

pub const CASES: u32 = 128;

/// Runs `check` on `cases` inputs drawn from `strategy` with a fixed seed.
pub fn run_cases<S, F>(strategy: S, cases: u32, seed: u64, check: F) -> Result<u32, String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), String>,
{
    let config = Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        max_shrink_iters: 256,
        ..Config::default()
    };
    let mut runner = TestRunner::new(config);
    runner
        .run(&strategy, |v| check(v).map_err(TestCaseError::fail))
        .map(|_| cases)
        .map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matrix(n: usize, m: usize, range: std::ops::Range<f64>) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(range, n * m).prop_map(move |v| Matrix::from_row_slice(n, m, &v))
}

// ---- hybrid time, flow containment, jump legality ----

/// Bouncing ball: restitution, drop height, gravity.
pub fn ball_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3..0.95f64, 0.2..3.0f64, 1.0..20.0f64)
}

pub fn ball(e: f64, g: f64) -> FlowJumpSystem {
    FlowJumpSystem::new(2, move |_t, x: &State| dvector![x[1], -g])
        .with_flow_set(|_t, x: &State| x[0])
        .with_jump(|_t, x: &State| -x[0].max(x[1]), move |_t, x: &State| dvector![0.0, -e * x[1]])
}

/// Time-domain ordering, flow containment between jumps, and guard margin at
/// each pre-jump sample.
pub fn check_trajectory<M: HybridModel + ?Sized>(model: &M, traj: &HybridTrajectory) -> Result<(), String> {
    traj.check_time_domain()?;
    ensure(traj.jumps.iter().enumerate().all(|(i, r)| r.time.j == i + 1), || {
        "jump records are not numbered 1, 2, ...".into()
    })?;
    for w in traj.samples.windows(2) {
        let (pre, post) = (&w[0], &w[1]);
        if post.time.j == pre.time.j + 1 {
            let margin = model
                .edges_from(pre.mode)
                .iter()
                .map(|&e| model.guard_margin(e, pre.time.t, &pre.state))
                .fold(f64::NEG_INFINITY, f64::max);
            ensure(margin >= -1e-6, || format!("jump at t = {} with guard margin {margin}", pre.time.t))?;
        } else {
            let m = model.flow_margin(pre.mode, pre.time.t, &pre.state);
            let speed = model.flow(pre.mode, pre.time.t, &pre.state).amax().max(1.0);
            ensure(m >= -1e-8 * speed, || format!("sample at t = {} outside the flow set ({m})", pre.time.t))?;
        }
    }
    Ok(())
}

pub fn check_ball((e, h, g): (f64, f64, f64)) -> Result<(), String> {
    let sys = ball(e, g);
    let opts = SimOptions::new(3.0, 1e-3).max_jumps(40);
    let traj = simulate(&sys, 0, &dvector![h, 0.0], &opts).map_err(|e| e.to_string())?;
    check_trajectory(&sys, &traj)?;
    let first = (2.0 * h / g).sqrt();
    if let Some(t) = traj.jump_times().first() {
        ensure((t - first).abs() < 1e-8, || format!("first impact {t}, expected {first}"))?;
    }
    let again = simulate(&sys, 0, &dvector![h, 0.0], &opts).map_err(|e| e.to_string())?;
    ensure(again == traj, || "repeated simulation differs".into())
}

/// Two modes with linear flows; 0 → 1 when `x0 >= c`, 1 → 0 when `x0 <= -c`.
#[derive(Debug, Clone)]
pub struct TwoModeCase {
    pub a0: Matrix,
    pub a1: Matrix,
    pub bias: f64,
    pub c: f64,
    pub shrink: f64,
    pub x0: State,
}

pub fn two_mode_strategy() -> impl Strategy<Value = TwoModeCase> {
    (
        matrix(2, 2, -2.0..2.0),
        matrix(2, 2, -2.0..2.0),
        0.5..3.0f64,
        0.05..1.0f64,
        0.2..1.0f64,
        (-0.04..0.04f64, -1.0..1.0f64),
    )
        .prop_map(|(a0, a1, bias, c, shrink, (x, y))| TwoModeCase {
            a0,
            a1,
            bias,
            c,
            shrink,
            x0: dvector![x, y],
        })
}

pub fn two_mode(case: &TwoModeCase) -> HybridAutomaton {
    let (a0, a1, bias, c, k) = (case.a0.clone(), case.a1.clone(), case.bias, case.c, case.shrink);
    let mut b = HybridAutomaton::builder(2);
    let up = b.mode("up", move |_t, x: &State| &a0 * x + dvector![bias, 0.0]);
    let down = b.mode("down", move |_t, x: &State| &a1 * x - dvector![bias, 0.0]);
    b.invariant(up, move |_t, x: &State| c - x[0]);
    b.invariant(down, move |_t, x: &State| x[0] + c);
    b.edge(up, down, move |_t, x: &State| x[0] - c, move |_t, x: &State| dvector![x[0], k * x[1]]);
    b.edge(down, up, move |_t, x: &State| -c - x[0], move |_t, x: &State| dvector![x[0], k * x[1]]);
    b.build().expect("valid automaton")
}

pub fn check_two_mode(case: TwoModeCase) -> Result<(), String> {
    let model = two_mode(&case);
    let opts = SimOptions::new(2.0, 1e-2).max_jumps(60);
    let traj = simulate(&model, 0, &case.x0, &opts).map_err(|e| e.to_string())?;
    check_trajectory(&model, &traj)
}

// ---- switched-system lift ----

#[derive(Debug, Clone)]
pub struct SwitchedCase {
    pub dim: usize,
    pub mats: Vec<Matrix>,
    pub forcing: Vec<f64>,
    pub times: Vec<f64>,
    pub modes: Vec<usize>,
    pub z0: State,
}

pub fn switched_strategy() -> impl Strategy<Value = SwitchedCase> {
    (1usize..=3, 1usize..=5, 0usize..=10).prop_flat_map(|(dim, nmodes, nswitch)| {
        (
            prop::collection::vec(matrix(dim, dim, -3.0..3.0), nmodes),
            prop::collection::vec(-1.0..1.0f64, nmodes),
            prop::collection::vec(0.01..0.99f64, nswitch),
            prop::collection::vec(0..nmodes, nswitch + 1),
            prop::collection::vec(-1.0..1.0f64, dim),
        )
            .prop_map(move |(mats, forcing, mut times, modes, z0)| {
                times.sort_by(f64::total_cmp);
                times.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
                // keep switches off the integration grid
                times.retain(|t| ((t / 0.01).round() * 0.01 - t).abs() > 1e-7);
                let modes = modes[..times.len() + 1].to_vec();
                SwitchedCase {
                    dim,
                    mats,
                    forcing,
                    times,
                    modes,
                    z0: DVector::from_vec(z0),
                }
            })
    })
}

fn subsystem(a: &Matrix, b: f64) -> impl Fn(f64, &State) -> State + Clone {
    let a = a.clone();
    move |t, x: &State| &a * x + DVector::from_element(x.len(), b * (3.0 * t).sin())
}

fn oracle_rk4(f: &dyn Fn(f64, &State) -> State, t: f64, x: &State, h: f64) -> State {
    let k1 = f(t, x);
    let k2 = f(t + h / 2.0, &(x + &k1 * (h / 2.0)));
    let k3 = f(t + h / 2.0, &(x + &k2 * (h / 2.0)));
    let k4 = f(t + h, &(x + &k3 * h));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Piecewise integration on the same grid, steps split at each switch.
pub fn switched_oracle(case: &SwitchedCase, grid: &StepGrid) -> Vec<(f64, State)> {
    let fields: Vec<_> = case.mats.iter().zip(&case.forcing).map(|(a, b)| subsystem(a, *b)).collect();
    let mut x = case.z0.clone();
    let mut t = grid.start();
    let mut active = case.modes[0];
    let mut pending = case.times.iter().zip(&case.modes[1..]).peekable();
    let mut out = vec![(t, x.clone())];
    for k in 0..grid.steps() {
        let tn = grid.time(k + 1);
        while let Some(&(&s, &m)) = pending.peek() {
            if s > tn {
                break;
            }
            x = oracle_rk4(&fields[active], t, &x, s - t);
            t = s;
            active = m;
            out.push((t, x.clone()));
            pending.next();
        }
        if t < tn {
            x = oracle_rk4(&fields[active], t, &x, tn - t);
            t = tn;
            out.push((t, x.clone()));
        }
    }
    out
}

pub fn check_lift(case: SwitchedCase) -> Result<(), String> {
    let subs: Vec<VectorField> = case
        .mats
        .iter()
        .zip(&case.forcing)
        .map(|(a, b)| Arc::new(subsystem(a, *b)) as VectorField)
        .collect();
    let sw = SwitchedSystem::new(case.dim, subs, case.times.clone(), case.modes.clone()).map_err(|e| e.to_string())?;
    let lifted = lift_switched(&sw);
    let opts = SimOptions::new(1.0, 0.01).max_jumps(100);
    let traj = simulate(&lifted, 0, &lifted_initial(&sw, &case.z0, 0.0), &opts).map_err(|e| e.to_string())?;
    traj.check_time_domain()?;
    let grid = StepGrid::new(0.0, 1.0, 0.01).unwrap();
    let oracle = switched_oracle(&case, &grid);
    let settled = traj.settled();
    ensure(settled.len() == oracle.len(), || {
        format!("{} lifted samples vs {} oracle samples", settled.len(), oracle.len())
    })?;
    for (s, (t, z)) in settled.iter().zip(&oracle) {
        ensure((s.time.t - t).abs() <= 1e-12, || format!("sample time {} vs {t}", s.time.t))?;
        let err = (s.state.rows(0, case.dim) - z).amax();
        ensure(err <= 1e-12, || format!("state differs by {err:e} at t = {t}"))?;
        let mode = sw.segment_mode(s.state[case.dim] as usize);
        ensure(mode == sw.sigma(*t), || format!("lifted mode {mode} at t = {t}"))?;
    }
    Ok(())
}

// ---- PWA coverage ----

/// Cells of an arrangement of random lines in the plane, plus a query point.
#[derive(Debug, Clone)]
pub struct PwaCase {
    pub lines: Vec<(f64, f64, f64)>,
    pub point: (f64, f64),
}

pub fn pwa_strategy() -> impl Strategy<Value = PwaCase> {
    (
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -0.5..0.5f64), 1..=4),
        (-2.0..2.0f64, -2.0..2.0f64),
    )
        .prop_map(|(lines, point)| PwaCase { lines, point })
}

pub fn pwa_arrangement(lines: &[(f64, f64, f64)]) -> PwaSystem {
    let n = lines.len();
    let mut regions = Vec::new();
    let mut dynamics = Vec::new();
    for mask in 0..(1u32 << n) {
        let signs: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let p = Matrix::from_fn(n, 2, |i, j| signs[i] * if j == 0 { lines[i].0 } else { lines[i].1 });
        let q = DVector::from_fn(n, |i, _| -signs[i] * lines[i].2);
        regions.push(Region::new(p, q).unwrap());
        dynamics.push(AffineUpdate {
            a: Matrix::identity(2, 2),
            b: Matrix::zeros(2, 1),
            c: dvector![mask as f64, 0.0],
        });
    }
    PwaSystem::new(regions, dynamics).unwrap()
}

pub fn check_pwa(case: PwaCase) -> Result<(), String> {
    let x = dvector![case.point.0, case.point.1];
    let min_gap = case
        .lines
        .iter()
        .map(|(a, b, c)| (a * x[0] + b * x[1] - c).abs())
        .fold(f64::INFINITY, f64::min);
    let sys = pwa_arrangement(&case.lines);
    let hits = sys.regions_containing(&x);
    if min_gap > 1e-9 {
        ensure(hits.len() == 1, || format!("interior point in regions {hits:?}"))?;
        let next = hds::hybrid::pwa_step(&sys, &x, &dvector![0.0]).map_err(|e| e.to_string())?;
        ensure(next[0] == x[0] + hits[0] as f64, || "update from the wrong region".into())?;
    } else {
        ensure(!hits.is_empty(), || "boundary point in no region".into())?;
    }
    Ok(())
}

// ---- MLD feasibility ----

/// Big-M encoding of `δ = [x ≥ 0]`, `z = δ x`, `x⁺ = a x + z`.
pub fn mld_sign_system(a: f64, m: f64) -> MldSystem {
    use nalgebra::dmatrix;
    let mut s = MldSystem::zeros(MldDims { nx: 1, nu: 1, nd: 1, nz: 1, ny: 1, nc: 6 });
    s.a = dmatrix![a];
    s.b3 = dmatrix![1.0];
    s.c = dmatrix![1.0];
    s.e2 = dmatrix![m; -m; -m; -m; m; m];
    s.e3 = dmatrix![0.0; 0.0; 1.0; -1.0; 1.0; -1.0];
    s.e4 = dmatrix![1.0; -1.0; 0.0; 0.0; 1.0; -1.0];
    s.e5 = dvector![m, 0.0, 0.0, 0.0, m, m];
    s
}

pub fn mld_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-0.99..0.99f64, 2.0..50.0f64, -1.0..1.0f64, 0.01..1.0f64).prop_map(|(a, m, frac, zoff)| (a, m, frac * m * 0.9, zoff))
}

pub fn check_mld((a, m, x, z_offset): (f64, f64, f64, f64)) -> Result<(), String> {
    if x.abs() < 1e-6 {
        return Ok(());
    }
    let sys = mld_sign_system(a, m);
    let xv = dvector![x];
    let u = dvector![0.0];
    let delta = if x >= 0.0 { 1.0 } else { 0.0 };
    let z = delta * x;
    let (next, y) = mld_step(&sys, &xv, &u, &dvector![delta], &dvector![z]).map_err(|e| e.to_string())?;
    ensure((next[0] - (a * x + z)).abs() < 1e-12 && y[0] == x, || format!("x⁺ = {}", next[0]))?;
    let wrong_delta = mld_step(&sys, &xv, &u, &dvector![1.0 - delta], &dvector![z]);
    ensure(matches!(wrong_delta, Err(hds::Error::Infeasible { .. })), || {
        format!("flipped δ accepted: {wrong_delta:?}")
    })?;
    let wrong_z = mld_step(&sys, &xv, &u, &dvector![delta], &dvector![z + z_offset.max(1e-6) * x.signum()]);
    ensure(
        delta == 0.0 || matches!(wrong_z, Err(hds::Error::Infeasible { .. })),
        || format!("inconsistent z accepted: {wrong_z:?}"),
    )?;
    let fractional = mld_step(&sys, &xv, &u, &dvector![0.5], &dvector![z]);
    ensure(fractional.is_err(), || "fractional δ accepted".into())
}

// ---- covariance symmetry / PSD ----

#[derive(Debug, Clone)]
pub struct CovarianceCase {
    pub a: Matrix,
    pub l: Matrix,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub xi: Matrix,
    pub x: State,
    pub z: State,
}

pub fn covariance_strategy() -> impl Strategy<Value = CovarianceCase> {
    (1usize..=4).prop_flat_map(|n| {
        (
            matrix(n, n, -3.0..3.0),
            matrix(n, n, -1.0..1.0),
            prop::collection::vec(0.0..1e-2f64, n),
            prop::collection::vec(1e-6..1e-1f64, n),
            matrix(n, n, -2.0..2.0),
            prop::collection::vec(-1.0..1.0f64, n),
            prop::collection::vec(-1.0..1.0f64, n),
        )
            .prop_map(|(a, l, q, r, xi, x, z)| CovarianceCase {
                a,
                l,
                q,
                r,
                xi,
                x: DVector::from_vec(x),
                z: DVector::from_vec(z),
            })
    })
}

pub fn covariance_ok(b: &GaussianBelief) -> Result<(), String> {
    let p = &b.covariance;
    let asym = (p - p.transpose()).amax();
    ensure(asym <= 1e-12, || format!("asymmetry {asym:e}"))?;
    let min = p.clone().symmetric_eigenvalues().min();
    ensure(min >= -1e-10, || format!("minimum eigenvalue {min:e}"))
}

pub fn check_covariance(c: CovarianceCase) -> Result<(), String> {
    let a = c.a.clone();
    let field = move |_t: f64, x: &State| &a * x + x.map(|v| 0.1 * v.sin());
    let noise = NoiseModel::diagonal(&c.q, &c.r).map_err(|e| e.to_string())?;
    let p0 = &c.l * c.l.transpose();
    let b0 = GaussianBelief::new(c.x.clone(), p0).map_err(|e| e.to_string())?;
    let mut b = b0;
    for k in 0..5 {
        b = ekf_predict(&b, &field, k as f64 * 1e-2, 1e-2, &noise).map_err(|e| e.to_string())?;
        covariance_ok(&b).map_err(|e| format!("after predict: {e}"))?;
        b = ekf_update(&b, &c.z, &noise).map_err(|e| e.to_string())?;
        covariance_ok(&b).map_err(|e| format!("after update: {e}"))?;
    }
    let xi = SaltationMatrix {
        matrix: c.xi.clone(),
        jump_time: 0.05,
        edge: "random".into(),
    };
    let xi_m = c.xi.clone();
    let jumped = propagate_belief_through_jump(&b, move |x| &xi_m * x, &xi).map_err(|e| e.to_string())?;
    covariance_ok(&jumped).map_err(|e| format!("after jump: {e}"))
}

// ---- Jacobian fidelity ----

pub fn jacobian_strategy() -> impl Strategy<Value = (Matrix, f64, State)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            matrix(n, n, -5.0..5.0),
            1e-4..1.0f64,
            prop::collection::vec(-2.0..2.0f64, n).prop_map(DVector::from_vec),
        )
    })
}

/// `numerical_jacobian` of the RK4 one-step map of `ẋ = A x` against
/// `I + A h + (A h)²/2 + (A h)³/6 + (A h)⁴/24` with `‖A‖ h <= 0.1`.
pub fn check_jacobian((a, scale, x): (Matrix, f64, State)) -> Result<(), String> {
    let norm = a.norm().max(1e-12);
    let h = 0.1 * scale / norm;
    let ah = &a * h;
    let n = a.nrows();
    let mut series = Matrix::identity(n, n);
    let mut term = Matrix::identity(n, n);
    for k in 1..=4 {
        term = &term * &ah / k as f64;
        series += &term;
    }
    let field = move |_t: f64, y: &State| &a * y;
    let j = numerical_jacobian(|y| rk4_step(&field, 0.0, y, h), &x).map_err(|e| e.to_string())?;
    let err = (j - series).amax();
    ensure(err <= 1e-7, || format!("Jacobian error {err:e}"))
}

// ---- power models ----

use hds::power::{
    blended_flow, clamp_currents, gfl_flow, gfm_flow, inverter_automaton, smib_state, smib_system, swing_flow,
    InverterParams, SmibParams, VoltageProfile,
};

/// Exact solution of an affine field `f(x) = A x + b` via `exp` of the
/// augmented `(n+1)×(n+1)` matrix.
pub struct AffineFlow {
    aug: Matrix,
}

impl AffineFlow {
    pub fn new(field: impl Fn(&State) -> State, n: usize) -> Self {
        let b = field(&State::zeros(n));
        let mut aug = Matrix::zeros(n + 1, n + 1);
        for j in 0..n {
            let mut e = State::zeros(n);
            e[j] = 1.0;
            let col = field(&e) - &b;
            aug.view_mut((0, j), (n, 1)).copy_from(&col);
        }
        aug.view_mut((0, n), (n, 1)).copy_from(&b);
        Self { aug }
    }

    fn dim(&self) -> usize {
        self.aug.nrows() - 1
    }

    pub fn at(&self, x0: &State, t: f64) -> State {
        let n = self.dim();
        let mut y = State::zeros(n + 1);
        y.rows_mut(0, n).copy_from(x0);
        y[n] = 1.0;
        ((&self.aug * t).exp() * y).rows(0, n).into_owned()
    }

    /// State transition matrix over `t`.
    pub fn transition(&self, t: f64) -> Matrix {
        let n = self.dim();
        (&self.aug * t).exp().view((0, 0), (n, n)).into_owned()
    }
}

/// Largest deviation of a GFM-only simulation from the exact solution, in
/// absolute terms and relative to the solution's largest magnitude.
pub fn gfm_deviation(x0: &State, horizon: f64, dt: f64) -> (f64, f64) {
    let p = InverterParams::default();
    let sys = FlowJumpSystem::new(4, move |_t, x: &State| gfm_flow(x, &p));
    let traj = simulate(&sys, 0, x0, &SimOptions::new(horizon, dt)).expect("GFM simulation");
    let exact = AffineFlow::new(|x| gfm_flow(x, &p), 4);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for s in &traj.samples {
        let e = exact.at(x0, s.time.t);
        worst = worst.max((&s.state - &e).amax());
        scale = scale.max(e.amax());
    }
    (worst, worst / scale)
}

#[derive(Debug, Clone)]
pub struct ProfileCase {
    pub levels: Vec<f64>,
}

pub fn profile_strategy() -> impl Strategy<Value = ProfileCase> {
    prop::collection::vec(0.3..1.2f64, 2..12).prop_map(|levels| ProfileCase { levels })
}

/// Breakpoints every 20 ms over 0.2 s at the given levels.
pub fn profile_of(case: &ProfileCase) -> VoltageProfile {
    let n = case.levels.len();
    let pts = case
        .levels
        .iter()
        .enumerate()
        .map(|(i, v)| (0.2 * i as f64 / (n - 1) as f64, *v))
        .collect();
    VoltageProfile::new(pts).unwrap()
}

pub fn check_hysteresis(case: ProfileCase) -> Result<(), String> {
    let p = InverterParams::default();
    let profile = Arc::new(profile_of(&case));
    let model = inverter_automaton(&p, Arc::clone(&profile)).map_err(|e| e.to_string())?;
    let mode0 = if profile.at(0.0) <= p.v_low { 1 } else { 0 };
    let traj = simulate(&model, mode0, &dvector![0.0, 0.0, 1.0, 0.0], &SimOptions::new(0.2, 1e-3))
        .map_err(|e| e.to_string())?;
    check_trajectory(&model, &traj)?;
    for w in traj.jumps.windows(2) {
        ensure(w[0].edge != w[1].edge, || format!("two {} jumps in a row", w[0].edge))?;
    }
    for j in &traj.jumps {
        let v = profile.at(j.time.t);
        let ok = match j.edge.as_str() {
            "GFL->GFM" => v <= p.v_low + 1e-9,
            "GFM->GFL" => v >= p.v_high - 1e-9,
            other => return Err(format!("unexpected edge {other}")),
        };
        ensure(ok, || format!("{} at V = {v}", j.edge))?;
    }
    Ok(())
}

pub fn check_clamp(x: Vec<f64>) -> Result<(), String> {
    let p = InverterParams::default();
    let x = State::from_vec(x);
    let once = clamp_currents(&x, &p);
    ensure(clamp_currents(&once, &p) == once, || "clamp is not idempotent".into())?;
    ensure(once[2] == x[2] && once[3] == x[3], || "clamp moved the voltages".into())?;
    ensure(once[0].abs() <= p.i_lim && once[1].abs() <= p.i_lim, || "currents above the limit".into())
}

pub fn check_sharp_blend((x, v): (Vec<f64>, f64)) -> Result<(), String> {
    let p = InverterParams {
        k: 5000.0,
        ..InverterParams::default()
    };
    if (v - p.v_th).abs() < 0.05 {
        return Ok(());
    }
    let x = State::from_vec(x);
    let gfl = gfl_flow(&x, v, &p);
    let gfm = gfm_flow(&x, &p);
    let target = if v > p.v_th { &gfl } else { &gfm };
    let diff = (blended_flow(&x, v, &p) - target).norm();
    let scale = gfl.norm().max(gfm.norm());
    ensure(diff <= 1e-6 * scale, || format!("blend differs by {diff:e} (scale {scale:e})"))
}

/// Largest `(δ, ω)` difference at grid nodes between a run with a forced
/// switch onto an identical line and a plain swing integration.
pub fn smib_identity_gap(delta0: f64, omega0: f64, trip: f64, horizon: f64, dt: f64) -> Result<f64, String> {
    let p = SmibParams {
        reactance_line2: SmibParams::default().reactance_line1,
        forced_trip: Some(trip),
        ..SmibParams::default()
    };
    let sys = smib_system(&p).map_err(|e| e.to_string())?;
    let x0 = smib_state(delta0, omega0, 1);
    let switched = simulate(&sys, 0, &x0, &SimOptions::new(horizon, dt)).map_err(|e| e.to_string())?;
    ensure(switched.jump_count() >= 1, || "forced switch did not fire".into())?;
    let plain = hds::hybrid::integrate_flow(&|_t: f64, x: &State| swing_flow(x, &p), &x0, 0.0, horizon, dt)
        .map_err(|e| e.to_string())?;
    let grid = StepGrid::new(0.0, horizon, dt).unwrap();
    let on_grid = hds::power::on_grid(&switched, &grid).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (s, (t, x)) in on_grid.iter().zip(&plain) {
        ensure(s.time.t == *t, || "grid mismatch".into())?;
        worst = worst.max((s.state[0] - x[0]).abs()).max((s.state[1] - x[1]).abs());
    }
    Ok(worst)
}

/// Time at which the piecewise-linear profile through `pts` crosses `level`
/// on the segment containing `t`, or on a neighbour when `t` sits at a
/// breakpoint. Picks the root closest to `t`.
pub fn analytic_crossing(pts: &[(f64, f64)], level: f64, t: f64) -> Option<f64> {
    pts.windows(2)
        .filter(|w| w[0].0 <= t + 1e-6 && t - 1e-6 <= w[1].0)
        .filter_map(|w| {
            let ((ta, va), (tb, vb)) = (w[0], w[1]);
            if va == vb {
                return None;
            }
            let s = (level - va) / (vb - va);
            (0.0..=1.0).contains(&s).then_some(ta + s * (tb - ta))
        })
        .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
}

/// Largest gap between simulated mode switches and the analytic threshold
/// crossings of the driving profile.
pub fn localization_gap(case: &ProfileCase) -> Result<f64, String> {
    let p = InverterParams::default();
    let profile = Arc::new(profile_of(case));
    let model = inverter_automaton(&p, Arc::clone(&profile)).map_err(|e| e.to_string())?;
    let mode0 = if profile.at(0.0) <= p.v_low { 1 } else { 0 };
    let traj = simulate(&model, mode0, &dvector![0.0, 0.0, 1.0, 0.0], &SimOptions::new(0.2, 1e-3))
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for j in &traj.jumps {
        let level = if j.edge == "GFL->GFM" { p.v_low } else { p.v_high };
        let exact = analytic_crossing(profile.points(), level, j.time.t)
            .ok_or_else(|| format!("no crossing of {level} near t = {}", j.time.t))?;
        worst = worst.max((j.time.t - exact).abs());
    }
    Ok(worst)
}

pub fn check_localization(case: ProfileCase) -> Result<(), String> {
    let gap = localization_gap(&case)?;
    ensure(gap <= 1e-9, || format!("switch {gap:e} s away from the crossing"))
}
