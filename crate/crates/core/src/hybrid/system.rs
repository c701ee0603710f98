//! Flow/jump data `(C, f, D, g)` and hybrid automata, behind one
//! [`HybridModel`] interface consumed by the simulator and the filter.
//!
//! Sets are described by signed margins: a flow set contains `x` when its
//! margin is `>= 0`, and a guard (or jump set) is triggered when its margin is
//! `>= 0`. Every map takes the time as an explicit argument so exogenous
//! inputs such as a measured grid voltage can drive flows and guards.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Matrix, Result, State};

pub type ModeId = usize;
pub type EdgeId = usize;

/// `(t, x) -> dx/dt`.
pub type VectorField = Arc<dyn Fn(f64, &State) -> State + Send + Sync>;
/// `(t, x) -> margin`; `>= 0` means inside the set.
pub type Margin = Arc<dyn Fn(f64, &State) -> f64 + Send + Sync>;
/// `(t, x) -> x⁺`.
pub type ResetMap = Arc<dyn Fn(f64, &State) -> State + Send + Sync>;
/// `(t, x) -> D_x R`.
pub type ResetJacobian = Arc<dyn Fn(f64, &State) -> Matrix + Send + Sync>;
/// `(mode, x) -> bool`.
pub type InitSet = Arc<dyn Fn(ModeId, &State) -> bool + Send + Sync>;

/// Common view of a hybrid system as modes connected by guarded edges.
pub trait HybridModel: Send + Sync {
    fn dim(&self) -> usize;
    fn mode_name(&self, mode: ModeId) -> &str;
    fn mode_count(&self) -> usize;

    fn flow(&self, mode: ModeId, t: f64, x: &State) -> State;
    /// Flow set / invariant margin of `mode`.
    fn flow_margin(&self, mode: ModeId, t: f64, x: &State) -> f64;

    fn edges_from(&self, mode: ModeId) -> &[EdgeId];
    fn edge_source(&self, edge: EdgeId) -> ModeId;
    fn edge_target(&self, edge: EdgeId) -> ModeId;
    fn edge_label(&self, edge: EdgeId) -> &str;
    fn guard_margin(&self, edge: EdgeId, t: f64, x: &State) -> f64;
    fn reset(&self, edge: EdgeId, t: f64, x: &State) -> State;
    /// Analytic reset Jacobian, when the model prefers it over finite differences.
    fn reset_jacobian(&self, _edge: EdgeId, _t: f64, _x: &State) -> Option<Matrix> {
        None
    }

    /// Rejects initial conditions outside the model's initial set.
    fn check_initial(&self, mode: ModeId, t: f64, x: &State) -> Result<()>;

    fn mode_names(&self) -> Vec<String> {
        (0..self.mode_count()).map(|m| self.mode_name(m).to_string()).collect()
    }
}

/// The data `(C, f, D, g)` of a flow/jump system over `ℝⁿ`.
///
/// Without a flow set the system may flow everywhere; without a jump set it
/// never jumps. Where `C` and `D` overlap the jump takes priority.
#[derive(Clone)]
pub struct FlowJumpSystem {
    dim: usize,
    flow_map: VectorField,
    flow_set: Option<Margin>,
    jump_set: Option<Margin>,
    jump_map: Option<ResetMap>,
    jump_jacobian: Option<ResetJacobian>,
    jump_edges: Vec<EdgeId>,
}

impl FlowJumpSystem {
    pub fn new<F>(dim: usize, flow_map: F) -> Self
    where
        F: Fn(f64, &State) -> State + Send + Sync + 'static,
    {
        assert!(dim >= 1, "state dimension must be at least 1");
        Self {
            dim,
            flow_map: Arc::new(flow_map),
            flow_set: None,
            jump_set: None,
            jump_map: None,
            jump_jacobian: None,
            jump_edges: Vec::new(),
        }
    }

    pub fn with_flow_set<C>(mut self, margin: C) -> Self
    where
        C: Fn(f64, &State) -> f64 + Send + Sync + 'static,
    {
        self.flow_set = Some(Arc::new(margin));
        self
    }

    pub fn with_jump<D, G>(mut self, jump_set: D, jump_map: G) -> Self
    where
        D: Fn(f64, &State) -> f64 + Send + Sync + 'static,
        G: Fn(f64, &State) -> State + Send + Sync + 'static,
    {
        self.jump_set = Some(Arc::new(jump_set));
        self.jump_map = Some(Arc::new(jump_map));
        self.jump_edges = vec![0];
        self
    }

    pub fn with_jump_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(f64, &State) -> Matrix + Send + Sync + 'static,
    {
        self.jump_jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn flow_map(&self) -> &VectorField {
        &self.flow_map
    }

    pub fn in_flow_set(&self, t: f64, x: &State) -> bool {
        self.flow_set.as_ref().is_none_or(|c| c(t, x) >= 0.0)
    }

    pub fn in_jump_set(&self, t: f64, x: &State) -> bool {
        self.jump_set.as_ref().is_some_and(|d| d(t, x) >= 0.0)
    }
}

impl fmt::Debug for FlowJumpSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowJumpSystem")
            .field("dim", &self.dim)
            .field("flow_set", &self.flow_set.is_some())
            .field("jump_set", &self.jump_set.is_some())
            .finish()
    }
}

impl HybridModel for FlowJumpSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn mode_name(&self, _mode: ModeId) -> &str {
        "flow"
    }

    fn mode_count(&self) -> usize {
        1
    }

    fn flow(&self, _mode: ModeId, t: f64, x: &State) -> State {
        (self.flow_map)(t, x)
    }

    fn flow_margin(&self, _mode: ModeId, t: f64, x: &State) -> f64 {
        self.flow_set.as_ref().map_or(f64::INFINITY, |c| c(t, x))
    }

    fn edges_from(&self, _mode: ModeId) -> &[EdgeId] {
        &self.jump_edges
    }

    fn edge_source(&self, _edge: EdgeId) -> ModeId {
        0
    }

    fn edge_target(&self, _edge: EdgeId) -> ModeId {
        0
    }

    fn edge_label(&self, _edge: EdgeId) -> &str {
        "jump"
    }

    fn guard_margin(&self, _edge: EdgeId, t: f64, x: &State) -> f64 {
        self.jump_set.as_ref().map_or(f64::NEG_INFINITY, |d| d(t, x))
    }

    fn reset(&self, _edge: EdgeId, t: f64, x: &State) -> State {
        match &self.jump_map {
            Some(g) => g(t, x),
            None => x.clone(),
        }
    }

    fn reset_jacobian(&self, _edge: EdgeId, t: f64, x: &State) -> Option<Matrix> {
        self.jump_jacobian.as_ref().map(|j| j(t, x))
    }

    fn check_initial(&self, _mode: ModeId, t: f64, x: &State) -> Result<()> {
        check_dim(self.dim, x)?;
        if self.in_flow_set(t, x) || self.in_jump_set(t, x) {
            Ok(())
        } else {
            Err(Error::InvalidInitialState(format!(
                "{:?} is in neither the flow set nor the jump set",
                x.as_slice()
            )))
        }
    }
}

pub(crate) fn check_dim(dim: usize, x: &State) -> Result<()> {
    if x.len() != dim {
        return Err(Error::Dimension(format!("expected state of length {dim}, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInitialState(format!("{:?} has non-finite entries", x.as_slice())));
    }
    Ok(())
}

#[derive(Clone)]
struct Mode {
    name: String,
    flow: VectorField,
    invariant: Option<Margin>,
}

#[derive(Clone)]
struct Edge {
    source: ModeId,
    target: ModeId,
    label: String,
    guard: Margin,
    reset: ResetMap,
    jacobian: Option<ResetJacobian>,
}

/// A hybrid automaton `{Q, X, f, Init, Inv, E, G, R}`.
///
/// Built with [`AutomatonBuilder`]; immutable afterwards.
#[derive(Clone)]
pub struct HybridAutomaton {
    dim: usize,
    modes: Vec<Mode>,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<EdgeId>>,
    init: Option<InitSet>,
}

impl HybridAutomaton {
    pub fn builder(dim: usize) -> AutomatonBuilder {
        AutomatonBuilder {
            dim,
            modes: Vec::new(),
            edges: Vec::new(),
            init: None,
        }
    }

    pub fn mode_id(&self, name: &str) -> Option<ModeId> {
        self.modes.iter().position(|m| m.name == name)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_id(&self, label: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.label == label)
    }

    pub fn in_invariant(&self, mode: ModeId, t: f64, x: &State) -> bool {
        self.flow_margin(mode, t, x) >= 0.0
    }
}

impl fmt::Debug for HybridAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HybridAutomaton")
            .field("dim", &self.dim)
            .field("modes", &self.modes.iter().map(|m| &m.name).collect::<Vec<_>>())
            .field(
                "edges",
                &self
                    .edges
                    .iter()
                    .map(|e| (&e.label, e.source, e.target))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl HybridModel for HybridAutomaton {
    fn dim(&self) -> usize {
        self.dim
    }

    fn mode_name(&self, mode: ModeId) -> &str {
        &self.modes[mode].name
    }

    fn mode_count(&self) -> usize {
        self.modes.len()
    }

    fn flow(&self, mode: ModeId, t: f64, x: &State) -> State {
        (self.modes[mode].flow)(t, x)
    }

    fn flow_margin(&self, mode: ModeId, t: f64, x: &State) -> f64 {
        self.modes[mode]
            .invariant
            .as_ref()
            .map_or(f64::INFINITY, |inv| inv(t, x))
    }

    fn edges_from(&self, mode: ModeId) -> &[EdgeId] {
        &self.outgoing[mode]
    }

    fn edge_source(&self, edge: EdgeId) -> ModeId {
        self.edges[edge].source
    }

    fn edge_target(&self, edge: EdgeId) -> ModeId {
        self.edges[edge].target
    }

    fn edge_label(&self, edge: EdgeId) -> &str {
        &self.edges[edge].label
    }

    fn guard_margin(&self, edge: EdgeId, t: f64, x: &State) -> f64 {
        (self.edges[edge].guard)(t, x)
    }

    fn reset(&self, edge: EdgeId, t: f64, x: &State) -> State {
        (self.edges[edge].reset)(t, x)
    }

    fn reset_jacobian(&self, edge: EdgeId, t: f64, x: &State) -> Option<Matrix> {
        self.edges[edge].jacobian.as_ref().map(|j| j(t, x))
    }

    fn check_initial(&self, mode: ModeId, t: f64, x: &State) -> Result<()> {
        check_dim(self.dim, x)?;
        if mode >= self.modes.len() {
            return Err(Error::InvalidInitialState(format!("unknown mode index {mode}")));
        }
        if let Some(init) = &self.init {
            if !init(mode, x) {
                return Err(Error::InvalidInitialState(format!(
                    "({}, {:?}) is not in the initial set",
                    self.modes[mode].name,
                    x.as_slice()
                )));
            }
        }
        let enabled = self.outgoing[mode]
            .iter()
            .any(|&e| self.guard_margin(e, t, x) >= 0.0);
        if !enabled && !self.in_invariant(mode, t, x) {
            return Err(Error::InvalidInitialState(format!(
                "{:?} violates the invariant of mode {}",
                x.as_slice(),
                self.modes[mode].name
            )));
        }
        Ok(())
    }
}

pub struct AutomatonBuilder {
    dim: usize,
    modes: Vec<Mode>,
    edges: Vec<Edge>,
    init: Option<InitSet>,
}

impl AutomatonBuilder {
    pub fn mode<F>(&mut self, name: impl Into<String>, flow: F) -> ModeId
    where
        F: Fn(f64, &State) -> State + Send + Sync + 'static,
    {
        self.modes.push(Mode {
            name: name.into(),
            flow: Arc::new(flow),
            invariant: None,
        });
        self.modes.len() - 1
    }

    pub fn invariant<C>(&mut self, mode: ModeId, margin: C) -> &mut Self
    where
        C: Fn(f64, &State) -> f64 + Send + Sync + 'static,
    {
        if let Some(m) = self.modes.get_mut(mode) {
            m.invariant = Some(Arc::new(margin));
        }
        self
    }

    pub fn edge<G, R>(&mut self, source: ModeId, target: ModeId, guard: G, reset: R) -> EdgeId
    where
        G: Fn(f64, &State) -> f64 + Send + Sync + 'static,
        R: Fn(f64, &State) -> State + Send + Sync + 'static,
    {
        let label = format!("{source}->{target}");
        self.edges.push(Edge {
            source,
            target,
            label,
            guard: Arc::new(guard),
            reset: Arc::new(reset),
            jacobian: None,
        });
        self.edges.len() - 1
    }

    pub fn label(&mut self, edge: EdgeId, label: impl Into<String>) -> &mut Self {
        if let Some(e) = self.edges.get_mut(edge) {
            e.label = label.into();
        }
        self
    }

    pub fn reset_jacobian<J>(&mut self, edge: EdgeId, jacobian: J) -> &mut Self
    where
        J: Fn(f64, &State) -> Matrix + Send + Sync + 'static,
    {
        if let Some(e) = self.edges.get_mut(edge) {
            e.jacobian = Some(Arc::new(jacobian));
        }
        self
    }

    pub fn init<I>(&mut self, init: I) -> &mut Self
    where
        I: Fn(ModeId, &State) -> bool + Send + Sync + 'static,
    {
        self.init = Some(Arc::new(init));
        self
    }

    pub fn build(self) -> Result<HybridAutomaton> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("state dimension must be at least 1".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidArgument("automaton needs at least one mode".into()));
        }
        let mut outgoing = vec![Vec::new(); self.modes.len()];
        for (id, e) in self.edges.iter().enumerate() {
            if e.source >= self.modes.len() || e.target >= self.modes.len() {
                return Err(Error::InvalidArgument(format!(
                    "edge `{}` references a mode outside 0..{}",
                    e.label,
                    self.modes.len()
                )));
            }
            outgoing[e.source].push(id);
        }
        Ok(HybridAutomaton {
            dim: self.dim,
            modes: self.modes,
            edges: self.edges,
            outgoing,
            init: self.init,
        })
    }
}
