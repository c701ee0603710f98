//! First-order propagation of perturbations across a jump.
//!
//! For a reset `R` applied when the guard `g(x) = 0` is crossed with
//! pre-jump field `f⁻` and post-jump field `f⁺`:
//!
//! ```text
//! Ξ = D_x R + (f⁺(R(x)) − D_x R · f⁻(x)) ∇gᵀ / (∇g · f⁻(x))
//! ```
//!
//! A guard that does not depend on the state (time-triggered, or driven by
//! an exogenous input) has `∇g = 0` and the jump time is the same for every
//! perturbation, so `Ξ = D_x R`.

use super::belief::{symmetrize, GaussianBelief};
use super::jacobian::{numerical_gradient, numerical_jacobian};
use crate::hybrid::{EdgeId, HybridModel};
use crate::{Error, Matrix, Result, State};

/// Below this `|∇g · f⁻|` a state-dependent guard counts as grazed.
pub const TRANSVERSALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SaltationMatrix {
    pub matrix: Matrix,
    pub jump_time: f64,
    pub edge: String,
}

/// Everything needed to linearize one jump at `x_minus`.
pub struct JumpLinearization<'a> {
    pub edge: &'a str,
    pub t: f64,
    pub x_minus: &'a State,
    pub reset: &'a dyn Fn(&State) -> State,
    /// Analytic `D_x R`; central differences of `reset` otherwise.
    pub reset_jacobian: Option<Matrix>,
    pub f_pre: &'a dyn Fn(&State) -> State,
    pub f_post: &'a dyn Fn(&State) -> State,
    pub guard_gradient: &'a State,
}

pub fn saltation_matrix(jump: &JumpLinearization<'_>) -> Result<SaltationMatrix> {
    let n = jump.x_minus.len();
    if jump.guard_gradient.len() != n {
        return Err(Error::Dimension(format!(
            "guard gradient has length {}, state has {n}",
            jump.guard_gradient.len()
        )));
    }
    let dr = match &jump.reset_jacobian {
        Some(j) => j.clone(),
        None => numerical_jacobian(jump.reset, jump.x_minus).map_err(|e| Error::numerical(jump.t, e.to_string()))?,
    };
    if dr.shape() != (n, n) {
        return Err(Error::Dimension(format!("reset Jacobian is {:?}, expected ({n}, {n})", dr.shape())));
    }

    let matrix = if jump.guard_gradient.iter().all(|&g| g == 0.0) {
        dr
    } else {
        let f_minus = (jump.f_pre)(jump.x_minus);
        let rate = jump.guard_gradient.dot(&f_minus);
        if !(rate.abs() >= TRANSVERSALITY_TOL) {
            return Err(Error::Grazing {
                t: jump.t,
                rate: rate.abs(),
            });
        }
        let x_plus = (jump.reset)(jump.x_minus);
        let f_plus = (jump.f_post)(&x_plus);
        let jump_in_field = f_plus - &dr * f_minus;
        &dr + jump_in_field * jump.guard_gradient.transpose() / rate
    };
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical(jump.t, "saltation matrix has non-finite entries"));
    }
    Ok(SaltationMatrix {
        matrix,
        jump_time: jump.t,
        edge: jump.edge.to_string(),
    })
}

/// Saltation matrix of `edge` of a hybrid model at `(t, x_minus)`, with the
/// guard gradient taken by central differences of the guard margin.
pub fn saltation_for_edge<M: HybridModel + ?Sized>(
    model: &M,
    edge: EdgeId,
    t: f64,
    x_minus: &State,
) -> Result<SaltationMatrix> {
    let source = model.edge_source(edge);
    let target = model.edge_target(edge);
    let gradient = numerical_gradient(|x| model.guard_margin(edge, t, x), x_minus)
        .map_err(|e| Error::numerical(t, e.to_string()))?;
    let reset = |x: &State| model.reset(edge, t, x);
    let f_pre = |x: &State| model.flow(source, t, x);
    let f_post = |x: &State| model.flow(target, t, x);
    saltation_matrix(&JumpLinearization {
        edge: model.edge_label(edge),
        t,
        x_minus,
        reset: &reset,
        reset_jacobian: model.reset_jacobian(edge, t, x_minus),
        f_pre: &f_pre,
        f_post: &f_post,
        guard_gradient: &gradient,
    })
}

/// `mean ← R(mean)`, `P ← Ξ P Ξᵀ`, symmetrized.
pub fn propagate_belief_through_jump<R>(
    belief: &GaussianBelief,
    reset: R,
    saltation: &SaltationMatrix,
) -> Result<GaussianBelief>
where
    R: Fn(&State) -> State,
{
    let xi = &saltation.matrix;
    let n = belief.dim();
    if xi.shape() != (n, n) {
        return Err(Error::Dimension(format!("saltation matrix is {:?} for a {n}-state belief", xi.shape())));
    }
    let mean = reset(&belief.mean);
    if mean.len() != n {
        return Err(Error::Dimension(format!("reset returned length {}, expected {n}", mean.len())));
    }
    let covariance = symmetrize(&(xi * &belief.covariance * xi.transpose()));
    Ok(GaussianBelief { mean, covariance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn ident(x: &State) -> State {
        x.clone()
    }

    #[test]
    fn identity_reset_with_state_independent_guard() {
        let x = dvector![1.0, 2.0];
        let f = |x: &State| dvector![x[1], -x[0]];
        let zero = State::zeros(2);
        let s = saltation_matrix(&JumpLinearization {
            edge: "e",
            t: 0.0,
            x_minus: &x,
            reset: &ident,
            reset_jacobian: Some(Matrix::identity(2, 2)),
            f_pre: &f,
            f_post: &|x: &State| x * 3.0,
            guard_gradient: &zero,
        })
        .unwrap();
        assert_eq!(s.matrix, Matrix::identity(2, 2));
    }

    #[test]
    fn identity_reset_with_matched_fields() {
        let x = dvector![1.0, 0.0];
        let f = |x: &State| dvector![1.0, x[0]];
        let grad = dvector![1.0, 0.5];
        let s = saltation_matrix(&JumpLinearization {
            edge: "e",
            t: 0.0,
            x_minus: &x,
            reset: &ident,
            reset_jacobian: None,
            f_pre: &f,
            f_post: &f,
            guard_gradient: &grad,
        })
        .unwrap();
        assert!((s.matrix - Matrix::identity(2, 2)).amax() < 1e-9);
    }

    #[test]
    fn grazing_contact_is_rejected() {
        let x = dvector![0.0, 1.0];
        let f = |_x: &State| dvector![0.0, 1.0];
        let grad = dvector![1.0, 0.0];
        let err = saltation_matrix(&JumpLinearization {
            edge: "e",
            t: 0.5,
            x_minus: &x,
            reset: &ident,
            reset_jacobian: None,
            f_pre: &f,
            f_post: &f,
            guard_gradient: &grad,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Grazing { .. }));
    }

    #[test]
    fn belief_propagation() {
        let b = GaussianBelief::isotropic(dvector![1.0, -1.0], 1.0).unwrap();
        let s = SaltationMatrix {
            matrix: Matrix::identity(2, 2),
            jump_time: 0.0,
            edge: "e".into(),
        };
        assert_eq!(propagate_belief_through_jump(&b, ident, &s).unwrap(), b);

        let s2 = SaltationMatrix {
            matrix: Matrix::identity(2, 2) * 2.0,
            ..s
        };
        let out = propagate_belief_through_jump(&b, ident, &s2).unwrap();
        assert_eq!(out.covariance, dmatrix![4.0, 0.0; 0.0, 4.0]);
    }
}
