//! Extended Kalman filter prediction and correction.

use super::belief::{symmetrize, GaussianBelief, NoiseModel};
use super::jacobian::numerical_jacobian;
use crate::hybrid::{ensure_finite, rk4_step};
use crate::{Error, Matrix, Result, State};

/// Advances mean and covariance through one RK4 step without adding `Q`.
/// Returns the propagated belief and the transition Jacobian `F`.
pub fn propagate<F>(belief: &GaussianBelief, flow: &F, t: f64, dt: f64) -> Result<(GaussianBelief, Matrix)>
where
    F: Fn(f64, &State) -> State + ?Sized,
{
    let transition = |x: &State| rk4_step(flow, t, x, dt);
    let f = numerical_jacobian(transition, &belief.mean).map_err(|e| Error::numerical(t, e.to_string()))?;
    let mean = transition(&belief.mean);
    ensure_finite(t + dt, &mean, "predicted mean")?;
    let covariance = symmetrize(&(&f * &belief.covariance * f.transpose()));
    Ok((GaussianBelief { mean, covariance }, f))
}

/// `x ← RK4(x)`, `P ← F P Fᵀ + Q` with `F` the numerical Jacobian of the
/// one-step RK4 map, then `P ← (P + Pᵀ)/2`.
pub fn ekf_predict<F>(belief: &GaussianBelief, flow: &F, t: f64, dt: f64, noise: &NoiseModel) -> Result<GaussianBelief>
where
    F: Fn(f64, &State) -> State + ?Sized,
{
    let (mut next, _) = propagate(belief, flow, t, dt)?;
    add_process_noise(&mut next, noise)?;
    Ok(next)
}

pub(crate) fn add_process_noise(belief: &mut GaussianBelief, noise: &NoiseModel) -> Result<()> {
    if noise.process.shape() != belief.covariance.shape() {
        return Err(Error::Dimension(format!(
            "Q is {:?} but the covariance is {:?}",
            noise.process.shape(),
            belief.covariance.shape()
        )));
    }
    belief.covariance = symmetrize(&(&belief.covariance + &noise.process));
    Ok(())
}

/// Kalman gain, mean correction and `P ← (I − K H) P`, symmetrized.
pub fn ekf_update(belief: &GaussianBelief, z: &State, noise: &NoiseModel) -> Result<GaussianBelief> {
    let h = &noise.observation;
    let n = belief.dim();
    if h.ncols() != n || z.len() != h.nrows() || noise.measurement.nrows() != h.nrows() {
        return Err(Error::Dimension(format!(
            "update with H {:?}, R_y {:?}, z of length {} and state of length {n}",
            h.shape(),
            noise.measurement.shape(),
            z.len()
        )));
    }
    let p = &belief.covariance;
    let innovation_cov = symmetrize(&(h * p * h.transpose() + &noise.measurement));
    let s_inv = innovation_cov
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numerical("innovation covariance H P Hᵀ + R_y is singular".into()))?;
    let gain = p * h.transpose() * s_inv;
    let innovation = z - h * &belief.mean;
    let mean = &belief.mean + &gain * innovation;
    let covariance = symmetrize(&((Matrix::identity(n, n) - &gain * h) * p));
    if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("update produced non-finite values".into()));
    }
    Ok(GaussianBelief { mean, covariance })
}

/// Kalman gain for the current belief, exposed for diagnostics.
pub fn kalman_gain(belief: &GaussianBelief, noise: &NoiseModel) -> Result<Matrix> {
    let h = &noise.observation;
    let s = h * &belief.covariance * h.transpose() + &noise.measurement;
    let s_inv = s
        .try_inverse()
        .ok_or_else(|| Error::Numerical("innovation covariance is singular".into()))?;
    Ok(&belief.covariance * h.transpose() * s_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn scalar_noise(q: f64, r: f64) -> NoiseModel {
        NoiseModel::diagonal(&[q], &[r]).unwrap()
    }

    #[test]
    fn static_system_is_unchanged() {
        let b = GaussianBelief::new(dvector![1.0, 2.0], dmatrix![2.0, 0.5; 0.5, 1.0]).unwrap();
        let noise = NoiseModel::diagonal(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let next = ekf_predict(&b, &|_t: f64, x: &State| x * 0.0, 0.0, 0.1, &noise).unwrap();
        assert_eq!(next.mean, b.mean);
        assert!((next.covariance - b.covariance).amax() < 1e-9);
    }

    #[test]
    fn scalar_decay_covariance() {
        let dt = 1e-4;
        let b = GaussianBelief::new(dvector![1.0], dmatrix![1.0]).unwrap();
        let next = ekf_predict(&b, &|_t: f64, x: &State| -x, 0.0, dt, &scalar_noise(0.0, 1.0)).unwrap();
        assert!((next.covariance[(0, 0)] - (-2.0 * dt).exp()).abs() < 1e-10);
    }

    #[test]
    fn scalar_update_by_hand() {
        let b = GaussianBelief::new(dvector![0.0], dmatrix![1.0]).unwrap();
        let noise = scalar_noise(0.0, 1.0);
        assert!((kalman_gain(&b, &noise).unwrap()[(0, 0)] - 0.5).abs() < 1e-15);
        let post = ekf_update(&b, &dvector![1.0], &noise).unwrap();
        assert!((post.mean[0] - 0.5).abs() < 1e-15);
        assert!((post.covariance[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uninformative_measurement() {
        let b = GaussianBelief::isotropic(dvector![0.0, 0.0], 1e-3).unwrap();
        let noise = NoiseModel::diagonal(&[0.0, 0.0], &[1.6e-5 * 1e9, 1e-4 * 1e9]).unwrap();
        assert!(kalman_gain(&b, &noise).unwrap().amax() <= 1e-6);
        let post = ekf_update(&b, &dvector![1.0, -1.0], &noise).unwrap();
        assert!(post.mean.amax() <= 1e-6);
    }

    #[test]
    fn perfect_measurement() {
        let b = GaussianBelief::isotropic(dvector![0.0, 0.0, 0.0], 1e-3).unwrap();
        let noise = NoiseModel::diagonal(&[0.0; 3], &[1e-12; 3]).unwrap();
        let z = dvector![0.3, -0.2, 1.0];
        let post = ekf_update(&b, &z, &noise).unwrap();
        assert!((post.mean - z).amax() < 1e-6);
    }

    #[test]
    fn singular_innovation_rejected() {
        let b = GaussianBelief::isotropic(dvector![0.0], 0.0).unwrap();
        assert!(ekf_update(&b, &dvector![1.0], &scalar_noise(0.0, 0.0)).is_err());
    }

    #[test]
    fn predict_matches_linear_kalman_prediction() {
        let a = dmatrix![0.0, 1.0; -2.0, -3.0];
        let dt = 1e-3;
        let phi = (&a * dt).exp();
        let b = GaussianBelief::new(dvector![1.0, -0.5], dmatrix![0.2, 0.05; 0.05, 0.1]).unwrap();
        let noise = NoiseModel::new(dmatrix![1e-3, 0.0; 0.0, 2e-3], dmatrix![1.0], dmatrix![1.0, 0.0]).unwrap();
        let field = |_t: f64, x: &State| &a * x;
        let next = ekf_predict(&b, &field, 0.0, dt, &noise).unwrap();
        let mean = &phi * &b.mean;
        let cov = &phi * &b.covariance * phi.transpose() + &noise.process;
        assert!((next.mean - mean).amax() < 1e-7);
        assert!((next.covariance - cov).amax() < 1e-7);
    }
}
