use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::{Error, Matrix, Result};

/// Standard normal draws from a seeded ChaCha20 stream via Box–Muller.
///
/// Both outputs of each Box–Muller pair are used, so the sequence depends only
/// on the seed and on how many values have been drawn.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps ln finite
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn standard_normal_vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.standard_normal())
    }
}

/// Factor `L` with `L Lᵀ = cov`. Diagonal covariances get an exact elementwise
/// square root; singular PSD matrices are handled through the eigen
/// decomposition.
pub fn covariance_factor(cov: &Matrix) -> Result<Matrix> {
    if !cov.is_square() {
        return Err(Error::Dimension(format!("covariance is {}x{}", cov.nrows(), cov.ncols())));
    }
    let n = cov.nrows();
    let off_diagonal = (0..n).any(|i| (0..n).any(|j| i != j && cov[(i, j)] != 0.0));
    if !off_diagonal {
        if let Some(d) = cov.diagonal().iter().find(|d| **d < 0.0) {
            return Err(Error::InvalidArgument(format!("negative variance {d}")));
        }
        return Ok(Matrix::from_diagonal(&cov.diagonal().map(f64::sqrt)));
    }
    if let Some(ch) = cov.clone().cholesky() {
        return Ok(ch.l());
    }
    let eig = cov.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-10 * cov.amax().max(1.0)) {
        return Err(Error::InvalidArgument("covariance is not positive semidefinite".into()));
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(&eig.eigenvectors * Matrix::from_diagonal(&roots))
}
