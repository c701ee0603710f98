use crate::{Error, Matrix, Result, State};

/// Symmetry tolerance on covariances.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

/// Mean and covariance of a Gaussian state estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBelief {
    pub mean: State,
    pub covariance: Matrix,
}

impl GaussianBelief {
    pub fn new(mean: State, covariance: Matrix) -> Result<Self> {
        if covariance.shape() != (mean.len(), mean.len()) {
            return Err(Error::Dimension(format!(
                "covariance is {:?} for a state of length {}",
                covariance.shape(),
                mean.len()
            )));
        }
        let belief = Self { mean, covariance };
        belief.check()?;
        Ok(belief)
    }

    /// Belief with isotropic covariance `scale·I`.
    pub fn isotropic(mean: State, scale: f64) -> Result<Self> {
        let n = mean.len();
        Self::new(mean, Matrix::identity(n, n) * scale)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn trace(&self) -> f64 {
        self.covariance.trace()
    }

    /// Symmetric within 1e-12 and no eigenvalue below -1e-10.
    pub fn check(&self) -> Result<()> {
        check_covariance(&self.covariance, "belief covariance")
    }
}

pub(crate) fn symmetrize(p: &Matrix) -> Matrix {
    (p + p.transpose()) * 0.5
}

pub(crate) fn check_covariance(p: &Matrix, what: &str) -> Result<()> {
    if !p.is_square() {
        return Err(Error::Dimension(format!("{what} is not square: {:?}", p.shape())));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
    }
    let asym = (p - p.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::InvalidArgument(format!("{what} is not symmetric (max |P - Pᵀ| = {asym:e})")));
    }
    if p.nrows() > 0 {
        let min_eig = symmetrize(p).symmetric_eigenvalues().min();
        if min_eig < PSD_TOL {
            return Err(Error::InvalidArgument(format!("{what} is not PSD (min eigenvalue {min_eig:e})")));
        }
    }
    Ok(())
}

/// Process noise `Q`, measurement noise `R_y` and measurement matrix `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub process: Matrix,
    pub measurement: Matrix,
    pub observation: Matrix,
}

impl NoiseModel {
    /// Validates shapes and symmetry/PSD of both covariances.
    ///
    /// `R_y` may be singular here (noise-free measurements are legitimate);
    /// the update step rejects a singular innovation covariance.
    pub fn new(process: Matrix, measurement: Matrix, observation: Matrix) -> Result<Self> {
        let n = process.nrows();
        let m = measurement.nrows();
        if observation.shape() != (m, n) {
            return Err(Error::Dimension(format!(
                "H is {:?}, expected ({m}, {n})",
                observation.shape()
            )));
        }
        check_covariance(&process, "Q")?;
        check_covariance(&measurement, "R_y")?;
        Ok(Self {
            process,
            measurement,
            observation,
        })
    }

    /// `H = I`, diagonal `Q` and `R_y`.
    pub fn diagonal(q: &[f64], r: &[f64]) -> Result<Self> {
        let n = q.len();
        if r.len() != n {
            return Err(Error::Dimension(format!(
                "identity observation needs as many measurement variances ({}) as states ({n})",
                r.len()
            )));
        }
        Self::new(
            Matrix::from_diagonal(&State::from_column_slice(q)),
            Matrix::from_diagonal(&State::from_column_slice(r)),
            Matrix::identity(n, n),
        )
    }

    pub fn state_dim(&self) -> usize {
        self.process.nrows()
    }

    pub fn measurement_dim(&self) -> usize {
        self.measurement.nrows()
    }
}
