//! Mixed logical dynamical systems: one-step semantics with a feasibility
//! check on a proposed `(δ, z)`.
//!
//! ```text
//! x⁺ = A x + B₁ u + B₂ δ + B₃ z
//! y  = C x + D₁ u + D₂ δ + D₃ z
//! s.t. E₂ δ + E₃ z <= E₁ u + E₄ x + E₅
//! ```
//!
//! Nothing here searches for `(δ, z)`; that is a mixed-integer problem.

use nalgebra::DVector;

use crate::{Error, Matrix, Result, State};

const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MldSystem {
    pub a: Matrix,
    pub b1: Matrix,
    pub b2: Matrix,
    pub b3: Matrix,
    pub c: Matrix,
    pub d1: Matrix,
    pub d2: Matrix,
    pub d3: Matrix,
    pub e1: Matrix,
    pub e2: Matrix,
    pub e3: Matrix,
    pub e4: Matrix,
    pub e5: DVector<f64>,
}

/// Sizes of `x`, `u`, `δ`, `z`, `y` and the number of constraint rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MldDims {
    pub nx: usize,
    pub nu: usize,
    pub nd: usize,
    pub nz: usize,
    pub ny: usize,
    pub nc: usize,
}

impl MldSystem {
    /// All-zero system of the given sizes; fill the matrices in afterwards.
    pub fn zeros(d: MldDims) -> Self {
        Self {
            a: Matrix::zeros(d.nx, d.nx),
            b1: Matrix::zeros(d.nx, d.nu),
            b2: Matrix::zeros(d.nx, d.nd),
            b3: Matrix::zeros(d.nx, d.nz),
            c: Matrix::zeros(d.ny, d.nx),
            d1: Matrix::zeros(d.ny, d.nu),
            d2: Matrix::zeros(d.ny, d.nd),
            d3: Matrix::zeros(d.ny, d.nz),
            e1: Matrix::zeros(d.nc, d.nu),
            e2: Matrix::zeros(d.nc, d.nd),
            e3: Matrix::zeros(d.nc, d.nz),
            e4: Matrix::zeros(d.nc, d.nx),
            e5: DVector::zeros(d.nc),
        }
    }

    pub fn dims(&self) -> MldDims {
        MldDims {
            nx: self.a.nrows(),
            nu: self.b1.ncols(),
            nd: self.b2.ncols(),
            nz: self.b3.ncols(),
            ny: self.c.nrows(),
            nc: self.e5.len(),
        }
    }

    pub fn validate(&self) -> Result<MldDims> {
        let d = self.dims();
        let checks: [(&str, &Matrix, (usize, usize)); 12] = [
            ("A", &self.a, (d.nx, d.nx)),
            ("B1", &self.b1, (d.nx, d.nu)),
            ("B2", &self.b2, (d.nx, d.nd)),
            ("B3", &self.b3, (d.nx, d.nz)),
            ("C", &self.c, (d.ny, d.nx)),
            ("D1", &self.d1, (d.ny, d.nu)),
            ("D2", &self.d2, (d.ny, d.nd)),
            ("D3", &self.d3, (d.ny, d.nz)),
            ("E1", &self.e1, (d.nc, d.nu)),
            ("E2", &self.e2, (d.nc, d.nd)),
            ("E3", &self.e3, (d.nc, d.nz)),
            ("E4", &self.e4, (d.nc, d.nx)),
        ];
        for (name, m, shape) in checks {
            if m.shape() != shape {
                return Err(Error::Dimension(format!("{name} is {:?}, expected {shape:?}", m.shape())));
            }
        }
        Ok(d)
    }

    /// Rows of `E₂δ + E₃z <= E₁u + E₄x + E₅` violated by more than 1e-9.
    pub fn violated_rows(&self, x: &State, u: &DVector<f64>, delta: &DVector<f64>, z: &DVector<f64>) -> Vec<usize> {
        let lhs = &self.e2 * delta + &self.e3 * z;
        let rhs = &self.e1 * u + &self.e4 * x + &self.e5;
        (0..lhs.len()).filter(|&i| lhs[i] > rhs[i] + FEASIBILITY_TOL).collect()
    }
}

/// Checks the proposed `(δ, z)` against the constraints and returns `(x⁺, y)`.
pub fn mld_step(
    sys: &MldSystem,
    x: &State,
    u: &DVector<f64>,
    delta: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<(State, DVector<f64>)> {
    let d = sys.validate()?;
    let sizes = [(x.len(), d.nx, "x"), (u.len(), d.nu, "u"), (delta.len(), d.nd, "delta"), (z.len(), d.nz, "z")];
    for (got, want, name) in sizes {
        if got != want {
            return Err(Error::Dimension(format!("{name} has length {got}, expected {want}")));
        }
    }
    if let Some((i, v)) = delta.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidArgument(format!("delta[{i}] = {v} is not binary")));
    }
    let rows = sys.violated_rows(x, u, delta, z);
    if !rows.is_empty() {
        return Err(Error::Infeasible { rows });
    }
    let next = &sys.a * x + &sys.b1 * u + &sys.b2 * delta + &sys.b3 * z;
    let y = &sys.c * x + &sys.d1 * u + &sys.d2 * delta + &sys.d3 * z;
    Ok((next, y))
}
