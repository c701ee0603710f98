//! Piecewise-affine systems over polyhedral regions.

use nalgebra::DVector;

use crate::{Error, Matrix, Result, State};

/// Slack applied to region inequalities so shared boundaries belong to
/// every adjacent region.
const REGION_SLACK: f64 = 1e-12;

/// Polyhedron `{x : P x + q <= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub p: Matrix,
    pub q: DVector<f64>,
}

impl Region {
    pub fn new(p: Matrix, q: DVector<f64>) -> Result<Self> {
        if p.nrows() != q.len() {
            return Err(Error::Dimension(format!(
                "region has {} rows in P but {} offsets",
                p.nrows(),
                q.len()
            )));
        }
        Ok(Self { p, q })
    }

    /// The whole space (no constraints).
    pub fn everywhere(dim: usize) -> Self {
        Self {
            p: Matrix::zeros(0, dim),
            q: DVector::zeros(0),
        }
    }

    pub fn contains(&self, x: &State) -> bool {
        (&self.p * x + &self.q).iter().all(|&v| v <= REGION_SLACK)
    }
}

/// `x⁺ = A x + B u + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineUpdate {
    pub a: Matrix,
    pub b: Matrix,
    pub c: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PwaSystem {
    regions: Vec<Region>,
    dynamics: Vec<AffineUpdate>,
    nx: usize,
    nu: usize,
}

impl PwaSystem {
    pub fn new(regions: Vec<Region>, dynamics: Vec<AffineUpdate>) -> Result<Self> {
        if regions.is_empty() || regions.len() != dynamics.len() {
            return Err(Error::InvalidArgument(format!(
                "need equally many regions and dynamics (at least one), got {} and {}",
                regions.len(),
                dynamics.len()
            )));
        }
        let nx = dynamics[0].a.nrows();
        let nu = dynamics[0].b.ncols();
        for (i, (r, d)) in regions.iter().zip(&dynamics).enumerate() {
            let ok = r.p.ncols() == nx
                && d.a.shape() == (nx, nx)
                && d.b.shape() == (nx, nu)
                && d.c.len() == nx;
            if !ok {
                return Err(Error::Dimension(format!("region {i} is inconsistent with n = {nx}, m = {nu}")));
            }
        }
        Ok(Self {
            regions,
            dynamics,
            nx,
            nu,
        })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Indices of every region containing `x`.
    pub fn regions_containing(&self, x: &State) -> Vec<usize> {
        (0..self.regions.len()).filter(|&i| self.regions[i].contains(x)).collect()
    }

    /// Lowest-index region containing `x`.
    pub fn region_of(&self, x: &State) -> Option<usize> {
        self.regions.iter().position(|r| r.contains(x))
    }

    pub fn step(&self, x: &State, u: &DVector<f64>) -> Result<State> {
        if x.len() != self.nx || u.len() != self.nu {
            return Err(Error::Dimension(format!(
                "expected x in R^{} and u in R^{}, got {} and {}",
                self.nx,
                self.nu,
                x.len(),
                u.len()
            )));
        }
        let i = self.region_of(x).ok_or_else(|| Error::UncoveredState {
            state: x.iter().copied().collect(),
        })?;
        let d = &self.dynamics[i];
        Ok(&d.a * x + &d.b * u + &d.c)
    }
}

/// One step of a PWA system; ties on shared boundaries go to the lowest region index.
pub fn pwa_step(sys: &PwaSystem, x: &State, u: &DVector<f64>) -> Result<State> {
    sys.step(x, u)
}
