use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd::assemble::{assemble, BoundaryData};
use crate::fd::banded::BandedLu;
use crate::fd::sparse::CsrMatrix;
use crate::grid::StripGrid;
use crate::params::PdeParams;
use crate::scalar::Real;

pub const RAYLEIGH_DRIFT_TOL: f64 = 1e-10;
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenReport<T> {
    pub eigenvalue: T,
    pub iterations: usize,
    /// `||A v - mu v||_2 / (mu ||v||_2)`.
    pub relative_residual: T,
}

/// Smallest eigenvalue of the discrete Dirichlet `-Laplacian` on the truncated
/// strip, by unshifted inverse power iteration from the all-ones vector.
pub fn min_eigenvalue<T: Real>(grid: &StripGrid<T>) -> Result<EigenReport<T>> {
    let params = PdeParams::new(T::zero(), T::zero())?;
    let sys = assemble(
        grid,
        &params,
        &BoundaryData::zero(),
        |_, _| T::zero(),
        Default::default(),
    )?;
    let n = sys.unknowns();
    let triplets = (0..n)
        .flat_map(|r| {
            sys.matrix
                .row(r)
                .map(move |(c, v)| (r, c, -v))
                .collect::<Vec<_>>()
        })
        .collect();
    let a = CsrMatrix::from_triplets(n, triplets);
    let lu = BandedLu::factor(&a)?;

    let norm2 = |v: &[T]| v.iter().map(|&x| x * x).sum::<T>().sqrt();
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).map(|(&p, &q)| p * q).sum::<T>();

    let mut v = vec![T::one(); n];
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut mu_prev = T::infinity();
    let mut res = T::infinity();
    for it in 1..=MAX_ITERATIONS {
        let mut w = lu.solve(&v);
        let nw = norm2(&w);
        w.iter_mut().for_each(|x| *x /= nw);
        let aw = a.mul_vec(&w);
        let mu = dot(&w, &aw);
        let r: Vec<T> = aw.iter().zip(&w).map(|(&p, &q)| p - mu * q).collect();
        res = norm2(&r) / mu.abs();
        let drift = (mu - mu_prev).abs();
        v = w;
        mu_prev = mu;
        if drift <= T::lit(RAYLEIGH_DRIFT_TOL) && res <= T::lit(EIGEN_RESIDUAL_TOL) {
            return Ok(EigenReport {
                eigenvalue: mu,
                iterations: it,
                relative_residual: res,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual: res.to_f64_lossless(),
    })
}

/// Lowest Dirichlet eigenvalue of `-Laplacian` on `[x_min, x_max] x (0, pi)`.
pub fn continuum_min_eigenvalue(width: f64) -> f64 {
    1.0 + (std::f64::consts::PI / width).powi(2)
}
