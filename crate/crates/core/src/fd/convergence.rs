use serde::Serialize;

use crate::analytic::{SeparationMode, StripSolution, TravelingWave};
use crate::error::{Error, Result};
use crate::fd::assemble::{assemble, AssemblyOptions, BoundaryData};
use crate::fd::solve::{solve, DEFAULT_TOL};
use crate::grid::StripGrid;
use crate::params::PdeParams;
use crate::scalar::Real;

/// Exact solutions with known forcing under any `(k, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution<T> {
    Wave(TravelingWave<T>),
    Mode(SeparationMode<T>),
    /// `u = sin y`.
    SinY,
}

impl<T: Real> ExactSolution<T> {
    pub fn value(&self, x: T, y: T) -> T {
        match self {
            Self::Wave(w) => w.value(x, y),
            Self::Mode(m) => m.value(x, y),
            Self::SinY => y.sin(),
        }
    }

    /// `L[u]` for the operator with `params`.
    pub fn forcing(&self, params: &PdeParams<T>, x: T, y: T) -> T {
        let (k, lambda) = (params.k(), params.lambda());
        match self {
            // Laplacian u = k_w u_x + lambda_w u.
            Self::Wave(w) => {
                let (ux, _) = w.gradient(x, y);
                (w.k - k) * ux + (w.lambda - lambda) * w.value(x, y)
            }
            // Laplacian u = (r+ + r-) u_x.
            Self::Mode(m) => {
                let (ux, _) = m.gradient(x, y);
                (m.rplus + m.rminus - k) * ux - lambda * m.value(x, y)
            }
            Self::SinY => -(T::one() + lambda) * y.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceProblem<T> {
    pub grid: StripGrid<T>,
    pub params: PdeParams<T>,
    pub exact: ExactSolution<T>,
    pub options: AssemblyOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy<T> {
    pub spacings: Vec<T>,
    pub errors: Vec<T>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub order: T,
}

/// Max-norm error of the discrete solution against the exact one.
pub fn solution_error<T: Real>(problem: &ConvergenceProblem<T>, grid: &StripGrid<T>) -> Result<T> {
    let exact = problem.exact;
    let params = problem.params;
    let u = move |x: T, y: T| exact.value(x, y);
    let bc = BoundaryData::dirichlet_from(&u);
    let sys = assemble(
        grid,
        &params,
        &bc,
        |x, y| exact.forcing(&params, x, y),
        problem.options,
    )?;
    let field = solve(&sys, T::lit(DEFAULT_TOL))?;
    Ok(grid
        .nodes()
        .map(|(i, j, x, y)| (field.at(i, j) - exact.value(x, y)).abs())
        .fold(T::zero(), T::max))
}

/// Observed order over `levels` nested grids starting at `problem.grid`.
pub fn convergence_order<T: Real>(
    problem: &ConvergenceProblem<T>,
    levels: usize,
) -> Result<ConvergenceStudy<T>> {
    if levels < 3 {
        return Err(Error::InvalidParams(format!(
            "need at least 3 levels, got {levels}"
        )));
    }
    let mut grid = problem.grid;
    let mut spacings = Vec::with_capacity(levels);
    let mut errors = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            grid = grid.refined();
        }
        spacings.push(grid.hx().max(grid.hy()));
        errors.push(solution_error(problem, &grid)?);
    }
    let order = log_log_slope(&spacings, &errors);
    Ok(ConvergenceStudy {
        spacings,
        errors,
        order,
    })
}

/// Least-squares slope of `log(e)` against `log(h)`.
pub fn log_log_slope<T: Real>(h: &[T], e: &[T]) -> T {
    let n = T::from_usize_lossy(h.len());
    let xs: Vec<T> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<T> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
