use crate::error::{Error, Result};
use crate::fd::assemble::{assemble, AssemblyOptions, BoundaryData, LinearSystem};
use crate::fd::banded::BandedLu;
use crate::field::ScalarField;
use crate::grid::StripGrid;
use crate::params::PdeParams;
use crate::scalar::Real;

/// Default relative residual target for [`solve`].
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_REFINEMENTS: usize = 4;

#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub field: ScalarField<T>,
    pub unknowns: Vec<T>,
    /// `||A u - b||_inf / ||b||_inf` (absolute when `b = 0`).
    pub residual: T,
    pub refinement_steps: usize,
}

fn inf_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn residual<T: Real>(sys: &LinearSystem<T>, u: &[T]) -> Vec<T> {
    sys.matrix
        .mul_vec(u)
        .into_iter()
        .zip(&sys.rhs)
        .map(|(au, &b)| b - au)
        .collect()
}

/// Banded LU followed by iterative refinement until
/// `||A u - b||_inf <= tol ||b||_inf`.
pub fn solve_detailed<T: Real>(sys: &LinearSystem<T>, tol: T) -> Result<Solution<T>> {
    let lu = BandedLu::factor(&sys.matrix)?;
    let bnorm = inf_norm(&sys.rhs);
    let target = if bnorm > T::zero() {
        tol * bnorm
    } else {
        T::zero()
    };
    let mut u = lu.solve(&sys.rhs);
    let mut r = residual(sys, &u);
    let mut steps = 0;
    while inf_norm(&r) > target {
        if steps == MAX_REFINEMENTS {
            return Err(Error::NonConvergence {
                iterations: steps,
                residual: (inf_norm(&r) / bnorm.max(T::min_positive_value())).to_f64_lossless(),
            });
        }
        let d = lu.solve(&r);
        for (ui, di) in u.iter_mut().zip(d) {
            *ui += di;
        }
        r = residual(sys, &u);
        steps += 1;
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem { row: 0 });
    }
    let rn = inf_norm(&r);
    Ok(Solution {
        field: sys.to_field(&u)?,
        unknowns: u,
        residual: if bnorm > T::zero() { rn / bnorm } else { rn },
        refinement_steps: steps,
    })
}

pub fn solve<T: Real>(sys: &LinearSystem<T>, tol: T) -> Result<ScalarField<T>> {
    solve_detailed(sys, tol).map(|s| s.field)
}

/// Pointwise signed residual `L_h[u] - f` at interior nodes (zero on the boundary),
/// using central differences throughout.
pub fn residual_field<T, F>(
    field: &ScalarField<T>,
    params: &PdeParams<T>,
    forcing: F,
) -> ScalarField<T>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    let g = field.grid();
    let two = T::lit(2.0);
    let ihx2 = g.hx().powi(-2);
    let ihy2 = g.hy().powi(-2);
    let i2hx = (two * g.hx()).recip();
    let mut out = vec![T::zero(); g.len()];
    for i in 1..g.nx() - 1 {
        for j in 1..=g.ny() {
            let c = field.at(i, j);
            let (w, e) = (field.at(i - 1, j), field.at(i + 1, j));
            let (s, n) = (field.at(i, j - 1), field.at(i, j + 1));
            let lap = (w - two * c + e) * ihx2 + (s - two * c + n) * ihy2;
            let ux = (e - w) * i2hx;
            let (x, y) = g.node(i, j);
            out[g.index(i, j)] = lap - params.k() * ux - params.lambda() * c - forcing(x, y);
        }
    }
    ScalarField::from_values(*g, out).expect("finite residual")
}

/// `max |L_h[field] - f|` over interior nodes.
pub fn operator_residual<T, F>(field: &ScalarField<T>, params: &PdeParams<T>, forcing: F) -> T
where
    T: Real,
    F: Fn(T, T) -> T,
{
    residual_field(field, params, forcing).max_abs()
}

/// Samples a field on a grid refined `levels` times back onto the coarse nodes.
pub fn restrict<T: Real>(fine: &ScalarField<T>, coarse: &StripGrid<T>) -> Result<ScalarField<T>> {
    let fg = fine.grid();
    let sx = (fg.nx() - 1) / (coarse.nx() - 1);
    let sy = (fg.rows() - 1) / (coarse.rows() - 1);
    if sx * (coarse.nx() - 1) != fg.nx() - 1
        || sy * (coarse.rows() - 1) != fg.rows() - 1
        || fg.x_min() != coarse.x_min()
        || fg.x_max() != coarse.x_max()
    {
        return Err(Error::InvalidBounds(
            "fine grid does not nest the coarse grid".into(),
        ));
    }
    ScalarField::sample_indexed(*coarse, |i, j| fine.at(i * sx, j * sy))
}

/// One solver configuration for [`uniqueness_gap`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverVariant {
    pub options: AssemblyOptions,
    /// Number of grid halvings before solving.
    pub refinements: u32,
}

/// Max-norm gap, on the nodes of `grid`, between the solutions produced by two
/// solver configurations for the same data.
pub fn uniqueness_gap<T, F>(
    grid: &StripGrid<T>,
    params: &PdeParams<T>,
    bc: &BoundaryData<'_, T>,
    forcing: F,
    a: SolverVariant,
    b: SolverVariant,
) -> Result<T>
where
    T: Real,
    F: Fn(T, T) -> T + Copy,
{
    let run = |v: SolverVariant| -> Result<ScalarField<T>> {
        let mut g = *grid;
        for _ in 0..v.refinements {
            g = g.refined();
        }
        let sys = assemble(&g, params, bc, forcing, v.options)?;
        let u = solve(&sys, T::lit(DEFAULT_TOL))?;
        restrict(&u, grid)
    };
    let ua = run(a)?;
    let ub = run(b)?;
    Ok(ua.max_abs_diff(&ub))
}
