//! Five-point discretization of `Laplacian u - k u_x - lambda u = f` on a strip grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::sparse::CsrMatrix;
use crate::field::ScalarField;
use crate::grid::StripGrid;
use crate::params::PdeParams;
use crate::scalar::Real;

type Profile<'a, T> = Box<dyn Fn(T) -> T + Sync + 'a>;
type Surface<'a, T> = Box<dyn Fn(T, T) -> T + Sync + 'a>;

/// How the truncated strip is closed at `x_min` and `x_max`.
pub enum SideClosure<'a, T> {
    /// Values sampled from a function of `(x, y)`.
    Dirichlet(Surface<'a, T>),
    /// `x_min` and `x_max` are identified; the window must span whole periods
    /// of any exact solution being reproduced.
    Periodic,
}

/// Wall data `u(x, 0) = g(x)`, `u(x, pi) = h(x)` plus the side closure.
pub struct BoundaryData<'a, T> {
    pub bottom: Profile<'a, T>,
    pub top: Profile<'a, T>,
    pub sides: SideClosure<'a, T>,
}

impl<'a, T: Real> BoundaryData<'a, T> {
    pub fn new<G, H>(bottom: G, top: H, sides: SideClosure<'a, T>) -> Self
    where
        G: Fn(T) -> T + Sync + 'a,
        H: Fn(T) -> T + Sync + 'a,
    {
        Self {
            bottom: Box::new(bottom),
            top: Box::new(top),
            sides,
        }
    }

    pub fn zero() -> Self {
        Self::new(
            |_| T::zero(),
            |_| T::zero(),
            SideClosure::Dirichlet(Box::new(|_, _| T::zero())),
        )
    }

    /// Walls and sides sampled from one function, typically an exact solution.
    pub fn dirichlet_from<F>(u: &'a F) -> Self
    where
        F: Fn(T, T) -> T + Sync,
    {
        Self::new(
            move |x| u(x, T::zero()),
            move |x| u(x, T::PI()),
            SideClosure::Dirichlet(Box::new(u)),
        )
    }

    /// Walls sampled from `u`, sides periodic.
    pub fn periodic_from<F>(u: &'a F) -> Self
    where
        F: Fn(T, T) -> T + Sync,
    {
        Self::new(
            move |x| u(x, T::zero()),
            move |x| u(x, T::PI()),
            SideClosure::Periodic,
        )
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.sides, SideClosure::Periodic)
    }
}

/// Discretization of the `-k u_x` term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convection {
    /// Second order; requires `|k| hx <= 2`.
    #[default]
    Central,
    /// First order, unconditionally monotone.
    Upwind,
}

/// Unknown numbering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// `y` fastest; half-bandwidth `ny`.
    #[default]
    YFastest,
    /// `x` fastest; half-bandwidth roughly `nx`.
    XFastest,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub convection: Convection,
    pub ordering: Ordering,
}

/// Assembled `A u = b` together with the map between unknowns and grid nodes.
#[derive(Debug, Clone)]
pub struct LinearSystem<T> {
    pub matrix: CsrMatrix<T>,
    pub rhs: Vec<T>,
    grid: StripGrid<T>,
    node_of: Vec<(usize, usize)>,
    unknown_of: Vec<Option<usize>>,
    // Boundary values on every node that is not an unknown.
    boundary: Vec<T>,
    periodic: bool,
}

impl<T: Real> LinearSystem<T> {
    pub fn grid(&self) -> &StripGrid<T> {
        &self.grid
    }

    pub fn unknowns(&self) -> usize {
        self.node_of.len()
    }

    pub fn node_of(&self, unknown: usize) -> (usize, usize) {
        self.node_of[unknown]
    }

    pub fn unknown_of(&self, i: usize, j: usize) -> Option<usize> {
        self.unknown_of[self.grid.index(i, j)]
    }

    /// Scatters a solution vector back onto the full grid.
    pub fn to_field(&self, u: &[T]) -> Result<ScalarField<T>> {
        assert_eq!(u.len(), self.unknowns());
        let g = &self.grid;
        let mut values = self.boundary.clone();
        for (n, &(i, j)) in self.node_of.iter().enumerate() {
            values[g.index(i, j)] = u[n];
        }
        if self.periodic {
            let last = g.nx() - 1;
            for j in 0..g.rows() {
                values[g.index(last, j)] = values[g.index(0, j)];
            }
        }
        ScalarField::from_values(*g, values)
    }

    /// Right-hand side with the given forcing, keeping the folded boundary data.
    pub fn with_rhs(&self, rhs: Vec<T>) -> Self {
        assert_eq!(rhs.len(), self.unknowns());
        Self {
            rhs,
            ..self.clone()
        }
    }
}

/// Stencil weights `(west, east, south/north, centre)`.
fn weights<T: Real>(grid: &StripGrid<T>, params: &PdeParams<T>, conv: Convection) -> [T; 4] {
    let two = T::lit(2.0);
    let ihx2 = grid.hx().powi(-2);
    let ihy2 = grid.hy().powi(-2);
    let k = params.k();
    let mut west = ihx2;
    let mut east = ihx2;
    let mut centre = -two * ihx2 - two * ihy2 - params.lambda();
    match conv {
        Convection::Central => {
            let c = k / (two * grid.hx());
            west += c;
            east -= c;
        }
        Convection::Upwind => {
            let c = k.abs() / grid.hx();
            if k > T::zero() {
                west += c;
            } else {
                east += c;
            }
            centre -= c;
        }
    }
    [west, east, ihy2, centre]
}

/// Cell-Peclet guard for central convection.
pub fn check_peclet<T: Real>(grid: &StripGrid<T>, params: &PdeParams<T>) -> Result<()> {
    let product = params.k().abs() * grid.hx();
    if product > T::lit(2.0) {
        return Err(Error::CellPeclet {
            k: params.k().to_f64_lossless(),
            hx: grid.hx().to_f64_lossless(),
            product: product.to_f64_lossless(),
        });
    }
    Ok(())
}

/// Builds the linear system; Dirichlet values are folded into the right-hand side.
pub fn assemble<T, F>(
    grid: &StripGrid<T>,
    params: &PdeParams<T>,
    bc: &BoundaryData<'_, T>,
    forcing: F,
    opts: AssemblyOptions,
) -> Result<LinearSystem<T>>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    if opts.convection == Convection::Central {
        check_peclet(grid, params)?;
    }
    let periodic = bc.is_periodic();
    let nx = grid.nx();
    let ny = grid.ny();

    // Unknown columns in elimination order.
    let columns: Vec<usize> = if periodic {
        folded(nx - 1)
    } else {
        (1..nx - 1).collect()
    };
    let ncols = columns.len();
    let mut node_of = vec![(0, 0); ncols * ny];
    let mut unknown_of = vec![None; grid.len()];
    for (pos, &i) in columns.iter().enumerate() {
        for j in 1..=ny {
            let n = match opts.ordering {
                Ordering::YFastest => pos * ny + (j - 1),
                Ordering::XFastest => (j - 1) * ncols + pos,
            };
            node_of[n] = (i, j);
            unknown_of[grid.index(i, j)] = Some(n);
        }
    }

    let mut boundary = vec![T::zero(); grid.len()];
    for (i, j, x, y) in grid.nodes() {
        if unknown_of[grid.index(i, j)].is_some() {
            continue;
        }
        let v = if j == 0 {
            (bc.bottom)(x)
        } else if j == ny + 1 {
            (bc.top)(x)
        } else {
            match &bc.sides {
                SideClosure::Dirichlet(s) => s(x, y),
                // The duplicated column is filled after the solve.
                SideClosure::Periodic => T::zero(),
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFinite {
                i,
                j,
                x: x.to_f64_lossless(),
                y: y.to_f64_lossless(),
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        boundary[grid.index(i, j)] = v;
    }

    let [west, east, vert, centre] = weights(grid, params, opts.convection);
    let n = node_of.len();
    let mut triplets = Vec::with_capacity(5 * n);
    let mut rhs = vec![T::zero(); n];
    let wrap = |i: usize, step: isize| -> usize {
        if periodic {
            let m = (nx - 1) as isize;
            (i as isize + step).rem_euclid(m) as usize
        } else {
            (i as isize + step) as usize
        }
    };
    for (row, &(i, j)) in node_of.iter().enumerate() {
        let (x, y) = grid.node(i, j);
        let mut b = forcing(x, y);
        triplets.push((row, row, centre));
        for (ii, jj, w) in [
            (wrap(i, -1), j, west),
            (wrap(i, 1), j, east),
            (i, j - 1, vert),
            (i, j + 1, vert),
        ] {
            match unknown_of[grid.index(ii, jj)] {
                Some(col) => triplets.push((row, col, w)),
                None => b -= w * boundary[grid.index(ii, jj)],
            }
        }
        rhs[row] = b;
    }

    Ok(LinearSystem {
        matrix: CsrMatrix::from_triplets(n, triplets),
        rhs,
        grid: *grid,
        node_of,
        unknown_of,
        boundary,
        periodic,
    })
}

/// `0, m-1, 1, m-2, ...` so that cyclic neighbours stay within two positions.
fn folded(m: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(m);
    let (mut lo, mut hi) = (0, m);
    while lo < hi {
        out.push(lo);
        lo += 1;
        if lo < hi {
            hi -= 1;
            out.push(hi);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zero(_: f64, _: f64) -> f64 {
        0.0
    }

    #[test]
    fn laplace_system_is_symmetric() {
        let g = StripGrid::new(0.0, 2.0, 9, 7).unwrap();
        let p = PdeParams::new(0.0, 0.0).unwrap();
        let sys = assemble(&g, &p, &BoundaryData::zero(), zero, Default::default()).unwrap();
        assert!(sys.matrix.is_symmetric(0.0));
        assert_eq!(sys.unknowns(), 7 * 7);
        assert!(sys.rhs.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn peclet_guard_trips() {
        let g = StripGrid::new(0.0, 3.0, 3, 5).unwrap();
        assert_eq!(g.hx(), 1.5);
        let p = PdeParams::new(2.0, 0.0).unwrap();
        let err = assemble(&g, &p, &BoundaryData::zero(), zero, Default::default()).unwrap_err();
        assert!(matches!(err, Error::CellPeclet { .. }));
        let upwind = AssemblyOptions {
            convection: Convection::Upwind,
            ..Default::default()
        };
        assert!(assemble(&g, &p, &BoundaryData::zero(), zero, upwind).is_ok());
    }

    #[test]
    fn lambda_shifts_the_diagonal_only() {
        let g = StripGrid::new(-1.0, 1.0, 11, 6).unwrap();
        let a = assemble(
            &g,
            &PdeParams::new(1.5, 0.0).unwrap(),
            &BoundaryData::zero(),
            zero,
            Default::default(),
        )
        .unwrap();
        let b = assemble(
            &g,
            &PdeParams::new(1.5, 1.0).unwrap(),
            &BoundaryData::zero(),
            zero,
            Default::default(),
        )
        .unwrap();
        for r in 0..a.unknowns() {
            for (c, v) in a.matrix.row(r) {
                let expected = if r == c { v - 1.0 } else { v };
                assert_eq!(b.matrix.get(r, c), expected);
            }
        }
    }

    #[test]
    fn m_matrix_under_guard() {
        let g = StripGrid::new(0.0, 4.0, 41, 9).unwrap();
        for conv in [Convection::Central, Convection::Upwind] {
            for k in [-5.0, 0.0, 3.0, 19.0] {
                let p = PdeParams::new(k, 0.3).unwrap();
                let opts = AssemblyOptions {
                    convection: conv,
                    ..Default::default()
                };
                if let Ok(sys) = assemble(&g, &p, &BoundaryData::zero(), zero, opts) {
                    assert!(sys.matrix.is_negated_m_matrix(), "{conv:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn orderings_have_expected_bandwidth() {
        let g = StripGrid::new(0.0, 1.0, 12, 5).unwrap();
        let p = PdeParams::new(0.0, 0.0).unwrap();
        let y = assemble(&g, &p, &BoundaryData::zero(), zero, Default::default()).unwrap();
        let x = assemble(
            &g,
            &p,
            &BoundaryData::zero(),
            zero,
            AssemblyOptions {
                ordering: Ordering::XFastest,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(y.matrix.bandwidths(), (5, 5));
        assert_eq!(x.matrix.bandwidths(), (10, 10));
    }

    #[test]
    fn periodic_fold_keeps_band_narrow() {
        assert_eq!(folded(5), vec![0, 4, 1, 3, 2]);
        let g = StripGrid::new(0.0, 2.0 * PI, 17, 5).unwrap();
        let p = PdeParams::new(1.0, 0.0).unwrap();
        let u = |x: f64, y: f64| x.sin() * y.sin();
        let sys = assemble(
            &g,
            &p,
            &BoundaryData::periodic_from(&u),
            zero,
            Default::default(),
        )
        .unwrap();
        assert_eq!(sys.unknowns(), 16 * 5);
        let (lo, up) = sys.matrix.bandwidths();
        assert!(lo <= 2 * 5 && up <= 2 * 5);
    }
}
