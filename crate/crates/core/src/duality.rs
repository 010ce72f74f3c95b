//! Stream functions for the weighted equation `div(|x|^{-k} grad u~) = 0`.
//!
//! The dual `v~` is defined by `|x|^{-k} grad u~ = perp(grad v~)` with
//! `perp(a, b) = (b, -a)`, so at `k = 0` the pair `u~ + i v~` is holomorphic.
//! It satisfies `div(|x|^k grad v~) = 0`.

use serde::Serialize;

use crate::conformal::{weighted_operator, HalfPlaneFunction};
use crate::error::{Error, Result};
use crate::field::PatchField;
use crate::grid::HalfPlaneGrid;
use crate::quadrature::simpson_adaptive;
use crate::scalar::Real;

/// Initial Simpson panels per path segment.
pub const DEFAULT_PANELS: usize = 256;
/// Absolute tolerance on a whole path integral.
pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_PANELS: usize = 1 << 20;

/// Rotation by `-pi/2`: `(a, b) -> (b, -a)`.
#[inline]
pub fn perp<T: Real>((a, b): (T, T)) -> (T, T) {
    (b, -a)
}

fn check_clear<T: Real>(x: T, y: T, exclusion: T) -> Result<()> {
    if x.hypot(y) <= exclusion {
        return Err(Error::PunctureProximity {
            x: x.to_f64_lossless(),
            y: y.to_f64_lossless(),
            radius: exclusion.to_f64_lossless(),
        });
    }
    Ok(())
}

#[inline]
fn stream_gradient_unchecked<T: Real, F: HalfPlaneFunction<T>>(u: &F, k: T, x: T, y: T) -> (T, T) {
    let (ux, uy) = u.gradient(x, y);
    let w = (x * x + y * y).powf(-k / T::lit(2.0));
    // Solve perp(grad v) = w grad u; perp is inverted by -perp.
    let (a, b) = perp((w * ux, w * uy));
    (-a, -b)
}

/// `grad v~ = (-|x|^{-k} u~_y, |x|^{-k} u~_x)`.
pub fn stream_gradient<T: Real, F: HalfPlaneFunction<T>>(
    u: &F,
    k: T,
    (x, y): (T, T),
    exclusion: T,
) -> Result<(T, T)> {
    check_clear(x, y, exclusion)?;
    Ok(stream_gradient_unchecked(u, k, x, y))
}

/// Axis-aligned polyline in the upper half-plane; the first vertex is the
/// basepoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamPath<T> {
    vertices: Vec<(T, T)>,
}

impl<T: Real> StreamPath<T> {
    pub fn new(vertices: Vec<(T, T)>, exclusion: T) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("path needs at least one vertex".into()));
        }
        for &(x, y) in &vertices {
            if !(y > T::zero()) {
                return Err(Error::OutsideHalfPlane {
                    x: x.to_f64_lossless(),
                    y: y.to_f64_lossless(),
                });
            }
        }
        for w in vertices.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x0 != x1 && y0 != y1 {
                return Err(Error::InvalidPath(format!(
                    "segment ({x0}, {y0}) -> ({x1}, {y1}) is not axis-aligned"
                )));
            }
            if segment_distance(w[0], w[1]) <= exclusion {
                return Err(Error::PathThroughPuncture {
                    radius: exclusion.to_f64_lossless(),
                });
            }
        }
        if vertices.len() == 1 {
            let (x, y) = vertices[0];
            if x.hypot(y) <= exclusion {
                return Err(Error::PathThroughPuncture {
                    radius: exclusion.to_f64_lossless(),
                });
            }
        }
        Ok(Self { vertices })
    }

    /// Two-segment staircase, horizontal first when `horizontal_first`.
    pub fn staircase(
        from: (T, T),
        to: (T, T),
        horizontal_first: bool,
        exclusion: T,
    ) -> Result<Self> {
        let corner = if horizontal_first {
            (to.0, from.1)
        } else {
            (from.0, to.1)
        };
        let mut v = vec![from];
        for p in [corner, to] {
            if *v.last().unwrap() != p {
                v.push(p);
            }
        }
        Self::new(v, exclusion)
    }

    pub fn basepoint(&self) -> (T, T) {
        self.vertices[0]
    }

    pub fn target(&self) -> (T, T) {
        *self.vertices.last().unwrap()
    }

    pub fn vertices(&self) -> &[(T, T)] {
        &self.vertices
    }
}

/// Distance from the origin to an axis-aligned segment.
fn segment_distance<T: Real>((x0, y0): (T, T), (x1, y1): (T, T)) -> T {
    let clamp0 = |a: T, b: T| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo > T::zero() {
            lo
        } else if hi < T::zero() {
            hi
        } else {
            T::zero()
        }
    };
    clamp0(x0, x1).hypot(clamp0(y0, y1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamIntegral<T> {
    /// `v~(target) - v~(basepoint)`.
    pub value: T,
    pub error_estimate: T,
    pub converged: bool,
}

/// Integrates the stream gradient along `path`, segment by segment, with
/// Simpson's rule doubled from `panels` until the total estimated error is
/// below `tol`.
pub fn integrate_stream_with<T: Real, F: HalfPlaneFunction<T>>(
    u: &F,
    k: T,
    path: &StreamPath<T>,
    panels: usize,
    tol: T,
) -> StreamIntegral<T> {
    let segments = path.vertices.len().saturating_sub(1).max(1);
    let seg_tol = tol / T::from_usize_lossy(segments);
    let mut value = T::zero();
    let mut error_estimate = T::zero();
    let mut converged = true;
    for w in path.vertices.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let q = if y0 == y1 {
            simpson_adaptive(
                |x| stream_gradient_unchecked(u, k, x, y0).0,
                x0,
                x1,
                panels,
                seg_tol,
                MAX_PANELS,
            )
        } else {
            simpson_adaptive(
                |y| stream_gradient_unchecked(u, k, x0, y).1,
                y0,
                y1,
                panels,
                seg_tol,
                MAX_PANELS,
            )
        };
        value += q.value;
        error_estimate += q.error_estimate;
        converged &= q.converged;
    }
    StreamIntegral {
        value,
        error_estimate,
        converged,
    }
}

/// [`integrate_stream_with`] at the default panel count and tolerance.
pub fn integrate_stream<T: Real, F: HalfPlaneFunction<T>>(
    u: &F,
    k: T,
    path: &StreamPath<T>,
) -> StreamIntegral<T> {
    integrate_stream_with(u, k, path, DEFAULT_PANELS, T::lit(DEFAULT_TOL))
}

/// Samples `v~` on a patch with `v~ = 0` at node `basepoint`.
///
/// Values are accumulated cell by cell: along the basepoint row first, then
/// up and down each column, so every node is reached by a staircase that stays
/// inside the patch.
pub fn dual_field<T: Real, F: HalfPlaneFunction<T>>(
    u: &F,
    k: T,
    patch: &HalfPlaneGrid<T>,
    basepoint: (usize, usize),
) -> Result<PatchField<T>> {
    let (i0, j0) = basepoint;
    if i0 >= patch.nx() || j0 >= patch.ny() {
        return Err(Error::InvalidPath(format!(
            "basepoint node ({i0}, {j0}) outside the {}x{} patch",
            patch.nx(),
            patch.ny()
        )));
    }
    let cell_tol = T::lit(1e-14);
    let horizontal = |i_from: usize, i_to: usize, j: usize| {
        let (xa, y) = patch.node(i_from, j);
        let (xb, _) = patch.node(i_to, j);
        simpson_adaptive(
            |x| stream_gradient_unchecked(u, k, x, y).0,
            xa,
            xb,
            4,
            cell_tol,
            1 << 12,
        )
        .value
    };
    let vertical = |i: usize, j_from: usize, j_to: usize| {
        let (x, ya) = patch.node(i, j_from);
        let (_, yb) = patch.node(i, j_to);
        simpson_adaptive(
            |y| stream_gradient_unchecked(u, k, x, y).1,
            ya,
            yb,
            4,
            cell_tol,
            1 << 12,
        )
        .value
    };
    let mut v = vec![T::zero(); patch.len()];
    for i in (0..i0).rev() {
        v[patch.index(i, j0)] = v[patch.index(i + 1, j0)] + horizontal(i + 1, i, j0);
    }
    for i in i0 + 1..patch.nx() {
        v[patch.index(i, j0)] = v[patch.index(i - 1, j0)] + horizontal(i - 1, i, j0);
    }
    for i in 0..patch.nx() {
        for j in (0..j0).rev() {
            v[patch.index(i, j)] = v[patch.index(i, j + 1)] + vertical(i, j + 1, j);
        }
        for j in j0 + 1..patch.ny() {
            v[patch.index(i, j)] = v[patch.index(i, j - 1)] + vertical(i, j - 1, j);
        }
    }
    PatchField::from_values(*patch, v)
}

/// Pointwise `Laplacian v~ + k (x . grad v~) / |x|^2` at interior nodes, the
/// dual equation `div(|x|^k grad v~) = 0` divided by `|x|^k`.
pub fn dual_residual_field<T: Real>(
    field: &PatchField<T>,
    k: T,
    exclusion: T,
) -> Result<PatchField<T>> {
    weighted_operator(field, k, exclusion)
}

/// Max-norm of [`dual_residual_field`].
pub fn dual_residual<T: Real>(field: &PatchField<T>, k: T, exclusion: T) -> Result<T> {
    let r = dual_residual_field(field, k, exclusion)?;
    Ok(r.values().iter().fold(T::zero(), |m, v| m.max(v.abs())))
}

/// Discrete curl `d/dx (v_y) - d/dy (v_x)` of the stream gradient computed from
/// sampled `u~` by central differences (interior nodes two cells from the
/// border; zero elsewhere). It equals the weighted divergence of `grad u~`.
pub fn stream_curl<T: Real>(u: &PatchField<T>, k: T) -> Result<PatchField<T>> {
    let p = u.patch();
    let two = T::lit(2.0);
    let (hx, hy) = (p.hx(), p.hy());
    let grad = |i: usize, j: usize| {
        let (x, y) = p.node(i, j);
        let ux = (u.at(i + 1, j) - u.at(i - 1, j)) / (two * hx);
        let uy = (u.at(i, j + 1) - u.at(i, j - 1)) / (two * hy);
        let w = (x * x + y * y).powf(-k / two);
        (-w * uy, w * ux)
    };
    let mut out = vec![T::zero(); p.len()];
    if p.nx() >= 5 && p.ny() >= 5 {
        for i in 2..p.nx() - 2 {
            for j in 2..p.ny() - 2 {
                let dvy_dx = (grad(i + 1, j).1 - grad(i - 1, j).1) / (two * hx);
                let dvx_dy = (grad(i, j + 1).0 - grad(i, j - 1).0) / (two * hy);
                out[p.index(i, j)] = dvy_dx - dvx_dy;
            }
        }
    }
    PatchField::from_values(*p, out)
}

/// `v~` as a half-plane function: values by path integration from a fixed
/// basepoint (horizontal-first staircase), gradient in closed form.
///
/// Feeding this back into the construction with `-k` returns `-u~` up to a
/// constant.
pub struct DualPotential<'a, T, F> {
    u: &'a F,
    k: T,
    basepoint: (T, T),
    exclusion: T,
}

impl<'a, T: Real, F: HalfPlaneFunction<T>> DualPotential<'a, T, F> {
    pub fn new(u: &'a F, k: T, basepoint: (T, T), exclusion: T) -> Result<Self> {
        StreamPath::new(vec![basepoint], exclusion)?;
        Ok(Self {
            u,
            k,
            basepoint,
            exclusion,
        })
    }
}

impl<T: Real, F: HalfPlaneFunction<T>> HalfPlaneFunction<T> for DualPotential<'_, T, F> {
    fn value(&self, x: T, y: T) -> T {
        match StreamPath::staircase(self.basepoint, (x, y), true, self.exclusion) {
            Ok(path) => integrate_stream_with(self.u, self.k, &path, 16, T::lit(1e-12)).value,
            Err(_) => T::nan(),
        }
    }

    fn gradient(&self, x: T, y: T) -> (T, T) {
        stream_gradient_unchecked(self.u, self.k, x, y)
    }
}

/// Summary written by the `dualize` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub path_independence_gap: f64,
    pub dual_residual: f64,
    pub basepoint: (f64, f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::FnPair;

    #[allow(clippy::type_complexity)]
    fn identity_x() -> FnPair<impl Fn(f64, f64) -> f64, impl Fn(f64, f64) -> (f64, f64)> {
        FnPair {
            value: |x: f64, _y: f64| x,
            gradient: |_x: f64, _y: f64| (1.0, 0.0),
        }
    }

    #[test]
    fn perp_convention() {
        assert_eq!(perp((1.0, 0.0)), (0.0, -1.0));
        assert_eq!(perp(perp((2.0, -3.0))), (-2.0, 3.0));
    }

    #[test]
    fn conjugate_of_x_is_y() {
        let u = identity_x();
        assert_eq!(
            stream_gradient(&u, 0.0, (0.3, 0.7), 0.1).unwrap(),
            (-0.0, 1.0)
        );
        let path = StreamPath::new(vec![(0.0, 1.0), (0.0, 2.0)], 0.1).unwrap();
        let s = integrate_stream(&u, 0.0, &path);
        assert!((s.value - 1.0).abs() < 1e-14 && s.converged);
    }

    #[test]
    fn constant_has_zero_stream() {
        let u = FnPair {
            value: |_: f64, _: f64| 4.0,
            gradient: |_: f64, _: f64| (0.0, 0.0),
        };
        let path = StreamPath::staircase((-1.0, 1.0), (2.0, 3.0), false, 0.1).unwrap();
        assert_eq!(integrate_stream(&u, 1.5, &path).value, 0.0);
    }

    #[test]
    fn path_validation() {
        assert!(matches!(
            StreamPath::new(vec![(0.0, 1.0), (1.0, 2.0)], 0.1),
            Err(Error::InvalidPath(_))
        ));
        assert!(matches!(
            StreamPath::new(vec![(-1.0, 0.05), (1.0, 0.05)], 0.1),
            Err(Error::PathThroughPuncture { .. })
        ));
        assert!(StreamPath::new(vec![(-1.0, 0.2), (1.0, 0.2)], 0.1).is_ok());
        assert!(matches!(
            stream_gradient(&identity_x(), 0.0, (0.01, 0.01), 0.1),
            Err(Error::PunctureProximity { .. })
        ));
    }

    #[test]
    fn dual_field_of_x_is_shifted_y() {
        let p = HalfPlaneGrid::new((-1.0, 1.0), (0.5, 1.5), 9, 11, 0.1).unwrap();
        let v = dual_field(&identity_x(), 0.0, &p, (4, 5)).unwrap();
        for (i, j, _, y) in p.nodes() {
            assert!((v.at(i, j) - (y - 1.0)).abs() < 1e-14);
        }
        assert!(dual_residual(&v, 0.0, 0.1).unwrap() < 1e-12);
    }
}
