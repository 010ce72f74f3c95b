//! The map `w = e^z` between the strip and the punctured upper half-plane.
//!
//! Under `u~(w) = u(z)` the strip equation `Laplacian u - k u_x = 0` becomes
//! `|x|^2 Laplacian u~ - k x . grad u~ = 0`, equivalently
//! `div(|x|^{-k} grad u~) = 0`.

use std::io::Write;

use serde::Serialize;

use crate::analytic::StripSolution;
use crate::error::{Error, Result};
use crate::field::{fmt17, PatchField, ScalarField};
use crate::grid::{HalfPlaneGrid, StripGrid};
use crate::scalar::Real;

/// Weights `|x|^{-k}` are 2-admissible only for `k < 2`.
pub const ADMISSIBLE_K_BOUND: f64 = 2.0;

/// `(x, y) -> (e^x cos y, e^x sin y)`; the walls land exactly on the real axis.
pub fn strip_to_half<T: Real>(x: T, y: T) -> (T, T) {
    let r = x.exp();
    if y == T::zero() {
        (r, T::zero())
    } else if y == T::PI() {
        (-r, T::zero())
    } else {
        let (s, c) = y.sin_cos();
        (r * c, r * s)
    }
}

/// Inverse of [`strip_to_half`]: `(ln |w|, arg w)` with `arg w` in `[0, pi]`.
pub fn half_to_strip<T: Real>(xt: T, yt: T) -> Result<(T, T)> {
    if xt == T::zero() && yt == T::zero() {
        return Err(Error::Puncture);
    }
    if yt < T::zero() {
        return Err(Error::OutsideHalfPlane {
            x: xt.to_f64_lossless(),
            y: yt.to_f64_lossless(),
        });
    }
    Ok(inverse_unchecked(xt, yt))
}

#[inline]
fn inverse_unchecked<T: Real>(xt: T, yt: T) -> (T, T) {
    // `yt.abs()` folds -0.0 onto the positive axis so arg stays in [0, pi].
    (xt.hypot(yt).ln(), yt.abs().atan2(xt))
}

/// A function on the half-plane with a gradient.
pub trait HalfPlaneFunction<T: Real> {
    fn value(&self, xt: T, yt: T) -> T;

    /// Central differences unless overridden with a closed form.
    fn gradient(&self, xt: T, yt: T) -> (T, T) {
        let h = T::epsilon().cbrt() * T::one().max(xt.hypot(yt));
        let two = T::lit(2.0);
        (
            (self.value(xt + h, yt) - self.value(xt - h, yt)) / (two * h),
            (self.value(xt, yt + h) - self.value(xt, yt - h)) / (two * h),
        )
    }
}

/// Closure-backed function with an explicit gradient.
pub struct FnPair<V, G> {
    pub value: V,
    pub gradient: G,
}

impl<T, V, G> HalfPlaneFunction<T> for FnPair<V, G>
where
    T: Real,
    V: Fn(T, T) -> T,
    G: Fn(T, T) -> (T, T),
{
    fn value(&self, xt: T, yt: T) -> T {
        (self.value)(xt, yt)
    }

    fn gradient(&self, xt: T, yt: T) -> (T, T) {
        (self.gradient)(xt, yt)
    }
}

/// `u~(w) = u(log w)` for a strip solution with a closed-form gradient.
#[derive(Debug, Clone, Copy)]
pub struct Transported<S>(pub S);

impl<T: Real, S: StripSolution<T>> HalfPlaneFunction<T> for Transported<S> {
    fn value(&self, xt: T, yt: T) -> T {
        let (x, y) = inverse_unchecked(xt, yt);
        self.0.value(x, y)
    }

    fn gradient(&self, xt: T, yt: T) -> (T, T) {
        let (x, y) = inverse_unchecked(xt, yt);
        let (ux, uy) = self.0.gradient(x, y);
        let r2 = xt * xt + yt * yt;
        ((xt * ux - yt * uy) / r2, (yt * ux + xt * uy) / r2)
    }
}

/// Source grid, mapped nodes, and transported values.
#[derive(Debug, Clone, PartialEq)]
pub struct MapImage<T> {
    source: StripGrid<T>,
    image: Vec<(T, T)>,
    values: Vec<T>,
}

impl<T: Real> MapImage<T> {
    pub fn source(&self) -> &StripGrid<T> {
        &self.source
    }

    pub fn image(&self) -> &[(T, T)] {
        &self.image
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// CSV with header `x,y,xt,yt,value` in source node order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "xt", "yt", "value"])?;
        for (n, (_, _, x, y)) in self.source.nodes().enumerate() {
            let (xt, yt) = self.image[n];
            out.write_record([
                fmt17(x),
                fmt17(y),
                fmt17(xt),
                fmt17(yt),
                fmt17(self.values[n]),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Transports a strip field to the half-plane without any Jacobian weight.
pub fn pushforward<T: Real>(field: &ScalarField<T>) -> MapImage<T> {
    let g = *field.grid();
    MapImage {
        source: g,
        image: g.nodes().map(|(_, _, x, y)| strip_to_half(x, y)).collect(),
        values: field.values().to_vec(),
    }
}

/// Puncture radius `e^{x_min} / 2`: half the smallest modulus reached by the grid.
pub fn default_exclusion<T: Real>(grid: &StripGrid<T>) -> T {
    grid.x_min().exp() / T::lit(2.0)
}

/// Resamples a strip field onto a uniform patch by bilinear interpolation in
/// strip coordinates.
pub fn resample_bilinear<T: Real>(
    field: &ScalarField<T>,
    patch: &HalfPlaneGrid<T>,
) -> Result<PatchField<T>> {
    let mut values = Vec::with_capacity(patch.len());
    for (_, _, xt, yt) in patch.nodes() {
        let (x, y) = half_to_strip(xt, yt)?;
        values.push(field.interpolate(x, y)?);
    }
    PatchField::from_values(*patch, values)
}

/// Samples a half-plane function on the patch nodes.
pub fn transport_to_patch<T: Real, F: HalfPlaneFunction<T>>(
    u: &F,
    patch: &HalfPlaneGrid<T>,
) -> Result<PatchField<T>> {
    PatchField::sample(*patch, |x, y| u.value(x, y))
}

/// Pointwise `Laplacian u~ - k (x . grad u~) / |x|^2` at interior patch nodes
/// (zero on the patch border), by central differences.
pub fn weighted_residual_field<T: Real>(
    field: &PatchField<T>,
    k: T,
    exclusion: T,
) -> Result<PatchField<T>> {
    weighted_operator(field, -k, exclusion)
}

/// Shared stencil for `Laplacian w + s (x . grad w) / |x|^2`.
pub(crate) fn weighted_operator<T: Real>(
    field: &PatchField<T>,
    s: T,
    exclusion: T,
) -> Result<PatchField<T>> {
    let p = field.patch();
    let two = T::lit(2.0);
    let (hx, hy) = (p.hx(), p.hy());
    let mut out = vec![T::zero(); p.len()];
    for i in 1..p.nx() - 1 {
        for j in 1..p.ny() - 1 {
            for (a, b) in [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1), (i, j)] {
                let (xa, ya) = p.node(a, b);
                if xa.hypot(ya) <= exclusion {
                    return Err(Error::PunctureProximity {
                        x: xa.to_f64_lossless(),
                        y: ya.to_f64_lossless(),
                        radius: exclusion.to_f64_lossless(),
                    });
                }
            }
            let c = field.at(i, j);
            let (w, e) = (field.at(i - 1, j), field.at(i + 1, j));
            let (sv, n) = (field.at(i, j - 1), field.at(i, j + 1));
            let lap = (w - two * c + e) / (hx * hx) + (sv - two * c + n) / (hy * hy);
            let ux = (e - w) / (two * hx);
            let uy = (n - sv) / (two * hy);
            let (x, y) = p.node(i, j);
            out[p.index(i, j)] = lap + s * (x * ux + y * uy) / (x * x + y * y);
        }
    }
    PatchField::from_values(*p, out)
}

/// `max |Laplacian u~ - k (x . grad u~)/|x|^2|` over interior patch nodes, i.e.
/// the expanded weighted equation normalized by `|x|^2`.
pub fn weighted_residual<T: Real>(field: &PatchField<T>, k: T, exclusion: T) -> Result<T> {
    let adm = admissibility(k);
    if let Some(w) = &adm.warning {
        log::warn!("{w}");
    }
    let r = weighted_residual_field(field, k, exclusion)?;
    Ok(r.values().iter().fold(T::zero(), |m, v| m.max(v.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub warning: Option<String>,
}

/// Flags `k >= 2`, where `|x|^{-k}` stops being a 2-admissible weight. The
/// finite-difference residual does not depend on admissibility.
pub fn admissibility<T: Real>(k: T) -> Admissibility {
    let kf = k.to_f64_lossless();
    if kf < ADMISSIBLE_K_BOUND {
        Admissibility {
            admissible: true,
            warning: None,
        }
    } else {
        Admissibility {
            admissible: false,
            warning: Some(format!(
                "k = {kf} >= 2: |x|^-k is not a 2-admissible weight; \
                 weighted uniqueness theory does not cover this case"
            )),
        }
    }
}

/// Largest `|u~|` on the rays `x~ > 0` and `x~ < 0` of the real axis, sampled at
/// the given radii.
pub fn ray_trace_max<T: Real, F: Fn(T, T) -> T>(u: F, radii: &[T]) -> (T, T) {
    let mut pos = T::zero();
    let mut neg = T::zero();
    for &r in radii {
        let (x, y) = inverse_unchecked(r, T::zero());
        pos = pos.max(u(x, y).abs());
        let (x, y) = inverse_unchecked(-r, T::zero());
        neg = neg.max(u(x, y).abs());
    }
    (pos, neg)
}

/// Summary written by the `map` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalReport {
    pub k: f64,
    pub weighted_residual: f64,
    pub exclusion: f64,
    pub admissibility: Admissibility,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, LN_2, PI};

    #[test]
    fn forward_examples() {
        let (a, b) = strip_to_half(0.0, FRAC_PI_2);
        assert!(a.abs() < 1e-16 && (b - 1.0).abs() < 1e-16);
        let (a, b) = strip_to_half(LN_2, FRAC_PI_2);
        assert!(a.abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
        assert_eq!(strip_to_half(0.0, 0.0), (1.0, 0.0));
        assert_eq!(strip_to_half(0.3, PI), (-(0.3f64.exp()), 0.0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(half_to_strip(0.0, 1.0).unwrap(), (0.0, FRAC_PI_2));
        assert_eq!(half_to_strip(-1.0, 0.0).unwrap(), (0.0, PI));
        assert_eq!(half_to_strip(-1.0, -0.0).unwrap(), (0.0, PI));
        assert!(matches!(half_to_strip(0.0, 0.0), Err(Error::Puncture)));
        assert!(half_to_strip(1.0, -0.5).is_err());
    }

    #[test]
    fn round_trip() {
        for &(x, y) in &[(0.0, 0.1), (-3.0, 3.0), (2.5, 1.2), (1.0, 0.0), (-0.7, PI)] {
            let (xt, yt) = strip_to_half(x, y);
            let (x2, y2) = half_to_strip(xt, yt).unwrap();
            assert!((x2 - x).abs() < 1e-14 && (y2 - y).abs() < 1e-14, "{x},{y}");
        }
    }

    #[test]
    fn pushforward_examples() {
        let g = StripGrid::<f64>::new(-1.0, 1.0, 9, 7).unwrap();
        let one = pushforward(&ScalarField::sample(g, |_, _| 1.0).unwrap());
        assert!(one.values().iter().all(|&v| v == 1.0));
        let xs = pushforward(&ScalarField::sample(g, |x, _| x).unwrap());
        for (&(xt, yt), &v) in xs.image().iter().zip(xs.values()) {
            assert!((xt.hypot(yt).ln() - v).abs() < 1e-15);
            assert!(yt >= 0.0);
        }
        let mut buf = Vec::new();
        xs.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"x,y,xt,yt,value\n"));
    }

    #[test]
    fn harmonic_height_has_zero_residual() {
        let p = HalfPlaneGrid::new((-1.0, 1.0), (0.5, 1.5), 21, 21, 0.25).unwrap();
        let f = PatchField::sample(p, |_, y| y).unwrap();
        assert!(weighted_residual(&f, 0.0, 0.25).unwrap() < 1e-12);
        let zero = PatchField::sample(p, |_, _| 0.0).unwrap();
        assert_eq!(weighted_residual(&zero, 3.0, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn stencil_near_puncture_is_rejected() {
        let p = HalfPlaneGrid::new((-1.0, 1.0), (0.2, 1.0), 9, 9, 0.1).unwrap();
        let f = PatchField::sample(p, |_, y| y).unwrap();
        assert!(matches!(
            weighted_residual(&f, 1.0, 0.5),
            Err(Error::PunctureProximity { .. })
        ));
    }

    #[test]
    fn admissibility_flag() {
        assert!(admissibility(1.5).admissible);
        let a = admissibility(2.0);
        assert!(!a.admissible && a.warning.is_some());
    }

    #[test]
    fn bilinear_resampling_is_second_order() {
        let u = |x: f64, y: f64| x.exp() * y.sin() * 0.3 + (x * 0.5).cos() * y;
        let patch = HalfPlaneGrid::new((-1.0, 1.0), (0.5, 1.5), 9, 9, 0.2).unwrap();
        let mut errs = Vec::new();
        let mut g = StripGrid::new(-2.0, 1.0, 31, 31).unwrap();
        for _ in 0..3 {
            let f = ScalarField::sample(g, u).unwrap();
            let pf = resample_bilinear(&f, &patch).unwrap();
            let err = patch
                .nodes()
                .map(|(i, j, xt, yt)| {
                    let (x, y) = half_to_strip(xt, yt).unwrap();
                    (pf.at(i, j) - u(x, y)).abs()
                })
                .fold(0.0, f64::max);
            errs.push(err);
            g = g.refined();
        }
        assert!(
            errs[0] / errs[1] > 3.0 && errs[1] / errs[2] > 3.0,
            "{errs:?}"
        );
    }
}
