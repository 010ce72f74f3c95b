//! Closed-form solutions of `Laplacian u - k u_x - lambda u = 0` on the strip.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PdeParams;
use crate::scalar::Real;

/// A function on the strip with a closed-form gradient.
pub trait StripSolution<T: Real> {
    fn value(&self, x: T, y: T) -> T;
    fn gradient(&self, x: T, y: T) -> (T, T);
}

/// Decay rate `alpha > 0` and phase tilt `b` that make
/// `exp(-alpha y) sin(x / wavelength + b y)` solve the operator with `(k, lambda)`.
///
/// `alpha^2 - b^2 = 1/wavelength^2 + lambda` and `2 alpha b = -k / wavelength`;
/// the quartic in `alpha` is solved in closed form on its decaying branch.
pub fn dispersion<T: Real>(k: T, lambda: T, wavelength: T) -> Result<(T, T)> {
    if !(wavelength > T::zero()) || !wavelength.is_finite() {
        return Err(Error::InvalidParams(format!(
            "wavelength = {wavelength} must be positive"
        )));
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidParams(format!(
            "lambda = {lambda} must be nonnegative"
        )));
    }
    let two = T::lit(2.0);
    let s = wavelength.powi(-2) + lambda;
    let q = k / wavelength;
    let alpha2 = (s + s.hypot(q)) / two;
    let alpha = alpha2.sqrt();
    let b = if k == T::zero() {
        T::zero()
    } else {
        -q / (two * alpha)
    };
    Ok((alpha, b))
}

/// `B0 exp(-alpha y) sin(x / wavelength + b y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TravelingWave<T> {
    pub b0: T,
    pub wavelength: T,
    pub alpha: T,
    pub b: T,
    pub lambda: T,
    /// Convection coefficient the wave was built for.
    pub k: T,
}

impl<T: Real> TravelingWave<T> {
    pub fn new(k: T, lambda: T, wavelength: T, b0: T) -> Result<Self> {
        let (alpha, b) = dispersion(k, lambda, wavelength)?;
        Ok(Self {
            b0,
            wavelength,
            alpha,
            b,
            lambda,
            k,
        })
    }

    pub fn params(&self) -> PdeParams<T> {
        PdeParams::new(self.k, self.lambda).expect("validated at construction")
    }

    #[inline]
    pub fn phase(&self, x: T, y: T) -> T {
        x / self.wavelength + self.b * y
    }

    #[inline]
    pub fn eval(&self, x: T, y: T) -> T {
        self.b0 * (-self.alpha * y).exp() * self.phase(x, y).sin()
    }
}

impl<T: Real> StripSolution<T> for TravelingWave<T> {
    fn value(&self, x: T, y: T) -> T {
        self.eval(x, y)
    }

    fn gradient(&self, x: T, y: T) -> (T, T) {
        let th = self.phase(x, y);
        let (s, c) = th.sin_cos();
        let e = self.b0 * (-self.alpha * y).exp();
        (e * c / self.wavelength, e * (self.b * c - self.alpha * s))
    }
}

/// Exponents `(r+, r-)` of `r^2 - k r - l^2 = 0`, so that
/// `(A e^{r+ x} + B e^{r- x}) sin(l y)` is annihilated by `Laplacian - k d/dx`.
pub fn separation_mode<T: Real>(k: T, l: u32) -> Result<(T, T)> {
    if l == 0 {
        return Err(Error::InvalidParams("mode index l must be >= 1".into()));
    }
    let l2 = T::lit(f64::from(l)).powi(2);
    let disc = (k * k + T::lit(4.0) * l2).sqrt();
    let half = T::lit(0.5);
    // Take the root without cancellation first, then Vieta.
    Ok(if k >= T::zero() {
        let rp = (k + disc) * half;
        (rp, -l2 / rp)
    } else {
        let rm = (k - disc) * half;
        (-l2 / rm, rm)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationMode<T> {
    pub l: u32,
    pub a: T,
    pub b: T,
    pub rplus: T,
    pub rminus: T,
}

impl<T: Real> SeparationMode<T> {
    pub fn new(k: T, l: u32, a: T, b: T) -> Result<Self> {
        let (rplus, rminus) = separation_mode(k, l)?;
        Ok(Self {
            l,
            a,
            b,
            rplus,
            rminus,
        })
    }

    fn ly(&self, y: T) -> T {
        T::lit(f64::from(self.l)) * y
    }
}

impl<T: Real> StripSolution<T> for SeparationMode<T> {
    fn value(&self, x: T, y: T) -> T {
        let ex = self.a * (self.rplus * x).exp() + self.b * (self.rminus * x).exp();
        ex * self.ly(y).sin()
    }

    fn gradient(&self, x: T, y: T) -> (T, T) {
        let ep = self.a * (self.rplus * x).exp();
        let em = self.b * (self.rminus * x).exp();
        let (s, c) = self.ly(y).sin_cos();
        let l = T::lit(f64::from(self.l));
        ((self.rplus * ep + self.rminus * em) * s, (ep + em) * l * c)
    }
}

/// Coefficients produced by multiplying a solution of `Laplacian v = lambda v` by `e^{a x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeShift<T> {
    pub k: T,
    pub lambda: T,
    /// `|a| <= sqrt(lambda)`, i.e. the shifted zeroth-order term stays nonnegative.
    pub admissible: bool,
}

impl<T: Real> GaugeShift<T> {
    /// Fails when the shifted `lambda` is negative.
    pub fn params(&self) -> Result<PdeParams<T>> {
        PdeParams::new(self.k, self.lambda)
    }
}

/// `v e^{a x}` solves `Laplacian u - 2a u_x - (lambda - a^2) u = 0` whenever
/// `Laplacian v = lambda v`.
pub fn gauge_shift<T: Real>(a: T, lambda: T) -> Result<GaugeShift<T>> {
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidParams(format!(
            "lambda = {lambda} must be nonnegative"
        )));
    }
    let shifted = lambda - a * a;
    Ok(GaugeShift {
        k: T::lit(2.0) * a,
        lambda: shifted,
        admissible: shifted >= T::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    #[test]
    fn dispersion_trivial_cases() {
        assert_eq!(dispersion(0.0, 0.0, 1.0).unwrap(), (1.0, 0.0));
        let (a, b) = dispersion(0.0, 1.0, 1.0).unwrap();
        assert!((a - SQRT_2).abs() < 1e-15);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn dispersion_rejects_bad_input() {
        assert!(dispersion(1.0, 0.0, 0.0).is_err());
        assert!(dispersion(1.0, -0.5, 1.0).is_err());
    }

    #[test]
    fn wave_trivial_points() {
        let w = TravelingWave::new(0.0, 0.0, 1.0, 2.5).unwrap();
        assert_eq!(w.eval(0.0, 0.0), 0.0);
        assert_eq!(w.eval(FRAC_PI_2, 0.0), 2.5);
    }

    #[test]
    fn separation_trivial_cases() {
        assert_eq!(separation_mode(0.0, 1).unwrap(), (1.0, -1.0));
        let (rp, rm): (f64, f64) = separation_mode(3.0, 2).unwrap();
        assert!((rp - 4.0).abs() < 1e-15 && (rm + 1.0).abs() < 1e-15);
        assert!(separation_mode(1.0, 0).is_err());
    }

    #[test]
    fn gauge_cases() {
        let g = gauge_shift(0.0, 0.0).unwrap();
        assert_eq!((g.k, g.lambda, g.admissible), (0.0, 0.0, true));
        let g = gauge_shift(1.0, 1.0).unwrap();
        assert_eq!((g.k, g.lambda, g.admissible), (2.0, 0.0, true));
        assert!(g.params().is_ok());
        let g = gauge_shift(2.0, 1.0).unwrap();
        assert_eq!((g.k, g.lambda, g.admissible), (4.0, -3.0, false));
        assert!(g.params().is_err());
        assert!(gauge_shift(0.0, -1.0).is_err());
    }

    #[test]
    fn gradients_match_central_differences() {
        let w = TravelingWave::new(2.0, 0.7, 0.8, 1.3).unwrap();
        let m = SeparationMode::new(-1.5, 3, 0.4, -0.9).unwrap();
        let h = 1e-6;
        for &(x, y) in &[(0.3, 0.4), (-1.2, 2.9), (2.0, 1.0)] {
            for s in [&w as &dyn StripSolution<f64>, &m] {
                let (gx, gy) = s.gradient(x, y);
                let fx = (s.value(x + h, y) - s.value(x - h, y)) / (2.0 * h);
                let fy = (s.value(x, y + h) - s.value(x, y - h)) / (2.0 * h);
                assert!((gx - fx).abs() < 1e-7 * (1.0 + gx.abs()), "{gx} vs {fx}");
                assert!((gy - fy).abs() < 1e-7 * (1.0 + gy.abs()), "{gy} vs {fy}");
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let (a, b) = dispersion(2.0f32, 0.0, 1.0).unwrap();
        assert!((a - 1.272_02).abs() < 1e-5 && (b + 0.786_15).abs() < 1e-5);
    }
}
