//! Magnetic field above a moving conducting plate and Maxwell-stress proxies.
//!
//! `B_y` is the traveling wave for `(k, lambda = 0)`; `B_x` is the bounded
//! periodic completion with `div B = 0` and `d_x B_y - d_y B_x = k B_y`.

use std::io::Write;

use serde::Serialize;

use crate::analytic::TravelingWave;
use crate::error::Result;
use crate::field::fmt17;
use crate::grid::StripGrid;
use crate::params::MaglevParams;
use crate::quadrature::simpson_adaptive;
use crate::scalar::Real;

/// Absolute tolerance of the wavelength averages, in units of `B0^2 / mu0`.
pub const AVERAGE_TOL: f64 = 1e-12;
const INITIAL_PANELS: usize = 64;
const MAX_PANELS: usize = 1 << 16;

/// `(B_x, B_y)` for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldPair<T> {
    pub wave: TravelingWave<T>,
}

impl<T: Real> FieldPair<T> {
    pub fn new(p: &MaglevParams<T>) -> Result<Self> {
        Ok(Self {
            wave: TravelingWave::new(p.k(), T::zero(), p.wavelength(), p.b0())?,
        })
    }

    pub fn alpha(&self) -> T {
        self.wave.alpha
    }

    pub fn b(&self) -> T {
        self.wave.b
    }

    /// `B_x = -B0 L e^{-alpha y} (alpha cos theta + b sin theta)`.
    #[inline]
    pub fn bx(&self, x: T, y: T) -> T {
        let w = &self.wave;
        let (s, c) = w.phase(x, y).sin_cos();
        -w.b0 * w.wavelength * (-w.alpha * y).exp() * (w.alpha * c + w.b * s)
    }

    /// Same expression as the traveling wave.
    #[inline]
    pub fn by(&self, x: T, y: T) -> T {
        self.wave.eval(x, y)
    }

    pub fn eval(&self, x: T, y: T) -> (T, T) {
        (self.bx(x, y), self.by(x, y))
    }
}

/// `(B_x, B_y)` at `(x, y)`, `y >= 0`.
pub fn b_field<T: Real>(p: &MaglevParams<T>, x: T, y: T) -> Result<(T, T)> {
    Ok(FieldPair::new(p)?.eval(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxwellResiduals<T> {
    /// `max |d_x B_x + d_y B_y|`.
    pub div_norm: T,
    /// `max |d_x B_y - d_y B_x - k B_y|`.
    pub curl_norm: T,
}

/// Central-difference residuals of both Maxwell relations at the interior
/// nodes of `grid`, for any field `(x, y) -> (B_x, B_y)`.
pub fn maxwell_residuals_of<T, F>(field: F, k: T, grid: &StripGrid<T>) -> MaxwellResiduals<T>
where
    T: Real,
    F: Fn(T, T) -> (T, T),
{
    let two = T::lit(2.0);
    let (hx, hy) = (grid.hx(), grid.hy());
    let mut div_norm = T::zero();
    let mut curl_norm = T::zero();
    for i in 1..grid.nx() - 1 {
        for j in 1..grid.rows() - 1 {
            let (x, y) = grid.node(i, j);
            let (bxe, bye) = field(grid.x(i + 1), y);
            let (bxw, byw) = field(grid.x(i - 1), y);
            let (bxn, _) = field(x, grid.y(j + 1));
            let (bxs, _) = field(x, grid.y(j - 1));
            let (_, byn) = field(x, grid.y(j + 1));
            let (_, bys) = field(x, grid.y(j - 1));
            let (_, by) = field(x, y);
            let div = (bxe - bxw) / (two * hx) + (byn - bys) / (two * hy);
            let curl = (bye - byw) / (two * hx) - (bxn - bxs) / (two * hy) - k * by;
            div_norm = div_norm.max(div.abs());
            curl_norm = curl_norm.max(curl.abs());
        }
    }
    MaxwellResiduals {
        div_norm,
        curl_norm,
    }
}

pub fn maxwell_residuals<T: Real>(
    p: &MaglevParams<T>,
    grid: &StripGrid<T>,
) -> Result<MaxwellResiduals<T>> {
    let pair = FieldPair::new(p)?;
    Ok(maxwell_residuals_of(|x, y| pair.eval(x, y), p.k(), grid))
}

/// Wavelength-averaged stress proxies at one height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceProxies<T> {
    /// `<B_x B_y> / mu0`.
    pub drag: T,
    /// `<B_x^2 - B_y^2> / (2 mu0)`.
    pub lift: T,
    pub error_estimate: T,
    pub converged: bool,
}

impl<T: Real> ForceProxies<T> {
    /// Proxies divided by `B0^2 / mu0`.
    pub fn normalized(&self, p: &MaglevParams<T>) -> (T, T) {
        let unit = p.b0() * p.b0() / p.mu0();
        (self.drag / unit, self.lift / unit)
    }
}

/// Composite-Simpson averages over `x in [0, 2 pi L]`.
pub fn wavelength_averages<T: Real>(p: &MaglevParams<T>, y: T) -> Result<ForceProxies<T>> {
    let pair = FieldPair::new(p)?;
    let period = T::lit(2.0) * T::PI() * p.wavelength();
    let unit = p.b0() * p.b0() / p.mu0();
    let tol = T::lit(AVERAGE_TOL) * unit.abs().max(T::min_positive_value()) * period;
    let drag = simpson_adaptive(
        |x| {
            let (bx, by) = pair.eval(x, y);
            bx * by
        },
        T::zero(),
        period,
        INITIAL_PANELS,
        tol * p.mu0(),
        MAX_PANELS,
    );
    let lift = simpson_adaptive(
        |x| {
            let (bx, by) = pair.eval(x, y);
            bx * bx - by * by
        },
        T::zero(),
        period,
        INITIAL_PANELS,
        tol * p.mu0(),
        MAX_PANELS,
    );
    let two = T::lit(2.0);
    Ok(ForceProxies {
        drag: drag.value / period / p.mu0(),
        lift: lift.value / period / (two * p.mu0()),
        error_estimate: (drag.error_estimate + lift.error_estimate) / period / p.mu0(),
        converged: drag.converged && lift.converged,
    })
}

/// Closed forms `drag = -B0^2 L b e^{-2 alpha y} / (2 mu0)` and
/// `lift = B0^2 e^{-2 alpha y} (L^2 (alpha^2 + b^2) - 1) / (4 mu0)`.
pub fn closed_form_averages<T: Real>(p: &MaglevParams<T>, y: T) -> Result<(T, T)> {
    let pair = FieldPair::new(p)?;
    let (a, b, l) = (pair.alpha(), pair.b(), p.wavelength());
    let e = p.b0() * p.b0() * (-T::lit(2.0) * a * y).exp() / p.mu0();
    Ok((
        -e * l * b / T::lit(2.0),
        e * (l * l * (a * a + b * b) - T::one()) / T::lit(4.0),
    ))
}

/// One row of a `(k, y)` sweep, in units of `B0^2 / mu0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: f64,
    pub y: f64,
    pub drag_proxy: f64,
    pub lift_proxy: f64,
}

/// Proxies for every `(k, y)` pair, `k` outermost.
pub fn sweep(ks: &[f64], ys: &[f64], b0: f64, wavelength: f64, mu0: f64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ks.len() * ys.len());
    for &k in ks {
        let p = MaglevParams::from_k(mu0, k, b0, wavelength)?;
        for &y in ys {
            let (drag_proxy, lift_proxy) = wavelength_averages(&p, y)?.normalized(&p);
            rows.push(SweepRow {
                k,
                y,
                drag_proxy,
                lift_proxy,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `k,y,drag_proxy,lift_proxy`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "y", "drag_proxy", "lift_proxy"])?;
    for r in rows {
        out.write_record([
            fmt17(r.k),
            fmt17(r.y),
            fmt17(r.drag_proxy),
            fmt17(r.lift_proxy),
        ])?;
    }
    out.flush()?;
    Ok(())
}
