//! Barrier `v_R = f(h(x/R, y/R))` for the operator `Laplacian - k d/dx - lambda`
//! on the half-disk `Omega ∩ B_R`, together with a sampled certificate of its
//! defining properties.
//!
//! `h` is the harmonic measure of the upper unit semicircle seen from the
//! half-disk; `f` is the normalized primitive of `exp(-c t)` with
//! `c = pi^2 |k| / 2`, which makes `f''/f' = -c` dominate the drift term.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default seed for the random part of the certificate samples.
pub const DEFAULT_SEED: u64 = 0x5eed_ba77;
/// Random interior samples per certificate.
pub const RANDOM_SAMPLES: usize = 1000;
/// Tolerance on `max L[v_R]` with closed-form derivatives.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Tolerance on the finite-difference cross-check.
pub const FD_TOL: f64 = 1e-6;
/// Slack on the drift bound `|k R h_x| / |grad h|^2 <= |k| pi^2 / 2`.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierSpec<T> {
    pub k: T,
    pub lambda: T,
    pub r: T,
    /// Radius of the disks around `(±R, 0)` left out of every check.
    pub corner_exclusion: T,
}

impl<T: Real> BarrierSpec<T> {
    /// Spec with the default corner exclusion `1e-3 R`.
    pub fn new(k: T, lambda: T, r: T) -> Result<Self> {
        Self::with_exclusion(k, lambda, r, T::lit(1e-3) * r)
    }

    pub fn with_exclusion(k: T, lambda: T, r: T, corner_exclusion: T) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParams(format!("k = {k} is not finite")));
        }
        if !(lambda >= T::zero()) {
            return Err(Error::InvalidParams(format!(
                "lambda = {lambda} must be nonnegative"
            )));
        }
        if !(r > T::PI()) || !r.is_finite() {
            return Err(Error::InvalidParams(format!("R = {r} must exceed pi")));
        }
        if !(corner_exclusion > T::zero() && corner_exclusion < r / T::lit(10.0)) {
            return Err(Error::InvalidParams(format!(
                "corner exclusion {corner_exclusion} must lie in (0, R/10)"
            )));
        }
        Ok(Self {
            k,
            lambda,
            r,
            corner_exclusion,
        })
    }

    /// `c = pi^2 |k| / 2`.
    pub fn rate(&self) -> T {
        f_rate(self.k)
    }

    /// Distance to the nearer of the corners `(+-R, 0)`.
    pub fn corner_distance(&self, x: T, y: T) -> T {
        (x - self.r).hypot(y).min((x + self.r).hypot(y))
    }
}

fn f_rate<T: Real>(k: T) -> T {
    T::PI() * T::PI() * k.abs() / T::lit(2.0)
}

fn corner_error<T: Real>(x: T, y: T) -> Error {
    Error::SingularCorner {
        x: x.to_f64_lossless(),
        y: y.to_f64_lossless(),
    }
}

fn check_half_disk<T: Real>(x: T, y: T) -> Result<()> {
    if y == T::zero() && (x == T::one() || x == -T::one()) {
        return Err(corner_error(x, y));
    }
    if y < T::zero() || x * x + y * y > T::one() + T::epsilon() * T::lit(4.0) {
        return Err(Error::OutOfRange {
            x: x.to_f64_lossless(),
            y: y.to_f64_lossless(),
        });
    }
    Ok(())
}

/// `h(x, y) = (2/pi)(pi - theta)`, `theta` the angle under which the segment
/// `[-1, 1]` is seen from `(x, y)`.
pub fn h_eval<T: Real>(x: T, y: T) -> Result<T> {
    check_half_disk(x, y)?;
    Ok(h_unchecked(x, y))
}

#[inline]
fn h_unchecked<T: Real>(x: T, y: T) -> T {
    // Sum of the two base angles; equals pi - theta without cancellation.
    T::lit(2.0) * T::FRAC_1_PI() * (y.atan2(T::one() + x) + y.atan2(T::one() - x))
}

/// Closed-form gradient of `h` on the unit half-disk.
pub fn gradient_h<T: Real>(x: T, y: T) -> Result<(T, T)> {
    check_half_disk(x, y)?;
    Ok(gradient_unchecked(x, y))
}

#[inline]
fn gradient_unchecked<T: Real>(x: T, y: T) -> (T, T) {
    let c = T::lit(2.0) * T::FRAC_1_PI();
    let a = (x + T::one()).powi(2) + y * y;
    let b = (x - T::one()).powi(2) + y * y;
    (
        c * (y / b - y / a),
        c * ((x + T::one()) / a - (x - T::one()) / b),
    )
}

/// `f(t) = (1 - e^{-c t}) / (1 - e^{-c})`, the identity when `k = 0`.
pub fn f_eval<T: Real>(k: T, t: T) -> T {
    let c = f_rate(k);
    if c == T::zero() {
        t
    } else {
        (-c * t).exp_m1() / (-c).exp_m1()
    }
}

pub fn f_prime<T: Real>(k: T, t: T) -> T {
    let c = f_rate(k);
    if c == T::zero() {
        T::one()
    } else {
        -c * (-c * t).exp() / (-c).exp_m1()
    }
}

/// `f'' = -c f'`.
pub fn f_second<T: Real>(k: T, t: T) -> T {
    -f_rate(k) * f_prime(k, t)
}

fn check_domain<T: Real>(spec: &BarrierSpec<T>, x: T, y: T) -> Result<()> {
    if spec.corner_distance(x, y) < spec.corner_exclusion {
        return Err(corner_error(x, y));
    }
    if y < T::zero() || y > T::PI() || x.hypot(y) > spec.r {
        return Err(Error::OutOfRange {
            x: x.to_f64_lossless(),
            y: y.to_f64_lossless(),
        });
    }
    Ok(())
}

pub fn v_r_eval<T: Real>(spec: &BarrierSpec<T>, x: T, y: T) -> Result<T> {
    check_domain(spec, x, y)?;
    Ok(f_eval(spec.k, h_unchecked(x / spec.r, y / spec.r)))
}

/// `h_x, h_y` evaluated at the rescaled point `(x/R, y/R)` (no chain-rule factor).
pub fn scaled_gradient<T: Real>(spec: &BarrierSpec<T>, x: T, y: T) -> Result<(T, T)> {
    check_domain(spec, x, y)?;
    Ok(gradient_unchecked(x / spec.r, y / spec.r))
}

/// `L[v_R]` from the closed-form derivatives of `f` and `h`, using that `h` is harmonic.
pub fn l_v_closed<T: Real>(spec: &BarrierSpec<T>, x: T, y: T) -> Result<T> {
    check_domain(spec, x, y)?;
    let r = spec.r;
    let t = h_unchecked(x / r, y / r);
    let (hx, hy) = gradient_unchecked(x / r, y / r);
    let grad2 = hx * hx + hy * hy;
    let fp = f_prime(spec.k, t);
    let fpp = f_second(spec.k, t);
    Ok(fpp * grad2 / (r * r) - spec.k * fp * hx / r - spec.lambda * f_eval(spec.k, t))
}

/// `L[v_R]` by second-order central differences with step `step`.
pub fn l_v_fd<T: Real>(spec: &BarrierSpec<T>, x: T, y: T, step: T) -> Result<T> {
    let v = |px: T, py: T| v_r_eval(spec, px, py);
    let c = v(x, y)?;
    let (w, e) = (v(x - step, y)?, v(x + step, y)?);
    let (s, n) = (v(x, y - step)?, v(x, y + step)?);
    let two = T::lit(2.0);
    let lap = (w + e + s + n - T::lit(4.0) * c) / (step * step);
    let vx = (e - w) / (two * step);
    Ok(lap - spec.k * vx - spec.lambda * c)
}

/// Richardson combination `(4 L_s - L_{2s}) / 3` of [`l_v_fd`]; the finest
/// stencil still uses `step`.
pub fn l_v_fd_extrapolated<T: Real>(spec: &BarrierSpec<T>, x: T, y: T, step: T) -> Result<T> {
    let fine = l_v_fd(spec, x, y, step)?;
    let coarse = l_v_fd(spec, x, y, T::lit(2.0) * step)?;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

/// `|k R h_x| / |grad h|^2` at `(x/R, y/R)`; bounded by `|k| pi y / 2`.
pub fn drift_ratio<T: Real>(spec: &BarrierSpec<T>, x: T, y: T) -> Result<T> {
    let (hx, hy) = scaled_gradient(spec, x, y)?;
    Ok((spec.k * spec.r * hx).abs() / (hx * hx + hy * hy))
}

/// Limit of `R v_R(x, y)` as `R -> infinity`: `(4 y / pi) f'(0)`.
pub fn scaled_limit_target<T: Real>(k: T, y: T) -> T {
    T::lit(4.0) * y * T::FRAC_1_PI() * f_prime(k, T::zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledLimitPoint {
    pub r: f64,
    pub scaled_value: f64,
    pub target: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

/// `R v_R(x, y)` against its limit along the given radii.
pub fn scaled_limit<T: Real>(k: T, x: T, y: T, radii: &[T]) -> Result<Vec<ScaledLimitPoint>> {
    let target = scaled_limit_target(k, y);
    radii
        .iter()
        .map(|&r| {
            let spec = BarrierSpec::new(k, T::zero(), r)?;
            let rv = r * v_r_eval(&spec, x, y)?;
            let err = (rv - target).abs();
            Ok(ScaledLimitPoint {
                r: r.to_f64_lossless(),
                scaled_value: rv.to_f64_lossless(),
                target: target.to_f64_lossless(),
                abs_error: err.to_f64_lossless(),
                rel_error: (err / target.abs()).to_f64_lossless(),
            })
        })
        .collect()
}

/// Outcome of a sampled check: `passed` iff `max_violation <= tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertReport {
    pub max_violation: f64,
    pub samples_checked: usize,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
}

impl CertReport {
    pub fn new(max_violation: f64, samples_checked: usize, tolerance: f64, seed: u64) -> Self {
        Self {
            max_violation,
            samples_checked,
            tolerance,
            passed: max_violation <= tolerance,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertOptions<T> {
    /// Tensor-grid points per direction.
    pub density: usize,
    pub seed: u64,
    pub random_samples: usize,
    /// Overrides the default finite-difference step `min(1e-3, 1e-5 R)`.
    pub fd_step: Option<T>,
    /// Samples closer than this to a corner skip the finite-difference
    /// cross-check (the closed-form check still runs). Defaults to the corner exclusion.
    pub fd_corner_clearance: Option<T>,
}

impl<T: Real> Default for CertOptions<T> {
    fn default() -> Self {
        Self {
            density: 64,
            seed: DEFAULT_SEED,
            random_samples: RANDOM_SAMPLES,
            fd_step: None,
            fd_corner_clearance: None,
        }
    }
}

/// Full certificate for one [`BarrierSpec`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierCertificate {
    /// `max L[v_R]` from closed-form derivatives.
    pub report: CertReport,
    /// Largest `|L_fd[v_R] - L[v_R]|` over the cross-checked samples.
    pub fd_discrepancy: CertReport,
    pub fd_step: f64,
    /// Largest `|k R h_x| / |grad h|^2` against `|k| pi^2 / 2`.
    pub drift_bound: CertReport,
    /// Smallest `min(v, 1 - v)` over interior samples; must be positive.
    pub interior_margin: f64,
    /// `0 < v_R <= 1` on the top wall.
    pub top_wall_ok: bool,
    /// `R v_R(0, 1)` along `R = 1e2, 1e3, 1e4`.
    pub scaled_limit: Vec<ScaledLimitPoint>,
    pub scaled_limit_monotone: bool,
    pub warnings: Vec<String>,
}

impl BarrierCertificate {
    pub fn passed(&self) -> bool {
        self.report.passed
            && self.fd_discrepancy.passed
            && self.drift_bound.passed
            && self.interior_margin > 0.0
            && self.top_wall_ok
            && self.scaled_limit_monotone
    }
}

/// Tensor grid on `(-R, R) x (0, pi)` plus uniform random points, all inside
/// `Omega ∩ B_R` and away from the corners.
pub fn sample_points<T: Real>(
    spec: &BarrierSpec<T>,
    density: usize,
    seed: u64,
    random: usize,
) -> Vec<(T, T)> {
    let r = spec.r;
    let keep = |x: T, y: T| x.hypot(y) < r && spec.corner_distance(x, y) >= spec.corner_exclusion;
    let mut pts = Vec::with_capacity(density * density + random);
    let n1 = T::from_usize_lossy(density + 1);
    for i in 0..density {
        let x = -r + T::lit(2.0) * r * T::from_usize_lossy(i + 1) / n1;
        for j in 0..density {
            let y = T::PI() * T::from_usize_lossy(j + 1) / n1;
            if keep(x, y) {
                pts.push((x, y));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rf = r.to_f64_lossless();
    let mut added = 0;
    while added < random {
        let x = T::lit(rng.gen_range(-rf..rf));
        let y = T::lit(rng.gen_range(0.0..std::f64::consts::PI));
        if y > T::zero() && keep(x, y) {
            pts.push((x, y));
            added += 1;
        }
    }
    pts
}

/// Default finite-difference step `min(1e-3, 1e-5 R)`.
pub fn default_fd_step<T: Real>(r: T) -> T {
    T::lit(1e-3).min(T::lit(1e-5) * r)
}

pub fn certify_barrier<T: Real>(
    spec: &BarrierSpec<T>,
    opts: &CertOptions<T>,
) -> Result<BarrierCertificate> {
    let step = opts.fd_step.unwrap_or_else(|| default_fd_step(spec.r));
    let clearance = opts.fd_corner_clearance.unwrap_or(spec.corner_exclusion);
    let mut warnings = Vec::new();
    if step > spec.corner_exclusion / T::lit(10.0) {
        warnings.push(format!(
            "finite-difference step {step} is coarse relative to the corner exclusion {}",
            spec.corner_exclusion
        ));
    }
    let pts = sample_points(spec, opts.density, opts.seed, opts.random_samples);

    let mut max_l = f64::NEG_INFINITY;
    let mut max_fd = 0.0f64;
    let mut fd_count = 0;
    let mut max_ratio = 0.0f64;
    let mut margin = f64::INFINITY;
    for &(x, y) in &pts {
        let l = l_v_closed(spec, x, y)?.to_f64_lossless();
        max_l = max_l.max(l);
        let v = v_r_eval(spec, x, y)?.to_f64_lossless();
        margin = margin.min(v.min(1.0 - v));
        max_ratio = max_ratio.max(drift_ratio(spec, x, y)?.to_f64_lossless());

        let reach = T::lit(2.0) * step;
        let stencil_inside = y - reach > T::zero()
            && y + reach < T::PI()
            && (x.abs() + reach).hypot(y + reach) < spec.r
            && spec.corner_distance(x, y) - reach >= clearance;
        if stencil_inside {
            let fd = l_v_fd_extrapolated(spec, x, y, step)?.to_f64_lossless();
            max_fd = max_fd.max((fd - l).abs());
            fd_count += 1;
        }
    }
    if fd_count == 0 {
        warnings.push("no sample admitted a finite-difference stencil".into());
    }

    let top_wall_ok = top_wall_values(spec, opts.density.max(8))
        .iter()
        .all(|&v| v > T::zero() && v <= T::one());

    let radii = [T::lit(1e2), T::lit(1e3), T::lit(1e4)];
    let limit = scaled_limit(spec.k, T::zero(), T::one(), &radii)?;
    let monotone = limit.windows(2).all(|w| w[1].abs_error < w[0].abs_error);

    let bound_limit = (f_rate(spec.k)).to_f64_lossless();
    Ok(BarrierCertificate {
        report: CertReport::new(max_l, pts.len(), CLOSED_FORM_TOL, opts.seed),
        fd_discrepancy: CertReport::new(max_fd, fd_count, FD_TOL, opts.seed),
        fd_step: step.to_f64_lossless(),
        drift_bound: CertReport::new(max_ratio - bound_limit, pts.len(), BOUND_SLACK, opts.seed),
        interior_margin: margin,
        top_wall_ok,
        scaled_limit: limit,
        scaled_limit_monotone: monotone,
        warnings,
    })
}

/// `v_R` along the top wall `y = pi`, `|x| < sqrt(R^2 - pi^2)`.
pub fn top_wall_values<T: Real>(spec: &BarrierSpec<T>, n: usize) -> Vec<T> {
    let half = (spec.r * spec.r - T::PI() * T::PI()).sqrt();
    (0..n)
        .map(|i| {
            let x =
                -half + T::lit(2.0) * half * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1);
            let x = x.max(-half).min(half);
            // On the arc endpoints rounding may push the point outside B_R.
            let scale = T::one() - T::epsilon() * T::lit(8.0);
            f_eval(
                spec.k,
                h_unchecked(x * scale / spec.r, T::PI() * scale / spec.r),
            )
        })
        .collect()
}
