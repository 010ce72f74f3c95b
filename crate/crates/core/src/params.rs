use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients of `L = Laplacian - k d/dx - lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPdeParams<T>", into = "RawPdeParams<T>")]
#[serde(bound = "T: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct PdeParams<T> {
    k: T,
    lambda: T,
}

impl<T: Real> PdeParams<T> {
    /// Rejects negative or non-finite `lambda`.
    pub fn new(k: T, lambda: T) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParams(format!("k = {k} is not finite")));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lambda = {lambda} must be finite and nonnegative"
            )));
        }
        Ok(Self { k, lambda })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
}

#[derive(Serialize, Deserialize)]
struct RawPdeParams<T> {
    k: T,
    lambda: T,
}

impl<T: Real> TryFrom<RawPdeParams<T>> for PdeParams<T> {
    type Error = Error;
    fn try_from(r: RawPdeParams<T>) -> Result<Self> {
        Self::new(r.k, r.lambda)
    }
}

impl<T> From<PdeParams<T>> for RawPdeParams<T> {
    fn from(p: PdeParams<T>) -> Self {
        Self {
            k: p.k,
            lambda: p.lambda,
        }
    }
}

/// Physical inputs of the levitation model. `k = mu0 * sigma * vx` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaglevParams<T> {
    mu0: T,
    sigma: T,
    vx: T,
    b0: T,
    wavelength: T,
    k: T,
}

/// Vacuum permeability in H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;

impl<T: Real> MaglevParams<T> {
    pub fn new(mu0: T, sigma: T, vx: T, b0: T, wavelength: T) -> Result<Self> {
        if !(mu0 > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "mu0 = {mu0} must be positive"
            )));
        }
        if !(sigma >= T::zero()) {
            return Err(Error::InvalidParams(format!(
                "sigma = {sigma} must be nonnegative"
            )));
        }
        if !(wavelength > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "wavelength = {wavelength} must be positive"
            )));
        }
        if !vx.is_finite() || !b0.is_finite() {
            return Err(Error::InvalidParams("vx and B0 must be finite".into()));
        }
        Ok(Self {
            mu0,
            sigma,
            vx,
            b0,
            wavelength,
            k: mu0 * sigma * vx,
        })
    }

    /// Parameters with the conductivity chosen so that `mu0 * sigma * vx`
    /// reproduces `k` (up to rounding); `vx = 1 m/s`.
    pub fn from_k(mu0: T, k: T, b0: T, wavelength: T) -> Result<Self> {
        let vx = if k < T::zero() { -T::one() } else { T::one() };
        Self::new(mu0, k.abs() / mu0, vx, b0, wavelength)
    }

    pub fn mu0(&self) -> T {
        self.mu0
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn vx(&self) -> T {
        self.vx
    }

    pub fn b0(&self) -> T {
        self.b0
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn k(&self) -> T {
        self.k
    }
}
