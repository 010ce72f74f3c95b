//! Sample lattices on the truncated strip and on patches of the upper half-plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform lattice on `[x_min, x_max] x [0, pi]`.
///
/// Columns `i = 0..nx`, rows `j = 0..=ny + 1`; rows `0` and `ny + 1` lie on the
/// walls, so `ny` counts the interior rows. Nodes are ordered row-major with
/// `y` fastest: `index = i * (ny + 2) + j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGrid<T> {
    x_min: T,
    x_max: T,
    nx: usize,
    ny: usize,
    hx: T,
    hy: T,
}

impl<T: Real> StripGrid<T> {
    pub fn new(x_min: T, x_max: T, nx: usize, ny: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidBounds(format!(
                "x_min = {x_min} must be finite and below x_max = {x_max}"
            )));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidBounds(format!(
                "need nx >= 3 and ny >= 3, got nx = {nx}, ny = {ny}"
            )));
        }
        let hx = (x_max - x_min) / T::from_usize_lossy(nx - 1);
        let hy = T::PI() / T::from_usize_lossy(ny + 1);
        Ok(Self {
            x_min,
            x_max,
            nx,
            ny,
            hx,
            hy,
        })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    /// Number of columns.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of interior rows.
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of rows including both walls.
    pub fn rows(&self) -> usize {
        self.ny + 2
    }

    pub fn hx(&self) -> T {
        self.hx
    }

    pub fn hy(&self) -> T {
        self.hy
    }

    pub fn len(&self) -> usize {
        self.nx * self.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.rows());
        i * self.rows() + j
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + T::from_usize_lossy(i) * self.hx
        }
    }

    #[inline]
    pub fn y(&self, j: usize) -> T {
        if j == self.ny + 1 {
            T::PI()
        } else {
            T::from_usize_lossy(j) * self.hy
        }
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (T, T) {
        (self.x(i), self.y(j))
    }

    /// Iterates `(i, j, x, y)` in serialization order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, T, T)> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.rows()).map(move |j| (i, j, self.x(i), self.y(j))))
    }

    /// Grid with every spacing halved over the same window.
    pub fn refined(&self) -> Self {
        Self::new(self.x_min, self.x_max, 2 * self.nx - 1, 2 * self.ny + 1)
            .expect("refinement of a valid grid is valid")
    }

    pub fn contains_x(&self, x: T) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Uniform Cartesian patch `[x0, x0 + (nx-1) hx] x [y0, y0 + (ny-1) hy]` in the
/// open upper half-plane, kept away from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneGrid<T> {
    x0: T,
    y0: T,
    hx: T,
    hy: T,
    nx: usize,
    ny: usize,
    exclusion: T,
}

impl<T: Real> HalfPlaneGrid<T> {
    /// Patch covering `[x_lo, x_hi] x [y_lo, y_hi]` with `nx x ny` nodes.
    pub fn new(
        (x_lo, x_hi): (T, T),
        (y_lo, y_hi): (T, T),
        nx: usize,
        ny: usize,
        exclusion: T,
    ) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidBounds(format!(
                "patch needs at least 3x3 nodes, got {nx}x{ny}"
            )));
        }
        if !(x_lo < x_hi) || !(y_lo < y_hi) {
            return Err(Error::InvalidBounds("empty patch".into()));
        }
        if !(y_lo > T::zero()) {
            return Err(Error::InvalidBounds(format!(
                "patch must lie in the open upper half-plane, y_lo = {y_lo}"
            )));
        }
        if !(exclusion > T::zero()) {
            return Err(Error::InvalidBounds(
                "exclusion radius must be positive".into(),
            ));
        }
        // Closest point of the rectangle to the origin.
        let cx = if x_lo > T::zero() {
            x_lo
        } else if x_hi < T::zero() {
            x_hi
        } else {
            T::zero()
        };
        if cx.hypot(y_lo) <= exclusion {
            return Err(Error::InvalidBounds(format!(
                "patch intersects the excluded disk of radius {exclusion}"
            )));
        }
        Ok(Self {
            x0: x_lo,
            y0: y_lo,
            hx: (x_hi - x_lo) / T::from_usize_lossy(nx - 1),
            hy: (y_hi - y_lo) / T::from_usize_lossy(ny - 1),
            nx,
            ny,
            exclusion,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> T {
        self.hx
    }

    pub fn hy(&self) -> T {
        self.hy
    }

    pub fn exclusion(&self) -> T {
        self.exclusion
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (T, T) {
        (
            self.x0 + T::from_usize_lossy(i) * self.hx,
            self.y0 + T::from_usize_lossy(j) * self.hy,
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, T, T)> + '_ {
        (0..self.nx).flat_map(move |i| {
            (0..self.ny).map(move |j| {
                let (x, y) = self.node(i, j);
                (i, j, x, y)
            })
        })
    }

    /// Same window with spacings halved.
    pub fn refined(&self) -> Self {
        let (x_hi, y_hi) = self.node(self.nx - 1, self.ny - 1);
        Self::new(
            (self.x0, x_hi),
            (self.y0, y_hi),
            2 * self.nx - 1,
            2 * self.ny - 1,
            self.exclusion,
        )
        .expect("refinement of a valid patch is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spacing_arithmetic() {
        let g = StripGrid::new(0.0, PI, 3, 3).unwrap();
        assert_eq!(g.hy(), PI / 4.0);
        assert_eq!(g.hx(), PI / 2.0);
        assert_eq!(g.y(g.ny() + 1), PI);
        assert_eq!(g.x(2), PI);
    }

    #[test]
    fn midpoint_on_bottom_wall() {
        let g = StripGrid::new(-1.0, 1.0, 5, 3).unwrap();
        assert_eq!(g.node(2, 0), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(matches!(
            StripGrid::new(0.0, 1.0, 2, 3),
            Err(Error::InvalidBounds(_))
        ));
        assert!(StripGrid::new(1.0, 1.0, 5, 5).is_err());
        assert!(StripGrid::new(0.0, 1.0, 5, 2).is_err());
        assert!(StripGrid::new(f64::NAN, 1.0, 5, 5).is_err());
    }

    #[test]
    fn nodes_follow_y_fastest_order() {
        let g = StripGrid::new(0.0, 1.0, 4, 3).unwrap();
        for (n, (i, j, x, y)) in g.nodes().enumerate() {
            assert_eq!(n, g.index(i, j));
            assert_eq!((x, y), g.node(i, j));
        }
        assert_eq!(g.nodes().count(), g.len());
    }

    #[test]
    fn refinement_halves_spacing() {
        let g = StripGrid::new(-PI, PI, 129, 63).unwrap();
        let r = g.refined();
        assert_eq!((r.nx(), r.ny()), (257, 127));
        assert!((r.hx() - g.hx() / 2.0).abs() < 1e-15);
        assert!((r.hy() - g.hy() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn patch_rejects_puncture_and_lower_half() {
        assert!(HalfPlaneGrid::new((-1.0, 1.0), (0.1, 1.0), 5, 5, 0.2).is_err());
        assert!(HalfPlaneGrid::new((-1.0, 1.0), (0.0, 1.0), 5, 5, 0.05).is_err());
        let p: HalfPlaneGrid<f64> =
            HalfPlaneGrid::new((-1.0, 1.0), (0.5, 1.5), 5, 5, 0.25).unwrap();
        assert!(p.nodes().all(|(_, _, x, y)| y > 0.0 && x.hypot(y) > 0.25));
    }
}
