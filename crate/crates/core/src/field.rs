//! Sampled scalar and vector fields, plus their CSV serialization.
//!
//! Every CSV writer emits values with 17 significant digits so that a
//! written file reads back bit-for-bit.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{HalfPlaneGrid, StripGrid};
use crate::scalar::Real;

/// Values of `u` at every node of a [`StripGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    grid: StripGrid<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn from_values(grid: StripGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        for (i, j, x, y) in grid.nodes() {
            let v = values[grid.index(i, j)];
            if !v.is_finite() {
                return Err(non_finite(i, j, x, y, v));
            }
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: StripGrid<T>) -> Self {
        Self {
            grid,
            values: vec![T::zero(); grid.len()],
        }
    }

    /// Evaluates `f` at every node.
    pub fn sample<F>(grid: StripGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(T, T) -> T,
    {
        let mut values = Vec::with_capacity(grid.len());
        for (i, j, x, y) in grid.nodes() {
            let v = f(x, y);
            if !v.is_finite() {
                return Err(non_finite(i, j, x, y, v));
            }
            values.push(v);
        }
        Ok(Self { grid, values })
    }

    /// Builds a field from node indices.
    pub fn sample_indexed<F>(grid: StripGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> T,
    {
        let values = grid.nodes().map(|(i, j, _, _)| f(i, j)).collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &StripGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    /// Max-norm distance to another field on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    /// Bilinear interpolation at `(x, y)` inside the grid window.
    pub fn interpolate(&self, x: T, y: T) -> Result<T> {
        let g = &self.grid;
        if !g.contains_x(x) || y < T::zero() || y > T::PI() {
            return Err(Error::OutOfRange {
                x: x.to_f64_lossless(),
                y: y.to_f64_lossless(),
            });
        }
        let (i, tx) = cell(x - g.x_min(), g.hx(), g.nx() - 1);
        let (j, ty) = cell(y, g.hy(), g.rows() - 1);
        let one = T::one();
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        Ok((one - tx) * (one - ty) * v00
            + tx * (one - ty) * v10
            + (one - tx) * ty * v01
            + tx * ty * v11)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "value"])?;
        for (i, j, x, y) in self.grid.nodes() {
            out.write_record([fmt17(x), fmt17(y), fmt17(self.at(i, j))])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a field written by [`ScalarField::write_csv`] back onto `grid`.
    pub fn read_csv<R: Read>(grid: StripGrid<T>, r: R) -> Result<Self> {
        let rows = read_rows(r, &["x", "y", "value"])?;
        let values = rows.into_iter().map(|row| row[2]).collect();
        Self::from_values(grid, values)
    }
}

/// Two components per node, e.g. `(Bx, By)` or a gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    grid: StripGrid<T>,
    vx: Vec<T>,
    vy: Vec<T>,
}

impl<T: Real> VectorField<T> {
    pub fn sample<F>(grid: StripGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(T, T) -> (T, T),
    {
        let mut vx = Vec::with_capacity(grid.len());
        let mut vy = Vec::with_capacity(grid.len());
        for (i, j, x, y) in grid.nodes() {
            let (a, b) = f(x, y);
            for v in [a, b] {
                if !v.is_finite() {
                    return Err(non_finite(i, j, x, y, v));
                }
            }
            vx.push(a);
            vy.push(b);
        }
        Ok(Self { grid, vx, vy })
    }

    pub fn grid(&self) -> &StripGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> (T, T) {
        let n = self.grid.index(i, j);
        (self.vx[n], self.vy[n])
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "vx", "vy"])?;
        for (i, j, x, y) in self.grid.nodes() {
            let (a, b) = self.at(i, j);
            out.write_record([fmt17(x), fmt17(y), fmt17(a), fmt17(b)])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(grid: StripGrid<T>, r: R) -> Result<Self> {
        let rows = read_rows(r, &["x", "y", "vx", "vy"])?;
        if rows.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: rows.len(),
            });
        }
        let vx = rows.iter().map(|r| r[2]).collect();
        let vy = rows.iter().map(|r| r[3]).collect();
        Ok(Self { grid, vx, vy })
    }
}

/// Values on a uniform half-plane patch.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchField<T> {
    patch: HalfPlaneGrid<T>,
    values: Vec<T>,
}

impl<T: Real> PatchField<T> {
    pub fn from_values(patch: HalfPlaneGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != patch.len() {
            return Err(Error::ShapeMismatch {
                expected: patch.len(),
                got: values.len(),
            });
        }
        Ok(Self { patch, values })
    }

    pub fn sample<F>(patch: HalfPlaneGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(T, T) -> T,
    {
        let mut values = Vec::with_capacity(patch.len());
        for (i, j, x, y) in patch.nodes() {
            let v = f(x, y);
            if !v.is_finite() {
                return Err(non_finite(i, j, x, y, v));
            }
            values.push(v);
        }
        Ok(Self { patch, values })
    }

    pub fn patch(&self) -> &HalfPlaneGrid<T> {
        &self.patch
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.patch.index(i, j)]
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "value"])?;
        for (i, j, x, y) in self.patch.nodes() {
            out.write_record([fmt17(x), fmt17(y), fmt17(self.at(i, j))])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Formats with 17 significant digits.
pub fn fmt17<T: Real>(v: T) -> String {
    format!("{:.16e}", v.to_f64_lossless())
}

pub(crate) fn read_rows<T: Real, R: Read>(r: R, header: &[&str]) -> Result<Vec<Vec<T>>> {
    let mut rdr = csv::Reader::from_reader(r);
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if got != header {
        return Err(Error::Parse(format!(
            "expected header {header:?}, found {got:?}"
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut row = Vec::with_capacity(header.len());
        for s in rec.iter() {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            row.push(T::lit(v));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn non_finite<T: Real>(i: usize, j: usize, x: T, y: T, v: T) -> Error {
    Error::NonFinite {
        i,
        j,
        x: x.to_f64_lossless(),
        y: y.to_f64_lossless(),
        value: v.to_f64().unwrap_or(f64::NAN),
    }
}

/// Cell index and local coordinate in `[0, 1]` for offset `s` on spacing `h`.
fn cell<T: Real>(s: T, h: T, cells: usize) -> (usize, T) {
    let t = s / h;
    let k = t.floor().to_usize().unwrap_or(0).min(cells - 1);
    (k, t - T::from_usize_lossy(k))
}
