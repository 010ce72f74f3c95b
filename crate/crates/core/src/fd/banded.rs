//! LU factorization without pivoting for banded matrices.
//!
//! Adequate for the diagonally dominant systems assembled here; fill-in stays
//! inside the band so storage is `n * (lower + upper + 1)`.

use crate::error::{Error, Result};
use crate::fd::sparse::CsrMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    n: usize,
    lower: usize,
    upper: usize,
    // Row i holds columns i - lower ..= i + upper.
    band: Vec<T>,
}

impl<T: Real> BandedLu<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.order();
        let (lower, upper) = a.bandwidths();
        let w = lower + upper + 1;
        let mut band = vec![T::zero(); n * w];
        for r in 0..n {
            for (c, v) in a.row(r) {
                band[r * w + c + lower - r] = v;
            }
        }
        let scale = a.max_abs();
        let tiny = scale * T::epsilon() * T::from_usize_lossy(n.max(1));
        for k in 0..n {
            let piv = band[k * w + lower];
            if !piv.is_finite() || piv.abs() <= tiny {
                return Err(Error::SingularSystem { row: k });
            }
            let last_col = (k + upper).min(n - 1);
            let span = last_col - k;
            let (head, tail) = band.split_at_mut((k + 1) * w);
            let pivot_row = &head[k * w + lower + 1..k * w + lower + 1 + span];
            for i in k + 1..=(k + lower).min(n - 1) {
                let row = &mut tail[(i - k - 1) * w..(i - k) * w];
                let at = k + lower - i;
                let l = row[at] / piv;
                row[at] = l;
                if l == T::zero() {
                    continue;
                }
                for (dst, &src) in row[at + 1..at + 1 + span].iter_mut().zip(pivot_row) {
                    *dst -= l * src;
                }
            }
        }
        Ok(Self {
            n,
            lower,
            upper,
            band,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let w = self.lower + self.upper + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let first = i.saturating_sub(self.lower);
            let row = &self.band[i * w..(i + 1) * w];
            let mut acc = x[i];
            for c in first..i {
                acc -= row[c + self.lower - i] * x[c];
            }
            x[i] = acc;
        }
        for i in (0..self.n).rev() {
            let last = (i + self.upper).min(self.n - 1);
            let row = &self.band[i * w..(i + 1) * w];
            let mut acc = x[i];
            for c in i + 1..=last {
                acc -= row[c + self.lower - i] * x[c];
            }
            x[i] = acc / row[self.lower];
        }
        x
    }
}
