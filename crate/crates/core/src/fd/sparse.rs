use crate::scalar::Real;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Square matrix of order `n`; duplicate entries are summed.
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, T)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(r < n && c < n, "entry ({r}, {c}) outside order {n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map_or(T::zero(), |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    /// `(lower, upper)` half-bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut up = 0;
        for r in 0..self.n {
            for (c, _) in self.row(r) {
                if c < r {
                    lo = lo.max(r - c);
                } else {
                    up = up.max(c - r);
                }
            }
        }
        (lo, up)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, v)| (v - self.get(c, r)).abs() <= tol))
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Z-matrix with weak row diagonal dominance, after flipping the sign so
    /// the diagonal is positive. Together with irreducibility and one strictly
    /// dominant row this makes `-A` a nonsingular M-matrix.
    pub fn is_negated_m_matrix(&self) -> bool {
        let mut strict = false;
        for r in 0..self.n {
            let mut diag = T::zero();
            let mut off = T::zero();
            for (c, v) in self.row(r) {
                if c == r {
                    diag = -v;
                } else if v < T::zero() {
                    return false;
                } else {
                    off += v;
                }
            }
            if diag < off {
                return false;
            }
            strict |= diag > off;
        }
        strict
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m =
            CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0), (0, 1, -1.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.bandwidths(), (1, 1));
        assert_eq!(m.mul_vec(&[1.0, 2.0]), vec![2.0, 2.0]);
    }
}
