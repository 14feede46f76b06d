//! Banded LU with partial pivoting for the Newton systems.

use alloc::vec;
use alloc::vec::Vec;

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Each row keeps a window of `2 kl + ku + 1` columns starting at
/// `row - kl`, leaving room for the fill-in that row pivoting produces.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

/// Factorization produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    pivots: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(col + self.kl >= row && col <= row + self.kl + self.ku);
        row * self.width + (col + self.kl - row)
    }

    /// Entry inside the declared band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if col + self.kl < row || col > row + self.ku {
            return 0.0;
        }
        self.data[self.slot(row, col)]
    }

    /// Adds `value` at `(row, col)`; panics outside the band.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        assert!(
            col + self.kl >= row && col <= row + self.ku,
            "entry ({row}, {col}) outside band"
        );
        let s = self.slot(row, col);
        self.data[s] += value;
    }

    pub fn clear(&mut self) {
        self.data.iter_mut().for_each(|x| *x = 0.0);
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.kl);
                let hi = (r + self.ku).min(self.n - 1);
                (lo..=hi).map(|c| self.get(r, c) * x[c]).sum()
            })
            .collect()
    }

    /// LU factorization with row interchanges, in place.
    pub fn factor(mut self) -> Result<BandLu, SingularMatrix> {
        let n = self.n;
        let mut pivots = vec![0; n];
        // row norms for a scale-aware singularity test
        let scale = (0..n)
            .map(|r| self.data[r * self.width..(r + 1) * self.width].iter().map(|x| x.abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let tiny = scale * f64::EPSILON * 1e-2;

        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.slot(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            pivots[k] = p;
            if !(best > tiny) {
                return Err(SingularMatrix { column: k });
            }
            let last_col = (k + self.kl + self.ku).min(n - 1);
            if p != k {
                for c in k..=last_col {
                    let a = self.slot(k, c);
                    let b = self.slot(p, c);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for r in k + 1..=last_row {
                let s = self.slot(r, k);
                let factor = self.data[s] / pivot;
                self.data[s] = factor;
                if factor != 0.0 {
                    for c in k + 1..=last_col {
                        let dst = self.slot(r, c);
                        let src = self.slot(k, c);
                        self.data[dst] -= factor * self.data[src];
                    }
                }
            }
        }
        Ok(BandLu { m: self, pivots })
    }
}

impl BandLu {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let last_row = (k + m.kl).min(n - 1);
            let bk = b[k];
            for r in k + 1..=last_row {
                b[r] -= m.data[m.slot(r, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + m.kl + m.ku).min(n - 1);
            let mut s = b[k];
            for c in k + 1..=last_col {
                s -= m.data[m.slot(k, c)] * b[c];
            }
            b[k] = s / m.data[m.slot(k, k)];
        }
    }
}
