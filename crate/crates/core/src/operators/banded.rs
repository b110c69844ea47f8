use crate::{Error, Result};

/// A matrix-free difference operator: a Toeplitz interior stencil plus dense
/// row blocks at either end (bounded) or circulant wrap-around (periodic).
///
/// Row `i` of the interior evaluates `Σ_k stencil[k] · f[i + offset + k]`.
/// Left block row `i` covers columns `0..left[i].len()`; right block row
/// `n - 1 - i` covers the last `right[i].len()` columns in natural order.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    n: usize,
    periodic: bool,
    stencil: Vec<f64>,
    offset: isize,
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
}

impl BandedOperator {
    pub fn periodic(n: usize, stencil: Vec<f64>, offset: isize) -> Self {
        Self {
            n,
            periodic: true,
            stencil,
            offset,
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    /// Bounded operator; `right[i]` holds row `n-1-i`, its last entry on column `n-1`.
    pub fn bounded(
        n: usize,
        stencil: Vec<f64>,
        offset: isize,
        left: Vec<Vec<f64>>,
        right: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let width = stencil.len() as isize;
        let first_interior = left.len() as isize;
        let last_interior = n as isize - right.len() as isize - 1;
        let required = left.len() + right.len() + 1;
        let widest = left.iter().chain(&right).map(Vec::len).max().unwrap_or(0);
        if n < required.max(widest) {
            return Err(Error::GridTooSmall {
                n_points: n,
                required: required.max(widest),
            });
        }
        if first_interior + offset < 0 || last_interior + offset + width > n as isize {
            return Err(Error::InvalidData(
                "interior stencil reaches outside the boundary blocks".into(),
            ));
        }
        Ok(Self {
            n,
            periodic: false,
            stencil,
            offset,
            left,
            right,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn stencil(&self) -> (&[f64], isize) {
        (&self.stencil, self.offset)
    }

    pub fn left_block(&self) -> &[Vec<f64>] {
        &self.left
    }

    pub fn right_block(&self) -> &[Vec<f64>] {
        &self.right
    }

    /// Writes `D f` into `out`. Each output entry is an independent dot product.
    pub fn apply_into(&self, f: &[f64], out: &mut [f64]) {
        let n = self.n;
        assert_eq!(f.len(), n, "operand length");
        assert_eq!(out.len(), n, "output length");
        if self.periodic {
            let w = self.stencil.len();
            let start = self.offset.rem_euclid(n as isize) as usize;
            // rows whose stencil does not wrap
            let lo = (-self.offset).max(0) as usize;
            let hi = (n as isize - self.offset - w as isize + 1).clamp(0, n as isize) as usize;
            for i in lo.min(hi)..hi {
                let j0 = (i as isize + self.offset) as usize;
                out[i] = dot(&self.stencil, &f[j0..j0 + w]);
            }
            for (i, o) in out.iter_mut().enumerate() {
                if i >= lo && i < hi {
                    continue;
                }
                let mut acc = 0.0;
                let mut j = (i + start) % n;
                for k in 0..w {
                    acc += self.stencil[k] * f[j];
                    j += 1;
                    if j == n {
                        j = 0;
                    }
                }
                *o = acc;
            }
            return;
        }
        let nl = self.left.len();
        let nr = self.right.len();
        for (i, row) in self.left.iter().enumerate() {
            out[i] = dot(row, &f[..row.len()]);
        }
        let w = self.stencil.len();
        for i in nl..n - nr {
            let j0 = (i as isize + self.offset) as usize;
            out[i] = dot(&self.stencil, &f[j0..j0 + w]);
        }
        for (k, row) in self.right.iter().enumerate() {
            out[n - 1 - k] = dot(row, &f[n - row.len()..]);
        }
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        self.apply_into(f, &mut out);
        Ok(out)
    }

    /// Row `i` as (first column, coefficients); periodic rows may wrap.
    pub fn row(&self, i: usize) -> Vec<(usize, f64)> {
        let n = self.n;
        if self.periodic {
            let start = (i as isize + self.offset).rem_euclid(n as isize) as usize;
            return (0..self.stencil.len())
                .map(|k| ((start + k) % n, self.stencil[k]))
                .collect();
        }
        if i < self.left.len() {
            return self.left[i].iter().copied().enumerate().collect();
        }
        if i >= n - self.right.len() {
            let row = &self.right[n - 1 - i];
            let c0 = n - row.len();
            return row.iter().enumerate().map(|(k, &v)| (c0 + k, v)).collect();
        }
        let j0 = (i as isize + self.offset) as usize;
        self.stencil
            .iter()
            .enumerate()
            .map(|(k, &v)| (j0 + k, v))
            .collect()
    }

    /// Dense row-major copy, for verification on small grids.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (i, mi) in m.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                mi[j] += v;
            }
        }
        m
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
