//! Evolution matrices of the 1D scheme and a dense nonsymmetric
//! eigenvalue solver (balancing, Householder Hessenberg reduction,
//! Francis double-shift QR).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense problems above this dimension are refused.
pub const MAX_DIMENSION: usize = 4000;

fn guard(n: usize) -> Result<()> {
    if n > MAX_DIMENSION {
        Err(Error::DimensionTooLarge(n))
    } else {
        Ok(())
    }
}

/// Columns `A e_j` of a linear map given as a flat right-hand side.
pub fn assemble_linear_matrix<F>(n: usize, mut rhs: F) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    guard(n)?;
    let mut a = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = rhs(&e)?;
        if col.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: col.len(),
            });
        }
        a.set_column(j, &nalgebra::DVector::from_vec(col));
        e[j] = 0.0;
    }
    Ok(a)
}

/// Centred-difference Jacobian `(RHS(q + εeⱼ) − RHS(q − εeⱼ))/(2ε)`.
pub fn fd_jacobian<F>(mut rhs: F, base: &[f64], eps: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = base.len();
    guard(n)?;
    let mut a = DMatrix::zeros(n, n);
    let mut q = base.to_vec();
    for j in 0..n {
        q[j] = base[j] + eps;
        let fp = rhs(&q)?;
        q[j] = base[j] - eps;
        let fm = rhs(&q)?;
        q[j] = base[j];
        if fp.len() != n || fm.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: fp.len(),
            });
        }
        for i in 0..n {
            a[(i, j)] = (fp[i] - fm[i]) / (2.0 * eps);
        }
    }
    Ok(a)
}

/// Full spectrum as `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub n: usize,
    pub eigenvalues: Vec<(f64, f64)>,
    pub max_real: f64,
    /// Infinity norm of the matrix, the scale for stability tolerances.
    pub norm: f64,
}

impl EigenReport {
    pub fn max_abs_real(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.0.abs()))
    }

    pub fn min_real(&self) -> f64 {
        self.eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(e.0))
    }
}

pub fn inf_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a general real matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<EigenReport> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            got: (n, a.ncols()),
        });
    }
    guard(n)?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let norm = inf_norm(a);
    // row-major working copy
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = a[(i, j)];
        }
    }
    balance(&mut m, n);
    hessenberg(&mut m, n);
    let eigenvalues = hqr(&mut m, n)?;
    let max_real = eigenvalues.iter().fold(f64::NEG_INFINITY, |x, e| x.max(e.0));
    Ok(EigenReport {
        n,
        eigenvalues,
        max_real,
        norm,
    })
}

/// Diagonal similarity by powers of two so rows and columns have
/// comparable norms.
fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let gi = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= gi;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (eigenvalues only, so the
/// reflectors are not accumulated).
fn hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n - 2 {
        let scale: f64 = (k + 1..n).map(|i| a[i * n + k].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm2 = 0.0;
        for i in k + 1..n {
            v[i] = a[i * n + k] / scale;
            norm2 += v[i] * v[i];
        }
        let alpha = -v[k + 1].signum() * norm2.sqrt();
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A ← (I − βvvᵀ) A on rows k+1.., columns k..
        for x in w[k..n].iter_mut() {
            *x = 0.0;
        }
        for i in k + 1..n {
            let vi = v[i];
            let row = &a[i * n..(i + 1) * n];
            for j in k..n {
                w[j] += vi * row[j];
            }
        }
        for i in k + 1..n {
            let f = beta * v[i];
            let row = &mut a[i * n..(i + 1) * n];
            for j in k..n {
                row[j] -= f * w[j];
            }
        }
        // A ← A (I − βvvᵀ) on all rows, columns k+1..
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let mut s = 0.0;
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            let f = beta * s;
            for j in k + 1..n {
                row[j] -= f * v[j];
            }
        }
        a[(k + 1) * n + k] = alpha * scale;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; returns all
/// eigenvalues. Indices follow the classical 1-based formulation.
fn hqr(a: &mut [f64], n: usize) -> Result<Vec<(f64, f64)>> {
    let idx = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[idx(i, j)].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut x, mut y, mut z, mut w);
    let (mut p, mut q, mut r, mut s);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = 1;
            for ll in (2..=nn).rev() {
                s = a[idx(ll - 1, ll - 1)].abs() + a[idx(ll, ll)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[idx(ll, ll - 1)].abs() + s == s {
                    a[idx(ll, ll - 1)] = 0.0;
                    l = ll;
                    break;
                }
            }
            x = a[idx(nn, nn)];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = a[idx(nn - 1, nn - 1)];
            w = a[idx(nn, nn - 1)] * a[idx(nn - 1, nn)];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == 60 {
                return Err(Error::NoConvergence);
            }
            if its % 10 == 0 && its > 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    a[idx(i, i)] -= x;
                }
                s = a[idx(nn, nn - 1)].abs() + a[idx(nn - 1, nn - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                z = a[idx(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                q = a[idx(m + 1, m + 1)] - z - r - s;
                r = a[idx(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[idx(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[idx(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[idx(k, k - 1)];
                    q = a[idx(k + 1, k - 1)];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[idx(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                        }
                    } else {
                        a[idx(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[idx(k, j)] + q * a[idx(k + 1, j)];
                        if k != nn - 1 {
                            p += r * a[idx(k + 2, j)];
                            a[idx(k + 2, j)] -= p * z;
                        }
                        a[idx(k + 1, j)] -= p * y;
                        a[idx(k, j)] -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                        if k != nn - 1 {
                            p += z * a[idx(i, k + 2)];
                            a[idx(i, k + 2)] -= p * r;
                        }
                        a[idx(i, k + 1)] -= p * q;
                        a[idx(i, k)] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| (wr[i], wi[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
        v
    }

    #[test]
    fn rotation_has_unit_imaginary_pair() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let e = sorted(eigenvalues(&a).unwrap().eigenvalues);
        assert!((e[0].1 + 1.0).abs() < 1e-15 && (e[1].1 - 1.0).abs() < 1e-15);
        assert!(e.iter().all(|v| v.0.abs() < 1e-15));
    }

    #[test]
    fn block_diagonal() {
        #[rustfmt::skip]
        let a = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, -2.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 3.0,
            0.0, 0.0, -3.0, 0.0,
        ]);
        let e = sorted(eigenvalues(&a).unwrap().eigenvalues);
        let expect = [(-2.0, 0.0), (0.0, -3.0), (0.0, 3.0), (1.0, 0.0)];
        for (a, b) in e.iter().zip(expect) {
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        }
    }

    #[test]
    fn size_guard() {
        let r = assemble_linear_matrix(MAX_DIMENSION + 1, |q| Ok(q.to_vec()));
        assert_eq!(r.unwrap_err(), Error::DimensionTooLarge(MAX_DIMENSION + 1));
    }
}
