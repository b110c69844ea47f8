//! Interior stencils generated from moment conditions.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// First-derivative weights on the integer nodes `first..=last` with the
/// maximal attainable order, found from the Vandermonde moment system
/// `Σ c_k k^i = δ_{i1}`.
pub fn derivative_weights(first: isize, last: isize) -> Result<Vec<f64>> {
    let n = (last - first + 1) as usize;
    if last <= first {
        return Err(Error::InvalidArgument(format!(
            "empty stencil support {first}..={last}"
        )));
    }
    let v = DMatrix::from_fn(n, n, |i, j| ((first + j as isize) as f64).powi(i as i32));
    let mut rhs = DVector::zeros(n);
    rhs[1] = 1.0;
    let c = v
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidData("singular moment system".into()))?;
    Ok(c.iter().copied().collect())
}

/// Upwind-biased D₊ interior stencil of order `q` as (coefficients, offset).
///
/// The support `[-a, b]` leans one (odd q) or two (even q) points forward;
/// the resulting stencil is the central one of order `q` (or `q+1`) plus a
/// negative multiple of the highest undivided difference, so `S₊ ⪯ 0`.
pub fn upwind_stencil(q: usize) -> Result<(Vec<f64>, isize)> {
    if q == 0 || q > 8 {
        return Err(Error::UnsupportedOrder {
            family: "DP".into(),
            order: q,
            layout: "periodic",
        });
    }
    let q = q as isize;
    let (a, b) = if q % 2 == 0 {
        (q / 2 - 1, q / 2 + 1)
    } else {
        ((q - 1) / 2, (q + 1) / 2)
    };
    Ok((derivative_weights(-a, b)?, -a))
}

/// Central stencil of even order `q` as (coefficients, offset).
pub fn central_stencil(q: usize) -> Result<(Vec<f64>, isize)> {
    if q == 0 || q % 2 == 1 || q > 8 {
        return Err(Error::UnsupportedOrder {
            family: "Traditional".into(),
            order: q,
            layout: "periodic",
        });
    }
    let m = (q / 2) as isize;
    let mut c = derivative_weights(-m, m)?;
    // exact zero in the middle, exact antisymmetry
    c[m as usize] = 0.0;
    for k in 0..m as usize {
        let s = 0.5 * (c[2 * m as usize - k] - c[k]);
        c[k] = -s;
        c[2 * m as usize - k] = s;
    }
    Ok((c, -m))
}

/// D₋ stencil from D₊: `D₋ = -D₊ᵀ` on a periodic grid.
pub fn mirror(stencil: &[f64], offset: isize) -> (Vec<f64>, isize) {
    let w = stencil.len() as isize;
    let c = stencil.iter().rev().map(|v| -v).collect();
    (c, -offset - (w - 1))
}
