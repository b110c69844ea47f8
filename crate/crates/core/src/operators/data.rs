//! Embedded coefficient files.
//!
//! Schema (JSON, unknown keys rejected):
//!
//! ```text
//! family          "Traditional" | "DP" | "DRP"
//! order           interior order q
//! boundary_order  accuracy of the closure rows (q for periodic files)
//! periodic        bool
//! note            free text
//! interior        { offset, coefficients }   D₊ row i = Σ c_k f[i + offset + k], dx = 1
//! quadrature      left norm weights p_0 .. p_{nb-1}             (bounded only)
//! boundary_plus   left rows of D₊, row i starts at column 0   (bounded only)
//! boundary_minus  left rows of D₋; absent when D₋ = D₊         (bounded only)
//! ```
//!
//! Right closures are not stored: they follow from the reflection
//! `D₊[N-i, N-j] = -D₋[i, j]`.

use serde::Deserialize;

use super::Family;
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interior {
    pub offset: isize,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub family: Family,
    pub order: usize,
    pub boundary_order: usize,
    pub periodic: bool,
    #[serde(default)]
    pub note: String,
    pub interior: Interior,
    #[serde(default)]
    pub quadrature: Option<Vec<f64>>,
    #[serde(default)]
    pub boundary_plus: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub boundary_minus: Option<Vec<Vec<f64>>>,
}

impl CoefficientFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidData(e.to_string()))?;
        file.check_shape()?;
        Ok(file)
    }

    fn check_shape(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidData(m.to_string()));
        if self.interior.coefficients.is_empty() {
            return bad("empty interior stencil");
        }
        if self.periodic {
            if self.quadrature.is_some()
                || self.boundary_plus.is_some()
                || self.boundary_minus.is_some()
            {
                return bad("periodic file carries boundary data");
            }
            return Ok(());
        }
        let (Some(p), Some(bp)) = (&self.quadrature, &self.boundary_plus) else {
            return bad("bounded file without quadrature or boundary_plus");
        };
        if bp.len() != p.len() {
            return bad("boundary_plus row count differs from quadrature length");
        }
        if let Some(bm) = &self.boundary_minus {
            if bm.len() != p.len() {
                return bad("boundary_minus row count differs from quadrature length");
            }
        } else if self.family != Family::Traditional {
            return bad("upwind family needs boundary_minus");
        }
        let limit = 2 * self.order.max(4);
        if bp
            .iter()
            .chain(self.boundary_minus.iter().flatten())
            .any(|r| r.is_empty() || r.len() > limit)
        {
            return bad("boundary row width outside 1..=2q");
        }
        if p.iter().any(|&w| !(w > 0.0)) {
            return bad("non-positive quadrature weight");
        }
        Ok(())
    }
}

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../data/", $name, ".json")))),*]
    };
}

pub(crate) static FILES: &[(&str, &str)] = embedded!(
    "sbp4",
    "sbp4_periodic",
    "sbp6",
    "sbp6_periodic",
    "dp4",
    "dp4_periodic",
    "dp5",
    "dp5_periodic",
    "dp6",
    "dp6_periodic",
    "drp4",
    "drp4_periodic",
    "drp5",
    "drp5_periodic",
    "drp6",
    "drp6_periodic",
);

pub(crate) fn file_name(family: Family, order: usize, periodic: bool) -> String {
    let stem = match family {
        Family::Traditional => "sbp",
        Family::DP => "dp",
        Family::DRP => "drp",
    };
    if periodic {
        format!("{stem}{order}_periodic")
    } else {
        format!("{stem}{order}")
    }
}

pub(crate) fn raw(family: Family, order: usize, periodic: bool) -> Option<&'static str> {
    let name = file_name(family, order, periodic);
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
