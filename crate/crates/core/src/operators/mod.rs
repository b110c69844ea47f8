//! First-derivative SBP operator pairs on uniform grids.
//!
//! A pair `(P, D₋, D₊)` satisfies `gᵀP D₊f + fᵀP D₋g = f_N g_N − f_0 g_0`.
//! Three families are provided: traditional central SBP (`D₊ = D₋`), upwind
//! dual-pairing (DP) and the dispersion-tuned DRP variant of DP.

mod banded;
mod data;
pub mod stencil;
mod verify;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use banded::BandedOperator;
pub use data::CoefficientFile;
pub use verify::{verify_pair, VerificationReport};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Traditional,
    DP,
    DRP,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Traditional => "sbp",
            Family::DP => "dp",
            Family::DRP => "drp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

/// Uniform grid on `[0, L]`.
///
/// Bounded grids hold `N + 1` nodes `x_j = jΔx`, `Δx = L/N`, both endpoints
/// included. Periodic grids hold `N` nodes with `Δx = L/N`; the node at `L`
/// is the image of `x_0` and is not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub n_points: usize,
    pub dx: f64,
    pub length: f64,
    pub periodic: bool,
    pub coords: Vec<f64>,
}

impl Grid1D {
    /// Bounded grid with `n_cells` intervals.
    pub fn bounded(n_cells: usize, length: f64) -> Result<Self> {
        if n_cells < 1 || !(length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid needs n >= 1 and L > 0, got n = {n_cells}, L = {length}"
            )));
        }
        let dx = length / n_cells as f64;
        let mut coords: Vec<f64> = (0..=n_cells).map(|j| j as f64 * dx).collect();
        coords[n_cells] = length;
        Ok(Self {
            n_points: n_cells + 1,
            dx,
            length,
            periodic: false,
            coords,
        })
    }

    /// Periodic grid with `n` distinct nodes.
    pub fn periodic(n: usize, length: f64) -> Result<Self> {
        if n < 2 || !(length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "periodic grid needs n >= 2 and L > 0, got n = {n}, L = {length}"
            )));
        }
        let dx = length / n as f64;
        Ok(Self {
            n_points: n,
            dx,
            length,
            periodic: true,
            coords: (0..n).map(|j| j as f64 * dx).collect(),
        })
    }

    /// Number of cells `N` (equal to the node count when periodic).
    pub fn n_cells(&self) -> usize {
        if self.periodic {
            self.n_points
        } else {
            self.n_points - 1
        }
    }
}

/// Upwind (or central) first-derivative pair with its diagonal norm.
///
/// Bands are stored scaled by `1/Δx`; weights by `Δx`.
#[derive(Debug, Clone)]
pub struct SbpOperatorPair {
    family: Family,
    interior_order: usize,
    boundary_order: usize,
    periodic: bool,
    dx: f64,
    d_plus: BandedOperator,
    d_minus: BandedOperator,
    p: Vec<f64>,
    boundary_width: usize,
}

impl SbpOperatorPair {
    pub fn family(&self) -> Family {
        self.family
    }
    pub fn interior_order(&self) -> usize {
        self.interior_order
    }
    pub fn boundary_order(&self) -> usize {
        self.boundary_order
    }
    pub fn is_periodic(&self) -> bool {
        self.periodic
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn len(&self) -> usize {
        self.p.len()
    }
    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
    pub fn boundary_width(&self) -> usize {
        self.boundary_width
    }
    pub fn d_plus(&self) -> &BandedOperator {
        &self.d_plus
    }
    pub fn d_minus(&self) -> &BandedOperator {
        &self.d_minus
    }
    pub fn p_weights(&self) -> &[f64] {
        &self.p
    }

    pub fn operator(&self, dir: Direction) -> &BandedOperator {
        match dir {
            Direction::Plus => &self.d_plus,
            Direction::Minus => &self.d_minus,
        }
    }

    /// `D± f` without allocation.
    pub fn apply_into(&self, dir: Direction, f: &[f64], out: &mut [f64]) {
        self.operator(dir).apply_into(f, out)
    }

    /// Short label such as `dp6`.
    pub fn label(&self) -> String {
        format!("{}{}", self.family.name(), self.interior_order)
    }
}

/// Builds the pair for `(family, order)` on `grid`.
///
/// Bounded closures come from the embedded coefficient files, each verified
/// once per process; periodic DP and traditional stencils are generated from
/// moment conditions, periodic DRP stencils are read from file.
pub fn build_operator_pair(
    family: Family,
    interior_order: usize,
    periodic: bool,
    grid: &Grid1D,
) -> Result<SbpOperatorPair> {
    if periodic != grid.periodic {
        return Err(Error::InvalidArgument(format!(
            "operator periodic = {periodic} on a grid with periodic = {}",
            grid.periodic
        )));
    }
    if periodic {
        build_periodic(family, interior_order, grid)
    } else {
        build_bounded(family, interior_order, grid)
    }
}

/// Convenience: `("dp", 6)` style lookup.
pub fn parse_operator(label: &str) -> Result<(Family, usize)> {
    let l = label.trim().to_ascii_lowercase();
    let split = l
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| Error::InvalidArgument(format!("operator label '{label}'")))?;
    let order: usize = l[split..]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("operator label '{label}'")))?;
    let family = match &l[..split] {
        "sbp" | "traditional" => Family::Traditional,
        "dp" => Family::DP,
        "drp" => Family::DRP,
        _ => return Err(Error::InvalidArgument(format!("operator label '{label}'"))),
    };
    Ok((family, order))
}

fn unsupported(family: Family, order: usize, periodic: bool) -> Error {
    Error::UnsupportedOrder {
        family: format!("{family:?}"),
        order,
        layout: if periodic { "periodic" } else { "bounded" },
    }
}

fn build_periodic(family: Family, order: usize, grid: &Grid1D) -> Result<SbpOperatorPair> {
    let (stencil, offset) = match family {
        Family::DP if (1..=6).contains(&order) => stencil::upwind_stencil(order)?,
        Family::Traditional if matches!(order, 2 | 4 | 6) => stencil::central_stencil(order)?,
        Family::DRP if (4..=6).contains(&order) => {
            let file = load(family, order, true)?;
            (file.interior.coefficients, file.interior.offset)
        }
        _ => return Err(unsupported(family, order, true)),
    };
    let n = grid.n_points;
    if n < stencil.len() {
        return Err(Error::GridTooSmall {
            n_points: n,
            required: stencil.len(),
        });
    }
    let inv = 1.0 / grid.dx;
    let plus: Vec<f64> = stencil.iter().map(|c| c * inv).collect();
    let (minus, moff) = stencil::mirror(&plus, offset);
    Ok(SbpOperatorPair {
        family,
        interior_order: order,
        boundary_order: order,
        periodic: true,
        dx: grid.dx,
        d_plus: BandedOperator::periodic(n, plus, offset),
        d_minus: BandedOperator::periodic(n, minus, moff),
        p: vec![grid.dx; n],
        boundary_width: 0,
    })
}

fn build_bounded(family: Family, order: usize, grid: &Grid1D) -> Result<SbpOperatorPair> {
    let supported = match family {
        Family::Traditional => matches!(order, 4 | 6),
        Family::DP | Family::DRP => (4..=6).contains(&order),
    };
    if !supported {
        return Err(unsupported(family, order, false));
    }
    let file = validated(family, order)?;
    assemble_bounded(&file, grid)
}

/// Turns a bounded coefficient file into operators on `grid` (no validation).
pub fn assemble_bounded(file: &CoefficientFile, grid: &Grid1D) -> Result<SbpOperatorPair> {
    let n = grid.n_points;
    let q = file.quadrature.as_ref().expect("bounded file");
    let bp = file.boundary_plus.as_ref().expect("bounded file");
    let bm = file.boundary_minus.as_ref().unwrap_or(bp);
    let nb = q.len();
    let width = file.interior.coefficients.len();
    let required = (2 * width).max(2 * nb + 1);
    if n < required {
        return Err(Error::GridTooSmall {
            n_points: n,
            required,
        });
    }
    let inv = 1.0 / grid.dx;
    let scale = |rows: &[Vec<f64>], sign: f64, reverse: bool| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                let mut v: Vec<f64> = r.iter().map(|c| sign * c * inv).collect();
                if reverse {
                    v.reverse();
                }
                v
            })
            .collect()
    };
    let plus: Vec<f64> = file.interior.coefficients.iter().map(|c| c * inv).collect();
    let off = file.interior.offset;
    let (minus, moff) = if file.family == Family::Traditional {
        (plus.clone(), off)
    } else {
        stencil::mirror(&plus, off)
    };
    // D₊ right rows mirror the D₋ left rows and vice versa
    let d_plus = BandedOperator::bounded(n, plus, off, scale(bp, 1.0, false), scale(bm, -1.0, true))?;
    let d_minus =
        BandedOperator::bounded(n, minus, moff, scale(bm, 1.0, false), scale(bp, -1.0, true))?;
    let mut p = vec![grid.dx; n];
    for (i, w) in q.iter().enumerate() {
        p[i] = w * grid.dx;
        p[n - 1 - i] = w * grid.dx;
    }
    Ok(SbpOperatorPair {
        family: file.family,
        interior_order: file.order,
        boundary_order: file.boundary_order,
        periodic: false,
        dx: grid.dx,
        d_plus,
        d_minus,
        p,
        boundary_width: nb,
    })
}

/// Parses an embedded coefficient file.
pub fn load(family: Family, order: usize, periodic: bool) -> Result<CoefficientFile> {
    let text = data::raw(family, order, periodic).ok_or_else(|| unsupported(family, order, periodic))?;
    let file = CoefficientFile::parse(text)?;
    if file.family != family || file.order != order || file.periodic != periodic {
        return Err(Error::InvalidData(format!(
            "{} declares {:?}{} periodic={}",
            data::file_name(family, order, periodic),
            file.family,
            file.order,
            file.periodic
        )));
    }
    Ok(file)
}

/// Loads a bounded file and runs the full invariant suite on a small grid,
/// caching the verdict for the process lifetime.
fn validated(family: Family, order: usize) -> Result<CoefficientFile> {
    static CACHE: OnceLock<Mutex<HashMap<(Family, usize), std::result::Result<(), String>>>> =
        OnceLock::new();
    let file = load(family, order, false)?;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let verdict = guard.entry((family, order)).or_insert_with(|| {
        let n_cells = 4 * file.quadrature.as_ref().map_or(0, Vec::len) + 2 * file.interior.coefficients.len();
        let grid = Grid1D::bounded(n_cells, 1.0).map_err(|e| e.to_string())?;
        let pair = assemble_bounded(&file, &grid).map_err(|e| e.to_string())?;
        let report = verify_pair(&pair);
        if report.all_pass {
            Ok(())
        } else {
            Err(format!("{}: {}", pair.label(), report.summary()))
        }
    });
    match verdict {
        Ok(()) => Ok(file),
        Err(m) => Err(Error::InvalidData(m.clone())),
    }
}

/// `D± f`.
pub fn apply(pair: &SbpOperatorPair, direction: Direction, f: &[f64]) -> Result<Vec<f64>> {
    pair.operator(direction).apply(f)
}

/// Quadrature `Σ p_j f_j`.
pub fn integrate(pair: &SbpOperatorPair, f: &[f64]) -> Result<f64> {
    if f.len() != pair.len() {
        return Err(Error::LengthMismatch {
            expected: pair.len(),
            got: f.len(),
        });
    }
    Ok(pair.p.iter().zip(f).map(|(p, v)| p * v).sum())
}

/// Every (family, order, periodic) combination shipped as data.
pub fn shipped() -> Vec<(Family, usize, bool)> {
    let mut v = Vec::new();
    for periodic in [false, true] {
        v.push((Family::Traditional, 4, periodic));
        v.push((Family::Traditional, 6, periodic));
        for q in 4..=6 {
            v.push((Family::DP, q, periodic));
            v.push((Family::DRP, q, periodic));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_periodic_pair() {
        let grid = Grid1D::periodic(3, 3.0).unwrap();
        let pair = build_operator_pair(Family::DP, 1, true, &grid).unwrap();
        let dense = pair.d_plus().to_dense();
        assert_eq!(dense[0], vec![-1.0, 1.0, 0.0]);
        assert_eq!(dense[2], vec![1.0, 0.0, -1.0]);
        let dm = pair.d_minus().to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(dm[i][j], -dense[j][i]);
            }
        }
    }

    #[test]
    fn label_parsing() {
        assert_eq!(parse_operator("dp6").unwrap(), (Family::DP, 6));
        assert_eq!(parse_operator("SBP4").unwrap(), (Family::Traditional, 4));
        assert_eq!(parse_operator("drp5").unwrap(), (Family::DRP, 5));
        assert!(parse_operator("xyz4").is_err());
        assert!(parse_operator("dp").is_err());
    }

    #[test]
    fn unsupported_combinations() {
        let grid = Grid1D::bounded(100, 1.0).unwrap();
        assert!(matches!(
            build_operator_pair(Family::Traditional, 5, false, &grid),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            build_operator_pair(Family::DP, 8, false, &grid),
            Err(Error::UnsupportedOrder { .. })
        ));
        let small = Grid1D::bounded(8, 1.0).unwrap();
        assert!(matches!(
            build_operator_pair(Family::DP, 6, false, &small),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn grid_endpoints() {
        let g = Grid1D::bounded(7, 2.5).unwrap();
        assert_eq!(g.coords[0], 0.0);
        assert_eq!(g.coords[7], 2.5);
        assert_eq!(g.n_points, 8);
    }
}
