//! Trapezoid quadrature on counterclockwise circles: Cauchy and Laurent
//! coefficient integrals, Riesz projections, algebraic multiplicities, the
//! generalized index and a determinant-winding oracle.

mod function;
mod index;
mod quadrature;

use std::f64::consts::TAU;

use thiserror::Error;

use crate::numkit::{NumError, C64};

pub use function::{EvalError, HoloMatFun, MatFn, Resolvent, ResolventTrace};
pub use index::{generalized_index, index_with_winding, winding_det, IndexReport};
pub use quadrature::{
    algebraic_multiplicity, cauchy_integral, cauchy_integral_refined, multiplicity_report,
    principal_part, riesz_projection, trace_cyclicity_check, LaurentCoeffs, LaurentTerm,
    Refined,
};

pub const DEFAULT_NODES: usize = 256;
pub const MIN_NODES: usize = 8;
/// Reports are accepted below this distance to the nearest integer.
pub const ACCEPT_RESIDUAL: f64 = 1e-6;
/// Reports are accepted below this change under node doubling.
pub const ACCEPT_GAP: f64 = 1e-8;
/// A node value larger than this multiple of the contour median signals a
/// pole on or near the circle.
pub const HEALTH_RATIO: f64 = 1e12;
pub const ORDER_TOL: f64 = 1e-8;
pub const RANK_TOL: f64 = 1e-8;
/// Node doublings allowed in the winding oracle before giving up.
pub const MAX_DOUBLINGS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("near-singular contour: node {node} at {point} has magnitude {ratio:e} times the contour median")]
    NearSingularContour { node: usize, point: C64, ratio: f64 },
    #[error("evaluation failed at {point}: {source}")]
    Eval {
        point: C64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("trace orders disagree: M'M^-1 gives {forward}, M^-1M' gives {swapped}")]
    OrderMismatch { forward: C64, swapped: C64 },
    #[error("phase jump {jump:.3} rad persists with {nodes} nodes")]
    PhaseJumpTooLarge { nodes: usize, jump: f64 },
    #[error("report not accepted: raw {}, residual {:e}, refinement gap {:e}", .0.raw, .0.residual, .0.refinement_gap)]
    Rejected(IndexReport),
    #[error("finite-difference derivative at {point} does not settle under step halving ({coarse:e} then {fine:e})")]
    DerivativeUnstable { point: C64, coarse: f64, fine: f64 },
    #[error("function returned a {found:?} matrix, expected {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Counterclockwise circle `C(center; radius)` sampled at `nodes` equispaced points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Result<Self, ContourError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ContourError::InvalidContour(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        if nodes < MIN_NODES {
            return Err(ContourError::InvalidContour(format!(
                "need at least {MIN_NODES} nodes, got {nodes}"
            )));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(ContourError::InvalidContour("center must be finite".into()));
        }
        Ok(Self { center, radius, nodes })
    }

    pub fn with_nodes(self, nodes: usize) -> Result<Self, ContourError> {
        Self::new(self.center, self.radius, nodes)
    }

    /// `e^{iθ_j}` for the `j`-th of `count` equispaced angles.
    pub fn unit(j: usize, count: usize) -> C64 {
        C64::from_polar(1.0, TAU * j as f64 / count as f64)
    }

    pub fn point(&self, j: usize, count: usize) -> C64 {
        self.center + Self::unit(j, count) * self.radius
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.nodes).map(|j| self.point(j, self.nodes)).collect()
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Distance from `z` to the circle itself.
    pub fn distance_to_circle(&self, z: C64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// One circle per distinct point, with radius a quarter of the distance to
/// the nearest other point. Isolated points get `0.25·max(1, |λ|)`.
/// Points closer than `merge_tol` are treated as one.
pub fn isolating_contours(points: &[C64], merge_tol: f64, nodes: usize) -> Vec<Contour> {
    let distinct = crate::numkit::cluster_values(points, merge_tol).means();
    distinct
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let gap = distinct
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &q)| (q - p).norm())
                .fold(f64::INFINITY, f64::min);
            let radius = if gap.is_finite() {
                0.25 * gap
            } else {
                0.25 * p.norm().max(1.0)
            };
            Contour { center: p, radius, nodes: nodes.max(MIN_NODES) }
        })
        .collect()
}

/// Health check on node magnitudes: fails if one exceeds `HEALTH_RATIO`
/// times the median.
pub(crate) fn check_health(norms: &[f64], points: &[C64]) -> Result<(), ContourError> {
    if norms.is_empty() {
        return Ok(());
    }
    let mut sorted = norms.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if median == 0.0 {
        return Ok(());
    }
    for (j, &v) in norms.iter().enumerate() {
        if !v.is_finite() || v > HEALTH_RATIO * median {
            return Err(ContourError::NearSingularContour {
                node: j,
                point: points[j],
                ratio: v / median,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_validation() {
        assert!(Contour::new(C64::new(0.0, 0.0), 0.0, 16).is_err());
        assert!(Contour::new(C64::new(0.0, 0.0), 1.0, 7).is_err());
        assert!(Contour::new(C64::new(f64::NAN, 0.0), 1.0, 8).is_err());
        let c = Contour::new(C64::new(1.0, 1.0), 0.5, 8).unwrap();
        assert!((c.point(2, 8) - C64::new(1.0, 1.5)).norm() < 1e-15);
        assert!(c.contains(C64::new(1.2, 1.0)));
    }

    #[test]
    fn coarse_nodes_are_even_fine_nodes() {
        let c = Contour::new(C64::new(0.3, -2.0), 0.7, 64).unwrap();
        for m in 0..64 {
            assert_eq!(c.point(m, 64), c.point(2 * m, 128));
        }
    }

    #[test]
    fn isolating_radius_is_quarter_gap() {
        let pts = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 1e-12), C64::new(5.0, 0.0)];
        let cs = isolating_contours(&pts, 1e-8, 32);
        assert_eq!(cs.len(), 3);
        assert!((cs[0].radius - 0.25).abs() < 1e-12);
        assert!((cs[2].radius - 1.0).abs() < 1e-12);
        let alone = isolating_contours(&[C64::new(8.0, 0.0)], 1e-8, 32);
        assert!((alone[0].radius - 2.0).abs() < 1e-15);
    }
}
