use std::f64::consts::{FRAC_PI_2, TAU};

use super::function::{value_and_derivative, HoloMatFun};
use super::{
    check_health, Contour, ContourError, ACCEPT_GAP, ACCEPT_RESIDUAL, HEALTH_RATIO, MAX_DOUBLINGS,
    ORDER_TOL,
};
use crate::numkit::{Lu, NumError, C64};

/// Quadrature value of an integer-valued contour integral with its verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexReport {
    pub raw: C64,
    /// Nearest integer to `raw.re`.
    pub rounded: i64,
    /// `|raw − rounded|`, so imaginary leakage counts against acceptance.
    pub residual: f64,
    /// `|value(2N) − value(N)|`.
    pub refinement_gap: f64,
    /// `N`, the node count of `raw`.
    pub nodes: usize,
}

impl IndexReport {
    pub fn new(raw: C64, refinement_gap: f64, nodes: usize) -> Self {
        let rounded = raw.re.round();
        Self {
            raw,
            rounded: rounded as i64,
            residual: (raw - rounded).norm(),
            refinement_gap,
            nodes,
        }
    }

    pub fn accepted(&self) -> bool {
        self.residual < ACCEPT_RESIDUAL && self.refinement_gap < ACCEPT_GAP
    }
}

fn singular_node(j: usize, z: C64) -> ContourError {
    ContourError::NearSingularContour { node: j, point: z, ratio: f64::INFINITY }
}

fn factor_at(m: &crate::numkit::CMatrix, j: usize, z: C64) -> Result<Lu, ContourError> {
    match Lu::factor(m) {
        Ok(lu) => Ok(lu),
        Err(NumError::SingularMatrix { .. }) => Err(singular_node(j, z)),
        Err(e) => Err(e.into()),
    }
}

/// `tr (1/2πi)∮ M'(ζ)M(ζ)⁻¹ dζ`, evaluated in both trace orders.
///
/// The reported value uses `c.nodes` points; a second sum over doubled
/// nodes gives the refinement gap.
pub fn generalized_index<F: HoloMatFun + ?Sized>(m: &F, c: &Contour) -> Result<IndexReport, ContourError> {
    index_sweep(m, c, None)
}

/// `generalized_index` and `winding_det` from one sweep: the log-det phases
/// come from the same factorizations of `M(ζ)`. The winding falls back to a
/// separate sweep with doubled nodes when the phase steps are too large.
pub fn index_with_winding<F: HoloMatFun + ?Sized>(
    m: &F,
    c: &Contour,
) -> Result<(IndexReport, Result<IndexReport, ContourError>), ContourError> {
    let mut logs = Vec::with_capacity(2 * c.nodes);
    let index = index_sweep(m, c, Some(&mut logs))?;
    let (la, ph): (Vec<f64>, Vec<f64>) = logs.into_iter().unzip();
    let winding = match winding_from_phases(c, c.nodes, &la, &ph) {
        Ok(Ok(w)) => Ok(w),
        Ok(Err(_)) => winding_det(m, c),
        Err(e) => Err(e),
    };
    Ok((index, winding))
}

fn check_square<F: HoloMatFun + ?Sized>(m: &F) -> Result<usize, ContourError> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(NumError::NotSquare { rows, cols }.into());
    }
    Ok(rows)
}

fn index_sweep<F: HoloMatFun + ?Sized>(
    m: &F,
    c: &Contour,
    mut logs: Option<&mut Vec<(f64, f64)>>,
) -> Result<IndexReport, ContourError> {
    let dim = check_square(m)?;
    let n = c.nodes;
    let count = 2 * n;
    let zero = C64::new(0.0, 0.0);
    let (mut fwd_c, mut fwd_f, mut swp_c) = (zero, zero, zero);
    let mut mnorms = Vec::with_capacity(count);
    let mut inorms = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for j in 0..count {
        let u = Contour::unit(j, count);
        let z = c.center + u * c.radius;
        if m.is_declared_singular(z) {
            return Err(singular_node(j, z));
        }
        let (mz, dz) = value_and_derivative(m, z, c.radius)?;
        if mz.shape() != (dim, dim) || dz.shape() != (dim, dim) {
            return Err(ContourError::ShapeMismatch { expected: (dim, dim), found: mz.shape() });
        }
        let lu = factor_at(&mz, j, z)?;
        if let Some(l) = logs.as_deref_mut() {
            l.push(lu.log_det());
        }
        // tr(M'M⁻¹) = tr((M⁻ᵀ M'ᵀ)ᵀ)
        let fwd = lu.solve_transpose(&dz.transpose())?.trace();
        mnorms.push(mz.norm_fro());
        inorms.push(fwd.norm());
        points.push(z);
        let w = u * c.radius;
        fwd_f += fwd * w / count as f64;
        if j % 2 == 0 {
            let swp = lu.solve(&dz)?.trace();
            fwd_c += fwd * w / n as f64;
            swp_c += swp * w / n as f64;
        }
    }
    check_health(&mnorms, &points)?;
    check_health(&inorms, &points)?;
    if (fwd_c - swp_c).norm() > ORDER_TOL * fwd_c.norm().max(1.0) {
        return Err(ContourError::OrderMismatch { forward: fwd_c, swapped: swp_c });
    }
    Ok(IndexReport::new(fwd_c, (fwd_f - fwd_c).norm(), n))
}

fn wrap(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

/// Winding at `n` nodes from log-det data at `2n` nodes. The inner `Err`
/// carries the largest phase step when it reaches `π/2`.
fn winding_from_phases(
    c: &Contour,
    n: usize,
    logs: &[f64],
    phases: &[f64],
) -> Result<Result<IndexReport, f64>, ContourError> {
    let count = 2 * n;
    let mut sorted = logs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[count / 2];
    if let Some(j) = logs.iter().position(|&l| (l - median).abs() > HEALTH_RATIO.ln()) {
        return Err(ContourError::NearSingularContour {
            node: j,
            point: c.point(j, count),
            ratio: (logs[j] - median).abs().exp(),
        });
    }
    let fine: Vec<f64> = (0..count).map(|j| wrap(phases[(j + 1) % count] - phases[j])).collect();
    let coarse: Vec<f64> = (0..n).map(|k| wrap(phases[(2 * k + 2) % count] - phases[2 * k])).collect();
    let worst = coarse.iter().chain(&fine).map(|s| s.abs()).fold(0.0, f64::max);
    if worst >= FRAC_PI_2 {
        return Ok(Err(worst));
    }
    let wc = coarse.iter().sum::<f64>() / TAU;
    let wf = fine.iter().sum::<f64>() / TAU;
    Ok(Ok(IndexReport::new(C64::new(wc, 0.0), (wf - wc).abs(), n)))
}

/// Winding number of `det M(ζ)` about 0 along `c`, from per-node log-det
/// phases unwrapped step by step. Steps of `π/2` or more double the node
/// count, at most `MAX_DOUBLINGS` times.
pub fn winding_det<F: HoloMatFun + ?Sized>(m: &F, c: &Contour) -> Result<IndexReport, ContourError> {
    check_square(m)?;
    let mut n = c.nodes;
    let mut worst = 0.0;
    for _ in 0..=MAX_DOUBLINGS {
        let count = 2 * n;
        let mut logs = Vec::with_capacity(count);
        let mut phases = Vec::with_capacity(count);
        for j in 0..count {
            let z = c.point(j, count);
            if m.is_declared_singular(z) {
                return Err(singular_node(j, z));
            }
            let mz = m.eval(z).map_err(|source| ContourError::Eval { point: z, source })?;
            let (la, ph) = factor_at(&mz, j, z)?.log_det();
            logs.push(la);
            phases.push(ph);
        }
        match winding_from_phases(c, n, &logs, &phases)? {
            Ok(rep) => return Ok(rep),
            Err(jump) => worst = jump,
        }
        n *= 2;
    }
    Err(ContourError::PhaseJumpTooLarge { nodes: n / 2, jump: worst })
}
