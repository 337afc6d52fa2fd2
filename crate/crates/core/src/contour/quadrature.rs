use super::function::HoloMatFun;
use super::index::IndexReport;
use super::{check_health, Contour, ContourError, RANK_TOL};
use crate::numkit::{r_diagonal, trace_of_product, CMatrix, C64};

/// A quadrature value at `N` nodes together with its `2N`-node refinement.
#[derive(Clone, Debug)]
pub struct Refined<T> {
    pub coarse: T,
    pub fine: T,
}

impl Refined<CMatrix> {
    /// Largest entrywise change under node doubling.
    pub fn gap(&self) -> f64 {
        self.coarse.max_abs_diff(&self.fine)
    }
}

struct Sweep {
    coarse: Vec<CMatrix>,
    fine: Option<Vec<CMatrix>>,
    max_norm: f64,
}

/// Accumulates `(1/N) Σ f(ζ_j)(ζ_j − z₀)^{p+1}` for each power `p`. With
/// `refine`, nodes are doubled and the even subset gives the `N`-node sum.
fn sweep<F: HoloMatFun + ?Sized>(
    f: &F,
    c: &Contour,
    powers: &[i32],
    refine: bool,
) -> Result<Sweep, ContourError> {
    let n = c.nodes;
    let count = if refine { 2 * n } else { n };
    let shape = f.shape();
    let zero = CMatrix::zeros(shape.0, shape.1);
    let mut coarse = vec![zero.clone(); powers.len()];
    let mut fine = vec![zero; if refine { powers.len() } else { 0 }];
    let mut norms = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for j in 0..count {
        let u = Contour::unit(j, count);
        let z = c.center + u * c.radius;
        if f.is_declared_singular(z) {
            return Err(ContourError::NearSingularContour { node: j, point: z, ratio: f64::INFINITY });
        }
        let m = f.eval(z).map_err(|source| ContourError::Eval { point: z, source })?;
        if m.shape() != shape {
            return Err(ContourError::ShapeMismatch { expected: shape, found: m.shape() });
        }
        norms.push(m.norm_fro());
        points.push(z);
        for (t, &p) in powers.iter().enumerate() {
            let w = (u * c.radius).powi(p + 1);
            if refine {
                fine[t] += &m.scale(w / count as f64);
            }
            if !refine || j % 2 == 0 {
                coarse[t] += &m.scale(w / n as f64);
            }
        }
    }
    check_health(&norms, &points)?;
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    Ok(Sweep { coarse, fine: refine.then_some(fine), max_norm })
}

/// `(1/2πi)∮ f(ζ)(ζ − z₀)^k dζ` by the `c.nodes`-point trapezoid rule.
pub fn cauchy_integral<F: HoloMatFun + ?Sized>(f: &F, c: &Contour, k: i32) -> Result<CMatrix, ContourError> {
    let mut s = sweep(f, c, &[k], false)?;
    Ok(s.coarse.pop().expect("one power requested"))
}

/// As `cauchy_integral`, also returning the value with doubled nodes.
pub fn cauchy_integral_refined<F: HoloMatFun + ?Sized>(
    f: &F,
    c: &Contour,
    k: i32,
) -> Result<Refined<CMatrix>, ContourError> {
    let mut s = sweep(f, c, &[k], true)?;
    Ok(Refined {
        coarse: s.coarse.pop().expect("one power requested"),
        fine: s.fine.and_then(|mut v| v.pop()).expect("refined sweep"),
    })
}

/// `P = −(1/2πi)∮ R(ζ) dζ` for a resolvent `R(ζ) = (T − ζ)⁻¹`.
pub fn riesz_projection<F: HoloMatFun + ?Sized>(r: &F, c: &Contour) -> Result<CMatrix, ContourError> {
    Ok(-cauchy_integral(r, c, 0)?)
}

/// Report for `tr P` without the acceptance verdict.
pub fn multiplicity_report<F: HoloMatFun + ?Sized>(r: &F, c: &Contour) -> Result<IndexReport, ContourError> {
    let p = cauchy_integral_refined(r, c, 0)?;
    let coarse = -p.coarse.trace();
    let fine = -p.fine.trace();
    Ok(IndexReport::new(coarse, (fine - coarse).norm(), c.nodes))
}

/// Algebraic multiplicity enclosed by `c` as the trace of the Riesz
/// projection; fails with `Rejected` unless the report is accepted.
pub fn algebraic_multiplicity<F: HoloMatFun + ?Sized>(r: &F, c: &Contour) -> Result<IndexReport, ContourError> {
    let rep = multiplicity_report(r, c)?;
    if rep.accepted() {
        Ok(rep)
    } else {
        Err(ContourError::Rejected(rep))
    }
}

#[derive(Clone, Debug)]
pub struct LaurentTerm {
    /// Negative order `k`.
    pub order: i32,
    pub coefficient: CMatrix,
    pub rank: usize,
}

/// Principal-part coefficients `M_{-1} … M_{-N₀}` with numerical ranks.
#[derive(Clone, Debug)]
pub struct LaurentCoeffs {
    pub terms: Vec<LaurentTerm>,
    /// Largest node norm of the function on the contour.
    pub scale: f64,
    pub radius: f64,
}

impl LaurentCoeffs {
    /// `M_k` for negative `k`, if computed.
    pub fn coefficient(&self, order: i32) -> Option<&CMatrix> {
        self.terms.iter().find(|t| t.order == order).map(|t| &t.coefficient)
    }

    pub fn rank_profile(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.rank).collect()
    }

    /// Highest `j` with a nonzero `M_{-j}`, or 0 for an analytic function.
    pub fn pole_order(&self) -> usize {
        self.terms.iter().rposition(|t| t.rank > 0).map_or(0, |p| p + 1)
    }

    /// Magnitude bound used for `M_{-j}`: `scale · ε^j`.
    pub fn term_scale(&self, j: usize) -> f64 {
        self.scale * self.radius.powi(j as i32)
    }
}

/// Laurent coefficients `M_{-j} = (1/2πi)∮ f(ζ)(ζ − z₀)^{j−1} dζ` for
/// `j = 1..=max_order`. Ranks count pivoted-QR diagonals above
/// `RANK_TOL · scale · ε^j`.
pub fn principal_part<F: HoloMatFun + ?Sized>(
    f: &F,
    c: &Contour,
    max_order: usize,
) -> Result<LaurentCoeffs, ContourError> {
    let powers: Vec<i32> = (0..max_order as i32).collect();
    let s = sweep(f, c, &powers, false)?;
    let mut out = LaurentCoeffs { terms: Vec::with_capacity(max_order), scale: s.max_norm, radius: c.radius };
    for (i, m) in s.coarse.into_iter().enumerate() {
        let j = i + 1;
        let thresh = RANK_TOL * out.term_scale(j);
        let rank = r_diagonal(&m).into_iter().filter(|&r| r > thresh).count();
        out.terms.push(LaurentTerm { order: -(j as i32), coefficient: m, rank });
    }
    Ok(out)
}

/// `|tr ∮ M₁M₂ − tr ∮ M₂M₁|` with the `1/2πi` normalization.
pub fn trace_cyclicity_check<F: HoloMatFun + ?Sized, G: HoloMatFun + ?Sized>(
    m1: &F,
    m2: &G,
    c: &Contour,
) -> Result<f64, ContourError> {
    let n = c.nodes;
    let mut a = C64::new(0.0, 0.0);
    let mut b = C64::new(0.0, 0.0);
    let mut norms = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let u = Contour::unit(j, n);
        let z = c.center + u * c.radius;
        let x = m1.eval(z).map_err(|source| ContourError::Eval { point: z, source })?;
        let y = m2.eval(z).map_err(|source| ContourError::Eval { point: z, source })?;
        if x.cols() != y.rows() || x.rows() != y.cols() {
            return Err(ContourError::ShapeMismatch { expected: (x.cols(), x.rows()), found: y.shape() });
        }
        norms.push(x.norm_fro() * y.norm_fro());
        points.push(z);
        let w = u * c.radius / n as f64;
        a += trace_of_product(&x, &y) * w;
        b += trace_of_product(&y, &x) * w;
    }
    check_health(&norms, &points)?;
    Ok((a - b).norm())
}
