use super::{DonoghueModel, Result};
use crate::contour::{
    index_with_winding, isolating_contours, multiplicity_report, Contour, ContourError,
    EvalError, HoloMatFun, IndexReport, ResolventTrace,
};
use crate::numkit::{eig_cluster, CMatrix, EigList, C64};

/// `z ↦ Θ − M(z)` with derivative `−M'(z)`.
pub struct ThetaMinusWeyl<'a> {
    model: &'a DonoghueModel,
    theta: CMatrix,
}

impl<'a> ThetaMinusWeyl<'a> {
    pub fn new(model: &'a DonoghueModel, theta: &CMatrix) -> Result<Self> {
        model.check_theta(theta)?;
        Ok(Self { model, theta: theta.clone() })
    }
}

fn eval_err(e: super::TripleError) -> EvalError {
    match e {
        super::TripleError::SingularSolve { source, .. } => EvalError::Num(source),
        super::TripleError::Num(n) => EvalError::Num(n),
        other => EvalError::Model(other.to_string()),
    }
}

impl HoloMatFun for ThetaMinusWeyl<'_> {
    fn shape(&self) -> (usize, usize) {
        self.theta.shape()
    }

    fn eval(&self, z: C64) -> std::result::Result<CMatrix, EvalError> {
        Ok(&self.theta - &self.model.weyl(z).map_err(eval_err)?)
    }

    fn eval_with_derivative(&self, z: C64) -> std::result::Result<(CMatrix, Option<CMatrix>), EvalError> {
        let (m, dm) = self.model.weyl_with_derivative(z).map_err(eval_err)?;
        Ok((&self.theta - &m, Some(-dm)))
    }

    fn derivative(&self, z: C64) -> Option<std::result::Result<CMatrix, EvalError>> {
        Some(self.eval_with_derivative(z).map(|(_, d)| d.expect("analytic derivative")))
    }
}

/// Extensions `B₁`, `B₂` with their oracles, prepared for many contours.
pub struct TripleIndexProblem<'a> {
    pub f1: ThetaMinusWeyl<'a>,
    pub f2: ThetaMinusWeyl<'a>,
    pub b1: CMatrix,
    pub b2: CMatrix,
    pub oracle_b1: EigList,
    pub oracle_b2: EigList,
    pub oracle_a: EigList,
    res_b1: ResolventTrace,
    res_b2: ResolventTrace,
    res_a: ResolventTrace,
    scale: f64,
}

#[derive(Clone, Debug)]
pub struct TripleVerdict {
    pub contour: Contour,
    pub index1: IndexReport,
    pub index2: IndexReport,
    pub winding1: std::result::Result<IndexReport, ContourError>,
    pub winding2: std::result::Result<IndexReport, ContourError>,
    /// Riesz-projection traces for `B₁`, `B₂` and `A`.
    pub ma_b1: IndexReport,
    pub ma_b2: IndexReport,
    pub ma_a: IndexReport,
    /// Eigenvalue-oracle counts inside the contour.
    pub oracle_b1: usize,
    pub oracle_b2: usize,
    pub oracle_a: usize,
}

impl TripleVerdict {
    pub fn all_accepted(&self) -> bool {
        [&self.index1, &self.index2, &self.ma_b1, &self.ma_b2, &self.ma_a]
            .iter()
            .all(|r| r.accepted())
    }

    /// `ind(Θⱼ − M) = m_a(Bⱼ) − m_a(A)` for both `j`.
    pub fn single_formulas_hold(&self) -> bool {
        self.all_accepted()
            && self.index1.rounded == self.ma_b1.rounded - self.ma_a.rounded
            && self.index2.rounded == self.ma_b2.rounded - self.ma_a.rounded
    }

    /// `ind(Θ₁ − M) − ind(Θ₂ − M) = m_a(B₁) − m_a(B₂)`.
    pub fn difference_holds(&self) -> bool {
        self.all_accepted()
            && self.index1.rounded - self.index2.rounded == self.ma_b1.rounded - self.ma_b2.rounded
    }

    pub fn oracle_holds(&self) -> bool {
        self.ma_b1.rounded == self.oracle_b1 as i64
            && self.ma_b2.rounded == self.oracle_b2 as i64
            && self.ma_a.rounded == self.oracle_a as i64
    }

    pub fn winding_agrees(&self) -> bool {
        matches!(&self.winding1, Ok(w) if w.rounded == self.index1.rounded)
            && matches!(&self.winding2, Ok(w) if w.rounded == self.index2.rounded)
    }

    pub fn agree(&self) -> bool {
        self.single_formulas_hold() && self.difference_holds() && self.oracle_holds() && self.winding_agrees()
    }
}

impl<'a> TripleIndexProblem<'a> {
    pub fn new(model: &'a DonoghueModel, theta1: &CMatrix, theta2: &CMatrix) -> Result<Self> {
        let b1 = model.extension(theta1)?;
        let b2 = model.extension(theta2)?;
        let tol = |a: &CMatrix| 1e-7 * a.norm_fro().max(1.0);
        let scale = b1.norm_fro().max(b2.norm_fro()).max(model.a().norm_fro()).max(1.0);
        Ok(Self {
            f1: ThetaMinusWeyl::new(model, theta1)?,
            f2: ThetaMinusWeyl::new(model, theta2)?,
            oracle_b1: eig_cluster(&b1, tol(&b1))?,
            oracle_b2: eig_cluster(&b2, tol(&b2))?,
            oracle_a: eig_cluster(model.a(), tol(model.a()))?,
            res_b1: ResolventTrace::new(&b1)?,
            res_b2: ResolventTrace::new(&b2)?,
            res_a: ResolventTrace::new(model.a())?,
            b1,
            b2,
            scale,
        })
    }

    /// Union of the spectra of `B₁`, `B₂` and `A`.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut pts = self.oracle_b1.means();
        pts.extend(self.oracle_b2.means());
        pts.extend(self.oracle_a.means());
        pts
    }

    pub fn isolating_contours(&self, nodes: usize) -> Vec<Contour> {
        isolating_contours(&self.spectrum(), 1e-9 * self.scale, nodes)
    }

    pub fn check(&self, c: &Contour) -> Result<TripleVerdict> {
        let (index1, winding1) = index_with_winding(&self.f1, c)?;
        let (index2, winding2) = index_with_winding(&self.f2, c)?;
        Ok(TripleVerdict {
            contour: *c,
            index1,
            index2,
            winding1,
            winding2,
            ma_b1: multiplicity_report(&self.res_b1, c)?,
            ma_b2: multiplicity_report(&self.res_b2, c)?,
            ma_a: multiplicity_report(&self.res_a, c)?,
            oracle_b1: self.oracle_b1.count_in_disk(c.center, c.radius),
            oracle_b2: self.oracle_b2.count_in_disk(c.center, c.radius),
            oracle_a: self.oracle_a.count_in_disk(c.center, c.radius),
        })
    }
}

/// Indices of `Θⱼ − M(·)` over `c` against the multiplicities of `B₁`, `B₂`, `A`.
pub fn index_difference_check(
    model: &DonoghueModel,
    theta1: &CMatrix,
    theta2: &CMatrix,
    c: &Contour,
) -> Result<TripleVerdict> {
    TripleIndexProblem::new(model, theta1, theta2)?.check(c)
}
