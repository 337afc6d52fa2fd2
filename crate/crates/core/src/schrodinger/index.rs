use super::{Bc, Result, SchrodingerModel};
use crate::contour::{
    index_with_winding, isolating_contours, multiplicity_report, Contour, ContourError,
    EvalError, HoloMatFun, IndexReport, ResolventTrace,
};
use crate::numkit::{eig_cluster, eigenvalues, CMatrix, EigList, Lu, C64};

/// `z ↦ D(z) − Θ` (or `D̃(z) − Θ*` for the adjoint family), with the analytic
/// derivative `D'(z)`.
pub struct DtnFamily<'a> {
    model: &'a SchrodingerModel,
    a_d: CMatrix,
    theta: CMatrix,
}

impl<'a> DtnFamily<'a> {
    /// `theta` is the parameter as given; the adjoint family uses `Θ*`.
    pub fn new(model: &'a SchrodingerModel, theta: &CMatrix, conjugated: bool) -> Result<Self> {
        model.check_theta(theta)?;
        Ok(Self {
            model,
            a_d: model.interior_operator(conjugated),
            theta: if conjugated { model.theta_star(theta) } else { theta.clone() },
        })
    }

    fn factor(&self, z: C64) -> std::result::Result<Lu, EvalError> {
        Ok(Lu::factor(&self.a_d.shift_diagonal(-z))?)
    }
}

impl HoloMatFun for DtnFamily<'_> {
    fn shape(&self) -> (usize, usize) {
        self.theta.shape()
    }

    fn eval(&self, z: C64) -> std::result::Result<CMatrix, EvalError> {
        let lu = self.factor(z)?;
        let x = lu.solve(self.model.coupling())?;
        let nb = self.model.boundary_count();
        let mut d = CMatrix::zeros(nb, nb);
        for (b, (&a, &h)) in self
            .model
            .adjacent_interior()
            .iter()
            .zip(self.model.normal_spacings())
            .enumerate()
        {
            for c in 0..nb {
                d[(b, c)] = x[(a, c)] / h;
            }
            d[(b, b)] += 1.0 / h;
        }
        Ok(&d - &self.theta)
    }

    fn eval_with_derivative(&self, z: C64) -> std::result::Result<(CMatrix, Option<CMatrix>), EvalError> {
        let lu = self.factor(z)?;
        let (d, dp) = self.model.dtn_pair(&lu)?;
        Ok((&d - &self.theta, Some(dp)))
    }

    fn derivative(&self, z: C64) -> Option<std::result::Result<CMatrix, EvalError>> {
        Some(self.eval_with_derivative(z).map(|(_, d)| d.expect("analytic derivative")))
    }
}

/// Precomputed data for checking the index formula on many contours.
pub struct IndexProblem<'a> {
    pub family: DtnFamily<'a>,
    pub a_theta: CMatrix,
    pub a_dirichlet: CMatrix,
    pub oracle_theta: EigList,
    pub oracle_dirichlet: EigList,
    res_theta: ResolventTrace,
    res_dirichlet: ResolventTrace,
}

/// Outcome of one contour check.
#[derive(Clone, Debug)]
pub struct IndexVerdict {
    pub contour: Contour,
    pub index: IndexReport,
    pub winding: std::result::Result<IndexReport, ContourError>,
    /// Riesz-projection trace for the Robin realization.
    pub ma_theta: IndexReport,
    /// Riesz-projection trace for the Dirichlet realization.
    pub ma_dirichlet: IndexReport,
    /// Eigenvalue-oracle counts inside the contour.
    pub oracle_theta: usize,
    pub oracle_dirichlet: usize,
}

impl IndexVerdict {
    pub fn all_accepted(&self) -> bool {
        self.index.accepted() && self.ma_theta.accepted() && self.ma_dirichlet.accepted()
    }

    /// Index equals `m_a(A_Θ) − m_a(A_D)` with multiplicities from Riesz traces.
    pub fn formula_holds(&self) -> bool {
        self.all_accepted() && self.index.rounded == self.ma_theta.rounded - self.ma_dirichlet.rounded
    }

    /// Riesz traces match the eigenvalue oracle.
    pub fn oracle_holds(&self) -> bool {
        self.ma_theta.rounded == self.oracle_theta as i64 && self.ma_dirichlet.rounded == self.oracle_dirichlet as i64
    }

    /// Determinant winding matches the rounded index.
    pub fn winding_agrees(&self) -> bool {
        matches!(&self.winding, Ok(w) if w.rounded == self.index.rounded)
    }

    pub fn agree(&self) -> bool {
        self.formula_holds() && self.oracle_holds() && self.winding_agrees()
    }

    /// Expected index from the eigenvalue oracle alone.
    pub fn oracle_index(&self) -> i64 {
        self.oracle_theta as i64 - self.oracle_dirichlet as i64
    }
}

impl<'a> IndexProblem<'a> {
    pub fn new(model: &'a SchrodingerModel, theta: &CMatrix, conjugated: bool) -> Result<Self> {
        let family = DtnFamily::new(model, theta, conjugated)?;
        let a_theta = model.assemble(&Bc::Robin(theta.clone()), conjugated)?;
        let a_dirichlet = model.interior_operator(conjugated);
        let tol = |a: &CMatrix| 1e-7 * a.norm_fro().max(1.0);
        let oracle_theta = eig_cluster(&a_theta, tol(&a_theta))?;
        let oracle_dirichlet = eig_cluster(&a_dirichlet, tol(&a_dirichlet))?;
        Ok(Self {
            family,
            res_theta: ResolventTrace::new(&a_theta)?,
            res_dirichlet: ResolventTrace::new(&a_dirichlet)?,
            a_theta,
            a_dirichlet,
            oracle_theta,
            oracle_dirichlet,
        })
    }

    /// Union of both oracle spectra.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut pts = self.oracle_theta.means();
        pts.extend(self.oracle_dirichlet.means());
        pts
    }

    /// One contour around every distinct eigenvalue of either realization,
    /// radius a quarter of the local gap.
    pub fn isolating_contours(&self, nodes: usize) -> Vec<Contour> {
        let scale = self.a_theta.norm_fro().max(self.a_dirichlet.norm_fro()).max(1.0);
        isolating_contours(&self.spectrum(), 1e-9 * scale, nodes)
    }

    pub fn check(&self, c: &Contour) -> Result<IndexVerdict> {
        let (index, winding) = index_with_winding(&self.family, c)?;
        let ma_theta = multiplicity_report(&self.res_theta, c)?;
        let ma_dirichlet = multiplicity_report(&self.res_dirichlet, c)?;
        Ok(IndexVerdict {
            contour: *c,
            index,
            winding,
            ma_theta,
            ma_dirichlet,
            oracle_theta: self.oracle_theta.count_in_disk(c.center, c.radius),
            oracle_dirichlet: self.oracle_dirichlet.count_in_disk(c.center, c.radius),
        })
    }
}

/// Index of `D(·) − Θ` over `c` against `m_a(A_Θ) − m_a(A_D)`, with
/// multiplicities from Riesz projections and from the eigenvalue oracle.
pub fn index_vs_multiplicity(model: &SchrodingerModel, theta: &CMatrix, c: &Contour) -> Result<IndexVerdict> {
    IndexProblem::new(model, theta, false)?.check(c)
}

/// Largest distance between `σ(Ã_{Θ*})` and `conj σ(A_Θ)` under a nearest
/// greedy matching, each distance relative to `max(1, |λ|)`.
pub fn conjugate_spectrum_mismatch(model: &SchrodingerModel, theta: &CMatrix) -> Result<f64> {
    let a = eigenvalues(&model.assemble(&Bc::Robin(theta.clone()), false)?)?;
    let b = eigenvalues(&model.assemble(&Bc::Robin(theta.clone()), true)?)?;
    Ok(matching_distance(&a.iter().map(|z| z.conj()).collect::<Vec<_>>(), &b))
}

/// Greedy nearest matching of two equally long lists; returns the worst
/// relative distance.
pub(crate) fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|&(j, _)| !used[j])
            .map(|(j, &y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("lists have equal length");
        used[j] = true;
        worst = worst.max(d / x.norm().max(1.0));
    }
    worst
}
