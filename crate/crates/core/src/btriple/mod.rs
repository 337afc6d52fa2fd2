//! Finite-dimensional Donoghue boundary-triple models.
//!
//! A Hermitian `A` (the fixed self-adjoint extension) and an isometry `V`
//! spanning the model deficiency subspace at `i`. Elements of the maximal
//! domain are pairs `(u, φ)` representing `f = u + Vφ`, with
//!
//! * `S*(u, φ) = Au + iVφ`,
//! * `Γ₀(u, φ) = φ`,
//! * `Γ₁(u, φ) = V*(A + i)u + iφ`.
//!
//! The γ-field is `γ(z) = (I + (z − i)(A − z)⁻¹)V` and the Weyl function
//! `M(z) = zI + (z² + 1)V*(A − z)⁻¹V`.

mod extension;
mod index;
mod weyl;

use rand::Rng;
use thiserror::Error;

use crate::contour::ContourError;
use crate::numkit::{eigenvalues, inner, CMatrix, NumError, C64, I};
use crate::sampling;

pub use index::{index_difference_check, ThetaMinusWeyl, TripleIndexProblem, TripleVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TripleError {
    #[error("A is not Hermitian: ‖A − A*‖ = {0:e}")]
    NotHermitian(f64),
    #[error("V does not have orthonormal columns: ‖V*V − I‖ = {0:e}")]
    NotIsometry(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("Θ is {found:?}, expected {expected}x{expected}")]
    ThetaShape { expected: usize, found: (usize, usize) },
    #[error("singular solve at z = {z}: {source}")]
    SingularSolve {
        z: C64,
        #[source]
        source: NumError,
    },
    #[error("Θ − M(z) is singular at z = {0}")]
    SingularPerturbation(C64),
    #[error("Krein resolvent is singular at reference point {0}")]
    SingularResolvent(C64),
    #[error("boundary-condition system is rank deficient for this Θ")]
    DegenerateDecomposition,
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Num(#[from] NumError),
}

pub type Result<T> = std::result::Result<T, TripleError>;

#[derive(Clone, Debug)]
pub struct DonoghueModel {
    a: CMatrix,
    v: CMatrix,
    spectrum: Vec<f64>,
}

/// `(u, φ)` with `u ∈ ℂⁿ` the `dom A` part and `φ ∈ ℂᵐ` the deficiency coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainElement {
    pub u: Vec<C64>,
    pub phi: Vec<C64>,
}

impl DonoghueModel {
    pub fn new(a: CMatrix, v: CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(TripleError::InvalidModel(format!("A is {}x{}", a.rows(), a.cols())));
        }
        a.check_finite()?;
        v.check_finite()?;
        let n = a.rows();
        if v.rows() != n {
            return Err(TripleError::InvalidModel(format!("V has {} rows, A has dimension {n}", v.rows())));
        }
        if v.cols() == 0 || v.cols() > n {
            return Err(TripleError::InvalidModel(format!("V must have 1..={n} columns, got {}", v.cols())));
        }
        let herm = a.max_abs_diff(&a.adjoint());
        if herm > 1e-12 * a.norm_max().max(1.0) {
            return Err(TripleError::NotHermitian(herm));
        }
        let iso = v.adjoint().matmul(&v).max_abs_diff(&CMatrix::identity(v.cols()));
        if iso > 1e-12 {
            return Err(TripleError::NotIsometry(iso));
        }
        let mut spectrum: Vec<f64> = eigenvalues(&a)?.iter().map(|z| z.re).collect();
        spectrum.sort_by(f64::total_cmp);
        Ok(Self { a, v, spectrum })
    }

    /// Random model: Hermitian `A` with entries of size `scale` and a random isometry.
    pub fn random<R: Rng>(rng: &mut R, n: usize, m: usize, scale: f64) -> Result<Self> {
        Self::new(sampling::hermitian(rng, n, scale), sampling::isometry(rng, n, m))
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// Eigenvalues of `A`, ascending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Distance from `z` to `σ(A)`.
    pub fn distance_to_spectrum(&self, z: C64) -> f64 {
        self.spectrum.iter().map(|&l| (z - l).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.v.cols()
    }

    pub fn check_theta(&self, theta: &CMatrix) -> Result<()> {
        if theta.shape() != (self.m(), self.m()) {
            return Err(TripleError::ThetaShape { expected: self.m(), found: theta.shape() });
        }
        theta.check_finite()?;
        Ok(())
    }

    pub(crate) fn singular(z: C64) -> impl FnOnce(NumError) -> TripleError {
        move |e| match e {
            NumError::SingularMatrix { .. } => TripleError::SingularSolve { z, source: e },
            other => other.into(),
        }
    }

    /// `f = u + Vφ`.
    pub fn vector(&self, e: &DomainElement) -> Vec<C64> {
        let vp = self.v.mat_vec(&e.phi);
        e.u.iter().zip(vp).map(|(a, b)| a + b).collect()
    }

    /// `S*(u, φ) = Au + iVφ`.
    pub fn star_action(&self, e: &DomainElement) -> Vec<C64> {
        let au = self.a.mat_vec(&e.u);
        let vp = self.v.mat_vec(&e.phi);
        au.iter().zip(vp).map(|(a, b)| a + I * b).collect()
    }

    /// `(Γ₀, Γ₁) = (φ, V*(A + i)u + iφ)`.
    pub fn boundary_maps(&self, e: &DomainElement) -> (Vec<C64>, Vec<C64>) {
        let shifted = self.a.shift_diagonal(I).mat_vec(&e.u);
        let g1 = self
            .v
            .adjoint()
            .mat_vec(&shifted)
            .into_iter()
            .zip(&e.phi)
            .map(|(a, p)| a + I * p)
            .collect();
        (e.phi.clone(), g1)
    }

    /// An element with prescribed boundary values: `φ` and
    /// `u = (A + i)⁻¹V(ψ − iφ)`.
    pub fn element_with_boundary_values(&self, phi: &[C64], psi: &[C64]) -> Result<DomainElement> {
        let rhs: Vec<C64> = psi.iter().zip(phi).map(|(s, p)| s - I * p).collect();
        let b = CMatrix::column_vector(&self.v.mat_vec(&rhs));
        let u = crate::numkit::lu_solve(&self.a.shift_diagonal(I), &b).map_err(Self::singular(-I))?;
        Ok(DomainElement { u: u.into_vec(), phi: phi.to_vec() })
    }

    /// `|(S*f, g) − (f, S*g) − (Γ₁f, Γ₀g) + (Γ₀f, Γ₁g)|` relative to the
    /// largest of the four terms.
    pub fn green_residual(&self, e1: &DomainElement, e2: &DomainElement) -> f64 {
        let (f, g) = (self.vector(e1), self.vector(e2));
        let (sf, sg) = (self.star_action(e1), self.star_action(e2));
        let (f0, f1) = self.boundary_maps(e1);
        let (g0, g1) = self.boundary_maps(e2);
        let t = [inner(&sf, &g), inner(&f, &sg), inner(&f1, &g0), inner(&f0, &g1)];
        let scale = t.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
        ((t[0] - t[1]) - (t[2] - t[3])).norm() / scale
    }

    /// The Green identity on coordinates `x = (u, φ) ∈ ℂⁿ⁺ᵐ` as the matrix
    /// `Jᴴ S − Sᴴ J − Γ₀ᴴ Γ₁ + Γ₁ᴴ Γ₀` with `J = [I | V]`, `S = [A | iV]`,
    /// `Γ₀ = [0 | I]`, `Γ₁ = [V*(A + i) | iI]`. Returns its largest entry
    /// relative to the largest entry of the terms.
    pub fn green_matrix_residual(&self) -> f64 {
        let (n, m) = (self.n(), self.m());
        let j = CMatrix::identity(n).hstack(&self.v);
        let s = self.a.hstack(&self.v.scale(I));
        let g0 = CMatrix::zeros(m, n).hstack(&CMatrix::identity(m));
        let g1 = self
            .v
            .adjoint()
            .matmul(&self.a.shift_diagonal(I))
            .hstack(&CMatrix::identity(m).scale(I));
        let t1 = j.adjoint().matmul(&s);
        let t2 = s.adjoint().matmul(&j);
        let t3 = g0.adjoint().matmul(&g1);
        let t4 = g1.adjoint().matmul(&g0);
        let total = &(&(&t1 - &t2) - &t3) + &t4;
        let scale = [&t1, &t2, &t3, &t4].iter().map(|t| t.norm_max()).fold(f64::MIN_POSITIVE, f64::max);
        total.norm_max() / scale
    }
}
