use super::{DonoghueModel, Result, TripleError};
use crate::numkit::{CMatrix, Lu, NumError, C64, I};

/// Reference points tried in order by `extension`.
const REFERENCE_POINTS: [C64; 4] = [I, C64::new(1.0, 2.0), C64::new(-1.5, 3.0), C64::new(0.5, -2.5)];

impl DonoghueModel {
    /// `(B_Θ − z)⁻¹ = (A − z)⁻¹ + γ(z)(Θ − M(z))⁻¹γ(z̄)*`.
    pub fn krein_resolvent(&self, theta: &CMatrix, z: C64) -> Result<CMatrix> {
        self.check_theta(theta)?;
        let r0 = Lu::factor(&self.a.shift_diagonal(-z)).map_err(Self::singular(z))?.inverse();
        let g = self.gamma(z)?;
        let gs = self.gamma_adjoint(z)?;
        let k = theta - &self.weyl(z)?;
        let x = Lu::factor(&k)
            .and_then(|lu| lu.solve(&gs))
            .map_err(|_| TripleError::SingularPerturbation(z))?;
        Ok(&r0 + &g.matmul(&x))
    }

    /// `B_Θ = R_Θ(z_ref)⁻¹ + z_ref·I`.
    pub fn extension_operator(&self, theta: &CMatrix, z_ref: C64) -> Result<CMatrix> {
        let r = self.krein_resolvent(theta, z_ref).map_err(|e| match e {
            TripleError::SingularSolve { .. } | TripleError::SingularPerturbation(_) => {
                TripleError::SingularResolvent(z_ref)
            }
            other => other,
        })?;
        let inv = Lu::factor(&r).map_err(|_| TripleError::SingularResolvent(z_ref))?.inverse();
        Ok(inv.shift_diagonal(z_ref))
    }

    /// `extension_operator` at the first reference point where the Krein
    /// resolvent is invertible.
    pub fn extension(&self, theta: &CMatrix) -> Result<CMatrix> {
        let scale = 1.0 + self.a.norm_fro() + theta.norm_fro();
        let mut last = TripleError::SingularResolvent(I);
        for p in REFERENCE_POINTS {
            match self.extension_operator(theta, p * scale) {
                Err(e @ TripleError::SingularResolvent(_)) => last = e,
                other => return other,
            }
        }
        Err(last)
    }

    /// The coefficient matrix `[[I, V], [V*(A + i), iI − Θ]]` of the
    /// decomposition `x = u + Vφ` subject to `Γ₁ = ΘΓ₀`.
    fn bc_system(&self, theta: &CMatrix) -> Result<Lu> {
        self.check_theta(theta)?;
        let (n, m) = (self.n(), self.m());
        let mut k = CMatrix::zeros(n + m, n + m);
        k.set_block(0, 0, &CMatrix::identity(n));
        k.set_block(0, n, &self.v);
        k.set_block(n, 0, &self.v.adjoint().matmul(&self.a.shift_diagonal(I)));
        k.set_block(n, n, &(-theta).shift_diagonal(I));
        Lu::factor(&k).map_err(|e| match e {
            NumError::SingularMatrix { .. } => TripleError::DegenerateDecomposition,
            other => other.into(),
        })
    }

    fn star_of_solution(&self, sol: &CMatrix) -> CMatrix {
        let (n, m) = (self.n(), self.m());
        let u = sol.block(0, 0, n, sol.cols());
        let phi = sol.block(n, 0, m, sol.cols());
        &self.a.matmul(&u) + &self.v.matmul(&phi).scale(I)
    }

    /// `B_Θ x = S*(u, φ)` where `x = u + Vφ` and `V*(A + i)u + iφ = Θφ`.
    pub fn extension_from_bc(&self, theta: &CMatrix, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.n() {
            return Err(NumError::DimensionMismatch { expected: (self.n(), 1), found: (x.len(), 1) }.into());
        }
        let lu = self.bc_system(theta)?;
        let mut rhs = CMatrix::zeros(self.n() + self.m(), 1);
        for (i, &xi) in x.iter().enumerate() {
            rhs[(i, 0)] = xi;
        }
        let sol = lu.solve(&rhs)?;
        Ok(self.star_of_solution(&sol).into_vec())
    }

    /// `B_Θ` assembled column by column from the boundary-condition route.
    pub fn extension_matrix_from_bc(&self, theta: &CMatrix) -> Result<CMatrix> {
        let lu = self.bc_system(theta)?;
        let (n, m) = (self.n(), self.m());
        let rhs = CMatrix::identity(n).vstack(&CMatrix::zeros(m, n));
        Ok(self.star_of_solution(&lu.solve(&rhs)?))
    }
}
