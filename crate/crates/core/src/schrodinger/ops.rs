use super::{Result, SchrodingerModel};
use crate::numkit::{CMatrix, Lu, C64};

impl SchrodingerModel {
    fn dirichlet_lu(&self, z: C64, conjugated: bool) -> Result<Lu> {
        Lu::factor(&self.interior_operator(conjugated).shift_diagonal(-z)).map_err(Self::singular(z))
    }

    /// Interior rows of the Poisson operator, `P_I(z) = −(L_II − z)⁻¹ L_IB`.
    pub fn poisson_interior(&self, z: C64, conjugated: bool) -> Result<CMatrix> {
        let lu = self.dirichlet_lu(z, conjugated)?;
        Ok(-lu.solve(self.coupling())?)
    }

    /// `P(z)`: boundary data to the full grid solution of `(ℒ − z)f = 0`,
    /// `γ_D f = φ`. Rows are `[interior; boundary]`.
    pub fn poisson(&self, z: C64, conjugated: bool) -> Result<CMatrix> {
        let pi = self.poisson_interior(z, conjugated)?;
        Ok(pi.vstack(&CMatrix::identity(self.boundary_count())))
    }

    /// `D(z) = γ_N P(z) = H⁻¹(I − E P_I(z))`.
    pub fn dtn(&self, z: C64, conjugated: bool) -> Result<CMatrix> {
        Ok(self.dtn_with_derivative(z, conjugated)?.0)
    }

    /// `D'(z) = −P̃(z̄)* P(z)`, with the adjoint taken under the interior and
    /// boundary weights. Built literally from two Poisson operators.
    pub fn dtn_prime(&self, z: C64) -> Result<CMatrix> {
        self.dtn_prime_of(z, false)
    }

    /// As `dtn_prime`, for either member of the adjoint pair.
    pub fn dtn_prime_of(&self, z: C64, conjugated: bool) -> Result<CMatrix> {
        let partner = self.poisson_interior(z.conj(), !conjugated)?;
        let p = self.poisson_interior(z, conjugated)?;
        Ok(-self.adjoint_to_boundary(&partner).matmul(&p))
    }

    /// `D(z)` and `D'(z)` from a single factorization of `L_II − z`, using
    /// `P̃(z̄)* = H⁻¹E(A_D − z)⁻¹`.
    pub fn dtn_with_derivative(&self, z: C64, conjugated: bool) -> Result<(CMatrix, CMatrix)> {
        let lu = self.dirichlet_lu(z, conjugated)?;
        Ok(self.dtn_pair(&lu)?)
    }

    pub(crate) fn dtn_pair(&self, lu: &Lu) -> std::result::Result<(CMatrix, CMatrix), crate::numkit::NumError> {
        // X = (L_II − z)⁻¹ L_IB = −P_I
        let x = lu.solve(self.coupling())?;
        let y = lu.solve(&x)?;
        let nb = self.boundary_count();
        let mut d = CMatrix::zeros(nb, nb);
        let mut dp = CMatrix::zeros(nb, nb);
        for (b, (&a, &h)) in self.adjacent_interior().iter().zip(self.normal_spacings()).enumerate() {
            let inv = 1.0 / h;
            for c in 0..nb {
                d[(b, c)] = x[(a, c)] * inv;
                dp[(b, c)] = y[(a, c)] * inv;
            }
            d[(b, b)] += inv;
        }
        Ok((d, dp))
    }

    /// Robin Poisson operator `P_Θ(z)`: `φ` to the full grid solution of
    /// `(ℒ − z)f = 0`, `(γ_N − Θγ_D)f = φ`. With `conjugated`, uses `q̄`
    /// and `Θ*`.
    pub fn robin_poisson(&self, theta: &CMatrix, z: C64, conjugated: bool) -> Result<CMatrix> {
        self.check_theta(theta)?;
        let (ni, nb) = (self.interior_count(), self.boundary_count());
        let th = if conjugated { self.theta_star(theta) } else { theta.clone() };
        let mut sys = CMatrix::zeros(ni + nb, ni + nb);
        sys.set_block(0, 0, &self.interior_operator(conjugated).shift_diagonal(-z));
        sys.set_block(0, ni, self.coupling());
        sys.set_block(ni, 0, &self.robin_trace(&th));
        let mut rhs = CMatrix::zeros(ni + nb, nb);
        rhs.set_block(ni, 0, &CMatrix::identity(nb));
        crate::numkit::lu_solve(&sys, &rhs).map_err(Self::singular(z))
    }

    /// `(A − z)⁻¹` for a realization given as an interior matrix.
    pub fn resolvent_of(a: &CMatrix, z: C64) -> Result<CMatrix> {
        Ok(Lu::factor(&a.shift_diagonal(-z)).map_err(Self::singular(z))?.inverse())
    }
}
