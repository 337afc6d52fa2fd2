use super::{DonoghueModel, Result, TripleError};
use crate::contour::ContourError;
use crate::numkit::{eigenvalues, CMatrix, Lu, C64, I};
use crate::report::IdentityReport;

/// Tolerance for the Weyl-function identities.
pub const WEYL_TOL: f64 = 1e-10;

fn scaled_diff(lhs: &CMatrix, rhs: &CMatrix, terms: &[&CMatrix]) -> f64 {
    let scale = terms.iter().map(|t| t.norm_max()).fold(1.0, f64::max);
    lhs.max_abs_diff(rhs) / scale
}

impl DonoghueModel {
    fn factor_at(&self, z: C64) -> Result<Lu> {
        Lu::factor(&self.a.shift_diagonal(-z)).map_err(Self::singular(z))
    }

    /// `γ(z) = (I + (z − i)(A − z)⁻¹)V`.
    pub fn gamma(&self, z: C64) -> Result<CMatrix> {
        self.gamma_from_anchor(z, I, &self.v)
    }

    /// `γ(z) = (I + (z − ζ)(A − z)⁻¹)γ(ζ)` from a known value at `ζ`.
    pub fn gamma_from_anchor(&self, z: C64, zeta: C64, gamma_zeta: &CMatrix) -> Result<CMatrix> {
        let x = self.factor_at(z)?.solve(gamma_zeta).map_err(Self::singular(z))?;
        Ok(gamma_zeta + &x.scale(z - zeta))
    }

    /// `γ(z̄)* = V*(A + i)(A − z)⁻¹`.
    pub fn gamma_adjoint(&self, z: C64) -> Result<CMatrix> {
        Ok(self.gamma(z.conj())?.adjoint())
    }

    /// `M(z) = zI + (z² + 1)V*(A − z)⁻¹V`.
    pub fn weyl(&self, z: C64) -> Result<CMatrix> {
        let x = self.factor_at(z)?.solve(&self.v).map_err(Self::singular(z))?;
        Ok(self.v.adjoint().matmul(&x).scale(z * z + 1.0).shift_diagonal(z))
    }

    /// `M(z)` and the closed-form derivative
    /// `M'(z) = I + 2zV*(A − z)⁻¹V + (z² + 1)V*(A − z)⁻²V` from one factorization.
    pub fn weyl_with_derivative(&self, z: C64) -> Result<(CMatrix, CMatrix)> {
        let lu = self.factor_at(z)?;
        let x = lu.solve(&self.v).map_err(Self::singular(z))?;
        let y = lu.solve(&x).map_err(Self::singular(z))?;
        let vh = self.v.adjoint();
        let vx = vh.matmul(&x);
        let m = vx.scale(z * z + 1.0).shift_diagonal(z);
        let dm = (&vx.scale(2.0 * z) + &vh.matmul(&y).scale(z * z + 1.0)).shift_diagonal(C64::new(1.0, 0.0));
        Ok((m, dm))
    }

    /// `M'(z)` as `γ(z̄)*γ(z)`.
    pub fn weyl_derivative(&self, z: C64) -> Result<CMatrix> {
        Ok(self.gamma_adjoint(z)?.matmul(&self.gamma(z)?))
    }

    /// `M'(z)` by a validated, twice Richardson-extrapolated central difference.
    ///
    /// The base step is `10⁻²` of the distance to `σ(A)`, with steps `h, h/2,
    /// h/4`. The first- and second-level extrapolants must agree to `10⁻⁶`
    /// relative, otherwise `DerivativeUnstable` is returned.
    pub fn weyl_derivative_fd(&self, z: C64) -> Result<CMatrix> {
        let h = 1e-2 * self.distance_to_spectrum(z);
        let central = |h: f64| -> Result<CMatrix> {
            let hp = C64::new(h, 0.0);
            Ok((&self.weyl(z + hp)? - &self.weyl(z - hp)?).scale_real(0.5 / h))
        };
        let (d1, d2, d3) = (central(h)?, central(h / 2.0)?, central(h / 4.0)?);
        let r1 = (&d2.scale_real(4.0) - &d1).scale_real(1.0 / 3.0);
        let r2 = (&d3.scale_real(4.0) - &d2).scale_real(1.0 / 3.0);
        let rr = (&r2.scale_real(16.0) - &r1).scale_real(1.0 / 15.0);
        let coarse = (&d2 - &d3).norm_max();
        let fine = (&r2 - &rr).norm_max();
        if !(fine <= 1e-6 * rr.norm_max().max(1.0)) {
            return Err(ContourError::DerivativeUnstable { point: z, coarse, fine }.into());
        }
        Ok(rr)
    }

    /// `Im M(z) = (M(z) − M(z)*)/2i`.
    pub fn weyl_imag(&self, z: C64) -> Result<CMatrix> {
        let m = self.weyl(z)?;
        Ok((&m - &m.adjoint()).scale(C64::new(0.0, -0.5)))
    }

    /// Smallest eigenvalue of `Im M(z)/Im z`, positive off the real axis.
    pub fn nevanlinna_min(&self, z: C64) -> Result<f64> {
        if z.im == 0.0 {
            return Err(TripleError::InvalidModel("Nevanlinna check needs Im z ≠ 0".into()));
        }
        let h = self.weyl_imag(z)?.scale_real(1.0 / z.im);
        Ok(hermitian_min(&h)?)
    }

    /// Identity residuals at the point pair `(z, w)`.
    ///
    /// * `weyl_difference`: `M(z) − M(w)* = (z − w̄)γ(w)*γ(z)`
    /// * `weyl_propagation`: `M(z) = M(w)* + (z − w̄)γ(w)*(I + (z − w)(A − z)⁻¹)γ(w)`
    /// * `weyl_derivative`: `M'(z) = γ(z̄)*γ(z)` with `M'` by finite difference
    /// * `weyl_derivative_closed_form`: the same with the closed-form `M'`
    /// * `weyl_conjugate`: `M(z̄) = M(z)*`
    /// * `gamma_defect`: `(A − z)γ(z) = (A − i)V`
    /// * `gamma_anchor`: `γ(z)` via anchors `i` and `2i`
    /// * `nevanlinna_*`: `Im M(z)/Im z` is positive definite and its smallest
    ///   eigenvalue is at least that of `γ(z)*γ(z)`. Both are recorded as
    ///   negated margins against tolerance 0.
    pub fn weyl_identity_residuals(&self, z: C64, w: C64) -> Result<IdentityReport> {
        let mut r = IdentityReport::default();
        let mz = self.weyl(z)?;
        let mw = self.weyl(w)?;
        let gz = self.gamma(z)?;
        let gw = self.gamma(w)?;

        let lhs = &mz - &mw.adjoint();
        let rhs = gw.adjoint().matmul(&gz).scale(z - w.conj());
        r.push("weyl_difference", scaled_diff(&lhs, &rhs, &[&mz, &mw, &rhs]), WEYL_TOL);

        let prop = self.gamma_from_anchor(z, w, &gw)?;
        let rhs = &mw.adjoint() + &gw.adjoint().matmul(&prop).scale(z - w.conj());
        r.push("weyl_propagation", scaled_diff(&mz, &rhs, &[&mz, &mw]), WEYL_TOL);

        let lit = self.weyl_derivative(z)?;
        let fd = self.weyl_derivative_fd(z)?;
        r.push("weyl_derivative", scaled_diff(&fd, &lit, &[&fd, &lit]), WEYL_TOL);
        let (_, closed) = self.weyl_with_derivative(z)?;
        r.push("weyl_derivative_closed_form", scaled_diff(&closed, &lit, &[&closed, &lit]), WEYL_TOL);

        let mc = self.weyl(z.conj())?;
        r.push("weyl_conjugate", scaled_diff(&mc, &mz.adjoint(), &[&mz]), WEYL_TOL);

        let lhs = self.a.shift_diagonal(-z).matmul(&gz);
        let rhs = self.a.shift_diagonal(-I).matmul(&self.v);
        r.push("gamma_defect", scaled_diff(&lhs, &rhs, &[&lhs, &rhs]), WEYL_TOL);

        let two_i = C64::new(0.0, 2.0);
        let via = self.gamma_from_anchor(z, two_i, &self.gamma(two_i)?)?;
        r.push("gamma_anchor", scaled_diff(&via, &gz, &[&gz]), WEYL_TOL);

        if z.im != 0.0 {
            let nev = self.nevanlinna_min(z)?;
            let gram = hermitian_min(&gz.adjoint().matmul(&gz))?;
            r.push("nevanlinna_positive", -nev, 0.0);
            r.push("nevanlinna_dominates_gamma", gram - nev - WEYL_TOL * nev.abs().max(1.0), 0.0);
        }
        Ok(r)
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn hermitian_min(h: &CMatrix) -> std::result::Result<f64, crate::numkit::NumError> {
    let sym = (h + &h.adjoint()).scale_real(0.5);
    Ok(eigenvalues(&sym)?.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn random_model(seed: u64, n: usize, m: usize) -> DonoghueModel {
        let mut rng = sampling::rng(seed);
        DonoghueModel::random(&mut rng, n, m, 2.0).unwrap()
    }

    #[test]
    fn anchor_values() {
        let m = random_model(1, 5, 2);
        assert!(m.gamma(I).unwrap().max_abs_diff(m.v()) < 1e-15);
        assert!(m.weyl(I).unwrap().max_abs_diff(&CMatrix::identity(2).scale(I)) < 1e-14);
        let z = C64::new(0.3, 0.7);
        let w = m.weyl(z).unwrap();
        assert!(m.weyl(z.conj()).unwrap().max_abs_diff(&w.adjoint()) < 1e-13);
    }

    #[test]
    fn two_by_two_hand_formula() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = DonoghueModel::new(
            CMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 2.0]),
            CMatrix::from_real(2, 1, &[s, s]),
        )
        .unwrap();
        let z = C64::new(1.0, 1.0);
        let expect = z + (z * z + 1.0) * (1.0 / -z + 1.0 / (2.0 - z)) / 2.0;
        assert!((m.weyl(z).unwrap()[(0, 0)] - expect).norm() < 1e-14);
    }

    #[test]
    fn identities_on_random_models() {
        for (seed, n, m) in [(2, 4, 1), (3, 8, 3), (4, 12, 4)] {
            let model = random_model(seed, n, m);
            let z = C64::new(0.4, 0.9);
            let w = C64::new(-1.1, -0.3);
            let r = model.weyl_identity_residuals(z, w).unwrap();
            assert!(r.passed(), "{r}");
            let r = model.weyl_identity_residuals(z, z.conj()).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn imaginary_part_at_i_is_identity() {
        let m = random_model(5, 6, 3);
        assert!(m.weyl_imag(I).unwrap().max_abs_diff(&CMatrix::identity(3)) < 1e-14);
        assert!((m.nevanlinna_min(I).unwrap() - 1.0).abs() < 1e-13);
        assert!(m.nevanlinna_min(C64::new(0.5, -0.2)).unwrap() > 0.0);
    }

    #[test]
    fn singular_at_spectrum() {
        let m = DonoghueModel::new(CMatrix::identity(2), CMatrix::from_real(2, 1, &[1.0, 0.0])).unwrap();
        assert!(matches!(m.weyl(C64::new(1.0, 0.0)), Err(TripleError::SingularSolve { .. })));
    }
}
