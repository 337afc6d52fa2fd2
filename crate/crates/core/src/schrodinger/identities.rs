use super::{Bc, Result, SchrodingerModel};
use crate::numkit::{inner, inverse, CMatrix, C64};
use crate::report::IdentityReport;

/// Tolerance for the exact summation-by-parts identity.
pub const GREEN_TOL: f64 = 1e-12;
/// Tolerance for identities that involve solves.
pub const IDENTITY_TOL: f64 = 1e-10;

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.rel_diff(b)
}

fn weighted(x: &[C64], y: &[C64], w: &[f64]) -> C64 {
    x.iter().zip(y).zip(w).map(|((a, b), w)| a * b.conj() * *w).sum()
}

/// Discrete second Green identity for two full grid functions:
/// `(ℒf, g) − (f, ℒ̃g) = (γ_D f, γ_N g) − (γ_N f, γ_D g)`, relative to the
/// size of the individual terms.
pub fn green_residual(model: &SchrodingerModel, f: &[C64], g: &[C64]) -> f64 {
    let l = model.stencil(false);
    let lt = model.stencil(true);
    let ni = model.interior_count();
    let wi = model.interior_weight();
    let (gd, gn) = (model.dirichlet_trace(), model.neumann_trace());
    let wb = model.boundary_weights();
    let lf = l.mat_vec(f);
    let ltg = lt.mat_vec(g);
    let a = inner(&lf, &g[..ni]) * wi;
    let b = inner(&f[..ni], &ltg) * wi;
    let c = weighted(&gd.mat_vec(f), &gn.mat_vec(g), wb);
    let d = weighted(&gn.mat_vec(f), &gd.mat_vec(g), wb);
    let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    ((a - b) - (c - d)).norm() / scale
}

/// The Green identity as a matrix on full grid functions:
/// `Rᴴ W_I ℒ − ℒ̃ᴴ W_I R − γ_Nᴴ W_B γ_D + γ_Dᴴ W_B γ_N = 0`, with `R` the
/// interior restriction. Returns the largest entry relative to the largest
/// entry of the individual terms.
pub fn green_matrix_residual(model: &SchrodingerModel) -> f64 {
    let (ni, n) = (model.interior_count(), model.full_count());
    let wi = model.interior_weight();
    let restrict = CMatrix::identity(ni).hstack(&CMatrix::zeros(ni, n - ni));
    let t1 = restrict.adjoint().matmul(&model.stencil(false)).scale_real(wi);
    let t2 = model.stencil(true).adjoint().matmul(&restrict).scale_real(wi);
    let (gd, gn) = (model.dirichlet_trace(), model.neumann_trace());
    let wb = model.boundary_weights();
    let t3 = gn.adjoint().matmul(&gd.scale_rows(wb));
    let t4 = gd.adjoint().matmul(&gn.scale_rows(wb));
    let total = &(&(&t1 - &t2) - &t3) + &t4;
    let scale = [&t1, &t2, &t3, &t4].iter().map(|t| t.norm_max()).fold(f64::MIN_POSITIVE, f64::max);
    total.norm_max() / scale
}

impl SchrodingerModel {
    /// `P(z)*` as an interior-to-boundary matrix for the given family.
    pub fn poisson_adjoint(&self, z: C64, conjugated: bool) -> Result<CMatrix> {
        Ok(self.adjoint_to_boundary(&self.poisson_interior(z, conjugated)?))
    }

    /// `(γ_N(Ã_D − z̄)⁻¹)` with the sign of the Poisson adjoint identity:
    /// `P(z)* = −γ_N(Ã_D − z̄)⁻¹ = H⁻¹E(Ã_D − z̄)⁻¹`.
    fn neumann_of_partner_resolvent(&self, z: C64, conjugated: bool) -> Result<CMatrix> {
        let r = Self::resolvent_of(&self.interior_operator(!conjugated), z.conj())?;
        let inv: Vec<f64> = self.normal_spacings().iter().map(|h| 1.0 / h).collect();
        Ok(self.adjacency().matmul(&r).scale_rows(&inv))
    }

    /// Relative residual of the Krein-type resolvent formula
    /// `(A_Θ − z)⁻¹ = (A_D − z)⁻¹ + P(z)(D(z) − Θ)⁻¹P̃(z̄)*`. With
    /// `conjugated`, the same formula for the adjoint family (`q̄`, `Θ*`).
    pub fn krein_residual(&self, theta: &CMatrix, z: C64, conjugated: bool) -> Result<f64> {
        self.check_theta(theta)?;
        let th = if conjugated { self.theta_star(theta) } else { theta.clone() };
        let a_t = self.assemble(&Bc::Robin(theta.clone()), conjugated)?;
        let lhs = Self::resolvent_of(&a_t, z)?;
        let r_d = Self::resolvent_of(&self.interior_operator(conjugated), z)?;
        let p = self.poisson_interior(z, conjugated)?;
        let partner = self.poisson_adjoint(z.conj(), !conjugated)?;
        let m = inverse(&(&self.dtn(z, conjugated)? - &th)).map_err(Self::singular(z))?;
        let rhs = &r_d + &p.matmul(&m).matmul(&partner);
        Ok(rel(&lhs, &rhs))
    }

    /// Residual report for the discrete identities at consecutive pairs of
    /// `points`: Green, Poisson adjoint, DtN difference and adjoint, Robin
    /// inverse difference, both propagation laws, Robin trace properties,
    /// Krein (both families), realization adjoints and the two derivative
    /// constructions.
    pub fn verify_identities(&self, theta: &CMatrix, points: &[C64]) -> Result<IdentityReport> {
        self.check_theta(theta)?;
        let mut rep = IdentityReport::default();
        rep.push("green_matrix", green_matrix_residual(self), GREEN_TOL);

        let a_t = self.assemble(&Bc::Robin(theta.clone()), false)?;
        let a_ts = self.assemble(&Bc::Robin(theta.clone()), true)?;
        rep.push("realization_adjoint_robin", rel(&a_ts, &self.interior_adjoint(&a_t)), IDENTITY_TOL);
        let a_d = self.interior_operator(false);
        rep.push(
            "realization_adjoint_dirichlet",
            rel(&self.interior_operator(true), &self.interior_adjoint(&a_d)),
            IDENTITY_TOL,
        );
        let nb = self.boundary_count();
        let eye = CMatrix::identity(nb);

        for (k, &z1) in points.iter().enumerate() {
            let z2 = points[(k + 1) % points.len()];
            let p1 = self.poisson_interior(z1, false)?;
            let p2 = self.poisson_interior(z2, false)?;

            rep.push(
                "poisson_adjoint",
                rel(&self.poisson_adjoint(z1, false)?, &self.neumann_of_partner_resolvent(z1, false)?),
                IDENTITY_TOL,
            );

            let lhs = &self.dtn(z1, false)? - &self.dtn(z2.conj(), false)?;
            let rhs = self.poisson_adjoint(z2, true)?.matmul(&p1).scale(z2.conj() - z1);
            rep.push("dtn_difference", rel(&lhs, &rhs), IDENTITY_TOL);

            let d1 = self.dtn(z1, false)?;
            rep.push(
                "dtn_adjoint",
                rel(&self.theta_star(&d1), &self.dtn(z1.conj(), true)?),
                IDENTITY_TOL,
            );

            let inv_d = |z: C64| -> Result<CMatrix> {
                inverse(&(&self.dtn(z, false)? - theta)).map_err(Self::singular(z))
            };
            let lhs = &inv_d(z1)? - &inv_d(z2.conj())?;
            let pt1 = self.robin_poisson(theta, z1, false)?.block(0, 0, self.interior_count(), nb);
            let pts2 = self.robin_poisson(theta, z2, true)?.block(0, 0, self.interior_count(), nb);
            let rhs = self.adjoint_to_boundary(&pts2).matmul(&pt1).scale(z1 - z2.conj());
            rep.push("robin_inverse_difference", rel(&lhs, &rhs), IDENTITY_TOL);

            let r1 = Self::resolvent_of(&a_d, z1)?;
            let prop = (&CMatrix::identity(a_d.rows()) + &r1.scale(z1 - z2)).matmul(&p2);
            rep.push("poisson_propagation", rel(&p1, &prop), IDENTITY_TOL);

            let pt2 = self.robin_poisson(theta, z2, false)?.block(0, 0, self.interior_count(), nb);
            let rt1 = Self::resolvent_of(&a_t, z1)?;
            let prop = (&CMatrix::identity(a_t.rows()) + &rt1.scale(z1 - z2)).matmul(&pt2);
            rep.push("robin_propagation", rel(&pt1, &prop), IDENTITY_TOL);

            let full = self.robin_poisson(theta, z1, false)?;
            rep.push(
                "robin_dirichlet_trace",
                rel(&self.dirichlet_trace().matmul(&full), &inv_d(z1)?),
                IDENTITY_TOL,
            );
            rep.push(
                "robin_boundary_condition",
                rel(&self.robin_trace(theta).matmul(&full), &eye),
                IDENTITY_TOL,
            );

            rep.push("krein", self.krein_residual(theta, z1, false)?, IDENTITY_TOL);
            rep.push("krein_adjoint", self.krein_residual(theta, z1.conj(), true)?, IDENTITY_TOL);

            let (_, fused) = self.dtn_with_derivative(z1, false)?;
            rep.push("dtn_prime_fused", rel(&self.dtn_prime(z1)?, &fused), IDENTITY_TOL);
        }
        Ok(rep)
    }
}
