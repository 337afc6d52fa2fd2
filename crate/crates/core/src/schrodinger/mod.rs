//! Finite-difference Schrödinger operators `−Δ + q` on an interval or a
//! rectangle, with discrete Dirichlet/Neumann traces, Dirichlet, Neumann and
//! Robin realizations, Poisson operators and Dirichlet-to-Neumann maps.
//!
//! Grid functions are full vectors `[interior; boundary]`. Interior nodes of
//! a rectangle are numbered `i + nx·j`; boundary nodes run left edge, right
//! edge, bottom edge, top edge, each in increasing coordinate. Corners are
//! not grid nodes since the 5-point stencil never reaches them.
//!
//! Traces and weights are chosen so that the discrete second Green identity
//! holds exactly:
//!
//! * `γ_D f = f_B`, `γ_N f = (f_b − f_adj(b)) / h_b` with `h_b` the spacing
//!   normal to the edge of `b`;
//! * interior weight `h` (interval) or `hx·hy` (rectangle);
//! * boundary weight 1 (interval) or the tangential spacing (rectangle).

mod identities;
mod index;
mod ops;

use thiserror::Error;

use crate::contour::ContourError;
use crate::numkit::{CMatrix, NumError, C64, ONE};

pub use identities::{green_matrix_residual, green_residual};
pub use index::{conjugate_spectrum_mismatch, index_vs_multiplicity, DtnFamily, IndexProblem, IndexVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchrodingerError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("potential has {found} values, expected {expected}")]
    PotentialLength { expected: usize, found: usize },
    #[error("potential value at interior node {0} is not finite")]
    NonFinitePotential(usize),
    #[error("Robin parameter is {found:?}, expected {expected}x{expected}")]
    ThetaShape { expected: usize, found: (usize, usize) },
    #[error("boundary elimination is singular for this Robin parameter")]
    BoundaryEliminationSingular,
    #[error("singular solve at z = {z}: {source}")]
    SingularSolve {
        z: C64,
        #[source]
        source: NumError,
    },
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Num(#[from] NumError),
}

pub type Result<T> = std::result::Result<T, SchrodingerError>;

#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Interval { n: usize, length: f64 },
    Rectangle { nx: usize, ny: usize, lx: f64, ly: f64 },
}

impl Grid {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SchrodingerError::InvalidGrid(m));
        match *self {
            Grid::Interval { n, length } => {
                if n == 0 {
                    return bad("interval needs at least one interior node".into());
                }
                if !(length > 0.0) || !length.is_finite() {
                    return bad(format!("length must be positive, got {length}"));
                }
            }
            Grid::Rectangle { nx, ny, lx, ly } => {
                if nx == 0 || ny == 0 {
                    return bad(format!("rectangle needs interior nodes on both axes, got {nx}x{ny}"));
                }
                for (name, l) in [("lx", lx), ("ly", ly)] {
                    if !(l > 0.0) || !l.is_finite() {
                        return bad(format!("{name} must be positive, got {l}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn interior_count(&self) -> usize {
        match *self {
            Grid::Interval { n, .. } => n,
            Grid::Rectangle { nx, ny, .. } => nx * ny,
        }
    }

    pub fn boundary_count(&self) -> usize {
        match *self {
            Grid::Interval { .. } => 2,
            Grid::Rectangle { nx, ny, .. } => 2 * nx + 2 * ny,
        }
    }

    /// Coordinates of the interior nodes.
    pub fn interior_points(&self) -> Vec<(f64, f64)> {
        match *self {
            Grid::Interval { n, length } => {
                let h = length / (n + 1) as f64;
                (1..=n).map(|i| (i as f64 * h, 0.0)).collect()
            }
            Grid::Rectangle { nx, ny, lx, ly } => {
                let hx = lx / (nx + 1) as f64;
                let hy = ly / (ny + 1) as f64;
                let mut pts = Vec::with_capacity(nx * ny);
                for j in 1..=ny {
                    for i in 1..=nx {
                        pts.push((i as f64 * hx, j as f64 * hy));
                    }
                }
                pts
            }
        }
    }
}

/// Boundary condition selecting a realization on the interior space.
#[derive(Clone, Debug, PartialEq)]
pub enum Bc {
    Dirichlet,
    Neumann,
    /// `Θ γ_D f = γ_N f`.
    Robin(CMatrix),
}

#[derive(Clone, Debug)]
pub struct SchrodingerModel {
    grid: Grid,
    q: Vec<C64>,
    /// `−Δ_h` on interior nodes.
    lap: CMatrix,
    /// Interior-boundary coupling of the stencil.
    l_ib: CMatrix,
    /// Interior neighbour of each boundary node.
    adj: Vec<usize>,
    /// Spacing normal to the edge, per boundary node.
    hb: Vec<f64>,
    /// Boundary weights.
    wb: Vec<f64>,
    /// Uniform interior weight.
    wi: f64,
}

impl SchrodingerModel {
    /// Builds the model from interior potential values.
    pub fn new(grid: Grid, q: Vec<C64>) -> Result<Self> {
        grid.validate()?;
        let ni = grid.interior_count();
        if q.len() != ni {
            return Err(SchrodingerError::PotentialLength { expected: ni, found: q.len() });
        }
        if let Some(k) = q.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SchrodingerError::NonFinitePotential(k));
        }
        let nb = grid.boundary_count();
        let mut lap = CMatrix::zeros(ni, ni);
        let mut l_ib = CMatrix::zeros(ni, nb);
        let mut adj = Vec::with_capacity(nb);
        let mut hb = Vec::with_capacity(nb);
        let mut wb = Vec::with_capacity(nb);
        let wi;
        match grid {
            Grid::Interval { n, length } => {
                let h = length / (n + 1) as f64;
                let s = 1.0 / (h * h);
                for i in 0..n {
                    lap[(i, i)] = C64::new(2.0 * s, 0.0);
                    if i > 0 {
                        lap[(i, i - 1)] = C64::new(-s, 0.0);
                    }
                    if i + 1 < n {
                        lap[(i, i + 1)] = C64::new(-s, 0.0);
                    }
                }
                adj.extend([0, n - 1]);
                hb.extend([h, h]);
                wb.extend([1.0, 1.0]);
                wi = h;
            }
            Grid::Rectangle { nx, ny, lx, ly } => {
                let hx = lx / (nx + 1) as f64;
                let hy = ly / (ny + 1) as f64;
                let (sx, sy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
                let idx = |i: usize, j: usize| i + nx * j;
                for j in 0..ny {
                    for i in 0..nx {
                        let k = idx(i, j);
                        lap[(k, k)] = C64::new(2.0 * sx + 2.0 * sy, 0.0);
                        if i > 0 {
                            lap[(k, idx(i - 1, j))] = C64::new(-sx, 0.0);
                        }
                        if i + 1 < nx {
                            lap[(k, idx(i + 1, j))] = C64::new(-sx, 0.0);
                        }
                        if j > 0 {
                            lap[(k, idx(i, j - 1))] = C64::new(-sy, 0.0);
                        }
                        if j + 1 < ny {
                            lap[(k, idx(i, j + 1))] = C64::new(-sy, 0.0);
                        }
                    }
                }
                for j in 0..ny {
                    adj.push(idx(0, j));
                    hb.push(hx);
                    wb.push(hy);
                }
                for j in 0..ny {
                    adj.push(idx(nx - 1, j));
                    hb.push(hx);
                    wb.push(hy);
                }
                for i in 0..nx {
                    adj.push(idx(i, 0));
                    hb.push(hy);
                    wb.push(hx);
                }
                for i in 0..nx {
                    adj.push(idx(i, ny - 1));
                    hb.push(hy);
                    wb.push(hx);
                }
                wi = hx * hy;
            }
        }
        for (b, (&a, &h)) in adj.iter().zip(&hb).enumerate() {
            l_ib[(a, b)] = C64::new(-1.0 / (h * h), 0.0);
        }
        Ok(Self { grid, q, lap, l_ib, adj, hb, wb, wi })
    }

    /// Builds the model sampling `q` at interior node coordinates.
    pub fn build(grid: Grid, mut q: impl FnMut(f64, f64) -> C64) -> Result<Self> {
        grid.validate()?;
        let values = grid.interior_points().into_iter().map(|(x, y)| q(x, y)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &[C64] {
        &self.q
    }

    pub fn interior_count(&self) -> usize {
        self.lap.rows()
    }

    pub fn boundary_count(&self) -> usize {
        self.hb.len()
    }

    pub fn full_count(&self) -> usize {
        self.interior_count() + self.boundary_count()
    }

    pub fn interior_weight(&self) -> f64 {
        self.wi
    }

    pub fn boundary_weights(&self) -> &[f64] {
        &self.wb
    }

    pub fn normal_spacings(&self) -> &[f64] {
        &self.hb
    }

    pub fn adjacent_interior(&self) -> &[usize] {
        &self.adj
    }

    /// `L_II = −Δ_h + diag(q)`, or with `q̄` when conjugated. Equals `A_D`.
    pub fn interior_operator(&self, conjugated: bool) -> CMatrix {
        let mut m = self.lap.clone();
        for (i, &q) in self.q.iter().enumerate() {
            m[(i, i)] += if conjugated { q.conj() } else { q };
        }
        m
    }

    /// Interior-boundary block `L_IB` of the stencil; real and independent of `q`.
    pub fn coupling(&self) -> &CMatrix {
        &self.l_ib
    }

    /// `ℒ` (or `ℒ̃`) as an `ni × (ni + nb)` matrix on full grid functions.
    pub fn stencil(&self, conjugated: bool) -> CMatrix {
        self.interior_operator(conjugated).hstack(&self.l_ib)
    }

    /// Dirichlet trace as an `nb × (ni + nb)` matrix.
    pub fn dirichlet_trace(&self) -> CMatrix {
        let (ni, nb) = (self.interior_count(), self.boundary_count());
        CMatrix::zeros(nb, ni).hstack(&CMatrix::identity(nb))
    }

    /// Neumann trace as an `nb × (ni + nb)` matrix.
    pub fn neumann_trace(&self) -> CMatrix {
        let ni = self.interior_count();
        let mut g = CMatrix::zeros(self.boundary_count(), self.full_count());
        for (b, (&a, &h)) in self.adj.iter().zip(&self.hb).enumerate() {
            g[(b, ni + b)] = C64::new(1.0 / h, 0.0);
            g[(b, a)] = C64::new(-1.0 / h, 0.0);
        }
        g
    }

    /// Selection `E`: row `b` picks the interior neighbour of boundary node `b`.
    pub fn adjacency(&self) -> CMatrix {
        let mut e = CMatrix::zeros(self.boundary_count(), self.interior_count());
        for (b, &a) in self.adj.iter().enumerate() {
            e[(b, a)] = ONE;
        }
        e
    }

    pub fn check_theta(&self, theta: &CMatrix) -> Result<()> {
        let nb = self.boundary_count();
        if theta.shape() != (nb, nb) {
            return Err(SchrodingerError::ThetaShape { expected: nb, found: theta.shape() });
        }
        theta.check_finite()?;
        Ok(())
    }

    /// Adjoint of a boundary operator under the boundary weights, `W_B⁻¹ Θᴴ W_B`.
    pub fn theta_star(&self, theta: &CMatrix) -> CMatrix {
        let inv: Vec<f64> = self.wb.iter().map(|w| 1.0 / w).collect();
        theta.adjoint().scale_rows(&inv).scale_cols(&self.wb)
    }

    /// Adjoint of an operator from boundary to interior space, `W_B⁻¹ Xᴴ W_I`.
    pub fn adjoint_to_boundary(&self, x: &CMatrix) -> CMatrix {
        let inv: Vec<f64> = self.wb.iter().map(|w| 1.0 / w).collect();
        x.adjoint().scale_rows(&inv).scale_real(self.wi)
    }

    /// Adjoint of an interior-space operator, `W_I⁻¹ Xᴴ W_I = Xᴴ`.
    pub fn interior_adjoint(&self, x: &CMatrix) -> CMatrix {
        x.adjoint()
    }

    /// Realization on the interior space. Neumann and Robin conditions are
    /// imposed by eliminating boundary values: `f_B = (I − HΘ)⁻¹ E f_I` where
    /// `H = diag(h_b)`, giving `A_Θ = L_II + L_IB (I − HΘ)⁻¹ E`. With
    /// `conjugated`, `q` becomes `q̄` and `Θ` becomes `Θ*`.
    pub fn assemble(&self, bc: &Bc, conjugated: bool) -> Result<CMatrix> {
        let a_d = self.interior_operator(conjugated);
        let theta = match bc {
            Bc::Dirichlet => return Ok(a_d),
            Bc::Neumann => CMatrix::zeros(self.boundary_count(), self.boundary_count()),
            Bc::Robin(t) => {
                self.check_theta(t)?;
                if conjugated {
                    self.theta_star(t)
                } else {
                    t.clone()
                }
            }
        };
        let elim = CMatrix::identity(self.boundary_count()) - theta.scale_rows(&self.hb);
        let fb = crate::numkit::lu_solve(&elim, &self.adjacency()).map_err(|e| match e {
            NumError::SingularMatrix { .. } => SchrodingerError::BoundaryEliminationSingular,
            other => other.into(),
        })?;
        Ok(&a_d + &self.l_ib.matmul(&fb))
    }

    /// `(γ_N − Θγ_D)` as an `nb × (ni + nb)` matrix.
    pub fn robin_trace(&self, theta: &CMatrix) -> CMatrix {
        let mut g = self.neumann_trace();
        let ni = self.interior_count();
        for b in 0..self.boundary_count() {
            for c in 0..self.boundary_count() {
                g[(b, ni + c)] -= theta[(b, c)];
            }
        }
        g
    }

    pub(crate) fn singular(z: C64) -> impl FnOnce(NumError) -> SchrodingerError {
        move |e| match e {
            NumError::SingularMatrix { .. } => SchrodingerError::SingularSolve { z, source: e },
            other => other.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::ZERO;

    fn hand() -> SchrodingerModel {
        SchrodingerModel::new(Grid::Interval { n: 1, length: 2.0 }, vec![ZERO]).unwrap()
    }

    #[test]
    fn hand_fixture_realizations() {
        let m = hand();
        assert_eq!(m.assemble(&Bc::Dirichlet, false).unwrap()[(0, 0)], C64::new(2.0, 0.0));
        assert!(m.assemble(&Bc::Neumann, false).unwrap()[(0, 0)].norm() < 1e-15);
        let theta = CMatrix::from_real(2, 2, &[0.3, 1.0, -2.0, 0.5]);
        assert_eq!(
            m.assemble(&Bc::Robin(theta), false).unwrap().rows(),
            m.assemble(&Bc::Dirichlet, false).unwrap().rows()
        );
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            SchrodingerModel::new(Grid::Interval { n: 0, length: 1.0 }, vec![]),
            Err(SchrodingerError::InvalidGrid(_))
        ));
        assert!(matches!(
            SchrodingerModel::build(Grid::Rectangle { nx: 2, ny: 2, lx: -1.0, ly: 1.0 }, |_, _| ZERO),
            Err(SchrodingerError::InvalidGrid(_))
        ));
        assert!(matches!(
            SchrodingerModel::new(Grid::Interval { n: 2, length: 1.0 }, vec![ZERO]),
            Err(SchrodingerError::PotentialLength { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn singular_elimination() {
        // I − HΘ = 0 for Θ = H⁻¹
        let m = hand();
        let theta = CMatrix::identity(2);
        assert!(matches!(
            m.assemble(&Bc::Robin(theta), false),
            Err(SchrodingerError::BoundaryEliminationSingular)
        ));
    }

    #[test]
    fn rectangle_layout() {
        let m = SchrodingerModel::build(Grid::Rectangle { nx: 3, ny: 2, lx: 4.0, ly: 3.0 }, |_, _| ZERO).unwrap();
        assert_eq!((m.interior_count(), m.boundary_count()), (6, 10));
        assert_eq!(m.adjacent_interior(), &[0, 3, 2, 5, 0, 1, 2, 3, 4, 5]);
        assert_eq!(m.interior_weight(), 1.0);
        assert_eq!(m.boundary_weights()[0], 1.0);
        // each interior row of the stencil sums to zero for constant functions
        let s = m.stencil(false);
        for i in 0..6 {
            assert!(s.row(i).iter().sum::<C64>().norm() < 1e-14);
        }
    }
}
