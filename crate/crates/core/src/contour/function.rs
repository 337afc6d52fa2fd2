use thiserror::Error;

use super::ContourError;
use crate::numkit::{CMatrix, HessenbergForm, Lu, NumError, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("{0}")]
    Model(String),
}

/// A holomorphic matrix-valued function `z ↦ M(z)` of fixed shape.
pub trait HoloMatFun {
    fn shape(&self) -> (usize, usize);

    fn eval(&self, z: C64) -> Result<CMatrix, EvalError>;

    /// Analytic derivative, if the model has one.
    fn derivative(&self, _z: C64) -> Option<Result<CMatrix, EvalError>> {
        None
    }

    /// Value and analytic derivative together; override when both share work.
    fn eval_with_derivative(&self, z: C64) -> Result<(CMatrix, Option<CMatrix>), EvalError> {
        let m = self.eval(z)?;
        let d = self.derivative(z).transpose()?;
        Ok((m, d))
    }

    /// Points the caller declares to be possible poles.
    fn is_declared_singular(&self, _z: C64) -> bool {
        false
    }
}

impl<F: HoloMatFun + ?Sized> HoloMatFun for &F {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }
    fn eval(&self, z: C64) -> Result<CMatrix, EvalError> {
        (**self).eval(z)
    }
    fn derivative(&self, z: C64) -> Option<Result<CMatrix, EvalError>> {
        (**self).derivative(z)
    }
    fn eval_with_derivative(&self, z: C64) -> Result<(CMatrix, Option<CMatrix>), EvalError> {
        (**self).eval_with_derivative(z)
    }
    fn is_declared_singular(&self, z: C64) -> bool {
        (**self).is_declared_singular(z)
    }
}

type Eval = Box<dyn Fn(C64) -> Result<CMatrix, EvalError> + Send + Sync>;

/// Closure-backed `HoloMatFun`.
pub struct MatFn {
    shape: (usize, usize),
    f: Eval,
    df: Option<Eval>,
    singular: Vec<C64>,
    singular_tol: f64,
}

impl MatFn {
    pub fn new(
        rows: usize,
        cols: usize,
        f: impl Fn(C64) -> Result<CMatrix, EvalError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            shape: (rows, cols),
            f: Box::new(f),
            df: None,
            singular: Vec::new(),
            singular_tol: 0.0,
        }
    }

    /// Infallible variant for closed-form functions.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(C64) -> CMatrix + Send + Sync + 'static) -> Self {
        Self::new(rows, cols, move |z| Ok(f(z)))
    }

    pub fn with_derivative(mut self, df: impl Fn(C64) -> CMatrix + Send + Sync + 'static) -> Self {
        self.df = Some(Box::new(move |z| Ok(df(z))));
        self
    }

    /// Declares `points` as possible poles; nodes within `tol` of one are rejected.
    pub fn with_singularities(mut self, points: Vec<C64>, tol: f64) -> Self {
        self.singular = points;
        self.singular_tol = tol;
        self
    }

    /// Scalar function as a 1×1 matrix function.
    pub fn scalar(f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        Self::from_fn(1, 1, move |z| CMatrix::from_vec(1, 1, vec![f(z)]))
    }
}

impl HoloMatFun for MatFn {
    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn eval(&self, z: C64) -> Result<CMatrix, EvalError> {
        (self.f)(z)
    }

    fn derivative(&self, z: C64) -> Option<Result<CMatrix, EvalError>> {
        self.df.as_ref().map(|d| d(z))
    }

    fn is_declared_singular(&self, z: C64) -> bool {
        self.singular.iter().any(|&p| (p - z).norm() <= self.singular_tol)
    }
}

/// Resolvent `ζ ↦ (T − ζ)⁻¹` of a square matrix, with derivative `(T − ζ)⁻²`.
#[derive(Clone, Debug)]
pub struct Resolvent {
    t: CMatrix,
}

impl Resolvent {
    pub fn new(t: CMatrix) -> Result<Self, NumError> {
        if !t.is_square() {
            return Err(NumError::NotSquare { rows: t.rows(), cols: t.cols() });
        }
        t.check_finite()?;
        Ok(Self { t })
    }

    pub fn operator(&self) -> &CMatrix {
        &self.t
    }
}

impl HoloMatFun for Resolvent {
    fn shape(&self) -> (usize, usize) {
        self.t.shape()
    }

    fn eval(&self, z: C64) -> Result<CMatrix, EvalError> {
        Ok(Lu::factor(&self.t.shift_diagonal(-z))?.inverse())
    }

    fn eval_with_derivative(&self, z: C64) -> Result<(CMatrix, Option<CMatrix>), EvalError> {
        let r = self.eval(z)?;
        let d = r.matmul(&r);
        Ok((r, Some(d)))
    }

    fn derivative(&self, z: C64) -> Option<Result<CMatrix, EvalError>> {
        Some(self.eval(z).map(|r| r.matmul(&r)))
    }
}

/// `ζ ↦ tr (T − ζ)⁻¹` as a 1×1 function. Integrating it gives the trace of
/// the Riesz projection at O(n²) cost per node, via a Hessenberg form of `T`.
#[derive(Clone, Debug)]
pub struct ResolventTrace {
    form: HessenbergForm,
}

impl ResolventTrace {
    pub fn new(t: &CMatrix) -> Result<Self, NumError> {
        Ok(Self { form: HessenbergForm::new(t)? })
    }
}

impl HoloMatFun for ResolventTrace {
    fn shape(&self) -> (usize, usize) {
        (1, 1)
    }

    fn eval(&self, z: C64) -> Result<CMatrix, EvalError> {
        Ok(CMatrix::from_vec(1, 1, vec![self.form.resolvent_trace(z)?]))
    }
}

/// Value and derivative at `z`, falling back to a validated central
/// difference when no analytic derivative exists. The step starts at
/// `radius·2⁻²⁰` and is halved twice; the halved-step estimate is accepted
/// when the successive differences shrink or sit below roundoff level.
pub(crate) fn value_and_derivative<F: HoloMatFun + ?Sized>(
    f: &F,
    z: C64,
    radius: f64,
) -> Result<(CMatrix, CMatrix), ContourError> {
    let eval = |p: C64| f.eval(p).map_err(|source| ContourError::Eval { point: p, source });
    let (m, d) = f
        .eval_with_derivative(z)
        .map_err(|source| ContourError::Eval { point: z, source })?;
    if let Some(d) = d {
        return Ok((m, d));
    }
    let h0 = radius * 2f64.powi(-20);
    let central = |h: f64| -> Result<(CMatrix, f64), ContourError> {
        let hp = C64::new(h, 0.0);
        let a = eval(z + hp)?;
        let b = eval(z - hp)?;
        let scale = a.norm_fro().max(b.norm_fro());
        Ok(((&a - &b).scale_real(0.5 / h), scale))
    };
    let (d1, s1) = central(h0)?;
    let (d2, s2) = central(h0 / 2.0)?;
    let (d3, s3) = central(h0 / 4.0)?;
    let e1 = (&d1 - &d2).norm_fro();
    let e2 = (&d2 - &d3).norm_fro();
    // roundoff in a central difference at the smallest step
    let noise = 64.0 * f64::EPSILON * s1.max(s2).max(s3).max(m.norm_fro()) / (h0 / 4.0);
    if e2 <= e1 || e2 <= noise {
        Ok((m, d2))
    } else {
        Err(ContourError::DerivativeUnstable { point: z, coarse: e1, fine: e2 })
    }
}
