use std::fmt::{Display, Write as _};

use rand::Rng;

use super::scenario::{Model, Scenario, Task, DEFAULT_SCENARIO_NODES};
use super::CliError;
use crate::btriple::{DonoghueModel, ThetaMinusWeyl, TripleIndexProblem, TripleVerdict};
use crate::contour::{
    generalized_index, index_with_winding, isolating_contours, multiplicity_report, Contour, ContourError, EvalError,
    HoloMatFun, IndexReport, ResolventTrace,
};
use crate::numkit::{eig_cluster, CMatrix, NumError, C64};
use crate::report::IdentityReport;
use crate::sampling::{self, GENERATOR_NAME};
use crate::schrodinger::{conjugate_spectrum_mismatch, Bc, DtnFamily, IndexProblem, IndexVerdict, SchrodingerModel};

/// Krein residual tolerance used by `verify`.
pub const KREIN_TOL: f64 = 1e-9;
/// Conjugate spectral matching tolerance used by `verify`.
pub const CONJUGATE_TOL: f64 = 1e-8;
/// Random points drawn per identity family in `verify`.
pub const VERIFY_POINTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    NumericalFailure,
    Disagreement,
}

#[derive(Clone, Debug)]
pub struct Output {
    pub text: String,
    pub status: Status,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, status: Status::Ok }
    }
}

fn numerical(e: impl Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Adding `0.0` folds `-0.0` into `0.0`.
fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// `M(z) = D(z) − Θₖ` or `Θₖ − M(z)`, one per scenario `Θ`.
fn families(s: &Scenario) -> Result<Vec<Box<dyn HoloMatFun + '_>>, CliError> {
    s.thetas
        .iter()
        .map(|t| -> Result<Box<dyn HoloMatFun + '_>, CliError> {
            Ok(match &s.model {
                Model::Schrodinger(m) => Box::new(DtnFamily::new(m, t, false).map_err(numerical)?),
                Model::Donoghue(m) => Box::new(ThetaMinusWeyl::new(m, t).map_err(numerical)?),
            })
        })
        .collect()
}

fn second_theta(s: &Scenario) -> &CMatrix {
    s.thetas.get(1).unwrap_or(&s.thetas[0])
}

/// Scenario contours, or isolating circles around the joint spectrum when none are given.
pub fn contours(s: &Scenario) -> Result<Vec<Contour>, CliError> {
    if !s.contours.is_empty() {
        return Ok(s.contours.clone());
    }
    match &s.model {
        Model::Schrodinger(m) => {
            let mut pts = Vec::new();
            let mut scale: f64 = 1.0;
            for t in &s.thetas {
                let p = IndexProblem::new(m, t, false).map_err(numerical)?;
                scale = scale.max(p.a_theta.norm_fro()).max(p.a_dirichlet.norm_fro());
                pts.extend(p.spectrum());
            }
            Ok(isolating_contours(&pts, 1e-9 * scale, DEFAULT_SCENARIO_NODES))
        }
        Model::Donoghue(m) => {
            let p = TripleIndexProblem::new(m, &s.thetas[0], second_theta(s)).map_err(numerical)?;
            Ok(p.isolating_contours(DEFAULT_SCENARIO_NODES))
        }
    }
}

fn winding_cell(w: &Result<IndexReport, ContourError>) -> String {
    match w {
        Ok(r) => r.rounded.to_string(),
        Err(_) => "NA".into(),
    }
}

/// One row per `Θ` and contour with the generalized index and the
/// determinant-winding cross-check.
pub fn cmd_index(s: &Scenario) -> Result<Output, CliError> {
    s.require(Task::Index)?;
    let fams = families(s)?;
    let cs = contours(s)?;
    let mut rows = Vec::new();
    for c in &cs {
        for (k, f) in fams.iter().enumerate() {
            let (r, w) = index_with_winding(f.as_ref(), c).map_err(numerical)?;
            rows.push(vec![
                "index".into(),
                num(c.center.re),
                num(c.center.im),
                num(c.radius),
                num(r.raw.re),
                num(r.raw.im),
                r.rounded.to_string(),
                num(r.residual),
                num(r.refinement_gap),
                r.accepted().to_string(),
                winding_cell(&w),
                k.to_string(),
            ]);
        }
    }
    let header = [
        "task", "center_re", "center_im", "radius", "raw_re", "raw_im", "rounded", "residual",
        "refinement_gap", "accepted", "winding", "theta",
    ];
    Ok(Output::ok(csv_text(&header, rows)?))
}

/// Operators whose multiplicities the scenario compares, with display names.
fn operators(s: &Scenario) -> Result<Vec<(String, CMatrix)>, CliError> {
    let mut ops = Vec::new();
    match &s.model {
        Model::Schrodinger(m) => {
            ops.push(("A_D".to_string(), m.interior_operator(false)));
            for (k, t) in s.thetas.iter().enumerate() {
                ops.push((format!("A_theta[{k}]"), m.assemble(&Bc::Robin(t.clone()), false).map_err(numerical)?));
            }
        }
        Model::Donoghue(m) => {
            ops.push(("A".to_string(), m.a().clone()));
            for (k, t) in s.thetas.iter().enumerate() {
                ops.push((format!("B[{k}]"), m.extension(t).map_err(numerical)?));
            }
        }
    }
    Ok(ops)
}

/// Riesz-projection traces and eigenvalue-oracle counts per contour and operator.
pub fn cmd_mult(s: &Scenario) -> Result<Output, CliError> {
    s.require(Task::Multiplicity)?;
    let cs = contours(s)?;
    let ops = operators(s)?;
    let prepared = ops
        .iter()
        .map(|(name, a)| {
            let tol = 1e-7 * a.norm_fro().max(1.0);
            Ok((name, ResolventTrace::new(a)?, eig_cluster(a, tol)?))
        })
        .collect::<Result<Vec<_>, NumError>>()
        .map_err(numerical)?;
    let mut rows = Vec::new();
    for c in &cs {
        for (name, rt, oracle) in &prepared {
            let r = multiplicity_report(rt, c).map_err(numerical)?;
            rows.push(vec![
                "multiplicity".into(),
                name.to_string(),
                num(c.center.re),
                num(c.center.im),
                num(c.radius),
                num(r.raw.re),
                num(r.raw.im),
                r.rounded.to_string(),
                num(r.residual),
                num(r.refinement_gap),
                r.accepted().to_string(),
                oracle.count_in_disk(c.center, c.radius).to_string(),
            ]);
        }
    }
    let header = [
        "task", "operator", "center_re", "center_im", "radius", "raw_re", "raw_im", "rounded", "residual",
        "refinement_gap", "accepted", "oracle",
    ];
    Ok(Output::ok(csv_text(&header, rows)?))
}

fn probe_status(r: &Result<IndexReport, ContourError>) -> &'static str {
    match r {
        Ok(r) if r.accepted() => "ok",
        Ok(_) => "rejected",
        Err(ContourError::NearSingularContour { .. }) => "near_singular",
        Err(ContourError::Eval { source: EvalError::Num(NumError::SingularMatrix { .. }), .. }) => "near_singular",
        Err(_) => "error",
    }
}

/// Local index of the first `Θ` family on a grid of probe circles. Singular
/// probes are annotated in the `status` column.
pub fn cmd_scan(s: &Scenario) -> Result<Output, CliError> {
    s.require(Task::Scan)?;
    let scan = s
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Config { field: "scan".into(), message: "scan window is not set".into() })?;
    let fams = families(s)?;
    let f = &fams[0];
    let mut rows = Vec::new();
    for center in scan.centers() {
        let c = Contour::new(center, scan.radius, scan.nodes).map_err(|e| CliError::Config {
            field: "scan".into(),
            message: e.to_string(),
        })?;
        let r = generalized_index(f.as_ref(), &c);
        let status = probe_status(&r);
        let (rounded, residual) = match &r {
            Ok(r) => (r.rounded.to_string(), num(r.residual)),
            Err(_) => ("NA".into(), "NA".into()),
        };
        rows.push(vec![num(center.re), num(center.im), rounded, residual, status.into()]);
    }
    Ok(Output::ok(csv_text(&["center_re", "center_im", "rounded", "residual", "status"], rows)?))
}

/// Random points away from `poles`, off the real axis by at least 0.1.
fn sample_points<R: Rng>(rng: &mut R, poles: &[C64], count: usize) -> Vec<C64> {
    let (mut lo, mut hi, mut ilo, mut ihi) = (-2.0f64, 2.0f64, -2.0f64, 2.0f64);
    for p in poles {
        lo = lo.min(p.re - 1.0);
        hi = hi.max(p.re + 1.0);
        ilo = ilo.min(p.im - 1.0);
        ihi = ihi.max(p.im + 1.0);
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = sampling::complex_box(rng, (lo, hi), (ilo, ihi));
        let clear = poles.iter().all(|p| (z - p).norm() >= 0.1);
        if z.im.abs() >= 0.1 && clear {
            out.push(z);
        }
    }
    out
}

struct VerifyLog {
    text: String,
    failed: usize,
    passed: usize,
    errors: usize,
}

impl VerifyLog {
    fn line(&mut self, ok: bool, body: impl Display) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        let _ = writeln!(self.text, "{} {body}", if ok { "PASS" } else { "FAIL" });
    }

    fn identities(&mut self, prefix: &str, rep: &IdentityReport) {
        for c in &rep.checks {
            self.line(c.passed(), format_args!("{prefix}{} residual={:.3e} tol={:.1e}", c.name, c.residual, c.tol));
        }
    }

    fn error(&mut self, what: &str, e: impl Display) {
        self.errors += 1;
        self.line(false, format_args!("{what} error=\"{e}\""));
    }
}

fn fmt_c(z: C64) -> String {
    format!("({:.6e},{:.6e})", z.re + 0.0, z.im + 0.0)
}

fn worst(reports: &[&IndexReport]) -> (f64, f64) {
    reports.iter().fold((0.0f64, 0.0f64), |(r, g), x| (r.max(x.residual), g.max(x.refinement_gap)))
}

fn schrodinger_index_line(k: usize, conj: bool, v: &IndexVerdict) -> String {
    let (res, gap) = worst(&[&v.index, &v.ma_theta, &v.ma_dirichlet]);
    format!(
        "index theta={k} adjoint={conj} center={} radius={:.6e} index={} ma_theta={} ma_dirichlet={} oracle={}/{} winding={} residual={res:.3e} gap={gap:.3e}",
        fmt_c(v.contour.center),
        v.contour.radius,
        v.index.rounded,
        v.ma_theta.rounded,
        v.ma_dirichlet.rounded,
        v.oracle_theta,
        v.oracle_dirichlet,
        winding_cell(&v.winding),
    )
}

fn triple_index_line(v: &TripleVerdict) -> String {
    let (res, gap) = worst(&[&v.index1, &v.index2, &v.ma_b1, &v.ma_b2, &v.ma_a]);
    format!(
        "index_difference center={} radius={:.6e} ind1={} ind2={} ma_b1={} ma_b2={} ma_a={} oracle={}/{}/{} winding={}/{} residual={res:.3e} gap={gap:.3e}",
        fmt_c(v.contour.center),
        v.contour.radius,
        v.index1.rounded,
        v.index2.rounded,
        v.ma_b1.rounded,
        v.ma_b2.rounded,
        v.ma_a.rounded,
        v.oracle_b1,
        v.oracle_b2,
        v.oracle_a,
        winding_cell(&v.winding1),
        winding_cell(&v.winding2),
    )
}

fn shifted(theta: &CMatrix, shift: Option<C64>) -> CMatrix {
    match shift {
        Some(d) => theta.shift_diagonal(d),
        None => theta.clone(),
    }
}

fn verify_schrodinger(s: &Scenario, m: &SchrodingerModel, log: &mut VerifyLog) {
    let mut rng = sampling::rng(s.seed);
    let cs = match contours(s) {
        Ok(cs) => cs,
        Err(e) => return log.error("contours", e),
    };
    for (k, theta) in s.thetas.iter().enumerate() {
        let mut poles = Vec::new();
        for conj in [false, true] {
            let problem = IndexProblem::new(m, theta, conj).map(|mut p| {
                if s.theta_shift.is_some() {
                    // the realizations keep Θ, the family sees the corrupted one
                    if let Ok(f) = DtnFamily::new(m, &shifted(theta, s.theta_shift), conj) {
                        p.family = f;
                    }
                }
                p
            });
            let problem = match problem {
                Ok(p) => p,
                Err(e) => return log.error(&format!("theta={k} adjoint={conj}"), e),
            };
            poles.extend(problem.spectrum());
            for c in &cs {
                let c = if conj { Contour { center: c.center.conj(), ..*c } } else { *c };
                match problem.check(&c) {
                    Ok(v) => log.line(v.agree(), schrodinger_index_line(k, conj, &v)),
                    Err(e) => log.error(&format!("index theta={k} adjoint={conj} center={}", fmt_c(c.center)), e),
                }
            }
        }
        let points = sample_points(&mut rng, &poles, VERIFY_POINTS);
        match m.verify_identities(theta, &points) {
            Ok(rep) => log.identities(&format!("theta={k} "), &rep),
            Err(e) => log.error(&format!("identities theta={k}"), e),
        }
        let mut krein = IdentityReport::default();
        for &z in &points {
            match m.krein_residual(theta, z, false) {
                Ok(r) => krein.push(format!("krein z={}", fmt_c(z)), r, KREIN_TOL),
                Err(e) => return log.error(&format!("krein theta={k}"), e),
            }
        }
        log.identities(&format!("theta={k} "), &krein);
        match conjugate_spectrum_mismatch(m, theta) {
            Ok(d) => log.line(
                d < CONJUGATE_TOL,
                format_args!("theta={k} conjugate_spectrum residual={d:.3e} tol={CONJUGATE_TOL:.1e}"),
            ),
            Err(e) => log.error(&format!("conjugate_spectrum theta={k}"), e),
        }
    }
}

fn verify_donoghue(s: &Scenario, m: &DonoghueModel, log: &mut VerifyLog) {
    let mut rng = sampling::rng(s.seed);
    let mut rep = IdentityReport::default();
    rep.push("green_matrix", m.green_matrix_residual(), 1e-12);
    for _ in 0..4 {
        let e1 = crate::btriple::DomainElement {
            u: sampling::vector(&mut rng, m.n()),
            phi: sampling::vector(&mut rng, m.m()),
        };
        let e2 = crate::btriple::DomainElement {
            u: sampling::vector(&mut rng, m.n()),
            phi: sampling::vector(&mut rng, m.m()),
        };
        rep.push("green_elements", m.green_residual(&e1, &e2), 1e-12);
    }
    log.identities("", &rep);

    let (t1, t2) = (&s.thetas[0], second_theta(s));
    let problem = TripleIndexProblem::new(m, t1, t2).map(|mut p| {
        if s.theta_shift.is_some() {
            if let Ok(f) = ThetaMinusWeyl::new(m, &shifted(t1, s.theta_shift)) {
                p.f1 = f;
            }
        }
        p
    });
    let problem = match problem {
        Ok(p) => p,
        Err(e) => return log.error("extensions", e),
    };
    let poles = problem.spectrum();
    let points = sample_points(&mut rng, &poles, VERIFY_POINTS);
    for pair in points.chunks(2) {
        if let [z, w] = *pair {
            match m.weyl_identity_residuals(z, w) {
                Ok(r) => log.identities("", &r),
                Err(e) => log.error("weyl", e),
            }
        }
    }
    for (k, theta) in s.thetas.iter().enumerate() {
        let mut rep = IdentityReport::default();
        for pair in points.chunks(2) {
            if let [z, w] = *pair {
                match (m.krein_resolvent(theta, z), m.krein_resolvent(theta, w)) {
                    (Ok(rz), Ok(rw)) => {
                        let lhs = &rz - &rw;
                        let rhs = rz.matmul(&rw).scale(z - w);
                        rep.push("resolvent_identity", lhs.max_abs_diff(&rhs) / lhs.norm_max().max(1.0), KREIN_TOL);
                    }
                    (Err(e), _) | (_, Err(e)) => return log.error(&format!("krein theta={k}"), e),
                }
            }
        }
        let routes = (|| -> crate::btriple::Result<(f64, f64)> {
            let b = m.extension(theta)?;
            let other = m.extension_operator(theta, C64::new(2.0, 1.0) * (1.0 + m.a().norm_fro()))?;
            let bc = m.extension_matrix_from_bc(theta)?;
            Ok((b.rel_diff(&other), b.rel_diff(&bc)))
        })();
        match routes {
            Ok((zref, bc)) => {
                rep.push("extension_reference_point", zref, 1e-9);
                rep.push("extension_boundary_condition", bc, 1e-9);
            }
            Err(e) => return log.error(&format!("extension theta={k}"), e),
        }
        log.identities(&format!("theta={k} "), &rep);
    }

    let cs = match contours(s) {
        Ok(cs) => cs,
        Err(e) => return log.error("contours", e),
    };
    for c in &cs {
        match problem.check(c) {
            Ok(v) => log.line(v.agree(), triple_index_line(&v)),
            Err(e) => log.error(&format!("index_difference center={}", fmt_c(c.center)), e),
        }
    }
}

/// Itemized identity and index checks. The status is `Disagreement` if any
/// item fails, `NumericalFailure` if only evaluation errors occurred.
pub fn cmd_verify(s: &Scenario) -> Result<Output, CliError> {
    s.require(Task::Verify)?;
    let mut log = VerifyLog { text: String::new(), failed: 0, passed: 0, errors: 0 };
    let _ = writeln!(log.text, "# gindex verify");
    let _ = match &s.model {
        Model::Schrodinger(m) => writeln!(
            log.text,
            "# model {} interior={} boundary={}",
            s.model.kind(),
            m.interior_count(),
            m.boundary_count()
        ),
        Model::Donoghue(m) => writeln!(log.text, "# model donoghue n={} m={}", m.n(), m.m()),
    };
    let _ = writeln!(log.text, "# generator {GENERATOR_NAME} seed {}", s.seed);
    if s.theta_shift.is_some() {
        let _ = writeln!(log.text, "# mutation active");
    }
    match &s.model {
        Model::Schrodinger(m) => verify_schrodinger(s, m, &mut log),
        Model::Donoghue(m) => verify_donoghue(s, m, &mut log),
    }
    let _ = writeln!(log.text, "SUMMARY passed={} failed={}", log.passed, log.failed);
    let status = if log.failed == 0 {
        Status::Ok
    } else if log.failed == log.errors {
        Status::NumericalFailure
    } else {
        Status::Disagreement
    };
    Ok(Output { text: log.text, status })
}
