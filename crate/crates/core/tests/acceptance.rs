//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! `cargo test --test acceptance -- --full` adds two-dimensional grids up to
//! 12×12 interior points to the index-formula instances. The runtime budget
//! is still checked and reported in that mode.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use gindex::btriple::{DonoghueModel, TripleIndexProblem};
use gindex::contour::{
    generalized_index, principal_part, Contour, IndexReport, Resolvent,
};
use gindex::numkit::{CMatrix, C64};
use gindex::sampling;
use gindex::schrodinger::{conjugate_spectrum_mismatch, green_matrix_residual, Grid, IndexProblem, SchrodingerModel};
use rand::Rng;

const NODES: usize = 128;

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Winding and refinement data pooled over every index report in the suite.
#[derive(Default)]
struct Pool {
    accepted: usize,
    winding_agree: usize,
    winding_missing: usize,
    small_residual: usize,
    small_gap: usize,
    worst_gap: f64,
}

impl Pool {
    fn index(&mut self, index: &IndexReport, winding: &Result<IndexReport, gindex::contour::ContourError>) {
        self.quadrature(index);
        if index.accepted() {
            self.accepted += 1;
            match winding {
                Ok(w) if w.rounded == index.rounded => self.winding_agree += 1,
                Ok(_) => {}
                Err(_) => self.winding_missing += 1,
            }
        }
    }

    /// Every report whose value rounds cleanly must also have converged.
    fn quadrature(&mut self, r: &IndexReport) {
        if r.residual < 1e-6 {
            self.small_residual += 1;
            if r.refinement_gap < 1e-8 {
                self.small_gap += 1;
            }
            self.worst_gap = self.worst_gap.max(r.refinement_gap);
        }
    }
}

#[derive(Default)]
struct Suite {
    lines: Vec<Line>,
    pool: Pool,
}

impl Suite {
    fn record(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push(Line { name, pass, detail });
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn hand_fixture(suite: &mut Suite) {
    let start = Instant::now();
    let model = SchrodingerModel::new(Grid::Interval { n: 1, length: 2.0 }, vec![C64::new(0.0, 0.0)]).unwrap();
    let theta = CMatrix::zeros(2, 2);
    let mut rng = sampling::rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let z = loop {
            let z = sampling::complex_box(&mut rng, (-3.0, 5.0), (-2.0, 2.0));
            if (z - 2.0).norm() > 0.1 {
                break z;
            }
        };
        let d = 1.0 / (2.0 - z);
        let closed = CMatrix::from_vec(2, 2, vec![(1.0 - z) * d, -d, -d, (1.0 - z) * d]);
        worst = worst.max(model.dtn(z, false).unwrap().max_abs_diff(&closed) / closed.norm_max());
    }
    let p = IndexProblem::new(&model, &theta, false).unwrap();
    let mut ok = worst < 1e-12;
    let mut idx = Vec::new();
    for (center, expect) in [(0.0, 1), (2.0, -1)] {
        let c = Contour::new(C64::new(center, 0.0), 0.5, NODES).unwrap();
        let v = p.check(&c).unwrap();
        suite.pool.index(&v.index, &v.winding);
        ok &= v.index.rounded == expect && v.index.residual < 1e-8 && v.agree();
        idx.push(format!("{:+} (residual {:.1e})", v.index.rounded, v.index.residual));
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(1);
    suite.record(
        "hand_fixture",
        ok,
        format!("closed-form error {worst:.1e}, index on C(0;0.5) {}, on C(2;0.5) {}, {}", idx[0], idx[1], secs(t)),
    );
}

struct Instance {
    model: SchrodingerModel,
    theta: CMatrix,
}

fn instance_grids(full: bool) -> Vec<Grid> {
    let mut rng = sampling::rng(2024);
    let ones = [1, 2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 18, 20, 22, 25, 28, 30, 32, 35, 38, 40, 42, 45, 48, 50];
    let mut twos = vec![
        (1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2), (2, 3), (3, 3), (4, 2), (4, 3), (3, 4), (4, 4), (5, 2),
        (5, 3), (5, 4), (4, 5), (5, 5), (6, 3), (6, 4), (4, 6), (6, 5), (5, 6), (6, 6), (3, 6), (6, 2), (8, 8),
    ];
    if full {
        twos.extend([(10, 7), (10, 10), (12, 9), (12, 12)]);
    }
    let mut grids: Vec<Grid> =
        ones.iter().map(|&n| Grid::Interval { n, length: rng.gen_range(1.0..4.0) }).collect();
    grids.extend(twos.into_iter().map(|(nx, ny)| Grid::Rectangle {
        nx,
        ny,
        lx: rng.gen_range(1.0..2.0),
        ly: rng.gen_range(1.0..2.0),
    }));
    grids
}

fn instances(full: bool) -> Vec<Instance> {
    let mut rng = sampling::rng(3);
    instance_grids(full)
        .into_iter()
        .map(|grid| {
            let q = (0..grid.interior_count()).map(|_| sampling::complex_uniform(&mut rng, 5.0)).collect();
            let model = SchrodingerModel::new(grid, q).unwrap();
            let nb = model.boundary_count();
            let norm = rng.gen_range(0.5..5.0);
            let theta = sampling::matrix_with_norm(&mut rng, nb, nb, norm);
            Instance { model, theta }
        })
        .collect()
}

fn grid_label(g: &Grid) -> String {
    match g {
        Grid::Interval { n, .. } => format!("1D n={n}"),
        Grid::Rectangle { nx, ny, .. } => format!("2D {nx}x{ny}"),
    }
}

#[derive(Default)]
struct FormulaTally {
    contours: usize,
    accepted: usize,
    formula_ok: usize,
    oracle_ok: usize,
    rejected: usize,
    errors: Vec<String>,
    worst_residual: f64,
}

impl FormulaTally {
    fn pass(&self) -> bool {
        self.contours > 0 && self.errors.is_empty() && self.formula_ok == self.accepted && self.oracle_ok == self.accepted
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "{} contours, {} accepted, formula {}/{}, eig_cluster {}/{}, rejected {}, worst residual {:.1e}",
            self.contours,
            self.accepted,
            self.formula_ok,
            self.accepted,
            self.oracle_ok,
            self.accepted,
            self.rejected,
            self.worst_residual
        );
        if let Some(e) = self.errors.first() {
            s.push_str(&format!(", {} errors (first: {e})", self.errors.len()));
        }
        s
    }
}

fn index_formula(suite: &mut Suite, inst: &[Instance], conjugated: bool) -> (FormulaTally, Duration) {
    let start = Instant::now();
    let mut t = FormulaTally::default();
    for (k, i) in inst.iter().enumerate() {
        let p = match IndexProblem::new(&i.model, &i.theta, conjugated) {
            Ok(p) => p,
            Err(e) => {
                t.errors.push(format!("instance {k}: {e}"));
                continue;
            }
        };
        for c in p.isolating_contours(NODES) {
            t.contours += 1;
            match p.check(&c) {
                Ok(v) => {
                    suite.pool.index(&v.index, &v.winding);
                    suite.pool.quadrature(&v.ma_theta);
                    suite.pool.quadrature(&v.ma_dirichlet);
                    if v.all_accepted() {
                        t.accepted += 1;
                        t.worst_residual = t.worst_residual.max(v.index.residual);
                        t.formula_ok += v.formula_holds() as usize;
                        t.oracle_ok += v.oracle_holds() as usize;
                    } else {
                        t.rejected += 1;
                    }
                }
                Err(e) => t.errors.push(format!("{} at {}: {e}", grid_label(i.model.grid()), c.center)),
            }
        }
    }
    (t, start.elapsed())
}

fn schrodinger_criteria(suite: &mut Suite, full: bool) {
    let inst = instances(full);
    let n1 = inst.iter().filter(|i| matches!(i.model.grid(), Grid::Interval { .. })).count();
    let largest = inst.iter().map(|i| i.model.interior_count()).max().unwrap_or(0);
    let (t, time) = index_formula(suite, &inst, false);
    let pass = t.pass() && inst.len() >= 50 && time < Duration::from_secs(60);
    suite.record(
        "index_formula",
        pass,
        format!(
            "{} instances ({n1} 1D, {} 2D, largest {largest} interior points), {}, {}",
            inst.len(),
            inst.len() - n1,
            t.summary(),
            secs(time)
        ),
    );

    let (t, time) = index_formula(suite, &inst, true);
    let mut worst_match: f64 = 0.0;
    let mut match_errors = 0;
    for i in &inst {
        match conjugate_spectrum_mismatch(&i.model, &i.theta) {
            Ok(d) => worst_match = worst_match.max(d),
            Err(_) => match_errors += 1,
        }
    }
    suite.record(
        "adjoint_index_formula",
        t.pass() && worst_match < 1e-8 && match_errors == 0,
        format!("{}, conjugate spectral matching {worst_match:.1e}, {}", t.summary(), secs(time)),
    );

    let mut rng = sampling::rng(4);
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    let mut failures = 0;
    for i in &inst {
        let p = IndexProblem::new(&i.model, &i.theta, false).unwrap();
        let spectrum = p.spectrum();
        let scale = p.a_theta.norm_fro().max(1.0);
        let (lo, hi) = spectrum.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| (a.min(z.re), b.max(z.re)));
        let mut drawn = 0;
        while drawn < 20 {
            let z = sampling::complex_box(&mut rng, (lo - 1.0, hi + 1.0), (-6.0, 6.0));
            if spectrum.iter().any(|&l| (z - l).norm() < 1e-2 * scale.sqrt()) {
                continue;
            }
            drawn += 1;
            for conj in [false, true] {
                evaluated += 1;
                match i.model.krein_residual(&i.theta, z, conj) {
                    Ok(r) => worst = worst.max(r),
                    Err(_) => failures += 1,
                }
            }
        }
    }
    suite.record(
        "krein_formula",
        worst < 1e-9 && failures == 0,
        format!("{evaluated} evaluations (20 points per instance, both families), worst relative residual {worst:.1e}"),
    );

    let green: f64 = inst.iter().map(|i| green_matrix_residual(&i.model)).fold(0.0, f64::max);
    let models = donoghue_models();
    let abstract_green: f64 = models.iter().map(|(m, _, _)| m.green_matrix_residual()).fold(0.0, f64::max);
    suite.record(
        "green_identities",
        green < 1e-12 && abstract_green < 1e-12,
        format!(
            "discrete {green:.1e} over {} grids, abstract {abstract_green:.1e} over {} models",
            inst.len(),
            models.len()
        ),
    );
}

fn donoghue_models() -> Vec<(DonoghueModel, CMatrix, CMatrix)> {
    let mut rng = sampling::rng(5);
    (0..60)
        .map(|k| {
            let n = 1 + k % 12;
            let m = (1 + (k / 12) % 4).min(n);
            let (scale, n1, n2) = (rng.gen_range(0.5..3.0), rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
            let model = DonoghueModel::random(&mut rng, n, m, scale).unwrap();
            let t1 = sampling::matrix_with_norm(&mut rng, m, m, n1);
            let t2 = sampling::matrix_with_norm(&mut rng, m, m, n2);
            (model, t1, t2)
        })
        .collect()
}

/// Random point with `|Im z| ≥ 0.1` in either half-plane.
fn off_axis_point<R: Rng>(rng: &mut R, model: &DonoghueModel) -> C64 {
    loop {
        let z = sampling::complex_box(rng, (-4.0, 4.0), (0.1, 4.0));
        let z = if rng.gen::<bool>() { z } else { z.conj() };
        if model.distance_to_spectrum(z) > 0.1 {
            return z;
        }
    }
}

fn donoghue_criteria(suite: &mut Suite) {
    let models = donoghue_models();
    let start = Instant::now();
    let (mut contours, mut accepted, mut single, mut diff, mut oracle, mut rejected) = (0, 0, 0, 0, 0, 0);
    let mut errors = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for (model, t1, t2) in &models {
        let p = match TripleIndexProblem::new(model, t1, t2) {
            Ok(p) => p,
            Err(e) => {
                errors.push(e.to_string());
                continue;
            }
        };
        for c in p.isolating_contours(NODES) {
            contours += 1;
            match p.check(&c) {
                Ok(v) => {
                    suite.pool.index(&v.index1, &v.winding1);
                    suite.pool.index(&v.index2, &v.winding2);
                    for r in [&v.ma_b1, &v.ma_b2, &v.ma_a] {
                        suite.pool.quadrature(r);
                    }
                    if v.all_accepted() {
                        accepted += 1;
                        worst_residual = worst_residual.max(v.index1.residual).max(v.index2.residual);
                        single += v.single_formulas_hold() as usize;
                        diff += v.difference_holds() as usize;
                        oracle += v.oracle_holds() as usize;
                    } else {
                        rejected += 1;
                    }
                }
                Err(e) => errors.push(format!("at {}: {e}", c.center)),
            }
        }
    }
    let time = start.elapsed();
    let max_n = models.iter().map(|(m, _, _)| m.n()).max().unwrap();
    let max_m = models.iter().map(|(m, _, _)| m.m()).max().unwrap();
    let pass = errors.is_empty()
        && contours > 0
        && single == accepted
        && diff == accepted
        && oracle == accepted
        && models.len() >= 50
        && time < Duration::from_secs(30);
    let mut detail = format!(
        "{} models (n <= {max_n}, m <= {max_m}), {contours} contours, {accepted} accepted, single formulas {single}/{accepted}, \
         difference {diff}/{accepted}, eig_cluster {oracle}/{accepted}, rejected {rejected}, worst residual {worst_residual:.1e}, {}",
        models.len(),
        secs(time)
    );
    if let Some(e) = errors.first() {
        detail.push_str(&format!(", {} errors (first: {e})", errors.len()));
    }
    suite.record("triple_index_formula", pass, detail);

    let mut rng = sampling::rng(6);
    let (mut worst, mut min_nev, mut count, mut failures) = (0.0f64, f64::INFINITY, 0, 0);
    for k in 0..50 {
        let (model, _, _) = &models[k % models.len()];
        let z = off_axis_point(&mut rng, model);
        let w = off_axis_point(&mut rng, model);
        count += 1;
        match (model.weyl_identity_residuals(z, w), model.nevanlinna_min(z)) {
            (Ok(r), Ok(nev)) => {
                min_nev = min_nev.min(nev);
                for c in &r.checks {
                    if c.tol > 0.0 {
                        worst = worst.max(c.residual);
                    }
                }
                if !r.passed() {
                    failures += 1;
                }
            }
            _ => failures += 1,
        }
    }
    suite.record(
        "weyl_identities",
        failures == 0 && worst < 1e-10 && min_nev > 0.0,
        format!("{count} points, worst residual {worst:.1e}, smallest eigenvalue of Im M(z)/Im z {min_nev:.2e}, {failures} failures"),
    );
}

fn laurent(suite: &mut Suite) {
    let mut rng = sampling::rng(7);
    let mut worst: f64 = 0.0;
    let mut profiles_ok = true;
    let mut profiles = Vec::new();
    for k in 1..=4usize {
        let z0 = sampling::complex_uniform(&mut rng, 2.0);
        let mut j = CMatrix::identity(k).scale(z0);
        for i in 0..k - 1 {
            j[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        let nil = j.shift_diagonal(-z0);
        let c = Contour::new(z0, 0.5, NODES).unwrap();
        let pp = principal_part(&Resolvent::new(j).unwrap(), &c, k + 1).unwrap();
        let mut expected = CMatrix::identity(k).scale_real(-1.0);
        for t in &pp.terms {
            worst = worst.max(t.coefficient.max_abs_diff(&expected));
            expected = nil.matmul(&expected);
        }
        let want: Vec<usize> = (0..=k).map(|j| k - j).collect();
        profiles_ok &= pp.rank_profile() == want;
        profiles.push(format!("{:?}", pp.rank_profile()));
    }
    suite.record(
        "laurent_principal_part",
        worst < 1e-9 && profiles_ok,
        format!("J_1..J_4 coefficient error {worst:.1e}, rank profiles {}", profiles.join(" ")),
    );
}

/// Index error at `N = 16, 32, 64, 128` must not increase until it reaches
/// roundoff.
fn monotone(errors: &[f64]) -> bool {
    errors.windows(2).all(|w| w[1] <= w[0] * 1.000001 || w[1] < 1e-12)
}

fn quadrature(suite: &mut Suite) {
    let models = donoghue_models();
    let mut rng = sampling::rng(8);
    let mut monotone_count = 0;
    let mut sampled = 0;
    let mut final_worst: f64 = 0.0;
    while sampled < 20 {
        let (model, t1, _) = &models[rng.gen_range(0..models.len())];
        let p = TripleIndexProblem::new(model, t1, t1).unwrap();
        let cs = p.isolating_contours(NODES);
        let c = cs[rng.gen_range(0..cs.len())];
        let errs: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&n| match generalized_index(&p.f1, &c.with_nodes(n).unwrap()) {
                Ok(r) => r.residual,
                Err(_) => f64::INFINITY,
            })
            .collect();
        let truth = p.check(&c).unwrap().index1.rounded;
        let exact = generalized_index(&p.f1, &c).map(|r| r.rounded == truth).unwrap_or(false);
        sampled += 1;
        final_worst = final_worst.max(*errs.last().unwrap());
        monotone_count += (monotone(&errs) && exact) as usize;
    }
    let pool = &suite.pool;
    let pass = pool.small_gap == pool.small_residual && monotone_count == sampled;
    let detail = format!(
        "refinement gap < 1e-8 in {}/{} reports with residual < 1e-6 (worst {:.1e}), node-doubling monotone on {monotone_count}/{sampled} integrals (final error {final_worst:.1e})",
        pool.small_gap, pool.small_residual, pool.worst_gap
    );
    suite.record("quadrature_convergence", pass, detail);
}

fn oracle_equivalence(suite: &mut Suite) {
    let p = &suite.pool;
    let pass = p.accepted > 0 && p.winding_agree == p.accepted;
    let detail = format!(
        "winding_det agrees on {}/{} accepted reports ({} without a winding value)",
        p.winding_agree, p.accepted, p.winding_missing
    );
    suite.record("oracle_equivalence", pass, detail);
}

fn run_cli(args: &[&std::ffi::OsStr]) -> i32 {
    let mut v: Vec<&std::ffi::OsStr> = vec!["gindex".as_ref()];
    v.extend_from_slice(args);
    gindex::cli::run(v)
}

fn cli_determinism(suite: &mut Suite) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let tmp = tempfile::tempdir().unwrap();
    let mut identical = 0;
    let mut total = 0;
    for name in ["hand_fixture.json", "donoghue.json", "schrodinger2d.json"] {
        let scenario = dir.join(name);
        let outs: Vec<(i32, Vec<u8>)> = (0..2)
            .map(|k| {
                let out: PathBuf = tmp.path().join(format!("{name}.{k}"));
                let code = run_cli(&[
                    "verify".as_ref(),
                    "--scenario".as_ref(),
                    scenario.as_os_str(),
                    "--out".as_ref(),
                    out.as_os_str(),
                ]);
                (code, std::fs::read(&out).unwrap_or_default())
            })
            .collect();
        total += 1;
        identical += (outs[0] == outs[1] && outs[0].0 == 0 && !outs[0].1.is_empty()) as usize;
    }
    let mutation = dir.join("mutation.json");
    let out = tmp.path().join("mutation.txt");
    let code = run_cli(&["verify".as_ref(), "--scenario".as_ref(), mutation.as_os_str(), "--out".as_ref(), out.as_os_str()]);
    suite.record(
        "cli_determinism",
        identical == total && code == gindex::cli::EXIT_DISAGREEMENT,
        format!("byte-identical verify reports for {identical}/{total} scenarios, mutation fixture exit code {code}"),
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // libtest-style listing requests carry no tests here
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let full = args.iter().any(|a| a == "--full");
    let start = Instant::now();
    let mut suite = Suite::default();
    hand_fixture(&mut suite);
    schrodinger_criteria(&mut suite, full);
    donoghue_criteria(&mut suite);
    laurent(&mut suite);
    quadrature(&mut suite);
    oracle_equivalence(&mut suite);
    cli_determinism(&mut suite);
    let failed: Vec<&str> = suite.lines.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    println!(
        "acceptance: {} passed, {} failed, {}",
        suite.lines.len() - failed.len(),
        failed.len(),
        secs(start.elapsed())
    );
    if !failed.is_empty() {
        for l in suite.lines.iter().filter(|l| !l.pass) {
            eprintln!("failed {}: {}", l.name, l.detail);
        }
        std::process::exit(1);
    }
}
