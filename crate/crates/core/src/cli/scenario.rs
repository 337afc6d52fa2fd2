//! JSON scenario files. Complex numbers are `[re, im]` pairs and matrices
//! are lists of rows.

use std::path::Path;

use serde::Deserialize;

use super::CliError;
use crate::btriple::DonoghueModel;
use crate::contour::Contour;
use crate::numkit::{CMatrix, C64};
use crate::sampling;
use crate::schrodinger::{Grid, SchrodingerModel};

pub type Pair = [f64; 2];
pub type MatrixSpec = Vec<Vec<Pair>>;

pub const DEFAULT_SCENARIO_NODES: usize = 128;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: ModelSpec,
    pub theta: Vec<MatrixSpec>,
    #[serde(default)]
    pub contours: Vec<ContourSpec>,
    #[serde(default)]
    pub tasks: Option<Vec<String>>,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mutation: Option<MutationSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ModelSpec {
    #[serde(rename = "schrodinger1d")]
    Schrodinger1d {
        n: usize,
        length: f64,
        #[serde(default)]
        potential: PotentialSpec,
    },
    #[serde(rename = "schrodinger2d")]
    Schrodinger2d {
        nx: usize,
        ny: usize,
        lx: f64,
        ly: f64,
        #[serde(default)]
        potential: PotentialSpec,
    },
    #[serde(rename = "donoghue")]
    Donoghue {
        #[serde(default)]
        a: Option<MatrixSpec>,
        #[serde(default)]
        v: Option<MatrixSpec>,
        #[serde(default)]
        random: Option<RandomDonoghue>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant(Pair),
    Values(Vec<Pair>),
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Constant([0.0, 0.0])
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDonoghue {
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    2.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSpec {
    pub center: Pair,
    pub radius: f64,
    #[serde(default)]
    pub nodes: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
    /// Grid points along each axis, endpoints included.
    pub steps: [usize; 2],
    pub radius: f64,
    #[serde(default)]
    pub nodes: Option<usize>,
}

/// Harness self-test: the index family sees `Θ + shift·I` while the
/// realizations keep `Θ`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationSpec {
    pub theta_shift: Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Index,
    Multiplicity,
    Verify,
    Scan,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Index => "index",
            Task::Multiplicity => "multiplicity",
            Task::Verify => "verify",
            Task::Scan => "scan",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "index" => Some(Task::Index),
            "multiplicity" | "mult" => Some(Task::Multiplicity),
            "verify" => Some(Task::Verify),
            "scan" => Some(Task::Scan),
            _ => None,
        }
    }
}

pub enum Model {
    Schrodinger(SchrodingerModel),
    Donoghue(DonoghueModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Schrodinger(m) => match m.grid() {
                Grid::Interval { .. } => "schrodinger1d",
                Grid::Rectangle { .. } => "schrodinger2d",
            },
            Model::Donoghue(_) => "donoghue",
        }
    }

    /// Dimension of the parameter space for `Θ`.
    pub fn boundary_dim(&self) -> usize {
        match self {
            Model::Schrodinger(m) => m.boundary_count(),
            Model::Donoghue(m) => m.m(),
        }
    }
}

pub struct Scan {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub steps: [usize; 2],
    pub radius: f64,
    pub nodes: usize,
}

impl Scan {
    fn axis(range: [f64; 2], steps: usize) -> Vec<f64> {
        if steps == 1 {
            return vec![range[0]];
        }
        let h = (range[1] - range[0]) / (steps - 1) as f64;
        (0..steps).map(|k| range[0] + h * k as f64).collect()
    }

    /// Probe centers in row-major order: imaginary part outer, real part inner.
    pub fn centers(&self) -> Vec<C64> {
        let xs = Self::axis(self.re, self.steps[0]);
        let ys = Self::axis(self.im, self.steps[1]);
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y))).collect()
    }
}

pub struct Scenario {
    pub model: Model,
    pub thetas: Vec<CMatrix>,
    pub contours: Vec<Contour>,
    pub tasks: Vec<Task>,
    pub scan: Option<Scan>,
    pub seed: u64,
    pub theta_shift: Option<C64>,
}

fn config(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config { field: field.into(), message: message.into() }
}

fn complex(p: &Pair, field: &str) -> Result<C64, CliError> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(config(field, "non-finite value"));
    }
    Ok(C64::new(p[0], p[1]))
}

fn matrix(spec: &MatrixSpec, field: &str) -> Result<CMatrix, CliError> {
    let rows = spec.len();
    let cols = spec.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(config(field, "matrix is empty"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in spec.iter().enumerate() {
        if row.len() != cols {
            return Err(config(format!("{field}[{i}]"), format!("row has {} entries, expected {cols}", row.len())));
        }
        for (j, p) in row.iter().enumerate() {
            data.push(complex(p, &format!("{field}[{i}][{j}]"))?);
        }
    }
    Ok(CMatrix::from_vec(rows, cols, data))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path.is_empty() || path == "." { "scenario".to_string() } else { path };
            config(field, e.into_inner().to_string())
        })?;
        Self::validate(file)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config("scenario", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(file: ScenarioFile) -> Result<Self, CliError> {
        let model = build_model(&file.model, file.seed)?;
        let dim = model.boundary_dim();

        if file.theta.is_empty() || file.theta.len() > 2 {
            return Err(config("theta", format!("expected 1 or 2 matrices, got {}", file.theta.len())));
        }
        let thetas = file
            .theta
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let field = format!("theta[{k}]");
                let m = matrix(t, &field)?;
                if m.shape() != (dim, dim) {
                    return Err(config(
                        field,
                        format!("is {}x{}, the model needs {dim}x{dim}", m.rows(), m.cols()),
                    ));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>, _>>()?;

        let contours = file
            .contours
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let field = format!("contours[{k}]");
                let center = complex(&c.center, &format!("{field}.center"))?;
                if !(c.radius > 0.0) || !c.radius.is_finite() {
                    return Err(config(format!("{field}.radius"), "must be positive"));
                }
                let nodes = c.nodes.unwrap_or(DEFAULT_SCENARIO_NODES);
                if nodes < crate::contour::MIN_NODES {
                    return Err(config(format!("{field}.nodes"), "must be at least 8"));
                }
                Ok(Contour { center, radius: c.radius, nodes })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let tasks = match &file.tasks {
            None => vec![Task::Index, Task::Multiplicity, Task::Verify, Task::Scan],
            Some(names) => names
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    Task::parse(s).ok_or_else(|| config(format!("tasks[{k}]"), format!("unknown task {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        };

        let scan = file.scan.as_ref().map(validate_scan).transpose()?;
        let theta_shift = file
            .mutation
            .as_ref()
            .map(|m| complex(&m.theta_shift, "mutation.theta_shift"))
            .transpose()?;

        Ok(Self { model, thetas, contours, tasks, scan, seed: file.seed, theta_shift })
    }

    pub fn require(&self, task: Task) -> Result<(), CliError> {
        if self.tasks.contains(&task) {
            Ok(())
        } else {
            Err(config("tasks", format!("scenario does not enable {:?}", task.name())))
        }
    }

    /// Overrides contour node counts.
    pub fn set_nodes(&mut self, nodes: usize) -> Result<(), CliError> {
        if nodes < crate::contour::MIN_NODES {
            return Err(config("--nodes", "must be at least 8"));
        }
        for c in &mut self.contours {
            c.nodes = nodes;
        }
        if let Some(s) = &mut self.scan {
            s.nodes = nodes;
        }
        Ok(())
    }
}

fn validate_scan(s: &ScanSpec) -> Result<Scan, CliError> {
    for (name, r) in [("scan.re", s.re), ("scan.im", s.im)] {
        if !r[0].is_finite() || !r[1].is_finite() || r[0] > r[1] {
            return Err(config(name, "range must be finite and ordered"));
        }
    }
    if s.steps[0] == 0 || s.steps[1] == 0 {
        return Err(config("scan.steps", "need at least one point per axis"));
    }
    if !(s.radius > 0.0) || !s.radius.is_finite() {
        return Err(config("scan.radius", "must be positive"));
    }
    for (k, (r, n)) in [(s.re, s.steps[0]), (s.im, s.steps[1])].into_iter().enumerate() {
        if n > 1 && (r[1] - r[0]) / (n - 1) as f64 > s.radius {
            return Err(config(
                format!("scan.steps[{k}]"),
                "grid spacing exceeds the probe radius, adjacent probes would not overlap",
            ));
        }
    }
    let nodes = s.nodes.unwrap_or(DEFAULT_SCENARIO_NODES);
    if nodes < crate::contour::MIN_NODES {
        return Err(config("scan.nodes", "must be at least 8"));
    }
    Ok(Scan { re: s.re, im: s.im, steps: s.steps, radius: s.radius, nodes })
}

fn potential(spec: &PotentialSpec, count: usize) -> Result<Vec<C64>, CliError> {
    match spec {
        PotentialSpec::Constant(p) => Ok(vec![complex(p, "model.potential.constant")?; count]),
        PotentialSpec::Values(v) => {
            if v.len() != count {
                return Err(config(
                    "model.potential.values",
                    format!("has {} entries, the grid has {count} interior points", v.len()),
                ));
            }
            v.iter()
                .enumerate()
                .map(|(k, p)| complex(p, &format!("model.potential.values[{k}]")))
                .collect()
        }
    }
}

fn schrodinger(grid: Grid, spec: &PotentialSpec) -> Result<Model, CliError> {
    let count = grid.interior_count();
    let q = potential(spec, count)?;
    SchrodingerModel::new(grid, q)
        .map(Model::Schrodinger)
        .map_err(|e| config("model", e.to_string()))
}

fn build_model(spec: &ModelSpec, seed: u64) -> Result<Model, CliError> {
    match spec {
        ModelSpec::Schrodinger1d { n, length, potential } => {
            if *n == 0 {
                return Err(config("model.n", "must be positive"));
            }
            if !(*length > 0.0) || !length.is_finite() {
                return Err(config("model.length", "must be positive"));
            }
            schrodinger(Grid::Interval { n: *n, length: *length }, potential)
        }
        ModelSpec::Schrodinger2d { nx, ny, lx, ly, potential } => {
            for (name, v) in [("model.nx", *nx), ("model.ny", *ny)] {
                if v == 0 {
                    return Err(config(name, "must be positive"));
                }
            }
            for (name, v) in [("model.lx", *lx), ("model.ly", *ly)] {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(config(name, "must be positive"));
                }
            }
            schrodinger(Grid::Rectangle { nx: *nx, ny: *ny, lx: *lx, ly: *ly }, potential)
        }
        ModelSpec::Donoghue { a, v, random } => {
            let model = match (a, v, random) {
                (Some(a), Some(v), None) => DonoghueModel::new(matrix(a, "model.a")?, matrix(v, "model.v")?),
                (None, None, Some(r)) => {
                    if r.n == 0 || r.m == 0 || r.m > r.n {
                        return Err(config("model.random", "need 1 <= m <= n"));
                    }
                    let mut rng = sampling::rng(seed);
                    DonoghueModel::random(&mut rng, r.n, r.m, r.scale)
                }
                _ => return Err(config("model", "donoghue needs either both `a` and `v`, or `random`")),
            };
            model.map(Model::Donoghue).map_err(|e| config("model", e.to_string()))
        }
    }
}
