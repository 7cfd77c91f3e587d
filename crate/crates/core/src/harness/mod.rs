//! Experiment runner: problem set-up, schedules, reference values, result
//! tables and plot data.

mod output;
mod presets;
mod reference;

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

pub use output::{final_half_slope, format_table, loglog_slope, parse_slopes, plot_data, ResultTable};
pub use presets::{preset, preset_names};
pub use reference::{
    reference_lshape, reference_oscillator, reference_square, Eigenfunction, ReferenceSolution, LSHAPE_FIRST_EIGENVALUE,
};

use crate::algorithms::{
    adaptive_loop, convergence_order, effectivity_index, two_grid, AdaptiveConfig, AlgorithmError, Method, TwoGridResult,
    Variant,
};
use crate::fem::{integrate_elementwise, Coefficients, ExactSolution, ERROR_RULE};
use crate::mesh::{generate_lshape, generate_uniform_rectangle, generate_uniform_square, read_mesh, regular_refine, Mesh, MeshError};
use output::{fmt_error, fmt_order, fmt_value};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// `-Δu = λu` on (0,1)².
    SquareLaplace,
    /// `-Δu = λu` on (−1,1)² \ [0,1)×(−1,0].
    LshapeLaplace,
    /// `-½Δu + ½|x|²u = λu` on (−5,5)².
    HarmonicOscillator,
}

impl Problem {
    pub fn coefficients(self) -> Coefficients {
        match self {
            Problem::HarmonicOscillator => Coefficients::harmonic_oscillator(),
            Problem::SquareLaplace | Problem::LshapeLaplace => Coefficients::laplace(),
        }
    }

    pub fn reference(self, i: usize) -> Option<ReferenceSolution> {
        match self {
            Problem::SquareLaplace => Some(reference_square(i)),
            Problem::LshapeLaplace => reference_lshape(i),
            Problem::HarmonicOscillator => Some(reference_oscillator(i)),
        }
    }

    /// Uniform mesh with spacing `1/n` per unit length.
    pub fn uniform_mesh(self, n: usize) -> Result<Mesh, MeshError> {
        match self {
            Problem::SquareLaplace => generate_uniform_square(n),
            Problem::LshapeLaplace => generate_lshape(n),
            Problem::HarmonicOscillator => generate_uniform_rectangle([-5.0, 5.0], [-5.0, 5.0], 10 * n, 10 * n),
        }
    }
}

impl FromStr for Problem {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square_laplace" => Ok(Problem::SquareLaplace),
            "lshape_laplace" => Ok(Problem::LshapeLaplace),
            "harmonic_oscillator" => Ok(Problem::HarmonicOscillator),
            _ => Err(HarnessError::Config(format!(
                "unknown problem `{s}` (square_laplace, lshape_laplace, harmonic_oscillator)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    A1,
    A2,
    TG,
    A3,
    A4,
}

impl MethodKind {
    pub fn is_adaptive(self) -> bool {
        matches!(self, MethodKind::A3 | MethodKind::A4)
    }
}

impl FromStr for MethodKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(MethodKind::A1),
            "A2" => Ok(MethodKind::A2),
            "TG" => Ok(MethodKind::TG),
            "A3" => Ok(MethodKind::A3),
            "A4" => Ok(MethodKind::A4),
            _ => Err(HarnessError::Config(format!("unknown method `{s}` (A1, A2, TG, A3, A4)"))),
        }
    }
}

/// Where the coarse meshes of a two-grid schedule come from.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshFamily {
    /// Uniform meshes; schedule entries are `1/n` spacings.
    Structured,
    /// A base mesh and its regular refinements; schedule entries are
    /// refinement levels.
    Refined(Arc<Mesh>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `(coarse, fine)` pairs; the fine mesh is a regular refinement of the
    /// coarse one.
    TwoGrid(Vec<(usize, usize)>),
    Adaptive {
        theta: f64,
        epsilon: f64,
        max_levels: usize,
        /// Initial mesh spacing `1/n`.
        initial: usize,
    },
}

impl Schedule {
    /// Parses `1/4:1/16,1/8:1/64` (or bare levels `0:2,1:4`).
    pub fn parse_pairs(s: &str) -> Result<Self, HarnessError> {
        let value = |v: &str| -> Result<usize, HarnessError> {
            let v = v.trim();
            let digits = v.strip_prefix("1/").unwrap_or(v);
            digits
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad schedule entry `{v}`")))
        };
        let pairs = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                let (c, f) = p
                    .split_once(':')
                    .ok_or_else(|| HarnessError::Config(format!("schedule pair `{p}` needs `coarse:fine`")))?;
                Ok((value(c)?, value(f)?))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        Ok(Schedule::TwoGrid(pairs))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub method: MethodKind,
    pub mesh: MeshFamily,
    pub schedule: Schedule,
    pub indices: Vec<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.indices.is_empty() || self.indices.contains(&0) {
            return Err(HarnessError::Config("eigenvalue indices must be 1 or larger".into()));
        }
        match (&self.schedule, self.method.is_adaptive()) {
            (Schedule::TwoGrid(pairs), false) => {
                if pairs.is_empty() {
                    return Err(HarnessError::Config("empty schedule".into()));
                }
                for &(c, f) in pairs {
                    if self.mesh == MeshFamily::Structured {
                        if c == 0 || f < c || f % c != 0 || !(f / c).is_power_of_two() {
                            return Err(HarnessError::Config(format!(
                                "fine spacing 1/{f} is not a regular refinement of 1/{c}"
                            )));
                        }
                    } else if f < c {
                        return Err(HarnessError::Config(format!("fine level {f} below coarse level {c}")));
                    }
                }
                Ok(())
            }
            (Schedule::Adaptive { theta, epsilon, max_levels, initial }, true) => {
                if !(0.0..1.0).contains(theta) || !(*epsilon > 0.0) || *max_levels == 0 || *initial == 0 {
                    return Err(HarnessError::Config(
                        "adaptive runs need 0 ≤ θ < 1, ε > 0, max_levels ≥ 1 and a positive initial spacing".into(),
                    ));
                }
                if self.indices != [1] {
                    return Err(HarnessError::Config("adaptive runs compute the first eigenpair only".into()));
                }
                Ok(())
            }
            _ => Err(HarnessError::Config("schedule kind does not match the method".into())),
        }
    }
}

/// Result table plus diagnostics of rows that could not be computed.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub table: ResultTable,
    pub failures: Vec<String>,
    /// Whitespace-separated plot data (adaptive runs only).
    pub plot: Option<String>,
}

pub const TWO_GRID_COLUMNS: [&str; 10] = [
    "i",
    "H",
    "h",
    "N_H",
    "N_h",
    "lambda",
    "error",
    "order",
    "eigenfunction_error",
    "eigenfunction_order",
];

pub const ADAPTIVE_COLUMNS: [&str; 10] = [
    "level",
    "N",
    "rayleigh",
    "enhanced",
    "eta2",
    "rayleigh_error",
    "enhanced_error",
    "kappa",
    "gradient_error",
    "converged",
];

/// Runs the experiment and writes the CSV (and, for adaptive runs, a `.plot`
/// file next to it) when an output path is configured.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let report = match &config.schedule {
        Schedule::TwoGrid(pairs) => run_two_grid(config, pairs),
        Schedule::Adaptive { .. } => run_adaptive(config)?,
    };
    if let Some(path) = &config.output {
        std::fs::write(path, report.table.to_csv())?;
        if let Some(plot) = &report.plot {
            std::fs::write(path.with_extension("plot"), plot)?;
        }
    }
    Ok(report)
}

fn refine_times(mesh: &Mesh, times: usize) -> Result<Mesh, MeshError> {
    let mut m = mesh.clone();
    for _ in 0..times {
        m = regular_refine(&m)?;
    }
    Ok(m)
}

fn build_pair(config: &ExperimentConfig, c: usize, f: usize) -> Result<(Arc<Mesh>, Arc<Mesh>, String, String), HarnessError> {
    match &config.mesh {
        MeshFamily::Structured => {
            let coarse = config.problem.uniform_mesh(c)?;
            let fine = refine_times(&coarse, (f / c).trailing_zeros() as usize)?;
            Ok((Arc::new(coarse), Arc::new(fine), format!("1/{c}"), format!("1/{f}")))
        }
        MeshFamily::Refined(base) => {
            let coarse = refine_times(base, c)?;
            let fine = refine_times(&coarse, f - c)?;
            let (hc, hf) = (coarse.mesh_size(), fine.mesh_size());
            Ok((Arc::new(coarse), Arc::new(fine), format!("{hc:.6}"), format!("{hf:.6}")))
        }
    }
}

/// `(u_h, u)` sign so the reference can be flipped onto the computed mode.
fn orientation(u: &crate::fem::FeFunction, reference: &dyn ExactSolution) -> f64 {
    let s: f64 = integrate_elementwise(u, ERROR_RULE, |q| [q.value * reference.value(q.point)])
        .iter()
        .map(|v| v[0])
        .sum();
    if s < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Gradient error of a two-grid result after scaling it to unit L² norm, the
/// same normalization as the reference mode.
fn two_grid_gradient_error(r: &TwoGridResult, reference: &ReferenceSolution) -> Option<f64> {
    let u = reference.eigenfunction.as_ref()?;
    let norm = integrate_elementwise(&r.fine_function, ERROR_RULE, |q| [q.value * q.value])
        .iter()
        .map(|v| v[0])
        .sum::<f64>()
        .sqrt();
    // compare u_h with ‖u_h‖·u, then divide out ‖u_h‖
    let scale = orientation(&r.fine_function, u.as_ref()) * norm;
    let exact = |p| {
        let g = u.gradient(p);
        [scale * g[0], scale * g[1]]
    };
    let err = match &r.recovered {
        Some(g) => g.error(exact),
        None => crate::fem::gradient_error(&r.fine_function, exact),
    };
    Some(err / norm)
}

fn run_two_grid(config: &ExperimentConfig, pairs: &[(usize, usize)]) -> RunReport {
    let method = match config.method {
        MethodKind::A1 => Method::Algorithm1,
        MethodKind::A2 => Method::Algorithm2,
        _ => Method::TwoGrid,
    };
    let coeff = config.problem.coefficients();
    let mut table = ResultTable::new(&TWO_GRID_COLUMNS);
    let mut failures = Vec::new();
    for &i in &config.indices {
        let reference = config.problem.reference(i);
        // (scale, eigenvalue error, eigenfunction error) of the previous row
        let mut previous: Option<(f64, Option<f64>, Option<f64>)> = None;
        for &(c, f) in pairs {
            let row = build_pair(config, c, f).and_then(|(coarse, fine, hl, fl)| {
                let (nc, nf) = (coarse.num_vertices(), fine.num_vertices());
                let scale = match config.mesh {
                    MeshFamily::Structured => 1.0 / f as f64,
                    MeshFamily::Refined(_) => 1.0 / (nf as f64).sqrt(),
                };
                let r = two_grid(method, coarse, fine, &coeff, i)?;
                Ok((r, hl, fl, nc, nf, scale))
            });
            let (r, hl, fl, nc, nf, scale) = match row {
                Ok(v) => v,
                Err(e) => {
                    failures.push(format!("i = {i}, pair {c}:{f}: {e}"));
                    previous = None;
                    continue;
                }
            };
            let error = reference.as_ref().map(|rf| r.enhanced_value - rf.eigenvalue);
            let grad = reference
                .as_ref()
                .filter(|rf| rf.is_simple())
                .and_then(|rf| two_grid_gradient_error(&r, rf));
            let order_of = |prev: Option<f64>, now: Option<f64>, prev_scale: f64| match (prev, now) {
                (Some(a), Some(b)) if a != 0.0 && b != 0.0 => convergence_order(&[a, b], &[prev_scale, scale])
                    .ok()
                    .map(|o| fmt_order(o[0]))
                    .unwrap_or_default(),
                _ => String::new(),
            };
            let (order, grad_order) = match previous {
                Some((ps, pe, pg)) => (order_of(pe, error, ps), order_of(pg, grad, ps)),
                None => (String::new(), String::new()),
            };
            table.rows.push(vec![
                i.to_string(),
                hl,
                fl,
                nc.to_string(),
                nf.to_string(),
                fmt_value(r.enhanced_value),
                error.map(fmt_error).unwrap_or_default(),
                order,
                grad.map(fmt_error).unwrap_or_default(),
                grad_order,
            ]);
            previous = Some((scale, error, grad));
        }
    }
    RunReport {
        table,
        failures,
        plot: None,
    }
}

fn run_adaptive(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let Schedule::Adaptive {
        theta,
        epsilon,
        max_levels,
        initial,
    } = config.schedule
    else {
        unreachable!("validated");
    };
    let variant = if config.method == MethodKind::A3 { Variant::A3 } else { Variant::A4 };
    let mesh = match &config.mesh {
        MeshFamily::Structured => config.problem.uniform_mesh(initial)?,
        MeshFamily::Refined(base) => (**base).clone(),
    };
    let adaptive = AdaptiveConfig {
        theta,
        epsilon,
        variant,
        max_levels,
    };
    let trace = adaptive_loop(Arc::new(mesh), &config.problem.coefficients(), &adaptive)?;
    let reference = config.problem.reference(1);
    let mut table = ResultTable::new(&ADAPTIVE_COLUMNS);
    let last = trace.states.len() - 1;
    for (k, s) in trace.states.iter().enumerate() {
        let eta2 = s.estimator.global.powi(2);
        let (rq_err, en_err, kappa) = match &reference {
            Some(r) => (
                fmt_error(s.rayleigh - r.eigenvalue),
                fmt_error(s.enhanced - r.eigenvalue),
                effectivity_index(s.estimator.global, r.eigenvalue, s.rayleigh)
                    .map(|k| format!("{k:.6}"))
                    .unwrap_or_default(),
            ),
            None => Default::default(),
        };
        let grad = reference.as_ref().and_then(|r| r.eigenfunction.as_ref()).map(|u| {
            let sign = orientation(&s.function, u.as_ref());
            fmt_error(s.recovered.error(|p| {
                let g = u.gradient(p);
                [sign * g[0], sign * g[1]]
            }))
        });
        table.rows.push(vec![
            s.level.to_string(),
            s.dofs.to_string(),
            fmt_value(s.rayleigh),
            fmt_value(s.enhanced),
            fmt_error(eta2),
            rq_err,
            en_err,
            kappa,
            grad.unwrap_or_default(),
            (k == last && trace.converged).to_string(),
        ]);
    }
    let plot = reference.map(|r| plot_data(&trace.states, r.eigenvalue));
    let failures = if trace.converged {
        Vec::new()
    } else {
        vec![format!("tolerance ε = {epsilon:e} not reached within {max_levels} levels")]
    };
    Ok(RunReport { table, failures, plot })
}

/// The shipped unstructured Delaunay mesh of the unit square (31 vertices).
pub fn delaunay_square() -> Mesh {
    read_mesh(
        include_str!("../../data/delaunay_square.node"),
        include_str!("../../data/delaunay_square.ele"),
    )
    .expect("bundled mesh is valid")
}
