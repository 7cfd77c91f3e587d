use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ppr_eigen::harness::{
    self, preset, ExperimentConfig, HarnessError, MeshFamily, MethodKind, Problem, Schedule,
};
use ppr_eigen::mesh::{read_mesh_files, regular_refine, write_mesh_files, write_wireframe};

#[derive(Parser)]
#[command(version, about = "Recovery-enhanced two-grid and adaptive eigenvalue solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and print (and optionally save) the result table.
    Run(RunArgs),
    /// Generate, refine or export meshes in the `.node`/`.ele` format.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Print a result CSV as an aligned table.
    Table { csv: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// Named experiment (table1..table7, example2, example3, table1-extended, ...).
    #[arg(long, conflicts_with_all = ["problem", "method", "schedule"])]
    preset: Option<String>,
    #[arg(long, value_enum, default_value = "square-laplace")]
    problem: ProblemArg,
    #[arg(long, default_value = "A1")]
    method: String,
    /// Two-grid pairs `H:h`, e.g. `1/4:1/16,1/8:1/64`; with `--mesh` the
    /// entries are refinement levels of that mesh, e.g. `0:2,1:4`.
    #[arg(long)]
    schedule: Option<String>,
    /// Base mesh prefix (reads `<prefix>.node` and `<prefix>.ele`).
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long, default_value_t = 0.4)]
    theta: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 25)]
    max_levels: usize,
    /// Initial spacing `1/n` for adaptive runs on generated meshes.
    #[arg(long, default_value_t = 2)]
    initial: usize,
    /// Comma-separated 1-based eigenvalue indices.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    index: Vec<usize>,
    /// CSV output path; presets with several methods append the method name.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    SquareLaplace,
    LshapeLaplace,
    HarmonicOscillator,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::SquareLaplace => Problem::SquareLaplace,
            ProblemArg::LshapeLaplace => Problem::LshapeLaplace,
            ProblemArg::HarmonicOscillator => Problem::HarmonicOscillator,
        }
    }
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Uniform mesh of a problem domain with spacing 1/n.
    Generate {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        /// Output prefix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regular (red) refinement, repeated `times` times.
    Refine {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Edge list as whitespace-separated segments for plotting.
    Export {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configs(args: &RunArgs) -> Result<Vec<ExperimentConfig>, HarnessError> {
    if let Some(name) = &args.preset {
        let mut configs = preset(name)?;
        let several = configs.len() > 1;
        for c in &mut configs {
            c.output = args.out.as_ref().map(|p| {
                if several {
                    suffixed(p, &format!("{:?}", c.method))
                } else {
                    p.clone()
                }
            });
        }
        return Ok(configs);
    }
    let method: MethodKind = args.method.parse()?;
    let mesh = match &args.mesh {
        Some(prefix) => MeshFamily::Refined(Arc::new(read_mesh_files(prefix)?)),
        None => MeshFamily::Structured,
    };
    let schedule = if method.is_adaptive() {
        Schedule::Adaptive {
            theta: args.theta,
            epsilon: args.eps,
            max_levels: args.max_levels,
            initial: args.initial,
        }
    } else {
        let s = args
            .schedule
            .as_deref()
            .ok_or_else(|| HarnessError::Config("two-grid methods need --schedule".into()))?;
        Schedule::parse_pairs(s)?
    };
    Ok(vec![ExperimentConfig {
        problem: args.problem.into(),
        method,
        mesh,
        schedule,
        indices: args.index.clone(),
        output: args.out.clone(),
    }])
}

fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}-{tag}.{ext}"))
}

fn run(args: &RunArgs) -> Result<bool, HarnessError> {
    let mut clean = true;
    for config in configs(args)? {
        let report = harness::run(&config)?;
        println!("{:?} {:?}", config.problem, config.method);
        print!("{}", report.table.to_aligned());
        println!();
        for f in &report.failures {
            eprintln!("aborted: {f}");
            clean = false;
        }
    }
    Ok(clean)
}

fn mesh(cmd: &MeshCommand) -> Result<(), HarnessError> {
    match cmd {
        MeshCommand::Generate { problem, n, out } => {
            let m = Problem::from(*problem).uniform_mesh(*n)?;
            write_mesh_files(&m, out)?;
            eprintln!("{} vertices, {} triangles", m.num_vertices(), m.num_triangles());
        }
        MeshCommand::Refine { input, times, out } => {
            let mut m = read_mesh_files(input)?;
            for _ in 0..*times {
                m = regular_refine(&m)?;
            }
            write_mesh_files(&m, out)?;
            eprintln!("{} vertices, {} triangles", m.num_vertices(), m.num_triangles());
        }
        MeshCommand::Export { input, out } => {
            let text = write_wireframe(&read_mesh_files(input)?);
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Mesh(cmd) => mesh(cmd).map(|_| true),
        Command::Table { csv } => std::fs::read_to_string(csv)
            .map_err(HarnessError::from)
            .and_then(|t| harness::format_table(&t))
            .map(|t| {
                print!("{t}");
                true
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
