//! `afem`: runs one solve → estimate → mark → refine campaign and writes a
//! CSV table of per-step error measures plus a table of empirical rates.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use maxnorm_afem::adaptivity::{adapt_loop_with, AdaptConfig, AdaptRecord, RefineMode};
use maxnorm_afem::assembly::Stabilization;
use maxnorm_afem::estimator::EstimatorConfig;
use maxnorm_afem::linsolve::SolveOptions;
use maxnorm_afem::problems::ProblemId;
use maxnorm_afem::rates::quantity_rates;

const HEADER: &str = "step,dof,err_max,star,starstar,eta_max,osc,ell_h,seconds";

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    U1,
    U2,
    U3,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StabArg {
    None,
    Supg,
    Cip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RefineArg {
    Uniform,
    Adaptive,
}

/// Adaptive P1 solver for -eps Δu + div(a u) + b u = f on the unit square.
#[derive(Debug, Parser)]
#[command(name = "afem", version)]
struct Args {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "none")]
    stab: StabArg,
    #[arg(long, value_enum, default_value = "adaptive")]
    refine: RefineArg,
    /// Stop once the number of degrees of freedom reaches this value.
    #[arg(long, default_value_t = 100_000)]
    max_dof: usize,
    /// Largest number of bisections per step for one element.
    #[arg(long, default_value_t = 4)]
    kmax: u32,
    #[arg(long, default_value_t = 0.0125)]
    c_vol: f64,
    #[arg(long, default_value_t = 0.03)]
    c_jump: f64,
    /// Interior penalty constant, used with --stab cip.
    #[arg(long, default_value_t = 0.01)]
    c_cip: f64,
    /// Multiplies the streamline-diffusion parameter, used with --stab supg.
    #[arg(long, default_value_t = 1.0)]
    supg_scale: f64,
    /// Relative residual required of the linear solver.
    #[arg(long, default_value_t = 1e-10)]
    lin_tol: f64,
    /// Barycentric lattice order for sampled maximum norms.
    #[arg(long, default_value_t = 4)]
    sample_order: usize,
    /// Subdivisions per side of the initial mesh.
    #[arg(long, default_value_t = 4)]
    initial_n: usize,
    /// Stop once the estimator drops below this value.
    #[arg(long)]
    eta_stop: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// CSV output; rates go next to it with a `.rates.csv` suffix.
    #[arg(long, default_value = "afem.csv")]
    out: PathBuf,
    /// Write a VTK mesh with the solution every N steps (0 disables).
    #[arg(long, default_value_t = 0)]
    export_mesh_every: usize,
    /// Worker threads for per-element loops (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

fn config(args: &Args) -> AdaptConfig<f64> {
    let problem = match args.problem {
        ProblemArg::U1 => ProblemId::U1,
        ProblemArg::U2 => ProblemId::U2,
        ProblemArg::U3 => ProblemId::U3,
    };
    let mut cfg = AdaptConfig::new(problem, args.eps);
    cfg.stabilization = match args.stab {
        StabArg::None => Stabilization::None,
        StabArg::Supg => Stabilization::Supg {
            scale: args.supg_scale,
        },
        StabArg::Cip => Stabilization::Cip { c: args.c_cip },
    };
    cfg.refine = match args.refine {
        RefineArg::Uniform => RefineMode::Uniform,
        RefineArg::Adaptive => RefineMode::Adaptive,
    };
    cfg.k_max = args.kmax;
    cfg.max_dof = args.max_dof;
    cfg.estimator = EstimatorConfig {
        c_vol: args.c_vol,
        c_jump: args.c_jump,
        sample_order: args.sample_order,
    };
    cfg.sample_order = args.sample_order;
    cfg.initial_n = args.initial_n;
    cfg.solver = SolveOptions {
        tol: args.lin_tol,
        ..SolveOptions::default()
    };
    cfg.eta_stop = args.eta_stop;
    cfg.max_steps = args.max_steps;
    cfg
}

fn csv_row(r: &AdaptRecord<f64>) -> String {
    format!(
        "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:.6}",
        r.step, r.dof, r.err_max, r.star, r.starstar, r.eta_max, r.osc, r.ell_h, r.seconds
    )
}

fn rates_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "afem".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.rates.csv"))
}

fn write_rates(path: &Path, records: &[AdaptRecord<f64>]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "quantity,kind,from_step,to_step,slope,note")?;
    let dof: Vec<f64> = records.iter().map(|r| r.dof as f64).collect();
    let columns: [(&str, fn(&AdaptRecord<f64>) -> f64); 5] = [
        ("err_max", |r| r.err_max),
        ("star", |r| r.star),
        ("starstar", |r| r.starstar),
        ("eta_max", |r| r.eta_max),
        ("osc", |r| r.osc),
    ];
    let tail_points = 3;
    for (name, get) in columns {
        let values: Vec<f64> = records.iter().map(get).collect();
        let q = quantity_rates(name, &dof, &values, tail_points);
        for (i, s) in q.pairs.iter().enumerate() {
            let (from, to) = (records[i].step, records[i + 1].step);
            match s {
                Some(s) => writeln!(w, "{name},pair,{from},{to},{s:.6},")?,
                None => writeln!(w, "{name},pair,{from},{to},,nonpositive value skipped")?,
            }
        }
        if records.len() >= 2 {
            let from = records[records.len() - q.tail_points].step;
            let to = records[records.len() - 1].step;
            match q.tail {
                Some(s) => writeln!(w, "{name},tail_fit,{from},{to},{s:.6},")?,
                None => writeln!(w, "{name},tail_fit,{from},{to},,too few positive values")?,
            }
        }
    }
    w.flush()
}

fn run(args: &Args) -> Result<(), Failure> {
    if !(args.eps > 0.0 && args.eps <= 1.0) {
        return Err(Failure::Usage(format!(
            "--eps must lie in (0, 1], got {}",
            args.eps
        )));
    }
    if args.lin_tol <= 0.0 || args.c_cip < 0.0 || args.supg_scale < 0.0 {
        return Err(Failure::Usage(
            "--lin-tol must be positive, --c-cip and --supg-scale nonnegative".into(),
        ));
    }
    let cfg = config(args);
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }

    let usage_io =
        |e: io::Error| Failure::Usage(format!("cannot write {}: {e}", args.out.display()));
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(usage_io)?;
    }
    let mut csv = BufWriter::new(File::create(&args.out).map_err(usage_io)?);
    writeln!(csv, "{HEADER}")
        .and_then(|_| csv.flush())
        .map_err(usage_io)?;

    let mesh_dir = args.out.with_extension("meshes");
    let mut io_error: Option<io::Error> = None;
    let run = adapt_loop_with(&cfg, |step| {
        if io_error.is_some() {
            return;
        }
        let r = step.record;
        eprintln!(
            "step {:>3}  dof {:>8}  err_max {:.3e}  eta_max {:.3e}  star {:.3e}",
            r.step, r.dof, r.err_max, r.eta_max, r.star
        );
        let mut write = || -> io::Result<()> {
            writeln!(csv, "{}", csv_row(r))?;
            csv.flush()?;
            if args.export_mesh_every > 0 && r.step % args.export_mesh_every == 0 {
                fs::create_dir_all(&mesh_dir)?;
                let path = mesh_dir.join(format!("step_{:04}.vtk", r.step));
                let mut f = BufWriter::new(File::create(path)?);
                let eta = step.report.etas();
                step.mesh
                    .write_vtk(&mut f, &[("u_h", &step.u_h.values)], &[("eta", &eta)])?;
                f.flush()?;
            }
            Ok(())
        };
        if let Err(e) = write() {
            io_error = Some(e);
        }
    })
    .map_err(|e| Failure::Usage(e.to_string()))?;

    if let Some(e) = io_error {
        return Err(Failure::Numerical(format!("output failed: {e}")));
    }
    write_rates(&rates_path(&args.out), &run.records)
        .map_err(|e| Failure::Numerical(format!("cannot write rates: {e}")))?;
    match run.failure {
        Some(e) => Err(Failure::Numerical(format!(
            "run stopped after {} steps: {e}",
            run.records.len()
        ))),
        None => Ok(()),
    }
}
