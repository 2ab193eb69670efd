//! Modified maximum marking and the solve → estimate → mark → refine loop.
//!
//! An element with `η(T) ∈ [2^{−(j+1)} η_max, 2^{−j} η_max)` is bisected
//! `K_max − j` times, `j = 0, …, K_max − 1`; smaller indicators are left alone.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::assembly::{assemble, Stabilization};
use crate::error::{Error, Result};
use crate::estimator::{indicator_report, EstimatorConfig, IndicatorReport};
use crate::field::DiscreteField;
use crate::linsolve::{solve, SolveOptions};
use crate::mesh::{MarkList, Mesh};
use crate::problems::{Problem, ProblemId};
use crate::scalar::{lit, Real};
use crate::seminorms::{maxnorm_error, star_global, starstar_global, ErrorField};

/// Bisections per element and step in uniform mode. Two newest-vertex
/// bisections split every triangle into four similar ones.
pub const UNIFORM_COUNT: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    Uniform,
    Adaptive,
}

impl RefineMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RefineMode::Uniform => "uniform",
            RefineMode::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for RefineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RefineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(RefineMode::Uniform),
            "adaptive" => Ok(RefineMode::Adaptive),
            _ => Err(Error::InvalidArgument(format!(
                "unknown refinement mode {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdaptConfig<T> {
    pub problem: ProblemId,
    pub eps: T,
    pub stabilization: Stabilization<T>,
    pub refine: RefineMode,
    pub k_max: u32,
    /// Stop once the number of degrees of freedom reaches this value.
    pub max_dof: usize,
    pub estimator: EstimatorConfig<T>,
    /// Lattice order for `‖u − u_h‖_∞` and `|a·∇e|_{**}`.
    pub sample_order: usize,
    /// Subdivisions per side of the initial structured mesh.
    pub initial_n: usize,
    pub solver: SolveOptions,
    /// Optional stop once `η_max` drops below this value.
    pub eta_stop: Option<T>,
    pub max_steps: Option<usize>,
}

impl<T: Real> AdaptConfig<T> {
    pub fn new(problem: ProblemId, eps: T) -> Self {
        Self {
            problem,
            eps,
            stabilization: Stabilization::None,
            refine: RefineMode::Adaptive,
            k_max: 4,
            max_dof: 100_000,
            estimator: EstimatorConfig::default(),
            sample_order: 4,
            initial_n: 4,
            solver: SolveOptions::default(),
            eta_stop: None,
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.k_max == 0 {
            return bad("k_max must be at least 1");
        }
        if self.initial_n == 0 {
            return bad("initial mesh needs at least one subdivision");
        }
        if self.sample_order == 0 {
            return bad("sample order must be at least 1");
        }
        if !(self.eps > T::zero()) {
            return bad("eps must be positive");
        }
        if !(self.estimator.c_vol > T::zero() && self.estimator.c_jump > T::zero()) {
            return bad("estimator constants must be positive");
        }
        Ok(())
    }
}

/// Quantities recorded after each solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptRecord<T> {
    pub step: usize,
    pub dof: usize,
    /// `‖u − u_h‖_{∞;Ω}`
    pub err_max: T,
    /// `|a·∇e|_*`
    pub star: T,
    /// Element part `max_T |a·∇e|_{*;T}` of `star`.
    pub star_element: T,
    /// Edge part `max_E |a·∇e|_{*;E}` of `star`.
    pub star_edge: T,
    /// `|a·∇e|_{**}`
    pub starstar: T,
    /// `max_T η(T)`
    pub eta_max: T,
    /// `max_T osc_T`
    pub osc: T,
    pub ell_h: T,
    pub seconds: f64,
}

/// Everything known at the end of one step, handed to the observer.
pub struct Step<'a, T> {
    pub record: &'a AdaptRecord<T>,
    pub mesh: &'a Mesh<T>,
    pub u_h: &'a DiscreteField<T>,
    pub report: &'a IndicatorReport<T>,
}

#[derive(Debug)]
pub struct AdaptRun<T> {
    pub records: Vec<AdaptRecord<T>>,
    pub final_mesh: Mesh<T>,
    /// Set when a step failed; `records` holds every completed step.
    pub failure: Option<Error>,
}

/// Bisection counts from the indicator ladder.
pub fn mark_indicators<T: Real>(etas: &[T], k_max: u32) -> Result<MarkList> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if let Some(t) = etas.iter().position(|e| !e.is_finite() || *e < T::zero()) {
        return Err(Error::InvalidMark {
            triangle: t,
            reason: "indicator is negative or not finite",
        });
    }
    let max = etas.iter().copied().fold(T::zero(), T::max);
    if !(max > T::zero()) {
        return Err(Error::ZeroIndicators);
    }
    let half = lit::<T>(0.5);
    let mut marks = MarkList::new();
    for (t, &eta) in etas.iter().enumerate() {
        let mut threshold = max * half;
        for j in 0..k_max {
            if eta >= threshold {
                marks.set(t, k_max - j);
                break;
            }
            threshold = threshold * half;
        }
    }
    Ok(marks)
}

pub fn mark<T: Real>(report: &IndicatorReport<T>, k_max: u32) -> Result<MarkList> {
    mark_indicators(&report.etas(), k_max)
}

pub fn adapt_loop<T: Real>(cfg: &AdaptConfig<T>) -> Result<AdaptRun<T>> {
    adapt_loop_with(cfg, |_| {})
}

/// Runs the loop, calling `observe` after every completed step. Only an
/// invalid configuration is returned as `Err`; failures during the loop end
/// it early and are reported in [`AdaptRun::failure`].
pub fn adapt_loop_with<T: Real, F>(cfg: &AdaptConfig<T>, mut observe: F) -> Result<AdaptRun<T>>
where
    F: FnMut(&Step<'_, T>),
{
    cfg.validate()?;
    let problem = cfg.problem.build(cfg.eps)?;
    let mut mesh = Mesh::structured_unit_square(cfg.initial_n)?;
    let mut records = Vec::new();
    let mut failure = None;
    for step in 0.. {
        let started = Instant::now();
        let outcome = run_step(cfg, &problem, &mesh, step);
        let (u_h, report, mut record) = match outcome {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        record.seconds = started.elapsed().as_secs_f64();
        observe(&Step {
            record: &record,
            mesh: &mesh,
            u_h: &u_h,
            report: &report,
        });
        records.push(record);

        let done = record.dof >= cfg.max_dof
            || cfg.eta_stop.is_some_and(|s| record.eta_max <= s)
            || cfg.max_steps.is_some_and(|m| step + 1 >= m);
        if done {
            break;
        }
        let marks = match cfg.refine {
            RefineMode::Uniform => Ok(MarkList::uniform(mesh.num_triangles(), UNIFORM_COUNT)),
            RefineMode::Adaptive => mark(&report, cfg.k_max),
        };
        match marks.and_then(|m| mesh.bisect(&m)) {
            Ok(m) => mesh = m,
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    Ok(AdaptRun {
        records,
        final_mesh: mesh,
        failure,
    })
}

fn run_step<T: Real>(
    cfg: &AdaptConfig<T>,
    problem: &Problem<T>,
    mesh: &Mesh<T>,
    step: usize,
) -> Result<(DiscreteField<T>, IndicatorReport<T>, AdaptRecord<T>)> {
    let system = assemble(mesh, problem, &cfg.stabilization)?;
    let solved = solve(&system.matrix, &system.rhs, &cfg.solver)?;
    let u_h = system.expand(&solved.solution);
    let report = indicator_report(mesh, &u_h, problem, &cfg.estimator);
    let err = ErrorField::from_problem(mesh, &u_h, problem)?;
    let alphas = report.alphas();
    let err_max = maxnorm_error(&err, cfg.sample_order);
    let star = star_global(&err, problem.eps, &alphas);
    let starstar = starstar_global(&err, &alphas, cfg.sample_order);
    let record = AdaptRecord {
        step,
        dof: system.num_dofs(),
        err_max,
        star: star.value(),
        star_element: star.max_element,
        star_edge: star.max_edge,
        starstar,
        eta_max: report.max_eta,
        osc: report.max_osc,
        ell_h: report.ell_h,
        seconds: 0.0,
    };
    if [err_max, record.star, starstar, report.max_eta]
        .iter()
        .any(|v| !v.is_finite())
    {
        return Err(Error::Solve {
            reason: "non-finite error measure".into(),
            residual: solved.relative_residual,
        });
    }
    Ok((u_h, report, record))
}
