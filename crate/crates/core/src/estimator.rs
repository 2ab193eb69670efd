//! Maximum-norm residual indicators
//!
//! `η(T) = α_T ‖R_h‖_{∞;T} + β_T ‖⟦∇u_h⟧‖_{∞;∂T∖∂Ω}`
//!
//! with `α_T = min{1, c_vol ℓ_h h_T²/ε}`, `β_T = min{√ε, c_jump ℓ_h h_T}` and
//! `ℓ_h = 1 + ln(2 + ε/h_min) + |ln ε|`. For P1 fields the residual reduces to
//! `R_h = a·∇u_h + (div a + b) u_h − f` elementwise. Maximum norms are taken
//! over a barycentric sampling lattice.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::field::DiscreteField;
use crate::mesh::Mesh;
use crate::problems::Problem;
use crate::quadrature::{lattice, Bary, TriangleRule};
use crate::scalar::{dot, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig<T> {
    pub c_vol: T,
    pub c_jump: T,
    /// Lattice order for maximum-norm sampling (order 4 gives 15 points).
    pub sample_order: usize,
}

impl<T: Real> Default for EstimatorConfig<T> {
    fn default() -> Self {
        Self {
            c_vol: lit(0.0125),
            c_jump: lit(0.03),
            sample_order: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementIndicator<T> {
    pub eta: T,
    /// `α_T ‖R_h‖_{∞;T}`
    pub volume: T,
    /// `β_T ‖⟦∇u_h⟧‖_{∞;∂T∖∂Ω}`
    pub jump: T,
    pub alpha: T,
    pub beta: T,
    /// `α_T ‖R_h − mean_T R_h‖_{∞;T}`
    pub osc: T,
    /// Largest `osc` over the vertex patch of `T`.
    pub osc_patch: T,
}

#[derive(Debug, Clone)]
pub struct IndicatorReport<T> {
    pub elements: Vec<ElementIndicator<T>>,
    pub max_eta: T,
    pub argmax: usize,
    pub max_osc: T,
    pub ell_h: T,
}

impl<T: Real> IndicatorReport<T> {
    pub fn etas(&self) -> Vec<T> {
        self.elements.iter().map(|e| e.eta).collect()
    }

    pub fn alphas(&self) -> Vec<T> {
        self.elements.iter().map(|e| e.alpha).collect()
    }

    /// One row per element.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "element,eta,volume,jump,alpha,beta,osc,osc_patch")?;
        for (t, e) in self.elements.iter().enumerate() {
            writeln!(
                w,
                "{t},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                e.eta, e.volume, e.jump, e.alpha, e.beta, e.osc, e.osc_patch
            )?;
        }
        Ok(())
    }
}

/// `ℓ_h = 1 + ln(2 + ε/h_min) + |ln ε|`.
pub fn log_factor<T: Real>(eps: T, h_min: T) -> T {
    T::one() + (lit::<T>(2.0) + eps / h_min).ln() + eps.ln().abs()
}

/// `(α_T, β_T)` with the configured constants folded in.
pub fn weights<T: Real>(eps: T, h: T, ell_h: T, cfg: &EstimatorConfig<T>) -> (T, T) {
    let alpha = T::one().min(cfg.c_vol * ell_h * h * h / eps);
    let beta = eps.sqrt().min(cfg.c_jump * ell_h * h);
    (alpha, beta)
}

/// `R_h` at barycentric point `bary` of triangle `t`.
#[inline]
pub fn residual_at<T: Real>(
    mesh: &Mesh<T>,
    t: usize,
    u_h: &DiscreteField<T>,
    grad: [T; 2],
    problem: &Problem<T>,
    bary: Bary<T>,
) -> T {
    let x = mesh.map_point(t, bary);
    let u = u_h.eval(mesh, t, bary);
    dot(problem.a(x), grad) + (problem.div_a(x) + problem.b(x)) * u - problem.f(x)
}

/// Sampled `‖R_h‖_{∞;T}`.
pub fn element_residual_maxnorm<T: Real>(
    mesh: &Mesh<T>,
    t: usize,
    u_h: &DiscreteField<T>,
    problem: &Problem<T>,
    sample_order: usize,
) -> T {
    let grad = u_h.gradient(mesh, t);
    lattice::<T>(sample_order)
        .into_iter()
        .map(|b| residual_at(mesh, t, u_h, grad, problem, b).abs())
        .fold(T::zero(), T::max)
}

/// `|∇u⁺·n⁺ + ∇u⁻·n⁻|` on edge `e`; zero on boundary edges.
pub fn edge_jump<T: Real>(mesh: &Mesh<T>, e: usize, u_h: &DiscreteField<T>) -> T {
    let edge = &mesh.edges()[e];
    if edge.boundary {
        return T::zero();
    }
    let [tp, tm] = edge.triangles;
    let gp = u_h.gradient(mesh, tp);
    let gm = u_h.gradient(mesh, tm);
    let lp = mesh
        .triangle_edges(tp)
        .iter()
        .position(|&x| x == e)
        .expect("edge of triangle");
    let n = mesh.element_geometry(tp).normals[lp];
    // n⁻ = −n⁺
    (dot(gp, n) - dot(gm, n)).abs()
}

/// `‖⟦∇u_h⟧‖_{∞;∂T∖∂Ω}`: boundary edges carry no jump.
pub fn jump_maxnorm<T: Real>(mesh: &Mesh<T>, t: usize, u_h: &DiscreteField<T>) -> T {
    mesh.triangle_edges(t)
        .iter()
        .map(|&e| edge_jump(mesh, e, u_h))
        .fold(T::zero(), T::max)
}

/// `α_T ‖R_h − R_{h,T}‖_{∞;T}` where `R_{h,T}` is the mean of `R_h` on `T`.
pub fn oscillation<T: Real>(
    mesh: &Mesh<T>,
    t: usize,
    u_h: &DiscreteField<T>,
    problem: &Problem<T>,
    alpha: T,
    sample_order: usize,
) -> T {
    let rule = TriangleRule::<T>::degree4();
    oscillation_with(mesh, t, u_h, problem, alpha, &lattice(sample_order), &rule)
}

fn oscillation_with<T: Real>(
    mesh: &Mesh<T>,
    t: usize,
    u_h: &DiscreteField<T>,
    problem: &Problem<T>,
    alpha: T,
    samples: &[Bary<T>],
    rule: &TriangleRule<T>,
) -> T {
    let grad = u_h.gradient(mesh, t);
    let mean = rule.integrate(T::one(), |b| residual_at(mesh, t, u_h, grad, problem, b));
    let dev = samples
        .iter()
        .map(|&b| (residual_at(mesh, t, u_h, grad, problem, b) - mean).abs())
        .fold(T::zero(), T::max);
    alpha * dev
}

/// Per-element indicators, weights and oscillation, with global maxima.
pub fn indicator_report<T: Real>(
    mesh: &Mesh<T>,
    u_h: &DiscreteField<T>,
    problem: &Problem<T>,
    cfg: &EstimatorConfig<T>,
) -> IndicatorReport<T> {
    let eps = problem.eps;
    let ell_h = log_factor(eps, mesh.min_diameter());
    let samples = lattice::<T>(cfg.sample_order);
    let rule = TriangleRule::<T>::degree4();
    let jumps: Vec<T> = (0..mesh.edges().len())
        .into_par_iter()
        .map(|e| edge_jump(mesh, e, u_h))
        .collect();

    let mut elements: Vec<ElementIndicator<T>> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let h = mesh.diameter(t);
            let (alpha, beta) = weights(eps, h, ell_h, cfg);
            let grad = u_h.gradient(mesh, t);
            let res = samples
                .iter()
                .map(|&b| residual_at(mesh, t, u_h, grad, problem, b).abs())
                .fold(T::zero(), T::max);
            let jmp = mesh
                .triangle_edges(t)
                .iter()
                .map(|&e| jumps[e])
                .fold(T::zero(), T::max);
            let volume = alpha * res;
            let jump = beta * jmp;
            let osc = oscillation_with(mesh, t, u_h, problem, alpha, &samples, &rule);
            ElementIndicator {
                eta: volume + jump,
                volume,
                jump,
                alpha,
                beta,
                osc,
                osc_patch: T::zero(),
            }
        })
        .collect();
    let patch_osc: Vec<T> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            mesh.patch(t)
                .into_iter()
                .map(|s| elements[s].osc)
                .fold(T::zero(), T::max)
        })
        .collect();
    for (e, p) in elements.iter_mut().zip(patch_osc) {
        e.osc_patch = p;
    }
    let (argmax, max_eta) = elements
        .iter()
        .enumerate()
        .fold((0, T::zero()), |(bi, bv), (i, e)| {
            if e.eta > bv {
                (i, e.eta)
            } else {
                (bi, bv)
            }
        });
    let max_osc = elements.iter().map(|e| e.osc).fold(T::zero(), T::max);
    IndicatorReport {
        elements,
        max_eta,
        argmax,
        max_osc,
        ell_h,
    }
}
