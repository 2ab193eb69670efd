//! Error measures for manufactured solutions: the dual-type seminorms of the
//! convective derivative `a·∇e`, the simpler weighted maximum norm of
//! `a·∇e`, and the maximum norm of `e = u − u_h`.
//!
//! For piecewise-linear test functions the suprema over ψ and φ are attained
//! at constants, so
//!
//! * `|a·∇e|_{*;T} = α_T |∫_T b_T a·∇e| / |T|` with `b_T = (λ₁λ₂λ₃)²`,
//! * `|a·∇e|_{*;E} = ĥ_E⁻¹ |Σ± α_{T±} ∫_{T_E^±} b_E a·∇e| / |E|` with
//!   `b_E = (λ_pλ_q)²` on the sub-triangles `T_E^±` that share `E`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::DiscreteField;
use crate::mesh::Mesh;
use crate::problems::Problem;
use crate::quadrature::{lattice, Bary, TriangleRule};
use crate::scalar::{dot, lit, norm, sub, Point, Real};

type ScalarRef<'a, T> = &'a (dyn Fn(Point<T>) -> T + Send + Sync);
type VectorRef<'a, T> = &'a (dyn Fn(Point<T>) -> Point<T> + Send + Sync);

/// `e = u − u_h` and its gradient at arbitrary points.
#[derive(Clone, Copy)]
pub struct ErrorField<'a, T> {
    pub mesh: &'a Mesh<T>,
    pub u_h: &'a DiscreteField<T>,
    u: ScalarRef<'a, T>,
    grad_u: VectorRef<'a, T>,
    convection: VectorRef<'a, T>,
}

impl<'a, T: Real> ErrorField<'a, T> {
    pub fn new(
        mesh: &'a Mesh<T>,
        u_h: &'a DiscreteField<T>,
        u: ScalarRef<'a, T>,
        grad_u: VectorRef<'a, T>,
        convection: VectorRef<'a, T>,
    ) -> Self {
        Self {
            mesh,
            u_h,
            u,
            grad_u,
            convection,
        }
    }

    /// Uses the analytic solution carried by `problem`.
    pub fn from_problem(
        mesh: &'a Mesh<T>,
        u_h: &'a DiscreteField<T>,
        problem: &'a Problem<T>,
    ) -> Result<Self> {
        let exact = problem.exact.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("problem {} has no exact solution", problem.name))
        })?;
        Ok(Self::new(
            mesh,
            u_h,
            &*exact.u,
            &*exact.grad,
            &*problem.convection,
        ))
    }

    pub fn value(&self, t: usize, bary: Bary<T>) -> T {
        (self.u)(self.mesh.map_point(t, bary)) - self.u_h.eval(self.mesh, t, bary)
    }

    pub fn gradient(&self, t: usize, bary: Bary<T>) -> Point<T> {
        let g = (self.grad_u)(self.mesh.map_point(t, bary));
        sub(g, self.u_h.gradient(self.mesh, t))
    }

    /// `a·∇e` at physical point `x` of triangle `t`, given `∇u_h|_T`.
    #[inline]
    fn convective_at(&self, x: Point<T>, grad_h: Point<T>) -> T {
        dot((self.convection)(x), sub((self.grad_u)(x), grad_h))
    }

    pub fn convective(&self, t: usize, bary: Bary<T>) -> T {
        self.convective_at(
            self.mesh.map_point(t, bary),
            self.u_h.gradient(self.mesh, t),
        )
    }
}

/// The sub-triangles `T_E^±` of an interior edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSubsimplexPair<T> {
    pub edge: usize,
    /// Parent triangles `[T⁺, T⁻]`.
    pub parents: [usize; 2],
    /// Corners `[p, q, apex]` of each sub-triangle, `p, q` the edge endpoints.
    pub simplices: [[Point<T>; 3]; 2],
    pub h_hat: T,
    pub edge_length: T,
}

impl<T: Real> EdgeSubsimplexPair<T> {
    /// `|T_E^±|`, equal to `ĥ_E |E|` for both sides.
    pub fn areas(&self) -> [T; 2] {
        self.simplices
            .map(|[p, q, r]| crate::scalar::cross(sub(q, p), sub(r, p)).abs() * lit::<T>(0.5))
    }
}

/// Builds `T_E^±` with apex on the median of `T^±` through `E`, scaled so that
/// `|T_E^±| = ĥ_E |E|`, `ĥ_E = min{√ε, |T⁺|/|E|, |T⁻|/|E|}`.
pub fn edge_subsimplices<T: Real>(
    mesh: &Mesh<T>,
    edge: usize,
    eps: T,
) -> Result<EdgeSubsimplexPair<T>> {
    let e = &mesh.edges()[edge];
    if e.boundary {
        return Err(Error::InvalidArgument(format!(
            "edge {edge} is on the boundary"
        )));
    }
    let [vp, vq] = e.vertices;
    let p = mesh.vertices()[vp];
    let q = mesh.vertices()[vq];
    let len = norm(sub(q, p));
    let areas = e.triangles.map(|t| mesh.area(t));
    let h_hat = eps.sqrt().min(areas[0] / len).min(areas[1] / len);
    let half = lit::<T>(0.5);
    let mid = [(p[0] + q[0]) * half, (p[1] + q[1]) * half];
    let simplices = [0, 1].map(|k| {
        let t = e.triangles[k];
        let r = mesh.triangles()[t]
            .iter()
            .copied()
            .find(|&v| v != vp && v != vq)
            .map(|v| mesh.vertices()[v])
            .expect("triangle has a vertex off the edge");
        let s = (h_hat * len / areas[k]).min(T::one());
        let apex = [mid[0] + s * (r[0] - mid[0]), mid[1] + s * (r[1] - mid[1])];
        [p, q, apex]
    });
    Ok(EdgeSubsimplexPair {
        edge,
        parents: e.triangles,
        simplices,
        h_hat,
        edge_length: len,
    })
}

/// `|a·∇e|_{*;T}`.
pub fn star_element<T: Real>(err: &ErrorField<'_, T>, t: usize, alpha: T) -> T {
    star_element_with(err, t, alpha, &TriangleRule::degree8())
}

fn star_element_with<T: Real>(
    err: &ErrorField<'_, T>,
    t: usize,
    alpha: T,
    rule: &TriangleRule<T>,
) -> T {
    let gh = err.u_h.gradient(err.mesh, t);
    // ∫_T g / |T| is the normalised weight sum
    let avg = rule.integrate(T::one(), |b| {
        let bubble = b[0] * b[1] * b[2];
        bubble * bubble * err.convective_at(err.mesh.map_point(t, b), gh)
    });
    alpha * avg.abs()
}

/// `|a·∇e|_{*;E}` for an interior edge; `alphas` holds `α_T` per element.
pub fn star_edge<T: Real>(err: &ErrorField<'_, T>, edge: usize, eps: T, alphas: &[T]) -> Result<T> {
    Ok(star_edge_with(
        err,
        &edge_subsimplices(err.mesh, edge, eps)?,
        alphas,
        &TriangleRule::degree8(),
    ))
}

fn star_edge_with<T: Real>(
    err: &ErrorField<'_, T>,
    pair: &EdgeSubsimplexPair<T>,
    alphas: &[T],
    rule: &TriangleRule<T>,
) -> T {
    let areas = pair.areas();
    let mut total = T::zero();
    for k in 0..2 {
        let t = pair.parents[k];
        let gh = err.u_h.gradient(err.mesh, t);
        let [p, q, r] = pair.simplices[k];
        let integral = rule.integrate(areas[k], |b| {
            let x = [
                b[0] * p[0] + b[1] * q[0] + b[2] * r[0],
                b[0] * p[1] + b[1] * q[1] + b[2] * r[1],
            ];
            let face = b[0] * b[1];
            face * face * err.convective_at(x, gh)
        });
        total += alphas[t] * integral;
    }
    total.abs() / (pair.h_hat * pair.edge_length)
}

/// Element and edge contributions of `|a·∇e|_*`.
#[derive(Debug, Clone)]
pub struct StarReport<T> {
    pub elements: Vec<T>,
    /// Zero on boundary edges.
    pub edges: Vec<T>,
    pub max_element: T,
    pub max_edge: T,
}

impl<T: Real> StarReport<T> {
    /// `max_T |·|_{*;T} + max_E |·|_{*;E}`.
    pub fn value(&self) -> T {
        self.max_element + self.max_edge
    }
}

pub fn star_global<T: Real>(err: &ErrorField<'_, T>, eps: T, alphas: &[T]) -> StarReport<T> {
    let rule = TriangleRule::degree8();
    let mesh = err.mesh;
    let elements: Vec<T> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| star_element_with(err, t, alphas[t], &rule))
        .collect();
    let edges: Vec<T> = (0..mesh.edges().len())
        .into_par_iter()
        .map(|e| match edge_subsimplices(mesh, e, eps) {
            Ok(pair) => star_edge_with(err, &pair, alphas, &rule),
            Err(_) => T::zero(),
        })
        .collect();
    let max_element = elements.iter().copied().fold(T::zero(), T::max);
    let max_edge = edges.iter().copied().fold(T::zero(), T::max);
    StarReport {
        elements,
        edges,
        max_element,
        max_edge,
    }
}

/// `|a·∇e|_{**} = max_T α_T ‖a·∇e‖_{∞;T}`, sampled on a barycentric lattice.
pub fn starstar_global<T: Real>(err: &ErrorField<'_, T>, alphas: &[T], sample_order: usize) -> T {
    let samples = lattice::<T>(sample_order);
    (0..err.mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let gh = err.u_h.gradient(err.mesh, t);
            let m = samples
                .iter()
                .map(|&b| err.convective_at(err.mesh.map_point(t, b), gh).abs())
                .fold(T::zero(), T::max);
            alphas[t] * m
        })
        .reduce(T::zero, T::max)
}

/// `‖u − u_h‖_{∞;Ω}`, sampled on a barycentric lattice (vertices included).
pub fn maxnorm_error<T: Real>(err: &ErrorField<'_, T>, sample_order: usize) -> T {
    let samples = lattice::<T>(sample_order);
    (0..err.mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            samples
                .iter()
                .map(|&b| err.value(t, b).abs())
                .fold(T::zero(), T::max)
        })
        .reduce(T::zero, T::max)
}

/// `α_T |P₀(a·∇e)|` and `α_T ‖a·∇e − P₀(a·∇e)‖_{∞;T}` on one element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProjectionTerms<T> {
    pub projection: T,
    pub oscillation: T,
}

pub fn projection_comparison_terms<T: Real>(
    err: &ErrorField<'_, T>,
    alphas: &[T],
    sample_order: usize,
) -> Vec<ProjectionTerms<T>> {
    let rule = TriangleRule::<T>::degree8();
    let samples = lattice::<T>(sample_order);
    (0..err.mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let gh = err.u_h.gradient(err.mesh, t);
            let conv = |b: Bary<T>| err.convective_at(err.mesh.map_point(t, b), gh);
            let mean = rule.integrate(T::one(), conv);
            let dev = samples
                .iter()
                .map(|&b| (conv(b) - mean).abs())
                .fold(T::zero(), T::max);
            ProjectionTerms {
                projection: alphas[t] * mean.abs(),
                oscillation: alphas[t] * dev,
            }
        })
        .collect()
}
