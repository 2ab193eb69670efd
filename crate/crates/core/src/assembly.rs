//! P1 assembly of
//!
//! `ε⟨∇u, ∇v⟩ + ⟨a·∇u + (div a + b) u, v⟩ + S(u, v) = ⟨f, v⟩ (+ SUPG load)`
//!
//! with optional streamline-diffusion or continuous interior penalty terms
//! `S`, and elimination of the homogeneous Dirichlet boundary vertices.

use crate::error::{Error, Result};
use crate::field::DiscreteField;
use crate::mesh::Mesh;
use crate::problems::Problem;
use crate::quadrature::{EdgeRule, TriangleRule};
use crate::scalar::{dot, lit, norm, Point, Real};
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stabilization<T> {
    None,
    /// Streamline diffusion with `δ_T` from [`delta_supg`] multiplied by `scale`.
    Supg {
        scale: T,
    },
    /// Interior penalty on convective-derivative jumps, `τ_E = c h_E²`.
    Cip {
        c: T,
    },
}

impl<T: Real> Stabilization<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Stabilization::None => "none",
            Stabilization::Supg { .. } => "supg",
            Stabilization::Cip { .. } => "cip",
        }
    }
}

/// Linear system over the interior vertices.
#[derive(Debug, Clone)]
pub struct SparseSystem<T> {
    pub matrix: CsrMatrix<T>,
    pub rhs: Vec<T>,
    /// System index of each vertex, `None` on the boundary.
    pub dof_of_vertex: Vec<Option<usize>>,
    /// Vertex of each system index.
    pub vertex_of_dof: Vec<usize>,
}

impl<T: Real> SparseSystem<T> {
    pub fn num_dofs(&self) -> usize {
        self.vertex_of_dof.len()
    }

    /// Nodal field from a solution vector, zero on boundary vertices.
    pub fn expand(&self, x: &[T]) -> DiscreteField<T> {
        let mut values = vec![T::zero(); self.dof_of_vertex.len()];
        for (k, &v) in self.vertex_of_dof.iter().enumerate() {
            values[v] = x[k];
        }
        DiscreteField::from_values(values)
    }
}

/// `ξ(s) = coth(s) − 1/s`, with a series branch below `s = 1e-4`.
pub fn xi<T: Real>(s: T) -> T {
    if s < lit(1e-4) {
        s / lit::<T>(3.0) - s * s * s / lit::<T>(45.0)
    } else {
        s.tanh().recip() - s.recip()
    }
}

/// Streamline-diffusion parameter `δ_T = h_T a_T⁻¹ ξ(Pe_T / 2)` with local
/// Péclet number `Pe_T = a_T h_T / ε`.
pub fn delta_supg<T: Real>(h: T, a_t: T, eps: T) -> T {
    if a_t <= T::zero() {
        // small-Péclet limit
        return h * h / (lit::<T>(6.0) * eps);
    }
    let pe = a_t * h / eps;
    h / a_t * xi::<T>(pe * lit::<T>(0.5))
}

/// Largest `|a|` over the vertices and degree-4 quadrature points of `t`.
fn max_convection<T: Real>(
    mesh: &Mesh<T>,
    problem: &Problem<T>,
    t: usize,
    rule: &TriangleRule<T>,
) -> T {
    let mut a_t = T::zero();
    for p in mesh.corners(t) {
        a_t = a_t.max(norm(problem.a(p)));
    }
    for b in &rule.points {
        a_t = a_t.max(norm(problem.a(mesh.map_point(t, *b))));
    }
    a_t
}

/// Local element matrix and load vector of triangle `t` (vertex-local order).
pub(crate) fn element_system<T: Real>(
    mesh: &Mesh<T>,
    problem: &Problem<T>,
    stab: &Stabilization<T>,
    rule: &TriangleRule<T>,
    t: usize,
) -> ([[T; 3]; 3], [T; 3]) {
    let geo = mesh.element_geometry(t);
    let grads = geo.bary_gradients;
    let eps = problem.eps;
    let mut k = [[T::zero(); 3]; 3];
    let mut load = [T::zero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = eps * geo.area * dot(grads[i], grads[j]);
        }
    }
    let delta = match stab {
        Stabilization::Supg { scale } => {
            let a_t = max_convection(mesh, problem, t, rule);
            *scale * delta_supg(geo.diameter, a_t, eps)
        }
        _ => T::zero(),
    };
    for (bary, w) in rule.points.iter().zip(&rule.weights) {
        let x = mesh.map_point(t, *bary);
        let a = problem.a(x);
        let c = problem.div_a(x) + problem.b(x);
        let f = problem.f(x);
        let wa = *w * geo.area;
        let adg: [T; 3] = [dot(a, grads[0]), dot(a, grads[1]), dot(a, grads[2])];
        for i in 0..3 {
            for j in 0..3 {
                // ⟨a·∇φ_j + c φ_j, φ_i⟩
                let op_j = adg[j] + c * bary[j];
                k[i][j] += wa * op_j * bary[i];
                if delta > T::zero() {
                    k[i][j] += wa * delta * op_j * adg[i];
                }
            }
            load[i] += wa * f * bary[i];
            if delta > T::zero() {
                load[i] += wa * delta * f * adg[i];
            }
        }
    }
    (k, load)
}

/// Interior-penalty contribution `Σ_E τ_E ∫_E ⟦a·∇u⟧⟦a·∇v⟧` over all
/// vertices (boundary rows included), `τ_E = c_cip |E|²`.
pub fn assemble_cip_term<T: Real>(mesh: &Mesh<T>, problem: &Problem<T>, c_cip: T) -> CsrMatrix<T> {
    let nv = mesh.num_vertices();
    let rule = EdgeRule::<T>::gauss3();
    let mut b = TripletBuilder::with_capacity(nv, nv, mesh.edges().len() * 16);
    if c_cip == T::zero() {
        return b.build();
    }
    for e in mesh.edges().iter().filter(|e| !e.boundary) {
        let [tp, tm] = e.triangles;
        let [pa, pb] = e.vertices.map(|v| mesh.vertices()[v]);
        let len = norm([pb[0] - pa[0], pb[1] - pa[1]]);
        let tau = c_cip * len * len;
        let gp = mesh.element_geometry(tp).bary_gradients;
        let gm = mesh.element_geometry(tm).bary_gradients;
        // union of the two vertex sets with gradient differences ∇φ⁺ − ∇φ⁻
        let mut dofs: Vec<(usize, Point<T>)> = Vec::with_capacity(4);
        let mut add = |v: usize, g: Point<T>, sign: T| {
            if let Some(slot) = dofs.iter_mut().find(|(w, _)| *w == v) {
                slot.1 = [slot.1[0] + sign * g[0], slot.1[1] + sign * g[1]];
            } else {
                dofs.push((v, [sign * g[0], sign * g[1]]));
            }
        };
        for (i, &v) in mesh.triangles()[tp].iter().enumerate() {
            add(v, gp[i], T::one());
        }
        for (i, &v) in mesh.triangles()[tm].iter().enumerate() {
            add(v, gm[i], -T::one());
        }
        for (s, w) in rule.points.iter().zip(&rule.weights) {
            let x = [pa[0] + *s * (pb[0] - pa[0]), pa[1] + *s * (pb[1] - pa[1])];
            let a = problem.a(x);
            let wq = tau * *w * len;
            for &(vi, di) in &dofs {
                let ji = dot(a, di);
                for &(vj, dj) in &dofs {
                    b.push(vi, vj, wq * ji * dot(a, dj));
                }
            }
        }
    }
    b.build()
}

/// Assemble the reduced system over interior vertices.
pub fn assemble<T: Real>(
    mesh: &Mesh<T>,
    problem: &Problem<T>,
    stab: &Stabilization<T>,
) -> Result<SparseSystem<T>> {
    let nv = mesh.num_vertices();
    let mut dof_of_vertex = vec![None; nv];
    let mut vertex_of_dof = Vec::new();
    for v in 0..nv {
        if !mesh.is_boundary_vertex(v) {
            dof_of_vertex[v] = Some(vertex_of_dof.len());
            vertex_of_dof.push(v);
        }
    }
    let n = vertex_of_dof.len();
    let rule = TriangleRule::<T>::degree4();
    let mut b = TripletBuilder::with_capacity(n, n, mesh.num_triangles() * 9);
    let mut rhs = vec![T::zero(); n];
    for t in 0..mesh.num_triangles() {
        let area = mesh.area(t);
        if !(area > T::zero()) {
            return Err(Error::DegenerateTriangle {
                triangle: t,
                area: area.as_f64(),
            });
        }
        let (k, load) = element_system(mesh, problem, stab, &rule, t);
        let tri = mesh.triangles()[t];
        for i in 0..3 {
            let Some(r) = dof_of_vertex[tri[i]] else {
                continue;
            };
            rhs[r] += load[i];
            for j in 0..3 {
                if let Some(c) = dof_of_vertex[tri[j]] {
                    b.push(r, c, k[i][j]);
                }
            }
        }
    }
    if let Stabilization::Cip { c } = stab {
        let s = assemble_cip_term(mesh, problem, *c);
        for vi in 0..nv {
            let Some(r) = dof_of_vertex[vi] else { continue };
            for (vj, val) in s.row(vi) {
                if let Some(c) = dof_of_vertex[vj] {
                    b.push(r, c, val);
                }
            }
        }
    }
    Ok(SparseSystem {
        matrix: b.build(),
        rhs,
        dof_of_vertex,
        vertex_of_dof,
    })
}

/// `uᵀ S u` for the interior-penalty form over all vertices.
pub fn cip_energy<T: Real>(
    mesh: &Mesh<T>,
    problem: &Problem<T>,
    c_cip: T,
    u: &DiscreteField<T>,
) -> T {
    let s = assemble_cip_term(mesh, problem, c_cip);
    let su = s.mul_vec(&u.values);
    su.iter().zip(&u.values).map(|(&a, &b)| a * b).sum()
}
