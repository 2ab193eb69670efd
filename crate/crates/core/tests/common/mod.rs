#![allow(dead_code)]
//! Independent reference implementations shared by the oracle, property and
//! acceptance tests. Nothing here calls into the crate's quadrature, geometry
//! or assembly code.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use maxnorm_afem::assembly::{assemble, Stabilization};
use maxnorm_afem::field::DiscreteField;
use maxnorm_afem::linsolve::{solve, SolveOptions};
use maxnorm_afem::mesh::{MarkList, Mesh};
use maxnorm_afem::problems::{Problem, ProblemId};
use maxnorm_afem::seminorms::{edge_subsimplices, star_edge, star_element, ErrorField};
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type P = [f64; 2];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- quadrature

/// Seven-point rule exact for degree 5 (barycentric points, weights sum to 1).
pub fn strang_fix7() -> Vec<([f64; 3], f64)> {
    let mut out = vec![([1.0 / 3.0; 3], 0.225)];
    for (a, w) in [
        (0.059_715_871_789_770, 0.132_394_152_788_506),
        (0.797_426_985_353_087, 0.125_939_180_544_827),
    ] {
        let b = (1.0 - a) / 2.0;
        out.push(([a, b, b], w));
        out.push(([b, a, b], w));
        out.push(([b, b, a], w));
    }
    out
}

/// Gauss-Legendre nodes and weights on [0, 1] from the Jacobi matrix
/// eigenproblem.
pub fn golub_welsch(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
            ((x + 1.0) / 2.0, w / 2.0)
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Duffy-collapsed tensor rule with `n` points per direction, exact for
/// degree `2n − 2`; weights sum to 1 like [`strang_fix7`].
pub fn duffy(n: usize) -> Vec<([f64; 3], f64)> {
    let g = golub_welsch(n);
    let mut out = Vec::new();
    for &(s, ws) in &g {
        for &(t, wt) in &g {
            let x = s;
            let y = t * (1.0 - s);
            out.push(([1.0 - x - y, x, y], 2.0 * ws * wt * (1.0 - s)));
        }
    }
    out
}

// ------------------------------------------------------------------ geometry

pub struct Geo {
    pub area: f64,
    pub grads: [P; 3],
    pub diameter: f64,
}

pub fn geo(p: [P; 3]) -> Geo {
    let j = Matrix2::new(
        p[1][0] - p[0][0],
        p[2][0] - p[0][0],
        p[1][1] - p[0][1],
        p[2][1] - p[0][1],
    );
    let inv = j.try_inverse().expect("nondegenerate");
    // rows of J⁻¹ are ∇λ1, ∇λ2
    let g1 = [inv[(0, 0)], inv[(0, 1)]];
    let g2 = [inv[(1, 0)], inv[(1, 1)]];
    let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
    let d = |a: P, b: P| Vector2::new(a[0] - b[0], a[1] - b[1]).norm();
    Geo {
        area: j.determinant() / 2.0,
        grads: [g0, g1, g2],
        diameter: d(p[0], p[1]).max(d(p[1], p[2])).max(d(p[2], p[0])),
    }
}

pub fn map(p: [P; 3], l: [f64; 3]) -> P {
    [
        l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
        l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
    ]
}

pub fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn corners(m: &Mesh<f64>, t: usize) -> [P; 3] {
    m.triangles()[t].map(|v| m.vertices()[v])
}

// -------------------------------------------------------------------- meshes

/// Structured mesh with randomly displaced interior vertices.
pub fn perturbed_mesh(r: &mut ChaCha8Rng, n: usize, amount: f64) -> Mesh<f64> {
    let base = Mesh::<f64>::structured_unit_square(n).unwrap();
    let h = 1.0 / n as f64;
    let verts: Vec<P> = base
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            if base.is_boundary_vertex(v) {
                p
            } else {
                [
                    p[0] + amount * h * r.random_range(-1.0..1.0),
                    p[1] + amount * h * r.random_range(-1.0..1.0),
                ]
            }
        })
        .collect();
    Mesh::new(verts, base.triangles().to_vec()).unwrap()
}

/// A few rounds of random newest-vertex bisection, stopping before the mesh
/// exceeds `max_triangles`.
pub fn random_refine(
    r: &mut ChaCha8Rng,
    mut m: Mesh<f64>,
    rounds: usize,
    max_triangles: usize,
) -> Mesh<f64> {
    for _ in 0..rounds {
        let mut marks = MarkList::new();
        for t in 0..m.num_triangles() {
            if r.random_bool(0.3) {
                marks.set(t, r.random_range(1..=2));
            }
        }
        let next = m.bisect(&marks).unwrap();
        if next.num_triangles() > max_triangles {
            break;
        }
        m = next;
    }
    m
}

/// Small random mesh with at most 50 triangles.
pub fn small_random_mesh(seed: u64) -> Mesh<f64> {
    let mut r = rng(seed);
    let n = r.random_range(1..=3);
    let m = perturbed_mesh(&mut r, n, 0.25);
    random_refine(&mut r, m, 3, 50)
}

/// No vertex sits at the midpoint of an edge (no hanging nodes), every
/// interior edge has two triangles, boundary edges lie on ∂Ω.
pub fn check_conforming(m: &Mesh<f64>) -> Result<(), String> {
    let key = |p: P| (p[0].to_bits(), p[1].to_bits());
    let verts: HashSet<_> = m.vertices().iter().map(|&p| key(p)).collect();
    for e in m.edges() {
        let [a, b] = e.vertices.map(|v| m.vertices()[v]);
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        if verts.contains(&key(mid)) {
            return Err(format!("hanging node at {mid:?}"));
        }
        if e.boundary {
            let on = |c: f64| c == 0.0 || c == 1.0;
            if !((a[0] == b[0] && on(a[0])) || (a[1] == b[1] && on(a[1]))) {
                return Err(format!("boundary edge {a:?}-{b:?} inside the domain"));
            }
        }
    }
    let mut count = vec![0usize; m.edges().len()];
    for t in 0..m.num_triangles() {
        for e in m.triangle_edges(t) {
            count[e] += 1;
        }
    }
    for (e, c) in count.iter().enumerate() {
        let want = if m.edges()[e].boundary { 1 } else { 2 };
        if *c != want {
            return Err(format!("edge {e} has {c} triangles"));
        }
    }
    Ok(())
}

// ---------------------------------------------------- dense assembly oracle

/// Problem with affine convection and reaction and quadratic forcing, so that
/// every integrand in the assembly is a polynomial of degree ≤ 3.
pub struct AffineProblem {
    pub eps: f64,
    pub a0: P,
    pub a_mat: [[f64; 2]; 2],
    pub b0: f64,
    pub b1: P,
    pub f: [f64; 6],
}

impl AffineProblem {
    pub fn random(r: &mut ChaCha8Rng) -> Self {
        let mut u = || r.random_range(-1.0f64..1.0);
        Self {
            eps: 10f64.powf(-3.0 * u().abs()),
            a0: [u(), u() + 1.5],
            a_mat: [[u() * 0.5, u() * 0.5], [u() * 0.5, u() * 0.5]],
            b0: 1.0 + u().abs(),
            b1: [u() * 0.3, u() * 0.3],
            f: [u(), u(), u(), u(), u(), u()],
        }
    }

    pub fn a(&self, x: P) -> P {
        [
            self.a0[0] + self.a_mat[0][0] * x[0] + self.a_mat[0][1] * x[1],
            self.a0[1] + self.a_mat[1][0] * x[0] + self.a_mat[1][1] * x[1],
        ]
    }

    pub fn div_a(&self) -> f64 {
        self.a_mat[0][0] + self.a_mat[1][1]
    }

    pub fn b(&self, x: P) -> f64 {
        self.b0 + dot(self.b1, x)
    }

    pub fn f(&self, x: P) -> f64 {
        let c = self.f;
        c[0] + c[1] * x[0]
            + c[2] * x[1]
            + c[3] * x[0] * x[0]
            + c[4] * x[0] * x[1]
            + c[5] * x[1] * x[1]
    }

    pub fn problem(&self) -> Problem<f64> {
        let (a0, am, b0, b1, f, div) =
            (self.a0, self.a_mat, self.b0, self.b1, self.f, self.div_a());
        Problem::new(
            "affine",
            self.eps,
            Arc::new(move |x: P| {
                [
                    a0[0] + am[0][0] * x[0] + am[0][1] * x[1],
                    a0[1] + am[1][0] * x[0] + am[1][1] * x[1],
                ]
            }),
            Arc::new(move |_| div),
            Arc::new(move |x: P| b0 + b1[0] * x[0] + b1[1] * x[1]),
            Arc::new(move |x: P| {
                f[0] + f[1] * x[0]
                    + f[2] * x[1]
                    + f[3] * x[0] * x[0]
                    + f[4] * x[0] * x[1]
                    + f[5] * x[1] * x[1]
            }),
        )
        .unwrap()
    }
}

pub enum OracleStab {
    None,
    Supg(f64),
    Cip(f64),
}

fn xi_direct(s: f64) -> f64 {
    if s < 1e-3 {
        // Laurent series of coth(s) − 1/s
        s / 3.0 - s.powi(3) / 45.0 + 2.0 * s.powi(5) / 945.0
    } else {
        1.0 / s.tanh() - 1.0 / s
    }
}

/// Dense matrix and load over interior vertices (increasing vertex index).
pub fn dense_assembly(
    m: &Mesh<f64>,
    p: &AffineProblem,
    stab: &OracleStab,
) -> (DMatrix<f64>, DVector<f64>) {
    let nv = m.num_vertices();
    let mut a = DMatrix::<f64>::zeros(nv, nv);
    let mut rhs = DVector::<f64>::zeros(nv);
    let rule = strang_fix7();
    for t in 0..m.num_triangles() {
        let c = corners(m, t);
        let g = geo(c);
        let tri = m.triangles()[t];
        let delta = match stab {
            OracleStab::Supg(scale) => {
                // |a| is convex, so its maximum over T sits at a corner
                let at = c
                    .iter()
                    .map(|&x| dot(p.a(x), p.a(x)).sqrt())
                    .fold(0.0, f64::max);
                scale * g.diameter / at * xi_direct(at * g.diameter / p.eps / 2.0)
            }
            _ => 0.0,
        };
        for (l, w) in &rule {
            let x = map(c, *l);
            let ax = p.a(x);
            let react = p.div_a() + p.b(x);
            let wq = w * g.area;
            for i in 0..3 {
                let adi = dot(ax, g.grads[i]);
                for j in 0..3 {
                    let op = dot(ax, g.grads[j]) + react * l[j];
                    a[(tri[i], tri[j])] += wq * (op * l[i] + delta * op * adi);
                }
                rhs[tri[i]] += wq * p.f(x) * (l[i] + delta * adi);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                a[(tri[i], tri[j])] += p.eps * g.area * dot(g.grads[i], g.grads[j]);
            }
        }
    }
    if let OracleStab::Cip(cc) = stab {
        a += dense_cip(m, |x| p.a(x), *cc);
    }
    let interior: Vec<usize> = (0..nv).filter(|&v| !m.is_boundary_vertex(v)).collect();
    let n = interior.len();
    let ar = DMatrix::from_fn(n, n, |i, j| a[(interior[i], interior[j])]);
    let br = DVector::from_fn(n, |i, _| rhs[interior[i]]);
    (ar, br)
}

/// `Σ_E c|E|² ∫_E ⟦a·∇φ_j⟧⟦a·∇φ_i⟧` over all vertices, Simpson's rule.
/// Edges are rebuilt from the triangle list.
pub fn dense_cip(m: &Mesh<f64>, a: impl Fn(P) -> P, c: f64) -> DMatrix<f64> {
    let nv = m.num_vertices();
    let mut out = DMatrix::<f64>::zeros(nv, nv);
    let mut sides: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in m.triangles().iter().enumerate() {
        for k in 0..3 {
            let (u, v) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            sides.entry((u.min(v), u.max(v))).or_default().push(t);
        }
    }
    for ((u, v), ts) in sides {
        if ts.len() != 2 {
            continue;
        }
        let (pu, pv) = (m.vertices()[u], m.vertices()[v]);
        let len = ((pv[0] - pu[0]).powi(2) + (pv[1] - pu[1]).powi(2)).sqrt();
        // per-vertex gradient difference across the edge
        let mut diff: HashMap<usize, P> = HashMap::new();
        for (side, &t) in ts.iter().enumerate() {
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let g = geo(corners(m, t));
            for (i, &w) in m.triangles()[t].iter().enumerate() {
                let d = diff.entry(w).or_insert([0.0, 0.0]);
                d[0] += sign * g.grads[i][0];
                d[1] += sign * g.grads[i][1];
            }
        }
        for (s, w) in [(0.0, 1.0 / 6.0), (0.5, 4.0 / 6.0), (1.0, 1.0 / 6.0)] {
            let x = [pu[0] + s * (pv[0] - pu[0]), pu[1] + s * (pv[1] - pu[1])];
            let ax = a(x);
            for (&i, &di) in &diff {
                for (&j, &dj) in &diff {
                    out[(i, j)] += c * len * len * w * len * dot(ax, di) * dot(ax, dj);
                }
            }
        }
    }
    out
}

pub fn crate_stab(s: &OracleStab) -> Stabilization<f64> {
    match *s {
        OracleStab::None => Stabilization::None,
        OracleStab::Supg(scale) => Stabilization::Supg { scale },
        OracleStab::Cip(c) => Stabilization::Cip { c },
    }
}

/// Largest entrywise difference between the crate's sparse system and the
/// dense oracle, relative to the largest oracle entry.
pub fn assembly_mismatch(m: &Mesh<f64>, p: &AffineProblem, stab: &OracleStab) -> (f64, f64) {
    let (da, db) = dense_assembly(m, p, stab);
    let sys = assemble(m, &p.problem(), &crate_stab(stab)).unwrap();
    let n = da.nrows();
    assert_eq!(sys.num_dofs(), n);
    let dense = sys.matrix.to_dense();
    let scale_a = da.amax().max(f64::MIN_POSITIVE);
    let scale_b = db.amax().max(f64::MIN_POSITIVE);
    let mut ea = 0.0f64;
    let mut eb = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            ea = ea.max((dense[i][j] - da[(i, j)]).abs());
        }
        eb = eb.max((sys.rhs[i] - db[i]).abs());
    }
    (ea / scale_a, eb / scale_b)
}

/// Relative difference between the crate's sparse solve and a dense LU
/// solve of the same system.
pub fn solve_mismatch(m: &Mesh<f64>, problem: &Problem<f64>, stab: Stabilization<f64>) -> f64 {
    let sys = assemble(m, problem, &stab).unwrap();
    let n = sys.num_dofs();
    let dense = sys.matrix.to_dense();
    let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
    let b = DVector::from_column_slice(&sys.rhs);
    let x_ref = a.lu().solve(&b).expect("nonsingular");
    let x = solve(&sys.matrix, &sys.rhs, &SolveOptions::default())
        .unwrap()
        .solution;
    let diff = (DVector::from_column_slice(&x) - &x_ref).amax();
    diff / x_ref.amax().max(f64::MIN_POSITIVE)
}

/// Smallest eigenvalue of the symmetric part, relative to the largest
/// absolute eigenvalue.
pub fn min_symmetric_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let s = (a + a.transpose()) * 0.5;
    let ev = SymmetricEigen::new(s).eigenvalues;
    let top = ev.amax().max(f64::MIN_POSITIVE);
    ev.min() / top
}

// ----------------------------------------------------- seminorm oracle

/// `α |∫_T b_T a·∇e| / |T|` with `b_T = (λ1λ2λ3)²`, `e = −u_h` (exact
/// solution zero).
pub fn oracle_star_element(
    m: &Mesh<f64>,
    u_h: &[f64],
    a: &dyn Fn(P) -> P,
    t: usize,
    alpha: f64,
) -> f64 {
    let c = corners(m, t);
    let g = geo(c);
    let tri = m.triangles()[t];
    let grad = [0, 1].map(|k| -(0..3).map(|i| u_h[tri[i]] * g.grads[i][k]).sum::<f64>());
    let mut s = 0.0;
    for (l, w) in duffy(8) {
        let b = l[0] * l[1] * l[2];
        s += w * b * b * dot(a(map(c, l)), grad);
    }
    alpha * s.abs()
}

/// Edge value with sub-simplices built from the parent heights: the apex lies
/// on the median at height `2ĥ` above the edge, giving `|T_E| = ĥ|E|`.
pub fn oracle_star_edge(
    m: &Mesh<f64>,
    u_h: &[f64],
    a: &dyn Fn(P) -> P,
    eps: f64,
    alphas: &[f64],
    u: usize,
    v: usize,
) -> f64 {
    let ts: Vec<usize> = (0..m.num_triangles())
        .filter(|&t| m.triangles()[t].contains(&u) && m.triangles()[t].contains(&v))
        .collect();
    assert_eq!(ts.len(), 2);
    let (pu, pv) = (m.vertices()[u], m.vertices()[v]);
    let len = ((pv[0] - pu[0]).powi(2) + (pv[1] - pu[1]).powi(2)).sqrt();
    let areas: Vec<f64> = ts.iter().map(|&t| geo(corners(m, t)).area).collect();
    let h_hat = eps.sqrt().min(areas[0] / len).min(areas[1] / len);
    let mid = [(pu[0] + pv[0]) / 2.0, (pu[1] + pv[1]) / 2.0];
    let mut total = 0.0;
    for (k, &t) in ts.iter().enumerate() {
        let tri = m.triangles()[t];
        let r = m.vertices()[*tri.iter().find(|&&w| w != u && w != v).unwrap()];
        let height = 2.0 * areas[k] / len;
        let frac = 2.0 * h_hat / height;
        let apex = [
            mid[0] + frac * (r[0] - mid[0]),
            mid[1] + frac * (r[1] - mid[1]),
        ];
        let sub = [pu, pv, apex];
        let sub_area = geo(sub).area.abs();
        let g = geo(corners(m, t));
        let grad = [0, 1].map(|c| -(0..3).map(|i| u_h[tri[i]] * g.grads[i][c]).sum::<f64>());
        let mut s = 0.0;
        for (l, w) in duffy(8) {
            let b = l[0] * l[1];
            s += w * sub_area * b * b * dot(a(map(sub, l)), grad);
        }
        total += alphas[t] * s;
    }
    total.abs() / (h_hat * len)
}

/// Largest relative mismatch between the crate's element and edge values and
/// the oracle for a random P1 field on `m`.
pub fn seminorm_mismatch(m: &Mesh<f64>, r: &mut ChaCha8Rng) -> f64 {
    let u_h: Vec<f64> = (0..m.num_vertices())
        .map(|_| r.random_range(-1.0..1.0))
        .collect();
    let alphas: Vec<f64> = (0..m.num_triangles())
        .map(|_| r.random_range(0.1..1.0))
        .collect();
    let eps = 10f64.powf(r.random_range(-4.0..0.0));
    let a0 = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
    let a1 = r.random_range(-1.0..1.0);
    let a = move |x: P| [a0[0] + a1 * x[1], a0[1] + a1 * x[0] * x[0]];
    let zero = |_: P| 0.0;
    let zero_grad = |_: P| [0.0, 0.0];
    let field = DiscreteField::from_values(u_h.clone());
    let err = ErrorField::new(m, &field, &zero, &zero_grad, &a);
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
    let mut worst = 0.0f64;
    for t in 0..m.num_triangles() {
        let got = star_element(&err, t, alphas[t]);
        let want = oracle_star_element(m, &u_h, &a, t, alphas[t]);
        if want > 1e-14 {
            worst = worst.max(rel(got, want));
        } else {
            worst = worst.max(got);
        }
    }
    for (e, edge) in m.edges().iter().enumerate() {
        if edge.boundary {
            assert!(edge_subsimplices(m, e, eps).is_err());
            continue;
        }
        let got = star_edge(&err, e, eps, &alphas).unwrap();
        let [u, v] = edge.vertices;
        let want = oracle_star_edge(m, &u_h, &a, eps, &alphas, u, v);
        if want > 1e-14 {
            worst = worst.max(rel(got, want));
        } else {
            worst = worst.max(got);
        }
    }
    worst
}

// ------------------------------------------------------ forcing oracle

/// Second-order forward-mode jet in one direction pair: value, gradient and
/// Hessian diagonal sum is not enough for the Laplacian of a product, so the
/// full 2×2 Hessian is carried.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; 2],
    pub h: [[f64; 2]; 2],
}

impl Jet {
    pub fn cst(v: f64) -> Self {
        Jet {
            v,
            d: [0.0; 2],
            h: [[0.0; 2]; 2],
        }
    }

    pub fn var(v: f64, k: usize) -> Self {
        let mut d = [0.0; 2];
        d[k] = 1.0;
        Jet {
            v,
            d,
            h: [[0.0; 2]; 2],
        }
    }

    /// Chain rule with `f(v)`, `f'(v)`, `f''(v)`.
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = f1 * self.h[i][j] + f2 * self.d[i] * self.d[j];
            }
        }
        Jet {
            v: f0,
            d: self.d.map(|x| f1 * x),
            h,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        let d = 1.0 - t * t;
        self.chain(t, d, -2.0 * t * d)
    }

    pub fn laplacian(&self) -> f64 {
        self.h[0][0] + self.h[1][1]
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut h = self.h;
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] += o.h[i][j];
            }
        }
        Jet {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1]],
            h,
        }
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + o * Jet::cst(-1.0)
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = self.h[i][j] * o.v
                    + o.h[i][j] * self.v
                    + self.d[i] * o.d[j]
                    + self.d[j] * o.d[i];
            }
        }
        Jet {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + o.d[0] * self.v,
                self.d[1] * o.v + o.d[1] * self.v,
            ],
            h,
        }
    }
}

impl std::ops::Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self * Jet::cst(s)
    }
}

pub fn exact_jet(id: ProblemId, eps: f64, p: P) -> Jet {
    let x = Jet::var(p[0], 0);
    let y = Jet::var(p[1], 1);
    let one = Jet::cst(1.0);
    match id {
        ProblemId::U1 => (x * std::f64::consts::PI).sin() * (y * std::f64::consts::PI).sin(),
        ProblemId::U2 => {
            // exponent −(1 − y)/ε ≤ 0 in the closed square
            let layer = ((one - y) * (-1.0 / eps)).exp();
            let tail = (-1.0 / eps).exp();
            let g = y - (layer - Jet::cst(tail)) * (1.0 / (1.0 - tail));
            x * (one - x) * g
        }
        ProblemId::U3 => {
            let t = one - ((Jet::cst(0.5) - x) * (1.0 / eps.sqrt())).tanh();
            x * (one - x) * y * (one - y) * t * 2.0
        }
    }
}

/// `−εΔu + a·∇u + b u` with `a = (0, 1)`, `b = 1`, from the jet.
pub fn jet_forcing(id: ProblemId, eps: f64, p: P) -> f64 {
    let j = exact_jet(id, eps, p);
    -eps * j.laplacian() + j.d[1] + j.v
}

// ------------------------------------------------------------- marking

/// Brute force: the smallest `j` with `η 2^{j+1} ≥ η_max` gives `K − j`.
pub fn ladder_oracle(etas: &[f64], k_max: u32) -> Vec<u32> {
    let max = etas.iter().copied().fold(0.0, f64::max);
    etas.iter()
        .map(|&e| {
            (0..k_max)
                .find(|&j| e * 2f64.powi(j as i32 + 1) >= max)
                .map_or(0, |j| k_max - j)
        })
        .collect()
}

/// Same coefficients, forcing multiplied by `s`.
pub fn scaled_problem(p: &Problem<f64>, s: f64) -> Problem<f64> {
    let f = p.forcing.clone();
    Problem::new(
        "scaled",
        p.eps,
        p.convection.clone(),
        p.div_convection.clone(),
        p.reaction.clone(),
        Arc::new(move |x| s * f(x)),
    )
    .unwrap()
}

/// Nodal interpolant with deterministic interior noise of size 0.05.
pub fn perturbed_interpolant(
    m: &Mesh<f64>,
    u: impl Fn([f64; 2]) -> f64,
    seed: u64,
) -> DiscreteField<f64> {
    let mut f = DiscreteField::interpolate(m, u);
    let mut s = seed;
    for (v, x) in f.values.iter_mut().enumerate() {
        if !m.is_boundary_vertex(v) {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            *x += ((s >> 33) as f64 / (1u64 << 31) as f64 - 0.5) * 0.1;
        }
    }
    f
}
