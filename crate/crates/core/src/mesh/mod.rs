//! Conforming triangulations with newest-vertex bisection.
//!
//! Every triangle is stored as `[newest, a, b]` in counter-clockwise order;
//! its refinement edge is `(a, b)`, the edge opposite the newest vertex.
//! Local edge `i` of a triangle is the edge opposite local vertex `i`.

mod bisect;
mod export;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{cross, lit, norm, sub, Point, Real};

pub use bisect::MarkList;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// Incident triangles; `triangles[1]` is `usize::MAX` on the boundary.
    pub triangles: [usize; 2],
    pub boundary: bool,
}

impl Edge {
    /// Triangle across this edge from `t`, if any.
    pub fn other(&self, t: usize) -> Option<usize> {
        if self.boundary {
            None
        } else if self.triangles[0] == t {
            Some(self.triangles[1])
        } else {
            Some(self.triangles[0])
        }
    }
}

/// Affine geometry of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry<T> {
    pub area: T,
    /// Longest edge length.
    pub diameter: T,
    /// Length of local edge `i` (opposite vertex `i`).
    pub edge_lengths: [T; 3],
    /// Outward unit normal of local edge `i`.
    pub normals: [Point<T>; 3],
    /// Constant gradients of the barycentric coordinates.
    pub bary_gradients: [Point<T>; 3],
}

#[derive(Debug, Clone)]
pub struct Mesh<T> {
    vertices: Vec<Point<T>>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    vertex_boundary: Vec<bool>,
    vert_tri_offsets: Vec<usize>,
    vert_tri_list: Vec<usize>,
}

impl<T: Real> Mesh<T> {
    /// Build a mesh from vertex coordinates and `[newest, a, b]` triples.
    ///
    /// Rejects out-of-range indices, non-positively oriented triangles and
    /// edges shared by more than two triangles.
    pub fn new(vertices: Vec<Point<T>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::VertexOutOfRange {
                        triangle: t,
                        index: v,
                    });
                }
            }
            let [p0, p1, p2] = tri.map(|v| vertices[v]);
            let twice = cross(sub(p1, p0), sub(p2, p0));
            if !(twice > T::zero()) {
                return Err(Error::DegenerateTriangle {
                    triangle: t,
                    area: twice.as_f64() * 0.5,
                });
            }
        }

        let mut edge_index: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 2);
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for (i, slot) in te.iter_mut().enumerate() {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                match edge_index.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if !edge.boundary {
                            return Err(Error::NonManifoldEdge(key.0, key.1));
                        }
                        edge.triangles[1] = t;
                        edge.boundary = false;
                        *slot = e;
                    }
                    None => {
                        let e = edges.len();
                        edges.push(Edge {
                            vertices: [key.0, key.1],
                            triangles: [t, usize::MAX],
                            boundary: true,
                        });
                        edge_index.insert(key, e);
                        *slot = e;
                    }
                }
            }
            tri_edges.push(te);
        }

        let mut vertex_boundary = vec![false; nv];
        for e in edges.iter().filter(|e| e.boundary) {
            vertex_boundary[e.vertices[0]] = true;
            vertex_boundary[e.vertices[1]] = true;
        }

        let mut counts = vec![0usize; nv + 1];
        for tri in &triangles {
            for &v in tri {
                counts[v + 1] += 1;
            }
        }
        for i in 0..nv {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut list = vec![0usize; counts[nv]];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                list[fill[v]] = t;
                fill[v] += 1;
            }
        }

        Ok(Self {
            vertices,
            triangles,
            edges,
            tri_edges,
            vertex_boundary,
            vert_tri_offsets: counts,
            vert_tri_list: list,
        })
    }

    /// Unit square split into an `n × n` grid, each cell cut along the
    /// lower-left to upper-right diagonal. The right-angle vertex of every
    /// triangle is its newest vertex, so the hypotenuse is the refinement edge.
    pub fn structured_unit_square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid size must be positive".into()));
        }
        let nf = T::from_usize_lossy(n);
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([T::from_usize_lossy(i) / nf, T::from_usize_lossy(j) / nf]);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                triangles.push([id(i + 1, j), id(i + 1, j + 1), id(i, j)]);
                triangles.push([id(i, j + 1), id(i, j), id(i + 1, j + 1)]);
            }
        }
        Self::new(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge indices of triangle `t`, local edge `i` opposite local vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.vertex_boundary
    }

    /// Triangles containing vertex `v`.
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vert_tri_list[self.vert_tri_offsets[v]..self.vert_tri_offsets[v + 1]]
    }

    pub fn corners(&self, t: usize) -> [Point<T>; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    /// Physical point of barycentric coordinates `bary` in triangle `t`.
    pub fn map_point(&self, t: usize, bary: [T; 3]) -> Point<T> {
        let [p0, p1, p2] = self.corners(t);
        [
            bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
            bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
        ]
    }

    pub fn centroid(&self, t: usize) -> Point<T> {
        let third = lit::<T>(1.0 / 3.0);
        self.map_point(t, [third; 3])
    }

    pub fn area(&self, t: usize) -> T {
        let [p0, p1, p2] = self.corners(t);
        cross(sub(p1, p0), sub(p2, p0)) * lit::<T>(0.5)
    }

    pub fn diameter(&self, t: usize) -> T {
        let [p0, p1, p2] = self.corners(t);
        norm(sub(p1, p0))
            .max(norm(sub(p2, p1)))
            .max(norm(sub(p0, p2)))
    }

    pub fn element_geometry(&self, t: usize) -> ElementGeometry<T> {
        let p = self.corners(t);
        let area = cross(sub(p[1], p[0]), sub(p[2], p[0])) * lit::<T>(0.5);
        let mut edge_lengths = [T::zero(); 3];
        let mut normals = [[T::zero(); 2]; 3];
        let mut bary_gradients = [[T::zero(); 2]; 3];
        for i in 0..3 {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            let d = sub(b, a);
            let len = norm(d);
            edge_lengths[i] = len;
            // counter-clockwise orientation: outward normal is the tangent rotated clockwise
            normals[i] = [d[1] / len, -d[0] / len];
            let s = -len / (area + area);
            bary_gradients[i] = [normals[i][0] * s, normals[i][1] * s];
        }
        let diameter = edge_lengths[0].max(edge_lengths[1]).max(edge_lengths[2]);
        ElementGeometry {
            area,
            diameter,
            edge_lengths,
            normals,
            bary_gradients,
        }
    }

    /// All triangles sharing at least one vertex with `t`, including `t`, sorted.
    pub fn patch(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.triangles[t]
            .iter()
            .flat_map(|&v| self.vertex_triangles(v).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Smallest element diameter.
    pub fn min_diameter(&self) -> T {
        (0..self.num_triangles())
            .map(|t| self.diameter(t))
            .fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn max_diameter(&self) -> T {
        (0..self.num_triangles())
            .map(|t| self.diameter(t))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn total_area(&self) -> T {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    /// Smallest interior angle in radians over all triangles.
    pub fn min_angle(&self) -> T {
        let mut best = T::infinity();
        for t in 0..self.num_triangles() {
            let p = self.corners(t);
            for i in 0..3 {
                let u = sub(p[(i + 1) % 3], p[i]);
                let v = sub(p[(i + 2) % 3], p[i]);
                let ang = cross(u, v).abs().atan2(u[0] * v[0] + u[1] * v[1]);
                best = best.min(ang);
            }
        }
        best
    }

    /// Interior vertices in increasing index order.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&v| !self.vertex_boundary[v])
            .collect()
    }
}
