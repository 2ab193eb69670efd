use std::collections::BTreeMap;

use super::Mesh;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Requested number of bisections per triangle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkList {
    counts: BTreeMap<usize, u32>,
}

impl MarkList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every triangle of an `n`-element mesh marked `k` times.
    pub fn uniform(n: usize, k: u32) -> Self {
        Self {
            counts: (0..n).map(|t| (t, k)).collect(),
        }
    }

    /// Records `k` bisections for `t`; `k = 0` removes the mark.
    pub fn set(&mut self, t: usize, k: u32) {
        if k == 0 {
            self.counts.remove(&t);
        } else {
            self.counts.insert(t, k);
        }
    }

    pub fn get(&self, t: usize) -> u32 {
        self.counts.get(&t).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts.iter().map(|(&t, &k)| (t, k))
    }

    pub fn max_count(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

impl<T: Real> Mesh<T> {
    /// Newest-vertex bisection: each marked triangle is bisected `k` times and
    /// neighbours are refined as needed to keep the mesh conforming.
    ///
    /// Works in rounds. In each round all triangles with a remaining count are
    /// bisected once, together with the closure; children inherit the parent's
    /// remaining count minus one.
    pub fn bisect(&self, marks: &MarkList) -> Result<Mesh<T>> {
        let mut remaining = vec![0u32; self.num_triangles()];
        for (t, k) in marks.iter() {
            if t >= self.num_triangles() {
                return Err(Error::InvalidMark {
                    triangle: t,
                    reason: "index out of range",
                });
            }
            remaining[t] = k;
        }
        let mut mesh = self.clone();
        while remaining.iter().any(|&k| k > 0) {
            let flagged: Vec<bool> = remaining.iter().map(|&k| k > 0).collect();
            let (next, parent) = mesh.refine_once(&flagged)?;
            remaining = parent
                .iter()
                .map(|&p| remaining[p].saturating_sub(1))
                .collect();
            mesh = next;
        }
        Ok(mesh)
    }

    /// Bisect every flagged triangle once plus its conformity closure.
    /// Returns the new mesh and the parent index of each new triangle.
    fn refine_once(&self, flagged: &[bool]) -> Result<(Mesh<T>, Vec<usize>)> {
        let ne = self.edges.len();
        let mut edge_marked = vec![false; ne];
        let mut stack: Vec<usize> = (0..self.num_triangles()).filter(|&t| flagged[t]).collect();
        // closure: a triangle with any marked edge must split its refinement edge
        while let Some(t) = stack.pop() {
            let e = self.tri_edges[t][0];
            if edge_marked[e] {
                continue;
            }
            edge_marked[e] = true;
            let edge = &self.edges[e];
            if let Some(n) = edge.other(t) {
                stack.push(n);
            }
        }

        let mut vertices = self.vertices.clone();
        let mut midpoint = vec![usize::MAX; ne];
        let half = lit::<T>(0.5);
        for (e, m) in midpoint.iter_mut().enumerate() {
            if edge_marked[e] {
                let [a, b] = self.edges[e].vertices;
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                *m = vertices.len();
                vertices.push([(pa[0] + pb[0]) * half, (pa[1] + pb[1]) * half]);
            }
        }

        let mut triangles = Vec::with_capacity(self.num_triangles() * 2);
        let mut parent = Vec::with_capacity(self.num_triangles() * 2);
        for (t, &tri) in self.triangles.iter().enumerate() {
            let te = self.tri_edges[t];
            let ref_edge = te[0];
            if !edge_marked[ref_edge] {
                triangles.push(tri);
                parent.push(t);
                continue;
            }
            let [v0, v1, v2] = tri;
            let m = midpoint[ref_edge];
            // child over (v0, v1): its refinement edge is parent edge 2
            let left = [m, v0, v1];
            // child over (v2, v0): its refinement edge is parent edge 1
            let right = [m, v2, v0];
            for (child, pe) in [(left, te[2]), (right, te[1])] {
                if edge_marked[pe] {
                    let [c0, c1, c2] = child;
                    let mm = midpoint[pe];
                    triangles.push([mm, c0, c1]);
                    triangles.push([mm, c2, c0]);
                    parent.push(t);
                    parent.push(t);
                } else {
                    triangles.push(child);
                    parent.push(t);
                }
            }
        }
        Ok((Mesh::new(vertices, triangles)?, parent))
    }
}
