//! Continuous piecewise-linear fields on a [`Mesh`].

use crate::mesh::Mesh;
use crate::scalar::{Point, Real};

/// Nodal values of a P1 function, one per mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField<T> {
    pub values: Vec<T>,
}

impl<T: Real> DiscreteField<T> {
    pub fn zeros(mesh: &Mesh<T>) -> Self {
        Self {
            values: vec![T::zero(); mesh.num_vertices()],
        }
    }

    pub fn from_values(values: Vec<T>) -> Self {
        Self { values }
    }

    /// Nodal interpolant of `g`.
    pub fn interpolate<F: Fn(Point<T>) -> T>(mesh: &Mesh<T>, g: F) -> Self {
        Self {
            values: mesh.vertices().iter().map(|&p| g(p)).collect(),
        }
    }

    /// Nodal values of triangle `t`.
    #[inline]
    pub fn local(&self, mesh: &Mesh<T>, t: usize) -> [T; 3] {
        mesh.triangles()[t].map(|v| self.values[v])
    }

    /// Value at barycentric coordinates in triangle `t`.
    #[inline]
    pub fn eval(&self, mesh: &Mesh<T>, t: usize, bary: [T; 3]) -> T {
        let u = self.local(mesh, t);
        u[0] * bary[0] + u[1] * bary[1] + u[2] * bary[2]
    }

    /// Constant gradient on triangle `t`.
    pub fn gradient(&self, mesh: &Mesh<T>, t: usize) -> Point<T> {
        let g = mesh.element_geometry(t).bary_gradients;
        let u = self.local(mesh, t);
        [
            u[0] * g[0][0] + u[1] * g[1][0] + u[2] * g[2][0],
            u[0] * g[0][1] + u[1] * g[1][1] + u[2] * g[2][1],
        ]
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * s).collect(),
        }
    }
}
