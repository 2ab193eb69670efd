use std::io::{self, Write};

use super::Mesh;
use crate::scalar::Real;

impl<T: Real> Mesh<T> {
    /// Plain-text dump:
    ///
    /// ```text
    /// vertices <nv>
    /// <index> <x> <y>
    /// triangles <nt>
    /// <index> <v1> <v2> <v3>
    /// ```
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "vertices {}", self.num_vertices())?;
        for (i, p) in self.vertices.iter().enumerate() {
            writeln!(w, "{i} {:.17e} {:.17e}", p[0], p[1])?;
        }
        writeln!(w, "triangles {}", self.num_triangles())?;
        for (i, t) in self.triangles.iter().enumerate() {
            writeln!(w, "{i} {} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    /// Legacy ASCII VTK unstructured grid with optional per-vertex and
    /// per-cell scalar fields.
    pub fn write_vtk<W: Write>(
        &self,
        mut w: W,
        point_data: &[(&str, &[T])],
        cell_data: &[(&str, &[T])],
    ) -> io::Result<()> {
        writeln!(w, "# vtk DataFile Version 3.0")?;
        writeln!(w, "maxnorm-afem mesh")?;
        writeln!(w, "ASCII")?;
        writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
        writeln!(w, "POINTS {} double", self.num_vertices())?;
        for p in &self.vertices {
            writeln!(w, "{:e} {:e} 0", p[0], p[1])?;
        }
        let nt = self.num_triangles();
        writeln!(w, "CELLS {nt} {}", 4 * nt)?;
        for t in &self.triangles {
            writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(w, "CELL_TYPES {nt}")?;
        for _ in 0..nt {
            writeln!(w, "5")?;
        }
        if !point_data.is_empty() {
            writeln!(w, "POINT_DATA {}", self.num_vertices())?;
            for (name, vals) in point_data {
                write_scalars(&mut w, name, vals)?;
            }
        }
        if !cell_data.is_empty() {
            writeln!(w, "CELL_DATA {nt}")?;
            for (name, vals) in cell_data {
                write_scalars(&mut w, name, vals)?;
            }
        }
        Ok(())
    }
}

fn write_scalars<W: Write, T: Real>(w: &mut W, name: &str, vals: &[T]) -> io::Result<()> {
    writeln!(w, "SCALARS {name} double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for v in vals {
        writeln!(w, "{v:e}")?;
    }
    Ok(())
}
