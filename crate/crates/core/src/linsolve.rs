//! Sparse direct solve of the assembled system.
//!
//! The factorisation is a supernodal LU with partial pivoting from `faer`;
//! the result is checked against the requested relative residual and, if
//! needed, improved by a few steps of iterative refinement.

use faer::prelude::Solve;
use faer::sparse::{SparseRowMatRef, SymbolicSparseRowMatRef};
use faer::Col;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::{norm2, CsrMatrix};

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Target `‖Ax − b‖₂ / ‖b‖₂`.
    pub tol: f64,
    /// Iterative refinement steps after the factorisation.
    pub max_refinement: usize,
    /// Refuse systems larger than this.
    pub max_size: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_refinement: 3,
            max_size: 5_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solution: Vec<T>,
    pub relative_residual: f64,
    pub refinement_steps: usize,
    pub note: &'static str,
}

fn relative_residual<T: Real>(a: &CsrMatrix<T>, x: &[T], b: &[T], bnorm: T) -> (Vec<T>, f64) {
    let ax = a.mul_vec(x);
    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let rel = if bnorm > T::zero() {
        (norm2(&r) / bnorm).as_f64()
    } else {
        norm2(&r).as_f64()
    };
    (r, rel)
}

/// Solve `A x = b`. Fails with [`Error::Solve`] carrying the best residual
/// reached when the factorisation breaks down or the tolerance is missed.
pub fn solve<T: Real>(a: &CsrMatrix<T>, b: &[T], opts: &SolveOptions) -> Result<SolveReport<T>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "system is {}x{} with rhs of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if n > opts.max_size {
        return Err(Error::Solve {
            reason: format!("system size {n} exceeds cap {}", opts.max_size),
            residual: f64::INFINITY,
        });
    }
    if n == 0 {
        return Ok(SolveReport {
            solution: Vec::new(),
            relative_residual: 0.0,
            refinement_steps: 0,
            note: "empty system",
        });
    }
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        return Ok(SolveReport {
            solution: vec![T::zero(); n],
            relative_residual: 0.0,
            refinement_steps: 0,
            note: "zero right-hand side",
        });
    }

    let symbolic = SymbolicSparseRowMatRef::new_checked(n, n, a.row_ptr(), None, a.col_idx());
    let mat = SparseRowMatRef::new(symbolic, a.values());
    let lu = mat.sp_lu().map_err(|e| Error::Solve {
        reason: format!("sparse LU failed: {e:?}"),
        residual: f64::INFINITY,
    })?;

    let apply = |rhs: &[T]| -> Vec<T> {
        let col = Col::<T>::from_fn(n, |i| rhs[i]);
        let x = lu.solve(&col);
        (0..n).map(|i| x[i]).collect()
    };

    let mut x = apply(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solve {
            reason: "factorisation produced non-finite values (singular matrix?)".into(),
            residual: f64::INFINITY,
        });
    }
    let (mut r, mut rel) = relative_residual(a, &x, b, bnorm);
    let mut steps = 0;
    while rel > opts.tol && steps < opts.max_refinement {
        let dx = apply(&r);
        let trial: Vec<T> = x.iter().zip(&dx).map(|(&xi, &di)| xi + di).collect();
        let (r2, rel2) = relative_residual(a, &trial, b, bnorm);
        steps += 1;
        if !(rel2 < rel) {
            break;
        }
        x = trial;
        r = r2;
        rel = rel2;
    }
    if !(rel <= opts.tol) || !rel.is_finite() {
        return Err(Error::Solve {
            reason: format!("relative residual above tolerance {:e}", opts.tol),
            residual: rel,
        });
    }
    Ok(SolveReport {
        solution: x,
        relative_residual: rel,
        refinement_steps: steps,
        note: "sparse LU with partial pivoting",
    })
}
