//! Model problems `-ε Δu + div(a u) + b u = f` on the unit square with
//! homogeneous Dirichlet data.
//!
//! The manufactured problems carry analytic `u`, `∇u` and `Δu`; their forcing
//! is assembled from those as `f = -ε Δu + a·∇u + (div a + b) u`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{dot, lit, Point, Real};

pub type ScalarFn<T> = Arc<dyn Fn(Point<T>) -> T + Send + Sync>;
pub type VectorFn<T> = Arc<dyn Fn(Point<T>) -> Point<T> + Send + Sync>;

/// Analytic solution with first and second derivatives.
#[derive(Clone)]
pub struct ExactSolution<T> {
    pub u: ScalarFn<T>,
    pub grad: VectorFn<T>,
    pub laplacian: ScalarFn<T>,
}

#[derive(Clone)]
pub struct Problem<T> {
    pub name: String,
    pub eps: T,
    pub convection: VectorFn<T>,
    pub div_convection: ScalarFn<T>,
    pub reaction: ScalarFn<T>,
    pub forcing: ScalarFn<T>,
    pub exact: Option<ExactSolution<T>>,
}

impl<T> fmt::Debug for Problem<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("eps", &self.eps)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// `sin(πx) sin(πy)`
    U1,
    /// Outflow boundary layer at `y = 1`.
    U2,
    /// Interior layer along `x = 1/2`.
    U3,
}

impl ProblemId {
    pub fn build<T: Real>(self, eps: T) -> Result<Problem<T>> {
        match self {
            ProblemId::U1 => problem_u1(eps),
            ProblemId::U2 => problem_u2(eps),
            ProblemId::U3 => problem_u3(eps),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::U1 => "u1",
            ProblemId::U2 => "u2",
            ProblemId::U3 => "u3",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u1" => Ok(ProblemId::U1),
            "u2" => Ok(ProblemId::U2),
            "u3" => Ok(ProblemId::U3),
            other => Err(Error::InvalidArgument(format!("unknown problem '{other}'"))),
        }
    }
}

impl<T: Real> Problem<T> {
    /// Problem with user-supplied coefficients and forcing.
    pub fn new(
        name: impl Into<String>,
        eps: T,
        convection: VectorFn<T>,
        div_convection: ScalarFn<T>,
        reaction: ScalarFn<T>,
        forcing: ScalarFn<T>,
    ) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "diffusion must be positive, got {eps}"
            )));
        }
        Ok(Self {
            name: name.into(),
            eps,
            convection,
            div_convection,
            reaction,
            forcing,
            exact: None,
        })
    }

    /// Manufactured problem: the forcing is built from the exact solution.
    pub fn manufactured(
        name: impl Into<String>,
        eps: T,
        convection: VectorFn<T>,
        div_convection: ScalarFn<T>,
        reaction: ScalarFn<T>,
        exact: ExactSolution<T>,
    ) -> Result<Self> {
        let forcing: ScalarFn<T> = {
            let (a, da, b, ex) = (
                convection.clone(),
                div_convection.clone(),
                reaction.clone(),
                exact.clone(),
            );
            Arc::new(move |x| {
                let u = (ex.u)(x);
                -eps * (ex.laplacian)(x) + dot(a(x), (ex.grad)(x)) + (da(x) + b(x)) * u
            })
        };
        let mut p = Self::new(name, eps, convection, div_convection, reaction, forcing)?;
        p.exact = Some(exact);
        Ok(p)
    }

    #[inline]
    pub fn a(&self, x: Point<T>) -> Point<T> {
        (self.convection)(x)
    }

    #[inline]
    pub fn div_a(&self, x: Point<T>) -> T {
        (self.div_convection)(x)
    }

    #[inline]
    pub fn b(&self, x: Point<T>) -> T {
        (self.reaction)(x)
    }

    #[inline]
    pub fn f(&self, x: Point<T>) -> T {
        (self.forcing)(x)
    }

    pub fn u(&self, x: Point<T>) -> Option<T> {
        self.exact.as_ref().map(|e| (e.u)(x))
    }

    pub fn grad_u(&self, x: Point<T>) -> Option<Point<T>> {
        self.exact.as_ref().map(|e| (e.grad)(x))
    }

    /// Strong-form operator applied to the exact solution minus the forcing;
    /// vanishes identically for a consistent manufactured problem.
    pub fn exact_residual(&self, x: Point<T>) -> Option<T> {
        let ex = self.exact.as_ref()?;
        let u = (ex.u)(x);
        Some(
            -self.eps * (ex.laplacian)(x)
                + dot(self.a(x), (ex.grad)(x))
                + (self.div_a(x) + self.b(x)) * u
                - self.f(x),
        )
    }
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1], got {eps}"
        )))
    }
}

/// Coefficients used by all experiments: `a = [0, 1]`, `b = 1`.
fn standard_coefficients<T: Real>() -> (VectorFn<T>, ScalarFn<T>, ScalarFn<T>) {
    (
        Arc::new(|_| [T::zero(), T::one()]),
        Arc::new(|_| T::zero()),
        Arc::new(|_| T::one()),
    )
}

pub fn problem_u1<T: Real>(eps: T) -> Result<Problem<T>> {
    check_eps(eps)?;
    let pi = T::PI();
    let exact = ExactSolution {
        u: Arc::new(move |[x, y]: Point<T>| (pi * x).sin() * (pi * y).sin()),
        grad: Arc::new(move |[x, y]: Point<T>| {
            [
                pi * (pi * x).cos() * (pi * y).sin(),
                pi * (pi * x).sin() * (pi * y).cos(),
            ]
        }),
        laplacian: Arc::new(move |[x, y]: Point<T>| {
            -lit::<T>(2.0) * pi * pi * (pi * x).sin() * (pi * y).sin()
        }),
    };
    let (a, da, b) = standard_coefficients();
    Problem::manufactured("u1", eps, a, da, b, exact)
}

/// `x(1-x) [y - (e^{-(1-y)/ε} - e^{-1/ε}) / (1 - e^{-1/ε})]`
pub fn problem_u2<T: Real>(eps: T) -> Result<Problem<T>> {
    check_eps(eps)?;
    let tail = (-eps.recip()).exp();
    let denom = -(-eps.recip()).exp_m1();
    // every exponent is non-positive inside the closed unit square
    let layer = move |y: T| (-(T::one() - y).max(T::zero()) / eps).exp();
    let g = move |y: T| y - (layer(y) - tail) / denom;
    let dg = move |y: T| T::one() - layer(y) / (eps * denom);
    let d2g = move |y: T| -layer(y) / (eps * eps * denom);
    let two = lit::<T>(2.0);
    let p = |x: T| x * (T::one() - x);
    let dp = move |x: T| T::one() - two * x;
    let exact = ExactSolution {
        u: Arc::new(move |[x, y]: Point<T>| p(x) * g(y)),
        grad: Arc::new(move |[x, y]: Point<T>| [dp(x) * g(y), p(x) * dg(y)]),
        laplacian: Arc::new(move |[x, y]: Point<T>| -two * g(y) + p(x) * d2g(y)),
    };
    let (a, da, b) = standard_coefficients();
    Problem::manufactured("u2", eps, a, da, b, exact)
}

/// `2x(1-x)y(1-y)(1 - tanh((1/2 - x)/√ε))`
pub fn problem_u3<T: Real>(eps: T) -> Result<Problem<T>> {
    check_eps(eps)?;
    let sq = eps.sqrt();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let p = |s: T| s * (T::one() - s);
    let dp = move |s: T| T::one() - two * s;
    // t(x) = 1 - tanh(s), s = (1/2 - x)/√ε
    let th = move |x: T| ((half - x) / sq).tanh();
    let t = move |x: T| T::one() - th(x);
    let dt = move |x: T| {
        let h = th(x);
        (T::one() - h * h) / sq
    };
    let d2t = move |x: T| {
        let h = th(x);
        two * h * (T::one() - h * h) / eps
    };
    let exact = ExactSolution {
        u: Arc::new(move |[x, y]: Point<T>| two * p(x) * p(y) * t(x)),
        grad: Arc::new(move |[x, y]: Point<T>| {
            [
                two * p(y) * (dp(x) * t(x) + p(x) * dt(x)),
                two * dp(y) * p(x) * t(x),
            ]
        }),
        laplacian: Arc::new(move |[x, y]: Point<T>| {
            let uxx = two * p(y) * (-two * t(x) + two * dp(x) * dt(x) + p(x) * d2t(x));
            let uyy = two * (-two) * p(x) * t(x);
            uxx + uyy
        }),
    };
    let (a, da, b) = standard_coefficients();
    Problem::manufactured("u3", eps, a, da, b, exact)
}
