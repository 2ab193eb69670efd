//! Quadrature rules on the reference triangle and on edges, plus barycentric
//! sampling lattices used for maximum-norm evaluation.
//!
//! Triangle rules store barycentric points and weights normalised to sum to
//! one, so `∫_T g ≈ |T| Σ w_i g(x_i)`.

use crate::scalar::{lit, Real};

/// Barycentric coordinates `(λ0, λ1, λ2)` with `λ0 + λ1 + λ2 = 1`.
pub type Bary<T> = [T; 3];

#[derive(Debug, Clone)]
pub struct TriangleRule<T> {
    pub points: Vec<Bary<T>>,
    pub weights: Vec<T>,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

impl<T: Real> TriangleRule<T> {
    /// Symmetric 6-point rule exact for degree 4.
    pub fn degree4() -> Self {
        let a1 = 0.445_948_490_915_965_f64;
        let w1 = 0.223_381_589_678_011_f64;
        let a2 = 0.091_576_213_509_771_f64;
        let w2 = 0.109_951_743_655_322_f64;
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for (a, w) in [(a1, w1), (a2, w2)] {
            let b = 1.0 - 2.0 * a;
            for p in [[b, a, a], [a, b, a], [a, a, b]] {
                points.push(p.map(lit::<T>));
                weights.push(lit(w));
            }
        }
        Self {
            points,
            weights,
            degree: 4,
        }
    }

    /// 25-point collapsed Gauss rule, exact for degree 8.
    pub fn degree8() -> Self {
        Self::collapsed_gauss(5)
    }

    /// Conical product rule from an `n`-point Gauss-Legendre rule mapped onto
    /// the triangle by collapsing one side of the unit square onto vertex 2.
    /// Exact for total degree `2n - 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (nodes, w) = gauss_legendre_unit(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (s, ws) in nodes.iter().zip(&w) {
            for (t, wt) in nodes.iter().zip(&w) {
                let x = *s;
                let y = t * (1.0 - s);
                points.push([1.0 - x - y, x, y].map(lit::<T>));
                // reference triangle area is 1/2
                weights.push(lit(2.0 * ws * wt * (1.0 - s)));
            }
        }
        Self {
            points,
            weights,
            degree: 2 * n - 2,
        }
    }

    /// `|T| Σ w_i g(λ_i)`.
    pub fn integrate<F: FnMut(Bary<T>) -> T>(&self, area: T, mut g: F) -> T {
        let mut acc = T::zero();
        for (p, w) in self.points.iter().zip(&self.weights) {
            acc += *w * g(*p);
        }
        acc * area
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess followed by Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Three-point Gauss rule on `[0, 1]`, exact for degree 5.
#[derive(Debug, Clone)]
pub struct EdgeRule<T> {
    pub points: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> EdgeRule<T> {
    pub fn gauss3() -> Self {
        let r = (0.6f64).sqrt() * 0.5;
        Self {
            points: vec![lit(0.5 - r), lit(0.5), lit(0.5 + r)],
            weights: vec![lit(5.0 / 18.0), lit(8.0 / 18.0), lit(5.0 / 18.0)],
        }
    }
}

/// Barycentric lattice `{(i, j, k) / m : i + j + k = m}`; includes the three
/// vertices. Order 4 yields 15 points.
pub fn lattice<T: Real>(order: usize) -> Vec<Bary<T>> {
    let m = order.max(1);
    let mf = T::from_usize_lossy(m);
    let mut pts = Vec::with_capacity((m + 1) * (m + 2) / 2);
    for i in 0..=m {
        for j in 0..=(m - i) {
            let k = m - i - j;
            pts.push([
                T::from_usize_lossy(i) / mf,
                T::from_usize_lossy(j) / mf,
                T::from_usize_lossy(k) / mf,
            ]);
        }
    }
    pts
}

/// Exact `∫_T λ0^a λ1^b λ2^c = 2|T| a! b! c! / (a + b + c + 2)!`.
pub fn barycentric_monomial_integral(area: f64, a: u32, b: u32, c: u32) -> f64 {
    fn fact(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }
    2.0 * area * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2)
}
