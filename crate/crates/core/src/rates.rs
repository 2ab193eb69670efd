//! Empirical convergence orders: slopes of `log(value)` against `log(DOF)`.

/// Slope between two points; `None` when either value is not positive.
pub fn pair_slope(dof0: f64, v0: f64, dof1: f64, v1: f64) -> Option<f64> {
    if v0 > 0.0 && v1 > 0.0 && dof0 > 0.0 && dof1 > 0.0 && dof0 != dof1 {
        Some((v1 / v0).ln() / (dof1 / dof0).ln())
    } else {
        None
    }
}

/// Slopes between consecutive rows.
pub fn consecutive_slopes(dof: &[f64], values: &[f64]) -> Vec<Option<f64>> {
    dof.windows(2)
        .zip(values.windows(2))
        .map(|(d, v)| pair_slope(d[0], v[0], d[1], v[1]))
        .collect()
}

/// Least-squares slope through `(ln dof, ln value)` over the points with
/// positive values. Needs at least two such points with distinct DOF.
pub fn fit_slope(dof: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = dof
        .iter()
        .zip(values)
        .filter(|(&d, &v)| d > 0.0 && v > 0.0)
        .map(|(&d, &v)| (d.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx > 0.0 {
        Some(sxy / sxx)
    } else {
        None
    }
}

/// Least-squares slope over the last `points` rows.
pub fn tail_slope(dof: &[f64], values: &[f64], points: usize) -> Option<f64> {
    let start = dof.len().saturating_sub(points);
    fit_slope(&dof[start..], &values[start..])
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantityRates {
    pub name: String,
    /// Slope between rows `i` and `i + 1`.
    pub pairs: Vec<Option<f64>>,
    pub tail: Option<f64>,
    pub tail_points: usize,
    /// Rows whose value was not positive.
    pub skipped: Vec<usize>,
}

pub fn quantity_rates(
    name: &str,
    dof: &[f64],
    values: &[f64],
    tail_points: usize,
) -> QuantityRates {
    QuantityRates {
        name: name.to_string(),
        pairs: consecutive_slopes(dof, values),
        tail: tail_slope(dof, values, tail_points),
        tail_points: tail_points.min(dof.len()),
        skipped: values
            .iter()
            .enumerate()
            .filter(|(_, &v)| !(v > 0.0))
            .map(|(i, _)| i)
            .collect(),
    }
}
