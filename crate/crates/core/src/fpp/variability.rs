//! The `min(x, t)` battery for the "more variable" ordering.

use crate::error::FppError;

use super::distribution::Distribution;

/// Subdivisions inserted between consecutive breakpoints.
const SUBDIVISIONS: usize = 32;
const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct VariabilityCheck {
    pub holds: bool,
    /// A `t` with `E min(w̃, t) > E min(w, t)`, or `∞` when only the means fail.
    pub witness: Option<f64>,
    pub mean_tilde: f64,
    pub mean: f64,
    pub points_checked: usize,
}

/// Checks `E min(w̃, t) ≤ E min(w, t)` at every breakpoint of either law, at
/// evenly spaced points between them, at every `t` of `t_grid`, and
/// `E w̃ ≤ E w`. Passing this battery is necessary for `ν̃` to be more variable
/// than `ν`; it is the criterion implemented here.
pub fn is_more_variable(nu_tilde: &Distribution, nu: &Distribution, t_grid: &[f64]) -> Result<VariabilityCheck, FppError> {
    let (mean_tilde, mean) = (nu_tilde.mean(), nu.mean());
    if !mean_tilde.is_finite() || !mean.is_finite() {
        return Err(FppError::InfiniteMean);
    }
    let mut bps = nu_tilde.breakpoints();
    bps.extend(nu.breakpoints());
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut points = Vec::new();
    for (i, &b) in bps.iter().enumerate() {
        points.push(b);
        if let Some(&next) = bps.get(i + 1) {
            points.extend((1..SUBDIVISIONS).map(|j| b + (next - b) * j as f64 / SUBDIVISIONS as f64));
        }
    }
    points.extend(t_grid.iter().copied().filter(|t| t.is_finite()));
    let witness = points
        .iter()
        .copied()
        .find(|&t| nu_tilde.min_integral(t) > nu.min_integral(t) + TOLERANCE)
        .or_else(|| (mean_tilde > mean + TOLERANCE).then_some(f64::INFINITY));
    Ok(VariabilityCheck { holds: witness.is_none(), witness, mean_tilde, mean, points_checked: points.len() + 1 })
}
