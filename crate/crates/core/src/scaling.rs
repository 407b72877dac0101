//! Normalizations shared by the scaled paths and the experiments.

/// `(8/9)^{1/4}`.
pub fn label_constant() -> f64 {
    (8.0f64 / 9.0).powf(0.25)
}

/// Divisor of contour heights: `√(2n)`.
pub fn height_scale(n: usize) -> f64 {
    (2.0 * n as f64).sqrt()
}

/// Divisor of labels: `(8n/9)^{1/4}`.
pub fn label_scale(n: usize) -> f64 {
    label_constant() * (n as f64).powf(0.25)
}

/// Divisor of the radius in the radius experiment: `n^{1/4}`.
pub fn radius_scale(n: usize) -> f64 {
    (n as f64).powf(0.25)
}
