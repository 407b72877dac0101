//! Limit densities of the scaled contour at fixed times.
//!
//! `ζ(x, m)` is the density of the heights `x_1, …, x_p` of the normalized
//! excursion at times `τ_1 < … < τ_p` together with the minima
//! `m_1, …, m_{p-1}` between consecutive times. `ξ(ℓ, k)` is the density of
//! independent centred Gaussian label increments along branches of lengths
//! `ℓ_i`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `ζ(x, m)` at times `τ`; zero outside the admissible cone.
pub fn zeta(x: &[f64], m: &[f64], tau: &[f64]) -> Result<f64> {
    let p = x.len();
    if p == 0 || m.len() + 1 != p || tau.len() != p {
        return Err(Error::Dimension(format!(
            "ζ needs p heights, p − 1 minima and p times, got {}, {}, {}",
            x.len(),
            m.len(),
            tau.len()
        )));
    }
    if tau.iter().any(|&t| !(t > 0.0 && t < 1.0)) || tau.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Dimension(
            "times must increase strictly inside (0, 1)".into(),
        ));
    }
    let mut value = 2f64.powi(2 * p as i32) * (2.0 * PI).powf(-(p as f64) / 2.0);
    for i in 0..=p {
        // β_0 = 0, γ_0 = x_1; β_i = x_i − m_i, γ_i = x_{i+1} − m_i; β_p = x_p, γ_p = 0.
        let (beta, gamma) = if i == 0 {
            (0.0, x[0])
        } else if i == p {
            (x[p - 1], 0.0)
        } else {
            (x[i - 1] - m[i - 1], x[i] - m[i - 1])
        };
        if beta < 0.0 || gamma < 0.0 || (0 < i && i < p && m[i - 1] < 0.0) {
            return Ok(0.0);
        }
        let t0 = if i == 0 { 0.0 } else { tau[i - 1] };
        let t1 = if i == p { 1.0 } else { tau[i] };
        let dt = t1 - t0;
        let a = beta + gamma;
        value *= a * (-a * a / (2.0 * dt)).exp() / dt.powf(1.5);
    }
    Ok(value)
}

/// `∫ ζ(x, m) dm` over the box `Π [lo_i, hi_i]` of minima, in closed form.
///
/// Each interior factor depends on `m_i` only through `a = x_i + x_{i+1} − 2m_i`
/// and `a e^{-a²/2Δ} / Δ^{3/2}` has antiderivative `−e^{-a²/2Δ} / Δ^{1/2}`
/// in `a`, so no quadrature error enters along the cone boundary
/// `m_i = min(x_i, x_{i+1})`.
pub fn zeta_minima_integral(x: &[f64], ranges: &[[f64; 2]], tau: &[f64]) -> Result<f64> {
    let p = x.len();
    if p == 0 || ranges.len() + 1 != p || tau.len() != p {
        return Err(Error::Dimension(format!(
            "ζ needs p heights, p − 1 minimum ranges and p times, got {}, {}, {}",
            x.len(),
            ranges.len(),
            tau.len()
        )));
    }
    if tau.iter().any(|&t| !(t > 0.0 && t < 1.0)) || tau.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Dimension(
            "times must increase strictly inside (0, 1)".into(),
        ));
    }
    if x.iter().any(|&v| v < 0.0) {
        return Ok(0.0);
    }
    let mut value = 2f64.powi(2 * p as i32) * (2.0 * PI).powf(-(p as f64) / 2.0);
    let edge = |a: f64, dt: f64| a * (-a * a / (2.0 * dt)).exp() / dt.powf(1.5);
    value *= edge(x[0], tau[0]) * edge(x[p - 1], 1.0 - tau[p - 1]);
    for i in 1..p {
        let dt = tau[i] - tau[i - 1];
        let lo = ranges[i - 1][0].max(0.0);
        let hi = ranges[i - 1][1].min(x[i - 1].min(x[i]));
        if hi <= lo {
            return Ok(0.0);
        }
        let s = x[i - 1] + x[i];
        let (a_small, a_large) = (s - 2.0 * hi, s - 2.0 * lo);
        let g = |a: f64| (-a * a / (2.0 * dt)).exp();
        value *= (g(a_small) - g(a_large)) / (2.0 * dt.sqrt());
    }
    Ok(value)
}

/// `ξ(ℓ, k) = (2π)^{-q/2} Π ℓ_i^{-1/2} exp(−k_i² / 2ℓ_i)`.
pub fn xi(l: &[f64], k: &[f64]) -> Result<f64> {
    if l.len() != k.len() || l.is_empty() {
        return Err(Error::Dimension(format!(
            "ξ needs as many lengths as increments, got {} and {}",
            l.len(),
            k.len()
        )));
    }
    if l.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Dimension("branch lengths must be positive".into()));
    }
    let q = l.len() as f64;
    Ok((2.0 * PI).powf(-q / 2.0)
        * l.iter()
            .zip(k)
            .map(|(&li, &ki)| (-ki * ki / (2.0 * li)).exp() / li.sqrt())
            .product::<f64>())
}
