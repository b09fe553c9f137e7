//! Analytic stability boundary of the linearized turning model.
//!
//! Linearizing about the equilibrium y* = b·ρ^(α−1) gives the characteristic
//! equation λ² + 2ζλ + 1 + κ = κ·e^(−λτ) with κ = α·b·ρ^(α−1). D-subdivision
//! (substituting λ = iω) yields the stability lobes in closed form: for every
//! crossing frequency ω > 1,
//!
//!   κ(ω) = ((ω²−1)² + 4ζ²ω²) / (2(ω²−1)),
//!   θ(ω) ∈ (0, 2π) with cos θ = (1+κ−ω²)/κ, sin θ = −2ζω/κ,
//!   τ = (2πk + θ)/ω for lobe k,   b_lim = κ / (α·ρ^(α−1)).
//!
//! The model is autonomous (constant delay, no time-periodic coefficients),
//! so this boundary is exact; labels follow by comparing b against the lobe
//! envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::turning::TAU_FACTOR;

/// Minimal stability boundary b_lim(Ω/ωₙ): the lower envelope of all lobes
/// over a speed range, as sorted (speed_ratio, b_lim) samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LobeBoundary {
    pub samples: Vec<(f64, f64)>,
}

impl LobeBoundary {
    /// Piecewise-linear b_lim at an arbitrary speed, clamped at the ends.
    pub fn b_lim_at(&self, speed: f64) -> f64 {
        let s = &self.samples;
        if speed <= s[0].0 {
            return s[0].1;
        }
        if speed >= s[s.len() - 1].0 {
            return s[s.len() - 1].1;
        }
        let hi = s.partition_point(|&(sp, _)| sp <= speed);
        let (s0, b0) = s[hi - 1];
        let (s1, b1) = s[hi];
        if s1 == s0 {
            return b0.min(b1);
        }
        b0 + (b1 - b0) * (speed - s0) / (s1 - s0)
    }

    pub fn min_b(&self) -> f64 {
        self.samples.iter().map(|&(_, b)| b).fold(f64::INFINITY, f64::min)
    }
}

/// Boolean chatter labels over the (speed, depth) grid; `labels[i][j]` pairs
/// `speed_axis[i]` with `depth_axis[j]`, true = chatter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelGrid {
    pub speed_axis: Vec<f64>,
    pub depth_axis: Vec<f64>,
    pub labels: Vec<Vec<bool>>,
}

impl LabelGrid {
    pub fn chatter_fraction(&self) -> f64 {
        let total: usize = self.labels.iter().map(|row| row.len()).sum();
        let chatter: usize =
            self.labels.iter().map(|row| row.iter().filter(|&&l| l).count()).sum();
        chatter as f64 / total as f64
    }
}

/// Crossing gain κ(ω) = ((ω²−1)² + 4ζ²ω²) / (2(ω²−1)), defined for ω > 1.
pub fn kappa_of_omega(omega: f64, zeta: f64) -> Result<f64> {
    if !(omega > 1.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("kappa_of_omega requires omega > 1, got {omega}")));
    }
    let s = omega * omega - 1.0;
    Ok((s * s + 4.0 * zeta * zeta * omega * omega) / (2.0 * s))
}

/// Frequency of the κ minimum: ω* = √(1 + 2ζ), where κ = 2ζ(1+ζ).
pub fn omega_star(zeta: f64) -> f64 {
    (1.0 + 2.0 * zeta).sqrt()
}

/// Closed-form global minimum of the boundary: 2ζ(1+ζ)/(α·ρ^(α−1)).
pub fn analytic_min_b(zeta: f64, rho: f64, alpha: f64) -> f64 {
    2.0 * zeta * (1.0 + zeta) / (alpha * rho.powf(alpha - 1.0))
}

/// One point of a lobe's parametric boundary curve, tagged with the crossing
/// frequency that generated it.
#[derive(Debug, Clone, Copy)]
pub struct LobePoint {
    pub omega: f64,
    pub speed_ratio: f64,
    pub b_lim: f64,
}

/// One boundary point of lobe k at crossing frequency ω.
fn lobe_point(omega: f64, zeta: f64, rho: f64, alpha: f64, k: u32) -> Result<LobePoint> {
    let kappa = kappa_of_omega(omega, zeta)?;
    let theta = crossing_phase(omega, zeta, kappa);
    let tau = (TAU_FACTOR * k as f64 + theta) / omega;
    let speed = TAU_FACTOR / tau;
    let b_lim = kappa / (alpha * rho.powf(alpha - 1.0));
    Ok(LobePoint { omega, speed_ratio: speed, b_lim })
}

/// Phase θ ∈ (0, 2π) with cos θ = (1+κ−ω²)/κ and sin θ = −2ζω/κ. The sine is
/// strictly negative for ω > 1, so θ always lands in (π, 2π).
fn crossing_phase(omega: f64, zeta: f64, kappa: f64) -> f64 {
    let cos_t = (1.0 + kappa - omega * omega) / kappa;
    let sin_t = -2.0 * zeta * omega / kappa;
    let theta = sin_t.atan2(cos_t);
    if theta < 0.0 {
        theta + TAU_FACTOR
    } else {
        theta
    }
}

/// Residual of the characteristic equation at λ = iω for a boundary point;
/// exact boundary points give values at machine-noise level.
pub fn characteristic_residual(omega: f64, tau: f64, kappa: f64, zeta: f64) -> f64 {
    let (sin_wt, cos_wt) = (omega * tau).sin_cos();
    let re = 1.0 - omega * omega + kappa * (1.0 - cos_wt);
    let im = 2.0 * zeta * omega + kappa * sin_wt;
    re.hypot(im)
}

/// Speed ratio of lobe k at crossing frequency ω (monotone increasing in ω).
fn lobe_speed(omega: f64, zeta: f64, k: u32) -> f64 {
    let kappa = kappa_of_omega(omega, zeta).expect("omega > 1");
    let theta = crossing_phase(omega, zeta, kappa);
    TAU_FACTOR * omega / (TAU_FACTOR * k as f64 + theta)
}

/// Crossing frequencies below this offset from the ω = 1 pole are excluded:
/// κ there exceeds ~180 (b_lim in the hundreds, far above any depth range of
/// interest) and the f64 rounding noise of κ·(1−cos ωτ) starts to dominate
/// the characteristic-equation residual.
const OMEGA_POLE_OFFSET: f64 = 1e-5;

/// Smallest ω > 1 with lobe-k speed ≥ target, by bisection on the monotone
/// speed map; `None` if the target sits at or below the lobe's speed at the
/// pole cutoff (just above the left asymptote speed 1/(k+1)).
fn solve_omega_for_speed(target: f64, zeta: f64, k: u32) -> Option<f64> {
    let lo0 = 1.0 + OMEGA_POLE_OFFSET;
    if lobe_speed(lo0, zeta, k) >= target {
        return None;
    }
    let mut hi = 2.0;
    while lobe_speed(hi, zeta, k) < target {
        hi *= 2.0;
        if hi > 1e9 {
            return None;
        }
    }
    let mut lo = lo0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if lobe_speed(mid, zeta, k) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// The k-th stability lobe as a parametric curve sampled at `omega_samples`
/// crossing frequencies covering speeds up to `speed_cap` (plus the exact
/// κ-minimum frequency, so the lobe's true minimum is always a sample).
pub fn lobe_curve(
    zeta: f64,
    rho: f64,
    alpha: f64,
    k: u32,
    omega_samples: usize,
    speed_cap: f64,
) -> Result<Vec<LobePoint>> {
    if omega_samples < 2 {
        return Err(Error::Domain(format!("omega_samples must be >= 2, got {omega_samples}")));
    }
    if !(zeta > 0.0) || !(rho > 0.0) || !(alpha > 0.0) || !(speed_cap > 0.0) {
        return Err(Error::Domain("lobe_boundary requires positive zeta, rho, alpha, cap".into()));
    }
    let omega_lo = 1.0 + OMEGA_POLE_OFFSET;
    let omega_hi = solve_omega_for_speed(speed_cap, zeta, k).unwrap_or(2.0).max(omega_lo + 1e-9);

    let mut omegas: Vec<f64> = (0..omega_samples)
        .map(|i| omega_lo + (omega_hi - omega_lo) * i as f64 / (omega_samples - 1) as f64)
        .collect();
    let ws = omega_star(zeta);
    if ws > omega_lo && ws < omega_hi {
        omegas.push(ws);
        omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    omegas.into_iter().map(|w| lobe_point(w, zeta, rho, alpha, k)).collect()
}

/// The k-th lobe as (speed_ratio, b_lim) pairs, with a default speed cap of
/// 4.0 (generous for the grids this model is studied on).
pub fn lobe_boundary(
    zeta: f64,
    rho: f64,
    alpha: f64,
    k: u32,
    omega_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let curve = lobe_curve(zeta, rho, alpha, k, omega_samples, 4.0)?;
    Ok(curve.into_iter().map(|p| (p.speed_ratio, p.b_lim)).collect())
}

/// Lower envelope of all lobes intersecting `speed_range`, sampled onto a
/// uniform `resolution`-point speed grid. Each grid speed is mapped back to
/// its crossing frequency per lobe (bisection on the monotone speed map), so
/// grid samples sit on the analytic curves to solver tolerance; queries
/// between samples interpolate linearly. The exact per-lobe minima inside the
/// range are spliced in as extra samples, pinning the envelope's global
/// minimum to the closed form. Lobe indices grow until a lobe whose minimum
/// lies left of the range no longer improves the envelope anywhere (two in a
/// row, for safety).
pub fn min_boundary(
    zeta: f64,
    rho: f64,
    alpha: f64,
    speed_range: (f64, f64),
    resolution: usize,
) -> Result<LobeBoundary> {
    min_boundary_at(zeta, rho, alpha, speed_range, resolution, &[])
}

/// `min_boundary` with additional sample speeds spliced into the uniform
/// grid. Label grids pass their speed axis here so every label compares
/// against an exactly evaluated b_lim, not an interpolated one.
pub fn min_boundary_at(
    zeta: f64,
    rho: f64,
    alpha: f64,
    speed_range: (f64, f64),
    resolution: usize,
    extra_speeds: &[f64],
) -> Result<LobeBoundary> {
    let (lo, hi) = speed_range;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Domain(format!("invalid speed range ({lo}, {hi})")));
    }
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be >= 2, got {resolution}")));
    }

    let mut grid: Vec<f64> = (0..resolution)
        .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
        .collect();
    grid.extend(extra_speeds.iter().copied().filter(|&s| s >= lo && s <= hi));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let mut env = vec![f64::INFINITY; grid.len()];
    // Exact lobe minima falling inside the range; spliced into the output so
    // the envelope's global minimum is the closed-form value, not a
    // grid-offset approximation of it.
    let mut minima: Vec<(f64, f64)> = Vec::new();
    let b_star = analytic_min_b(zeta, rho, alpha);

    let ws = omega_star(zeta);
    let mut stale = 0u32;
    let mut k = 0u32;
    loop {
        let mut improved = false;
        for (i, &s) in grid.iter().enumerate() {
            let Some(omega) = solve_omega_for_speed(s, zeta, k) else {
                continue; // lobe's covered speeds start above s
            };
            let b = lobe_point(omega, zeta, rho, alpha, k)?.b_lim;
            if b < env[i] {
                env[i] = b;
                improved = true;
            }
        }
        // A lobe whose minimum sits inside or right of the range can still be
        // undercut by later lobes only near its flanks; lobes with minima left
        // of the range are monotone increasing across it, so two consecutive
        // non-improving ones end the search.
        let min_speed = lobe_speed(ws, zeta, k);
        if min_speed >= lo && min_speed <= hi {
            minima.push((min_speed, b_star));
        }
        if !improved && min_speed < lo {
            stale += 1;
            if stale >= 2 {
                break;
            }
        } else {
            stale = 0;
        }
        k += 1;
        if k > 10_000 {
            return Err(Error::Domain("lobe search failed to terminate".into()));
        }
    }

    let mut samples: Vec<(f64, f64)> = grid.into_iter().zip(env).collect();
    samples.extend(minima);
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples.dedup_by(|a, b| a.0 == b.0);
    debug_assert!(samples.iter().all(|&(_, b)| b.is_finite() && b > 0.0));
    Ok(LobeBoundary { samples })
}

/// Chatter labels over a rectangular grid: chatter iff b > b_lim(s).
pub fn label_grid(boundary: &LobeBoundary, speed_axis: &[f64], depth_axis: &[f64]) -> LabelGrid {
    let labels = speed_axis
        .iter()
        .map(|&s| {
            let b_lim = boundary.b_lim_at(s);
            depth_axis.iter().map(|&b| b > b_lim).collect()
        })
        .collect();
    LabelGrid {
        speed_axis: speed_axis.to_vec(),
        depth_axis: depth_axis.to_vec(),
        labels,
    }
}

/// Inclusive linear spacing over [lo, hi].
pub fn speed_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect()
}

/// n depth values evenly filling (0, max]: zero depth is trivially stable and
/// carries no information, so the axis starts one spacing above it.
pub fn depth_axis(max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| max * (j + 1) as f64 / n as f64).collect()
}
