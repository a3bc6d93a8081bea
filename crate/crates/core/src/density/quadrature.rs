use std::f64::consts::PI;

use crate::error::{FluctError, Result};
use crate::units::UnitSystem;

use super::params::{density_eval, reduced_density, FluctuationParams, PhasePoint};

/// Points per axis of the normalization mesh.
pub const NORMALIZATION_MESH: usize = 801;

/// 2-D trapezoid integral of the Gaussian density over
/// `[⟨x⟩ ± w·Δx] × [⟨p⟩ ± w·Δp]`.
pub fn normalization_check(params: &FluctuationParams, half_width_sigmas: f64) -> Result<f64> {
    if !(half_width_sigmas.is_finite() && half_width_sigmas > 0.0) {
        return Err(FluctError::InvalidArgument(format!(
            "half width must be > 0, got {half_width_sigmas}"
        )));
    }
    let n = NORMALIZATION_MESH;
    let axis = |mean: f64, sd: f64| -> Result<(Vec<f64>, f64)> {
        let step = 2.0 * half_width_sigmas * sd / (n - 1) as f64;
        if step > sd / 10.0 {
            return Err(FluctError::Resolution {
                spacing: step,
                spread: sd,
            });
        }
        let lo = mean - half_width_sigmas * sd;
        Ok(((0..n).map(|i| lo + i as f64 * step).collect(), step))
    };
    let (xs, hx) = axis(params.mean_x(), params.sd_x())?;
    let (ps, hp) = axis(params.mean_p(), params.sd_p())?;
    let end_weight = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut total = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let row: f64 = ps
            .iter()
            .enumerate()
            .map(|(j, &p)| end_weight(j) * density_eval(params, PhasePoint::new(x, p)))
            .sum();
        total += end_weight(i) * row;
    }
    Ok(total * hx * hp)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(order);
    for i in 0..order {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        rule.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    rule
}

const BOX_PANEL_LEVELS: i32 = 48;
const BOX_ORDER: usize = 20;

/// Nodes on `[0, L]` for geometrically graded panels `[L·2^{-k-1}, L·2^{-k}]`
/// plus `[0, L·2^{-levels}]`.
fn graded_rule(half_width: f64) -> Vec<(f64, f64)> {
    let base = gauss_legendre(BOX_ORDER);
    let mut edges = vec![0.0];
    edges.extend(
        (0..=BOX_PANEL_LEVELS)
            .rev()
            .map(|k| half_width * 2f64.powi(-k)),
    );
    edges
        .windows(2)
        .flat_map(|w| {
            let (a, b) = (w[0], w[1]);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            base.iter()
                .map(move |(z, wt)| (mid + half * z, half * wt))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Integral of [`reduced_density`] over the square of half-width `L`
/// centred on the means. The value grows like `ln L` and does not converge
/// as `L → ∞`; it is reported, not normalized.
///
/// The integrand has a cusp along both axes through the means and ridges of
/// width `~h/(4π·L)`, so each quadrant uses graded Gauss–Legendre panels
/// instead of a uniform mesh.
pub fn reduced_box_integral(
    mean_x: f64,
    mean_p: f64,
    half_width: f64,
    units: &UnitSystem,
) -> Result<f64> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(FluctError::InvalidArgument(format!(
            "box half width must be > 0, got {half_width}"
        )));
    }
    let rule = graded_rule(half_width);
    let mut total = 0.0;
    for (sx, sp) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        for &(u, wu) in &rule {
            let inner: f64 = rule
                .iter()
                .map(|&(v, wv)| {
                    wv * reduced_density(
                        mean_x,
                        mean_p,
                        PhasePoint::new(mean_x + sx * u, mean_p + sp * v),
                        units,
                    )
                })
                .sum();
            total += wu * inner;
        }
    }
    Ok(total)
}

/// Evaluates `f` on a rectangular mesh, row-major in `x`.
pub fn density_scan(
    x_range: (f64, f64, usize),
    p_range: (f64, f64, usize),
    f: impl Fn(PhasePoint) -> f64,
) -> Result<Vec<(PhasePoint, f64)>> {
    let axis = |(lo, hi, n): (f64, f64, usize)| -> Result<Vec<f64>> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo || n == 0 || (n == 1 && hi != lo) {
            return Err(FluctError::InvalidArgument(format!(
                "bad scan range {lo}:{hi}:{n}"
            )));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        Ok((0..n).map(|i| lo + i as f64 * step).collect())
    };
    let xs = axis(x_range)?;
    let ps = axis(p_range)?;
    Ok(xs
        .iter()
        .flat_map(|&x| ps.iter().map(move |&p| PhasePoint::new(x, p)))
        .map(|pt| (pt, f(pt)))
        .collect())
}
