//! Closed-form error bounds and threshold formulas for the decoder.
//!
//! Every probability returned here is clamped to `[0, 1]`. Scores are in the
//! normalized convention where an impostor score has variance `d` and an
//! exact match has mean `d`; [`crate::harness`] rescales measured scores into
//! that convention before comparing them against these bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{HbfError, Result};

fn clamp_prob(x: f64) -> f64 {
    if x.is_nan() {
        1.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(HbfError::invalid(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Union bound on a false positive: `min(1, n exp(-τ²/2d))`.
/// A non-positive threshold gives no protection, so the bound is `min(1, n)`.
pub fn fp_bound(n: usize, d: usize, tau: f64) -> f64 {
    let n = n as f64;
    if tau.is_nan() || tau <= 0.0 {
        return clamp_prob(n);
    }
    clamp_prob(n * (-tau * tau / (2.0 * d as f64)).exp())
}

/// The threshold `τ = √(2d ln(n/ε))` at which [`fp_bound`] equals `ε`.
pub fn fp_threshold(n: usize, d: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if n == 0 || d == 0 {
        return Err(HbfError::invalid("fp_threshold needs n >= 1 and d >= 1"));
    }
    Ok((2.0 * d as f64 * (n as f64 / eps).ln()).sqrt())
}

/// Expected match signal `(d - 2H)(1 - 2 p_e)`.
pub fn signal_mean(d: usize, h: usize, p_e: f64) -> f64 {
    let s = d as f64 - 2.0 * h as f64;
    // s - 2 p_e s rounds exactly on the usual decimal inputs
    s - 2.0 * (p_e * s)
}

/// False-negative bound
/// `exp(-(μ - t)²/2d) + n exp(-t²/2d)` with `μ = (d - 2H)(1 - 2p_e)`,
/// for a split point `0 < t < μ`.
pub fn fn_bound(d: usize, h: usize, p_e: f64, n: usize, t: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p_e) {
        return Err(HbfError::invalid(format!("p_e must lie in [0, 0.5), got {p_e}")));
    }
    let mu = signal_mean(d, h, p_e);
    if !(t > 0.0 && t < mu) {
        return Err(HbfError::invalid(format!(
            "split t must lie in (0, μ = {mu}), got {t}"
        )));
    }
    let two_d = 2.0 * d as f64;
    let signal = (-(mu - t).powi(2) / two_d).exp();
    let noise = n as f64 * (-t * t / two_d).exp();
    Ok(clamp_prob(signal + noise))
}

/// [`fn_bound`] at the default split `t = μ/2`.
pub fn fn_bound_default(d: usize, h: usize, p_e: f64, n: usize) -> Result<f64> {
    fn_bound(d, h, p_e, n, signal_mean(d, h, p_e) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginBound {
    pub bound: f64,
    pub tau: f64,
    pub delta: f64,
}

/// Failure bound of the margin decoder at `τ = ρd/2`, `Δ = ρd/4` under a
/// sub-Gaussian impostor tail with variance proxy `c d`:
/// `2 exp(-ρ²d/8c) + 2m exp(-ρ²d/32c)`.
pub fn margin_failure_bound(rho: f64, d: usize, c: f64, m: usize) -> Result<MarginBound> {
    if !(rho > 0.0 && c > 0.0) {
        return Err(HbfError::invalid("margin bound needs rho > 0 and c > 0"));
    }
    let x = rho * rho * d as f64 / c;
    let bound = 2.0 * (-x / 8.0).exp() + 2.0 * m as f64 * (-x / 32.0).exp();
    Ok(MarginBound {
        bound: clamp_prob(bound),
        tau: rho * d as f64 / 2.0,
        delta: rho * d as f64 / 4.0,
    })
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 - Φ(x)`, accurate far into the tail.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation (relative error about 1.15e-9) followed
/// by one Halley step against the erfc-based CDF. The lower tail is solved
/// directly and the upper tail by symmetry, which keeps `p` near 1 exact.
pub fn inv_norm_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(HbfError::invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

// p in (0, 0.5]
fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // Halley step; x <= 0 here so Φ(x) is computed without cancellation.
    let e = norm_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

fn check_evt(sigma: f64, m: usize) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(HbfError::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if m == 0 {
        return Err(HbfError::invalid("candidate count m must be at least 1"));
    }
    Ok(())
}

/// Threshold `t` with `P{max of m i.i.d. N(0, σ²) > t} = ε`, i.e.
/// `σ Φ⁻¹((1 - ε)^{1/m})`.
pub fn evt_threshold_exact(sigma: f64, m: usize, eps: f64) -> Result<f64> {
    check_evt(sigma, m)?;
    check_eps(eps)?;
    // upper-tail mass of a single score: 1 - (1 - ε)^{1/m}
    let q = -((-eps).ln_1p() / m as f64).exp_m1();
    Ok(sigma * -inv_norm_cdf(q)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvtOrder {
    /// `σ √(2 ln m)`
    First,
    /// `σ (√(2 ln m) - (ln ln m + ln 4π) / (2 √(2 ln m)))`
    Gumbel,
}

/// Asymptotic expansions of the Gaussian-maximum threshold.
pub fn evt_threshold_approx(sigma: f64, m: usize, order: EvtOrder) -> Result<f64> {
    check_evt(sigma, m)?;
    let root = (2.0 * (m as f64).ln()).sqrt();
    match order {
        EvtOrder::First => Ok(sigma * root),
        EvtOrder::Gumbel => {
            if m < 3 {
                return Err(HbfError::invalid(format!(
                    "Gumbel expansion needs m >= 3, got {m}"
                )));
            }
            let lnm = (m as f64).ln();
            Ok(sigma * (root - (lnm.ln() + (4.0 * PI).ln()) / (2.0 * root)))
        }
    }
}

/// Every symbol the bound formulas consume, for batch evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub h: usize,
    pub p_e: f64,
    pub rho: f64,
    pub c: f64,
    pub sigma: f64,
    pub tau: Option<f64>,
    pub t: Option<f64>,
}

impl Default for BoundInputs {
    fn default() -> Self {
        Self {
            d: 10_000,
            n: 100,
            m: 100,
            eps: 0.01,
            h: 0,
            p_e: 0.0,
            rho: 1.0,
            c: 1.0,
            sigma: 1.0,
            tau: None,
            t: None,
        }
    }
}

impl BoundInputs {
    /// Evaluates all bounds, returning `(name, value)` pairs in a fixed order.
    pub fn report(&self) -> Result<Vec<(&'static str, f64)>> {
        let tau = match self.tau {
            Some(t) => t,
            None => fp_threshold(self.n, self.d, self.eps)?,
        };
        let mu = signal_mean(self.d, self.h, self.p_e);
        let t = self.t.unwrap_or(mu / 2.0);
        let margin = margin_failure_bound(self.rho, self.d, self.c, self.m)?;
        let mut out = vec![
            ("tau", tau),
            ("fp_bound", fp_bound(self.n, self.d, tau)),
            ("mu", mu),
            ("fn_bound", fn_bound(self.d, self.h, self.p_e, self.n, t)?),
            ("margin_bound", margin.bound),
            ("margin_tau", margin.tau),
            ("margin_delta", margin.delta),
            ("evt_exact", evt_threshold_exact(self.sigma, self.m, self.eps)?),
            ("evt_first", evt_threshold_approx(self.sigma, self.m, EvtOrder::First)?),
        ];
        if self.m >= 3 {
            out.push((
                "evt_gumbel",
                evt_threshold_approx(self.sigma, self.m, EvtOrder::Gumbel)?,
            ));
        }
        Ok(out)
    }
}
