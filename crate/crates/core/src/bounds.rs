//! Closed-form deviation bounds: the VC generalization bound, the
//! distribution-free fairness deviation coefficient `psi`, its
//! accuracy-dependent tightening `psi_tilde`, and the cap on how large the
//! index can get for benefits at ratio `r`.

use crate::entropy::{BenefitParams, EntropyOrder};
use crate::error::{Error, Result};

/// Which confidence term enters the VC deviation: `ln(4/delta)` for the plain
/// risk bound, `ln(8/delta)` for the epsilon used by the accuracy-dependent
/// fairness bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogArgument {
    FourOverDelta,
    EightOverDelta,
}

/// Everything the bound routines consume, bundled for sweep plumbing.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    /// Sample size.
    pub n: usize,
    /// VC dimension of the hypothesis class.
    pub vc_dim: usize,
    /// Confidence parameter, in (0, 1/2).
    pub delta: f64,
    /// Benefit conversion constants.
    pub params: BenefitParams,
    /// Empirical risk of the hypothesis under study, in [0, 1].
    pub empirical_risk: f64,
}

impl BoundInputs {
    pub fn vc_deviation(&self, log_arg: LogArgument) -> Result<f64> {
        vc_deviation(self.n, self.vc_dim, self.delta, log_arg)
    }

    pub fn fairness_deviation(&self, order: EntropyOrder) -> Result<f64> {
        fairness_deviation_bound(order, &self.params, self.n, self.delta)
    }

    /// The accuracy-dependent deviation `psi_tilde * epsilon_2`.
    pub fn accuracy_dependent_deviation(&self, order: EntropyOrder) -> Result<f64> {
        let eps2 = self.vc_deviation(LogArgument::EightOverDelta)?;
        Ok(psi_tilde(order, &self.params, self.empirical_risk, eps2)? * eps2)
    }
}

/// VC deviation `sqrt((8 d ln(2en/d) + 8 ln(k/delta)) / n)`, decreasing in
/// `n` and vanishing as the sample grows.
pub fn vc_deviation(n: usize, vc_dim: usize, delta: f64, log_arg: LogArgument) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 || delta >= 0.5 {
        return Err(Error::input(format!(
            "confidence delta must lie in (0, 1/2), got {delta}"
        )));
    }
    if vc_dim == 0 || n < vc_dim {
        return Err(Error::input(format!(
            "need n >= vc_dim >= 1, got n = {n}, vc_dim = {vc_dim}"
        )));
    }
    let n = n as f64;
    let d = vc_dim as f64;
    let k = match log_arg {
        LogArgument::FourOverDelta => 4.0,
        LogArgument::EightOverDelta => 8.0,
    };
    Ok(((8.0 * d * (2.0 * std::f64::consts::E * n / d).ln() + 8.0 * (k / delta).ln()) / n).sqrt())
}

/// Deviation coefficient between population-level and sample-level values of
/// the index, as a function of the benefit ratio `r = c / a` alone (plus `a`
/// on the Theil branch). Strictly decreasing in `r` for fixed `a`.
pub fn psi(order: EntropyOrder, params: &BenefitParams) -> f64 {
    let a = params.spread();
    let r = params.ratio();
    let q = (r + 1.0) / (r - 1.0);
    match order {
        EntropyOrder::Zero => 2.0 / (r - 1.0) + (1.0 + 2.0 / (r - 1.0)).ln(),
        EntropyOrder::One => {
            4.0 / (r - 1.0) + 4.0 * r * (a * r + a).ln() / ((r - 1.0) * (r - 1.0))
        }
        EntropyOrder::Other(alpha) if alpha < 1.0 => {
            2.0 / ((1.0 - alpha) * (r - 1.0)) * (q.powf(alpha) + 1.0)
        }
        EntropyOrder::Other(alpha) => {
            4.0 * r / ((alpha - 1.0) * (r - 1.0) * (r - 1.0)) * q.powf(alpha - 1.0)
        }
    }
}

/// The `psi` coefficient at the smallest admissible ratio `r = 1 + 1/a`,
/// leaving `a` as the only parameter.
///
/// On the Theil branch this reproduces the published closed form, which
/// drops a factor of `a + 1` relative to `psi(1, a, 1 + 1/a)` and therefore
/// does not dominate `psi` near the minimal ratio; see the dominance tests.
pub fn psi_corollary(order: EntropyOrder, a: f64) -> f64 {
    debug_assert!(a > 0.0);
    let q = 1.0 + 2.0 * a;
    match order {
        EntropyOrder::Zero => 2.0 * a + q.ln(),
        EntropyOrder::One => 4.0 * a + 4.0 * a * q.ln(),
        EntropyOrder::Other(alpha) if alpha < 1.0 => {
            2.0 * a / (1.0 - alpha) * (q.powf(alpha) + 1.0)
        }
        EntropyOrder::Other(alpha) => 4.0 * a * (a + 1.0) / (alpha - 1.0) * q.powf(alpha - 1.0),
    }
}

/// Accuracy-dependent deviation coefficient. Requires
/// `r - empirical_risk - eps2 > 0`; otherwise the bound does not apply to
/// this sample and an [`Error::BoundInapplicable`] is returned so sweeps can
/// record the absence.
pub fn psi_tilde(
    order: EntropyOrder,
    params: &BenefitParams,
    empirical_risk: f64,
    eps2: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&empirical_risk) {
        return Err(Error::input(format!(
            "empirical risk must lie in [0, 1], got {empirical_risk}"
        )));
    }
    if eps2.is_nan() || eps2 <= 0.0 {
        return Err(Error::input(format!("eps2 must be positive, got {eps2}")));
    }
    let a = params.spread();
    let r = params.ratio();
    let rs = empirical_risk;
    let denom = r - rs - eps2;
    if denom <= 0.0 {
        return Err(Error::BoundInapplicable(format!(
            "r - risk - eps2 = {denom} is not positive"
        )));
    }
    Ok(match order {
        EntropyOrder::Zero => 1.0 / denom + (1.0 + 1.0 / (r - 1.0)).ln(),
        EntropyOrder::One => {
            (1.0 / denom) * (1.0 + r * (1.0 + 2.0 * (a * r + a).ln()) / (r - rs))
        }
        EntropyOrder::Other(alpha) => {
            let growth = (1.0 + 1.0 / r).powf(alpha);
            let c_tilde = 1.0 + (growth - 1.0) * rs + eps2 * (growth + 1.0);
            let ratio_pow = (r / (r - rs)).powf(alpha);
            if alpha < 1.0 {
                ratio_pow / (1.0 - alpha) * (1.0 / r + c_tilde / denom)
            } else {
                ratio_pow / (alpha - 1.0)
                    * (growth / r + (1.0 + eps2 / denom).powf(alpha) * c_tilde / (r - rs))
            }
        }
    })
}

/// The full fairness deviation bound `psi * sqrt(ln(4/delta) / (2n))`.
pub fn fairness_deviation_bound(
    order: EntropyOrder,
    params: &BenefitParams,
    n: usize,
    delta: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::input("sample size must be positive"));
    }
    if delta.is_nan() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::input(format!(
            "confidence delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(psi(order, params) * ((4.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

/// Cap on the index for any benefit vector whose values lie between
/// `c - a` and `c + a`: the kernel evaluated at the extreme benefit-to-mean
/// ratio `(r + 1) / (r - 1)`.
pub fn entropy_upper_bound(order: EntropyOrder, ratio: f64) -> Result<f64> {
    if ratio.is_nan() || ratio <= 1.0 {
        return Err(Error::input(format!(
            "benefit ratio must exceed 1, got {ratio}"
        )));
    }
    let q = (ratio + 1.0) / (ratio - 1.0);
    Ok(match order {
        EntropyOrder::Zero => q.ln(),
        EntropyOrder::One => q * q.ln(),
        EntropyOrder::Other(alpha) => (q.powf(alpha) - 1.0) / (alpha * (alpha - 1.0)).abs(),
    })
}
