//! Gaussian-approximation density evolution and FER estimates.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::construction::PolarCode;
use crate::error::{Error, Result};
use crate::flip::CriticalSet;
use crate::sim::noise_variance;

// Boundaries of the three-piece approximation of φ. The customary switch to
// the asymptotic form at 10 leaves a jump that breaks monotonicity; switching
// where the two curves cross keeps φ continuous and strictly decreasing.
const PHI_SMALL: f64 = 0.867861;
const PHI_LARGE: f64 = 14.394352942168;

/// `ln φ(μ)`, where `φ(μ) = 1 − E[tanh(L/2)]` for `L ~ N(μ, 2μ)`.
///
/// Below 0.867861 a quadratic-exponent fit, then the usual
/// `exp(−0.4527 μ^0.86 + 0.0218)`, and for large μ the asymptotic
/// `√(π/μ) e^{−μ/4} (1 − 10/(7μ))`.
pub fn ln_phi(mu: f64) -> f64 {
    if mu <= 0.0 {
        0.0
    } else if mu < PHI_SMALL {
        0.0564 * mu * mu - 0.48560 * mu
    } else if mu < PHI_LARGE {
        -0.4527 * mu.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / mu).ln() - mu / 4.0 + (1.0 - 10.0 / (7.0 * mu)).ln()
    }
}

pub fn phi(mu: f64) -> f64 {
    ln_phi(mu).exp()
}

/// Inverse of φ given `ln φ`, by bisection on the monotone `ln_phi`.
fn phi_inv_ln(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Mean after a check-node (f) combination of two `N(μ, 2μ)` inputs:
/// `φ⁻¹(1 − (1 − φ(μ))²)`, evaluated as `ln φ + ln(2 − φ)`.
pub fn f_mean(mu: f64) -> f64 {
    let l = ln_phi(mu);
    phi_inv_ln(l + (2.0 - l.exp()).ln())
}

/// Mean after a variable-node (g) combination.
pub fn g_mean(mu: f64) -> f64 {
    2.0 * mu
}

/// Mean decision LLR per leaf under the all-zero codeword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaProfile {
    pub mu: Vec<f64>,
}

impl GaProfile {
    /// Evolves a uniform channel mean `mu_root` down a tree of `2^log2_len` leaves.
    pub fn from_root_mean(log2_len: usize, mu_root: f64) -> Self {
        let mut mu = vec![mu_root];
        // Leaf i takes the f-branch at level l when bit (n-1-l) of i is 0,
        // so children of node j sit at 2j and 2j+1 level by level.
        for _ in 0..log2_len {
            mu = mu.iter().flat_map(|&m| [f_mean(m), g_mean(m)]).collect();
        }
        Self { mu }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `π_i` per leaf.
    pub fn error_probabilities(&self) -> Vec<f64> {
        self.mu
            .iter()
            .map(|&m| pi_of(m).expect("GA means are non-negative"))
            .collect()
    }
}

/// GA profile of `code` on BPSK/AWGN at `ebn0_db`; root mean `2/σ²`.
pub fn ga_evolve(code: &PolarCode, ebn0_db: f64) -> GaProfile {
    let sigma2 = noise_variance(ebn0_db, code.rate());
    GaProfile::from_root_mean(code.log2_len(), 2.0 / sigma2)
}

/// Decision-error probability `½ erfc(√μ / 2)` of a leaf with mean LLR `μ`.
pub fn pi_of(mu: f64) -> Result<f64> {
    if mu.is_nan() || mu < 0.0 {
        return Err(Error::NegativeMean(mu));
    }
    Ok(0.5 * erfc(mu.sqrt() / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FerKind {
    Theoretical,
    Hypothetical,
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerEstimate {
    pub value: f64,
    pub kind: FerKind,
}

/// `1 − Π (1 − π_i)` over `indices`, accumulated as a sum of `ln(1 − π_i)`.
fn union_error(profile: &GaProfile, indices: impl IntoIterator<Item = usize>) -> f64 {
    let log_success: f64 = indices
        .into_iter()
        .map(|i| (-pi_of(profile.mu[i]).expect("GA means are non-negative")).ln_1p())
        .sum();
    -log_success.exp_m1()
}

fn check_len(code: &PolarCode, profile: &GaProfile) -> Result<()> {
    if profile.len() != code.len() {
        return Err(Error::LengthMismatch {
            expected: code.len(),
            actual: profile.len(),
        });
    }
    Ok(())
}

/// SC FER estimate over all non-frozen leaves.
pub fn fer_theoretical(code: &PolarCode, profile: &GaProfile) -> Result<FerEstimate> {
    check_len(code, profile)?;
    Ok(FerEstimate {
        value: union_error(profile, code.info_positions().iter().copied()),
        kind: FerKind::Theoretical,
    })
}

/// The same estimate restricted to a critical set.
pub fn fer_hypothetical(code: &PolarCode, profile: &GaProfile, cs: &CriticalSet) -> Result<FerEstimate> {
    check_len(code, profile)?;
    if let Some(&i) = cs.indices().iter().find(|&&i| i >= code.len() || code.is_frozen(i)) {
        return Err(Error::NotSubset(i));
    }
    Ok(FerEstimate {
        value: union_error(profile, cs.indices().iter().copied()),
        kind: FerKind::Hypothetical,
    })
}
