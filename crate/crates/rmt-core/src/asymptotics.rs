//! Region decomposition of the rescaled half-line and leading-order
//! evaluators for `phihat_n(x) = sqrt(beta_n) phi_n(beta_n x)` and
//! `psihat_r(x) = sqrt(beta_n) psi_r(beta_n x)`.
//!
//! The four regions (in units of `beta_n`) are
//! `(0, 1/n]`, `[1/n, 1 - n^{kappa-2/3}]`, `[1 - n^{kappa-2/3}, 1 + n^{kappa-2/3}]`,
//! `[1 + n^{kappa-2/3}, inf)` with `kappa = 1/12`: Bessel, bulk, Airy and
//! exponential. The evaluators keep only the leading term of each regional
//! expansion (all `1 + O(1/n)` factors set to one), which is what the
//! interior convergence tests compare against.

use crate::equilibrium::EquilibriumData;
use crate::error::{Error, Result};
use crate::limits::{airy_ai, bessel_j_pair};
use crate::weights::Weight;
use std::f64::consts::PI;

pub const KAPPA: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Bessel,
    Bulk,
    Airy,
    Exponential,
}

/// Region boundaries for a given `n`.
#[derive(Debug, Clone)]
pub struct RegionConfig {
    pub n: usize,
    /// `1/n`: Bessel / bulk boundary.
    pub bessel_top: f64,
    /// `1 -+ n^{kappa - 2/3}`: bulk / Airy and Airy / exponential boundaries.
    pub airy_lo: f64,
    pub airy_hi: f64,
}

impl RegionConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter(
                "region decomposition needs n >= 8".into(),
            ));
        }
        let nf = n as f64;
        let half_width = nf.powf(KAPPA - 2.0 / 3.0);
        Ok(RegionConfig {
            n,
            bessel_top: 1.0 / nf,
            airy_lo: 1.0 - half_width,
            airy_hi: 1.0 + half_width,
        })
    }

    /// Classify a rescaled point (ties go to the left region).
    pub fn region_of(&self, x_scaled: f64) -> Result<Region> {
        if !(x_scaled > 0.0) {
            return Err(Error::Domain(format!(
                "region_of needs x > 0, got {x_scaled}"
            )));
        }
        Ok(if x_scaled <= self.bessel_top {
            Region::Bessel
        } else if x_scaled <= self.airy_lo {
            Region::Bulk
        } else if x_scaled <= self.airy_hi {
            Region::Airy
        } else {
            Region::Exponential
        })
    }
}

/// The conformal map `varphi(x) = 2(x - 1/2) + 2 sqrt(x(x-1))` for `x > 1`.
fn conformal_phi(x: f64) -> f64 {
    2.0 * (x - 0.5) + 2.0 * (x * (x - 1.0)).sqrt()
}

/// `zeta_1(x) = (alpha + 1)/2 arccos(2x - 1) - pi alpha / 2`.
fn zeta1(alpha: f64, x: f64) -> f64 {
    0.5 * (alpha + 1.0) * (2.0 * x - 1.0).acos() - 0.5 * PI * alpha
}

fn check_region(n: usize, region: Region, x: f64) -> Result<()> {
    let rc = RegionConfig::new(n)?;
    let actual = rc.region_of(x)?;
    if actual != region {
        return Err(Error::Domain(format!(
            "x = {x} lies in the {actual:?} region at n = {n}, not {region:?}"
        )));
    }
    Ok(())
}

/// Leading-order `phihat_n(x)` in the given region.
pub fn phi_hat_leading(region: Region, w: &Weight, eq: &EquilibriumData, x: f64) -> Result<f64> {
    check_region(eq.n, region, x)?;
    let n = eq.n;
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    match region {
        Region::Bessel => {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Domain("Bessel evaluator needs 0 < x < 1".into()));
            }
            let mf = -eq.f_tilde(x)?; // = (-tilde_f_n) > 0
            let arg = 2.0 * mf.sqrt();
            let (j, dj) = bessel_j_pair(w.alpha, arg);
            let z = zeta1(w.alpha, x);
            Ok(
                sign * 2.0f64.sqrt() * mf.powf(0.25) / (x.powf(0.25) * (1.0 - x).powf(0.25))
                    * (z.sin() * j + z.cos() * dj),
            )
        }
        Region::Bulk => {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Domain("bulk evaluator needs 0 < x < 1".into()));
            }
            let f = eq.phase_f(1, x)?;
            Ok((2.0 / PI).sqrt() * f.cos() / (x.powf(0.25) * (1.0 - x).powf(0.25)))
        }
        Region::Airy => {
            let arg = eq.c_n * nf.powf(2.0 / 3.0) * (x - 1.0);
            let (ai, _) = airy_ai(arg);
            Ok(2.0f64.sqrt() * eq.c_n.powf(0.25) * nf.powf(1.0 / 6.0) * ai)
        }
        Region::Exponential => {
            if x <= 1.0 {
                return Err(Error::Domain("exponential evaluator needs x > 1".into()));
            }
            let decay = (-0.5 * nf * eq.exp_mass(x)).exp();
            Ok(conformal_phi(x).powf(0.5 * (w.alpha + 1.0))
                / ((2.0 * PI).sqrt() * x.powf(0.25) * (x - 1.0).powf(0.25))
                * decay)
        }
    }
}

/// Leading-order `psihat_r(x)` (`r = 1, 2`) in the given region.
pub fn psi_hat_leading(
    r: u8,
    region: Region,
    w: &Weight,
    eq: &EquilibriumData,
    x: f64,
) -> Result<f64> {
    if r != 1 && r != 2 {
        return Err(Error::InvalidParameter("psi index must be 1 or 2".into()));
    }
    check_region(eq.n, region, x)?;
    let n = eq.n;
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    match region {
        Region::Bessel => {
            if !(x > 0.0) {
                return Err(Error::Domain("Bessel evaluator needs x > 0".into()));
            }
            let arg = 2.0 * eq.tilde_c_n.sqrt() * nf * x.sqrt();
            let (j, dj) = bessel_j_pair(w.alpha, arg);
            let j1 = w.alpha / arg.max(1e-300) * j - dj; // J_{alpha+1}
            let main = -eq.tilde_c_n.sqrt() * nf.sqrt() / x.sqrt() * j1;
            Ok(if r == 1 {
                main
            } else {
                main + w.alpha / (nf.sqrt() * x) * j
            })
        }
        Region::Bulk => {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Domain("bulk evaluator needs 0 < x < 1".into()));
            }
            let g = eq.phase_g(x)?;
            Ok(sign * eq.tilde_c_n.powf(0.25) * g.cos()
                / (PI.sqrt() * x.powf(0.75) * (1.0 - x).powf(0.25)))
        }
        Region::Airy => {
            let arg = eq.c_n * nf.powf(2.0 / 3.0) * (x - 1.0);
            let (ai, _) = airy_ai(arg);
            Ok(sign * (eq.c_n * eq.tilde_c_n).powf(0.25) * nf.powf(1.0 / 6.0) * ai)
        }
        Region::Exponential => Ok(0.0),
    }
}
