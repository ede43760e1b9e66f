//! Laguerre-type weights `w(x) = x^alpha e^{-V(x)}` on the positive half-line.
//!
//! The external field `V` is a polynomial of degree `m >= 1` with positive
//! leading coefficient, and `alpha > 0`. Orthogonal, unitary and symplectic
//! ensembles with parameters `(gamma, Q)` all map onto a single weight of this
//! form, which lets one set of orthogonal polynomials serve all three cases.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Matrix ensemble symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Beta {
    Orthogonal = 1,
    Unitary = 2,
    Symplectic = 4,
}

impl Beta {
    pub fn from_u8(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Beta::Orthogonal),
            2 => Ok(Beta::Unitary),
            4 => Ok(Beta::Symplectic),
            _ => Err(Error::InvalidParameter(format!(
                "beta must be 1, 2 or 4, got {b}"
            ))),
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

/// The weight `w(x) = x^alpha e^{-V(x)}`, with `V(x) = sum_j q_j x^j`.
///
/// Coefficients are stored densely in ascending degree; the degree `m` is the
/// highest index with a nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub alpha: f64,
    pub v_coeffs: Vec<f64>,
}

impl Weight {
    pub fn new(alpha: f64, v_coeffs: Vec<f64>) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be nonnegative, got {alpha}"
            )));
        }
        let m = v_coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        if m < 1 {
            return Err(Error::InvalidParameter(
                "V must have positive degree".into(),
            ));
        }
        if v_coeffs[m] <= 0.0 {
            return Err(Error::InvalidParameter(
                "leading coefficient of V must be positive".into(),
            ));
        }
        let mut v = v_coeffs;
        v.truncate(m + 1);
        Ok(Weight { alpha, v_coeffs: v })
    }

    /// Ensemble mapping: `alpha = gamma, V = Q` for beta = 2 and
    /// `alpha = 2 gamma, V = 2Q` for beta = 1, 4.
    pub fn from_ensemble(gamma: f64, q_coeffs: &[f64], beta: Beta) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let scale = match beta {
            Beta::Unitary => 1.0,
            Beta::Orthogonal | Beta::Symplectic => 2.0,
        };
        let coeffs: Vec<f64> = q_coeffs.iter().map(|&c| scale * c).collect();
        Weight::new(scale * gamma, coeffs)
    }

    /// Degree of the external field.
    pub fn degree(&self) -> usize {
        self.v_coeffs.len() - 1
    }

    /// `V(x)` by Horner evaluation.
    pub fn eval_v(&self, x: f64) -> f64 {
        self.v_coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `V'(x)`, the formal derivative.
    pub fn eval_v_prime(&self, x: f64) -> f64 {
        self.v_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, &c)| acc * x + j as f64 * c)
    }

    /// `w(x) = x^alpha e^{-V(x)}`, with `w(0) = 0` handled exactly.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("weight evaluated at x = {x} < 0")));
        }
        if x == 0.0 {
            // exact endpoint: x^alpha -> 0 for alpha > 0, 1 for alpha = 0
            return Ok(if self.alpha > 0.0 {
                0.0
            } else {
                (-self.v_coeffs[0]).exp()
            });
        }
        Ok(x.powf(self.alpha) * (-self.eval_v(x)).exp())
    }

    /// `sqrt(w(x))`, used when assembling the orthonormal functions phi_k.
    pub fn eval_sqrt(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return if self.alpha > 0.0 {
                0.0
            } else {
                (-0.5 * self.v_coeffs[0]).exp()
            };
        }
        x.powf(0.5 * self.alpha) * (-0.5 * self.eval_v(x)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_weight_examples() {
        let w = Weight::new(1.0, vec![0.0, 1.0]).unwrap();
        assert_relative_eq!(w.eval(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-14);

        let w = Weight::new(0.5, vec![0.0, 1.0]).unwrap();
        assert_eq!(w.eval(0.0).unwrap(), 0.0);

        let w = Weight::new(2.0, vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(
            w.eval(2.0).unwrap(),
            4.0 * (-16.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn eval_weight_rejects_negative_x() {
        let w = Weight::new(1.0, vec![0.0, 1.0]).unwrap();
        assert!(w.eval(-0.5).is_err());
    }

    #[test]
    fn from_ensemble_examples() {
        let w = Weight::from_ensemble(1.0, &[0.0, 1.0], Beta::Unitary).unwrap();
        assert_eq!(w.alpha, 1.0);
        assert_eq!(w.v_coeffs, vec![0.0, 1.0]);

        let w = Weight::from_ensemble(1.0, &[0.0, 1.0], Beta::Orthogonal).unwrap();
        assert_eq!(w.alpha, 2.0);
        assert_eq!(w.v_coeffs, vec![0.0, 2.0]);

        let w = Weight::from_ensemble(0.5, &[0.0, 0.0, 1.0], Beta::Symplectic).unwrap();
        assert_eq!(w.alpha, 1.0);
        assert_eq!(w.v_coeffs, vec![0.0, 0.0, 2.0]);
    }

    #[test]
    fn orthogonal_and_symplectic_map_identically() {
        let q = [0.5, 1.0, 0.25];
        let w1 = Weight::from_ensemble(0.75, &q, Beta::Orthogonal).unwrap();
        let w4 = Weight::from_ensemble(0.75, &q, Beta::Symplectic).unwrap();
        assert_eq!(w1, w4);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Weight::new(0.0, vec![0.0, 1.0]).is_ok());
        assert!(Weight::new(-1.0, vec![0.0, 1.0]).is_err());
        assert!(Weight::new(1.0, vec![1.0]).is_err());
        assert!(Weight::new(1.0, vec![0.0, -1.0]).is_err());
        assert!(
            Weight::from_ensemble(1.0, &[0.0, 1.0], Beta::from_u8(3).unwrap_or(Beta::Unitary))
                .is_ok()
        );
        assert!(Beta::from_u8(3).is_err());
    }

    #[test]
    fn polynomial_evaluation_examples() {
        let w = Weight::new(1.0, vec![0.0, 2.0]).unwrap();
        assert_eq!(w.eval_v(3.0), 6.0);
        assert_eq!(w.eval_v_prime(3.0), 2.0);

        let w = Weight::new(1.0, vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(w.eval_v(1.0), 1.0);
        assert_eq!(w.eval_v_prime(1.0), 4.0);

        let w = Weight::new(1.0, vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(w.eval_v(2.0), 7.0);
        assert_eq!(w.eval_v_prime(2.0), 5.0);
    }

    #[test]
    fn weight_consistency_and_decay() {
        let w = Weight::new(1.5, vec![0.0, 0.5, 0.25]).unwrap();
        for &x in &[1e-3, 0.1, 1.0, 3.0, 10.0] {
            let direct = w.eval(x).unwrap();
            let recomposed = x.powf(w.alpha) * (-w.eval_v(x)).exp();
            assert_relative_eq!(direct, recomposed, max_relative = 1e-14);
        }
        // w -> 0 at both extremes
        assert!(w.eval(1e-12).unwrap() < 1e-17);
        assert!(w.eval(300.0).unwrap() < 1e-300);
    }

    #[test]
    fn v_prime_matches_finite_differences() {
        let w = Weight::new(1.0, vec![0.3, 1.0, 0.5, 0.125]).unwrap();
        let mut x: f64 = 1e-2;
        while x < 30.0 {
            let h = 1e-6 * x.max(1.0);
            let fd = (w.eval_v(x + h) - w.eval_v(x - h)) / (2.0 * h);
            assert_relative_eq!(w.eval_v_prime(x), fd, max_relative = 1e-8);
            x *= 1.8;
        }
    }

    #[test]
    fn degree_inferred_from_trailing_zeros() {
        let w = Weight::new(1.0, vec![0.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(w.degree(), 1);
        assert_eq!(w.v_coeffs.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let w = Weight::new(1.5, vec![0.0, 0.5, 0.25]).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        let back: Weight = serde_json::from_str(&s).unwrap();
        assert_eq!(w, back);
    }
}
