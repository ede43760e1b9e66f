//! Equilibrium-measure data for the rescaled external field
//! `V_n(x) = V(beta_n x) / n`: the Mhaskar–Rakhmanov–Saff numbers `beta_n`,
//! the density polynomial `h_n` with its hard edge at 0 and soft edge at 1,
//! the edge constants, and the phase functions driving the oscillatory
//! asymptotics of the orthonormal functions.
//!
//! Phase integrals of the form `int sqrt((1-s)/s) s^k ds` are evaluated in
//! closed form per monomial (via the substitution `s = cos^2 theta`), so no
//! quadrature noise enters the oscillatory comparisons.

use crate::error::{Error, Result};
use crate::quad::integrate_composite;
use crate::weights::Weight;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `A_j = binom(2j, j) / 4^j = prod_{i<=j} (2i-1)/(2i)`, with `A_0 = 1`.
pub fn a_half(j: usize) -> f64 {
    let mut p = 1.0;
    for i in 1..=j {
        p *= (2.0 * i as f64 - 1.0) / (2.0 * i as f64);
    }
    p
}

/// Binomial coefficient in `f64`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut p = 1.0;
    for i in 0..k {
        p *= (n - i) as f64 / (i + 1) as f64;
    }
    p
}

/// Equilibrium data at a fixed matrix size `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumData {
    pub n: usize,
    pub beta_n: f64,
    /// Coefficients of `h_n`, ascending degree (length = deg V).
    pub h_coeffs: Vec<f64>,
    pub c_n: f64,
    pub tilde_c_n: f64,
    pub alpha: f64,
}

/// The Mhaskar–Rakhmanov–Saff number: the unique `beta > 0` with
/// `(1/2pi) int_0^beta V'(x) sqrt(x / (beta - x)) dx = n`,
/// i.e. `sum_j j q_j A_j beta^j = 2n` in closed form. Bracketed Newton with a
/// bisection fallback; reports an error if `V'` makes the left side
/// non-monotone on the bracket.
pub fn mrs_number(w: &Weight, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("mrs number needs n >= 1".into()));
    }
    let m = w.degree();
    let coeff: Vec<f64> = (1..=m)
        .map(|j| j as f64 * w.v_coeffs[j] * a_half(j))
        .collect();
    let f = |beta: f64| -> f64 {
        let mut s = 0.0;
        for j in (1..=m).rev() {
            s = (s + coeff[j - 1]) * beta;
        }
        s - 2.0 * n as f64
    };
    let fp = |beta: f64| -> f64 {
        let mut s = 0.0;
        for j in (1..=m).rev() {
            s = s * beta + j as f64 * coeff[j - 1];
        }
        s
    };
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::NoRoot(
                "MRS equation has no root on (0, 2^2000)".into(),
            ));
        }
    }
    let mut lo = 0.0;
    // monotonicity scan on the bracket
    for i in 1..=64 {
        let x = hi * i as f64 / 64.0;
        if fp(x) < 0.0 {
            return Err(Error::NoRoot(format!(
                "MRS integrand non-monotone on bracket (derivative < 0 at beta = {x})"
            )));
        }
    }
    let mut beta = 0.5 * hi;
    for _ in 0..200 {
        let fv = f(beta);
        if fv > 0.0 {
            hi = beta;
        } else {
            lo = beta;
        }
        let d = fp(beta);
        let newton = beta - fv / d;
        beta = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) < 1e-15 * hi {
            break;
        }
    }
    Ok(beta)
}

/// Residual of the defining MRS integral at `beta`, by direct quadrature
/// (substitution `x = beta sin^2 t`). Independent of the closed form above.
pub fn mrs_residual(w: &Weight, n: usize, beta: f64) -> f64 {
    let val = integrate_composite(
        |t: f64| {
            let s = t.sin();
            w.eval_v_prime(beta * s * s) * 2.0 * beta * s * s
        },
        0.0,
        0.5 * PI,
        20,
        64,
    ) / (2.0 * PI);
    val / n as f64 - 1.0
}

/// Coefficients of `h_n`: `h_{n,k} = (1/n) sum_{j>k} j q_j beta_n^j A_{j-1-k}`.
///
/// Validated against the normalization
/// `int_0^1 sqrt((1-s)/s) h_n(s) ds = 2 pi`.
pub fn h_polynomial(w: &Weight, n: usize, beta_n: f64) -> Result<Vec<f64>> {
    let m = w.degree();
    let mut h = vec![0.0; m];
    for k in 0..m {
        let mut s = 0.0;
        for j in (k + 1)..=m {
            s += j as f64 * w.v_coeffs[j] * beta_n.powi(j as i32) * a_half(j - 1 - k);
        }
        h[k] = s / n as f64;
    }
    let norm: f64 = (0..m).map(|k| h[k] * monomial_mass_tail(k, 0.0)).sum();
    let defect = (norm / (2.0 * PI) - 1.0).abs();
    if defect > 1e-8 {
        return Err(Error::Validation(format!(
            "equilibrium normalization defect {defect:.3e} exceeds 1e-8"
        )));
    }
    Ok(h)
}

/// Build the full equilibrium data for `(w, n)`.
pub fn equilibrium(w: &Weight, n: usize) -> Result<EquilibriumData> {
    let beta_n = mrs_number(w, n)?;
    let h = h_polynomial(w, n, beta_n)?;
    let h1: f64 = h.iter().sum();
    let h0 = h[0];
    if h1 <= 0.0 || h0 <= 0.0 {
        return Err(Error::Validation("h_n not positive at an edge".into()));
    }
    Ok(EquilibriumData {
        n,
        beta_n,
        h_coeffs: h.clone(),
        c_n: (0.5 * h1).powf(2.0 / 3.0),
        tilde_c_n: (0.5 * h0).powi(2),
        alpha: w.alpha,
    })
}

/// `int_0^phi cos^{2j} t dt` in closed form.
fn cos_power_integral(j: usize, phi: f64) -> f64 {
    let mut s = binomial(2 * j, j) * phi;
    for i in 1..=j {
        s += binomial(2 * j, j - i) * (2.0 * i as f64 * phi).sin() / i as f64;
    }
    s / 4.0f64.powi(j as i32)
}

/// `int_x^1 sqrt((1-s)/s) s^k ds` in closed form
/// (`s = cos^2 theta`; equals `2[C_k - C_{k+1}]` at `theta = arccos sqrt x`).
pub fn monomial_mass_tail(k: usize, x: f64) -> f64 {
    let theta = x.clamp(0.0, 1.0).sqrt().acos();
    2.0 * (cos_power_integral(k, theta) - cos_power_integral(k + 1, theta))
}

impl EquilibriumData {
    pub fn degree(&self) -> usize {
        self.h_coeffs.len()
    }

    /// `h_n(x)` by Horner.
    pub fn h_at(&self, x: f64) -> f64 {
        self.h_coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Equilibrium density `omega_n(x) = (1/2pi) sqrt((1-x)/x) h_n(x)` on (0, 1].
    pub fn omega(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("omega_n defined on (0, 1], got {x}")));
        }
        Ok(((1.0 - x) / x).sqrt() * self.h_at(x) / (2.0 * PI))
    }

    /// `Psi_n(x) = int_x^1 sqrt((1-s)/s) h_n(s) ds`, closed form per monomial.
    pub fn phase_tail_mass(&self, x: f64) -> f64 {
        self.h_coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * monomial_mass_tail(k, x))
            .sum()
    }

    /// `int_1^x sqrt((s-1)/s) h_n(s) ds` for `x > 1`
    /// (substitution `s = 1 + t^2` regularizes the edge).
    pub fn exp_mass(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 0.0;
        }
        let tmax = (x - 1.0).sqrt();
        let panels = 8 + (2.0 * tmax) as usize;
        integrate_composite(
            |t: f64| {
                let s = 1.0 + t * t;
                2.0 * t * t * self.h_at(s) / s.sqrt()
            },
            0.0,
            tmax,
            16,
            panels,
        )
    }

    /// Phase function `F_{n,j}(x) = (n/2) Psi_n(x) + eta_j(x) - pi/4` with
    /// `eta_j = (alpha +- 1)/2 * arccos(2x - 1)` (`+` for j = 1).
    pub fn phase_f(&self, j: u8, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!(
                "phase function defined on (0,1), got {x}"
            )));
        }
        let sgn = match j {
            1 => 1.0,
            2 => -1.0,
            _ => return Err(Error::InvalidParameter("phase index must be 1 or 2".into())),
        };
        let eta = 0.5 * (self.alpha + sgn) * (2.0 * x - 1.0).acos();
        Ok(0.5 * self.n as f64 * self.phase_tail_mass(x) + eta - 0.25 * PI)
    }

    /// `G_n(x) = (n/2) Psi_n(x) + (alpha/2) arccos(2x-1) - pi/4`.
    pub fn phase_g(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!(
                "phase function defined on (0,1), got {x}"
            )));
        }
        let eta = 0.5 * self.alpha * (2.0 * x - 1.0).acos();
        Ok(0.5 * self.n as f64 * self.phase_tail_mass(x) + eta - 0.25 * PI)
    }

    /// Hard-edge conformal coordinate:
    /// `-tilde_f_n(x) = [(n/4) int_0^x sqrt((1-s)/s) h_n ds]^2`,
    /// so the return value is `tilde_f_n(x) <= 0` for `x` in `[0, 1]`.
    pub fn f_tilde(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("f_tilde defined on [0,1], got {x}")));
        }
        let mass0 = 2.0 * PI - self.phase_tail_mass(x); // int_0^x
        let r = 0.25 * self.n as f64 * mass0;
        Ok(-r * r)
    }

    /// Soft-edge conformal coordinate `f_n(x)`:
    /// `(2/3)(-f_n)^{3/2} = (n/2) int_x^1 ...` for `x < 1` and
    /// `(2/3) f_n^{3/2} = (n/2) int_1^x ...` for `x > 1`.
    pub fn f_soft(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain(format!("f_soft needs x > 0, got {x}")));
        }
        if x <= 1.0 {
            let r = 0.75 * self.n as f64 * self.phase_tail_mass(x);
            Ok(-r.powf(2.0 / 3.0))
        } else {
            let r = 0.75 * self.n as f64 * self.exp_mass(x);
            Ok(r.powf(2.0 / 3.0))
        }
    }
}

/// Coefficients of the limiting density polynomial `h`:
/// `h_k = 2 A_{m-1-k} / A_m` for `k < m`.
pub fn limiting_h(m: usize) -> Vec<f64> {
    let am = a_half(m);
    (0..m).map(|k| 2.0 * a_half(m - 1 - k) / am).collect()
}

/// `theta(x) = (1/2) int_0^x sqrt((1-s)/s) h(s) ds` for the limiting `h`.
pub fn theta(m: usize, x: f64) -> f64 {
    let h = limiting_h(m);
    let s: f64 = h
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (monomial_mass_tail(k, 0.0) - monomial_mass_tail(k, x)))
        .sum();
    0.5 * s
}

/// Max residual of `theta - x theta'/m - pi + arccos(2x-1)` on interior points.
pub fn check_theta_ode(m: usize, grid_points: usize) -> f64 {
    let h = limiting_h(m);
    let h_at = |x: f64| h.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let mut worst: f64 = 0.0;
    for i in 1..grid_points {
        let x = i as f64 / grid_points as f64;
        if x >= 1.0 {
            break;
        }
        let th = theta(m, x);
        let dth = 0.5 * ((1.0 - x) / x).sqrt() * h_at(x);
        let res = th - x * dth / m as f64 - PI + (2.0 * x - 1.0).acos();
        worst = worst.max(res.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_adaptive;
    use approx::assert_relative_eq;

    #[test]
    fn a_half_values() {
        assert_eq!(a_half(0), 1.0);
        assert_relative_eq!(a_half(1), 0.5);
        assert_relative_eq!(a_half(2), 3.0 / 8.0);
        assert_relative_eq!(a_half(3), 5.0 / 16.0);
    }

    #[test]
    fn mrs_linear_field_closed_form() {
        // m = 1, q1 = 1: beta_n = 4n
        let w = Weight::new(1.0, vec![0.0, 1.0]).unwrap();
        let b = mrs_number(&w, 10).unwrap();
        assert_relative_eq!(b, 40.0, max_relative = 1e-13);
        assert!(mrs_residual(&w, 10, b).abs() < 1e-10);
    }

    #[test]
    fn mrs_residual_general_fields() {
        let w = Weight::new(1.0, vec![0.0, 0.5, 0.25]).unwrap();
        for &n in &[8usize, 32, 128] {
            let b = mrs_number(&w, n).unwrap();
            assert!(mrs_residual(&w, n, b).abs() < 1e-10, "n = {n}");
        }
        let w3 = Weight::new(2.0, vec![0.0, 1.0, 0.0, 0.125]).unwrap();
        for &n in &[8usize, 64] {
            let b = mrs_number(&w3, n).unwrap();
            assert!(mrs_residual(&w3, n, b).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn mrs_leading_asymptotics() {
        // beta^{(0)} = (m q_m A_m / 2)^{-1/m}
        let w = Weight::new(1.0, vec![0.0, 0.0, 1.0]).unwrap();
        let n = 64;
        let b = mrs_number(&w, n).unwrap();
        let lead = (0.5 * 2.0 * 1.0 * a_half(2)).powf(-0.5) * (n as f64).sqrt();
        assert!((b / lead - 1.0).abs() < 0.15, "b = {b}, lead = {lead}");
    }

    #[test]
    fn h_constant_for_linear_field() {
        let w = Weight::new(1.0, vec![0.0, 1.0]).unwrap();
        for &n in &[4usize, 17, 80] {
            let eq = equilibrium(&w, n).unwrap();
            assert_eq!(eq.h_coeffs.len(), 1);
            assert_relative_eq!(eq.h_coeffs[0], 4.0, max_relative = 1e-12);
            // Marchenko–Pastur hard-edge form: omega(x) = (2/pi) sqrt((1-x)/x)
            let x = 0.3;
            assert_relative_eq!(
                eq.omega(x).unwrap(),
                2.0 / PI * ((1.0 - x) / x).sqrt(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn h_limit_for_quadratic_field() {
        // m = 2: h(x) = 8/3 + 16/3 x. For the pure x^2 field h_n equals the
        // limit exactly at every n; a linear term makes the approach visible.
        let hlim = limiting_h(2);
        assert_relative_eq!(hlim[0], 8.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(hlim[1], 16.0 / 3.0, max_relative = 1e-14);

        let pure = Weight::new(1.0, vec![0.0, 0.0, 1.0]).unwrap();
        let eq = equilibrium(&pure, 16).unwrap();
        assert_relative_eq!(eq.h_coeffs[0], 8.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(eq.h_coeffs[1], 16.0 / 3.0, max_relative = 1e-12);

        let w = Weight::new(1.0, vec![0.0, 0.5, 1.0]).unwrap();
        let mut prev = f64::INFINITY;
        for &n in &[16usize, 32, 64] {
            let eq = equilibrium(&w, n).unwrap();
            let dev = (0..=100)
                .map(|i| {
                    let x = i as f64 / 100.0;
                    (eq.h_at(x) - (hlim[0] + hlim[1] * x)).abs()
                })
                .fold(0.0f64, f64::max);
            assert!(dev < prev, "deviation not decreasing at n = {n}");
            prev = dev;
        }
    }

    #[test]
    fn dominant_term_of_h_coefficients() {
        // h_{n,k} ~ 2 A_{m-1-k} / A_m within O(n^{-1/m})
        let w = Weight::new(1.0, vec![0.0, 0.1, 0.0, 1.0]).unwrap();
        let m = 3usize;
        let eq = equilibrium(&w, 2048).unwrap();
        for k in 0..m {
            let lead = 2.0 * a_half(m - 1 - k) / a_half(m);
            assert!(
                (eq.h_coeffs[k] / lead - 1.0).abs() < 0.2,
                "k = {k}: {} vs {lead}",
                eq.h_coeffs[k]
            );
        }
    }

    #[test]
    fn normalization_integral() {
        let w = Weight::new(2.5, vec![0.0, 0.2, 0.1, 0.05]).unwrap();
        for &n in &[8usize, 33] {
            let eq = equilibrium(&w, n).unwrap();
            // independent quadrature of int_0^1 sqrt((1-s)/s) h_n with the
            // substitution s = sin^2(phi) (smooth at both endpoints)
            let val = integrate_adaptive(
                &|phi: f64| 2.0 * phi.cos().powi(2) * eq.h_at(phi.sin().powi(2)),
                0.0,
                0.5 * PI,
                1e-12,
            )
            .unwrap();
            assert_relative_eq!(val, 2.0 * PI, max_relative = 1e-9);
            // density integrates to 1 and vanishes at the soft edge
            let mass = integrate_adaptive(
                &|phi: f64| 2.0 * phi.sin() * phi.cos() * eq.omega(phi.sin().powi(2)).unwrap(),
                1e-9,
                0.5 * PI,
                1e-11,
            )
            .unwrap();
            assert_relative_eq!(mass, 1.0, max_relative = 1e-9);
            assert_relative_eq!(eq.omega(1.0).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn edge_constants_values() {
        // m = 1: c_n = 2^{2/3}, tilde_c_n = 4 exactly
        let w = Weight::new(1.0, vec![0.0, 1.0]).unwrap();
        let eq = equilibrium(&w, 12).unwrap();
        assert_relative_eq!(eq.c_n, 2.0f64.powf(2.0 / 3.0), max_relative = 1e-13);
        assert_relative_eq!(eq.tilde_c_n, 4.0, max_relative = 1e-13);

        // m = 2, large n: c_n -> 4^{2/3}, tilde_c_n -> (4/3)^2
        let w2 = Weight::new(1.0, vec![0.0, 0.0, 1.0]).unwrap();
        let eq2 = equilibrium(&w2, 4096).unwrap();
        assert!((eq2.c_n / 4.0f64.powf(2.0 / 3.0) - 1.0).abs() < 0.05);
        assert!((eq2.tilde_c_n / (16.0 / 9.0) - 1.0).abs() < 0.05);
        assert!(eq2.c_n > 0.0 && eq2.tilde_c_n > 0.0);
    }

    #[test]
    fn phase_function_identities() {
        let w = Weight::new(1.5, vec![0.0, 0.3, 0.2]).unwrap();
        let eq = equilibrium(&w, 20).unwrap();
        // F_{n,1} - F_{n,2} = arccos(2x - 1) exactly
        for &x in &[0.05, 0.37, 0.81, 0.99] {
            let d = eq.phase_f(1, x).unwrap() - eq.phase_f(2, x).unwrap();
            assert_relative_eq!(d, (2.0 * x - 1.0).acos(), max_relative = 1e-12);
        }
        // F_{n,1}(1^-) -> eta_1(1) - pi/4 = -pi/4
        let f = eq.phase_f(1, 1.0 - 1e-12).unwrap();
        assert!((f + 0.25 * PI).abs() < 1e-5);
        // derivative vs finite differences: F' = -(n/2) sqrt((1-x)/x) h_n + eta'
        let x = 0.43;
        let h = 1e-6;
        let fd = (eq.phase_f(1, x + h).unwrap() - eq.phase_f(1, x - h).unwrap()) / (2.0 * h);
        let eta_p = 0.5 * (eq.alpha + 1.0) * (-2.0) / (1.0 - (2.0 * x - 1.0).powi(2)).sqrt();
        let expect = -0.5 * eq.n as f64 * ((1.0 - x) / x).sqrt() * eq.h_at(x) + eta_p;
        assert_relative_eq!(fd, expect, max_relative = 1e-6);
        assert!(eq.phase_f(1, 0.0).is_err());
        assert!(eq.phase_g(1.0).is_err());
    }

    #[test]
    fn theta_endpoints_and_ode() {
        for m in 1..=3usize {
            assert_relative_eq!(theta(m, 0.0), 0.0, epsilon = 1e-14);
            assert_relative_eq!(theta(m, 1.0), PI, max_relative = 1e-12);
            assert!(check_theta_ode(m, 200) < 1e-8, "m = {m}");
        }
        // m = 1 closed form against quadrature at x = 1/2
        let direct = integrate_adaptive(
            &|t: f64| {
                let s = t * t;
                2.0 * t * 2.0 * ((1.0 - s) / s).sqrt()
            },
            1e-14,
            0.5f64.sqrt(),
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(theta(1, 0.5), direct, max_relative = 1e-10);
    }

    #[test]
    fn beta_ratio_first_order() {
        // beta_p / beta_q = 1 + (p - q)/(m q) + o(1/n)
        let w = Weight::new(1.0, vec![0.0, 0.0, 0.5]).unwrap();
        let m = 2.0;
        let mut prev = f64::INFINITY;
        for &n in &[16usize, 64, 256] {
            let bp = mrs_number(&w, n + 2).unwrap();
            let bq = mrs_number(&w, n).unwrap();
            let excess = (bp / bq - 1.0 - 2.0 / (m * n as f64)).abs() * n as f64;
            assert!(excess < prev, "n = {n}: {excess} vs {prev}");
            prev = excess;
        }
    }

    #[test]
    fn f_maps_near_edges() {
        let w = Weight::new(1.0, vec![0.0, 1.0]).unwrap();
        let eq = equilibrium(&w, 24).unwrap();
        // -f_tilde ~ tilde_c n^2 x near 0
        for &x in &[1e-8, 1e-6] {
            let ratio = -eq.f_tilde(x).unwrap() / (eq.tilde_c_n * (eq.n as f64).powi(2) * x);
            assert!((ratio - 1.0).abs() < 1e-3, "x = {x}: {ratio}");
        }
        // f_n ~ c_n n^{2/3} (x - 1) near 1, both sides; f_n(1) = 0
        for &dx in &[1e-7, -1e-7] {
            let x = 1.0 + dx;
            let ratio = eq.f_soft(x).unwrap() / (eq.c_n * (eq.n as f64).powf(2.0 / 3.0) * dx);
            assert!((ratio - 1.0).abs() < 1e-3, "dx = {dx}: {ratio}");
        }
        assert_relative_eq!(eq.f_soft(1.0).unwrap(), 0.0, epsilon = 1e-10);
    }
}
