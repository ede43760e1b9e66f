//! The n-independent matrices controlling invertibility of the finite-rank
//! correction system: the binomial coefficients `c_l`, their tail sums `d_k`,
//! the limit matrices `X` (epsilon inner products) and `Y` (field inner
//! products), `T_m = I - X Y`, the oscillatory integrals `I(q)`, `Ihat(q)`
//! against the limiting density, the auxiliary functions `u`, `W_q`,
//! `What_q`, and numeric verification of every stated inequality.
//!
//! Bound checks always report (value, bound, slack) rather than a bare
//! boolean, so regressions show up as shrinking margins.

use crate::equilibrium::{a_half, binomial, limiting_h};
use crate::error::{Error, Result};
use crate::limits::gamma;
use crate::quad::integrate_composite;
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

/// One verified inequality: `value` against `bound` with `slack = bound - value`.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

impl BoundCheck {
    fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        BoundCheck {
            name: name.into(),
            value,
            bound,
            slack: bound - value,
        }
    }

    pub fn holds(&self) -> bool {
        self.slack >= 0.0 && self.value.is_finite()
    }
}

/// A batch of bound checks.
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<BoundCheck>,
}

impl VerifyReport {
    pub fn push(&mut self, c: BoundCheck) {
        self.checks.push(c);
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(BoundCheck::holds)
    }

    pub fn worst(&self) -> Option<&BoundCheck> {
        self.checks
            .iter()
            .min_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap())
    }
}

/// `c_l = 2^{2-2m} / A_m * binom(2m-2, m-1-l)`; zero for `l >= m`.
pub fn c_coeff(m: usize, l: usize) -> f64 {
    if l >= m || l < 1 {
        return 0.0;
    }
    2.0f64.powi(2 - 2 * m as i32) / a_half(m) * binomial(2 * m - 2, m - 1 - l)
}

/// `d_k = sum_{j=k+1}^{m-1} c_j`.
pub fn d_coeff(m: usize, k: usize) -> f64 {
    (k + 1..m).map(|j| c_coeff(m, j)).sum()
}

/// The assembled system for a fixed field degree `m`.
#[derive(Debug, Clone)]
pub struct TmSystem {
    pub m: usize,
    pub a_m: f64,
    /// `c[l]` valid for `l = 1..m-1` (`c[0]` unused, kept for direct indexing).
    pub c: Vec<f64>,
    /// `d[k]` for `k = 0..m-1`.
    pub d: Vec<f64>,
    /// `gamma = 1 - c_1/4`.
    pub gamma_c: f64,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub t_m: DMatrix<f64>,
    /// `(m-1) x (m-1)` blocks and vectors of the Schur-complement analysis.
    pub r: DMatrix<f64>,
    pub qhat: DMatrix<f64>,
    pub v: Vec<f64>,
    pub v0: Vec<f64>,
    pub v1: Vec<f64>,
}

/// `V_q(theta) = sin((2q-1) theta) / sin(theta)`.
fn dirichlet_v(q: usize, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-12 {
        return 2.0 * q as f64 - 1.0;
    }
    ((2.0 * q as f64 - 1.0) * theta).sin() / s
}

/// `Vhat_q(theta) = sin(2q theta) cos(theta) / sin(theta)`.
fn dirichlet_v_hat(q: usize, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-12 {
        return 2.0 * q as f64;
    }
    (2.0 * q as f64 * theta).sin() * theta.cos() / s
}

fn h_limit_at(h: &[f64], x: f64) -> f64 {
    h.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `I(q) = (4/pi) int_0^{pi/2} V_q(theta) / h(cos^2 theta) dtheta`
/// (the `theta = arccos(2x-1)/2` substitution removes both endpoint
/// singularities of the original form on (0, 1) analytically).
pub fn integral_i(m: usize, q: usize) -> f64 {
    let h = limiting_h(m);
    let panels = 2 * q + 8;
    4.0 / PI
        * integrate_composite(
            |t: f64| dirichlet_v(q, t) / h_limit_at(&h, t.cos().powi(2)),
            0.0,
            0.5 * PI,
            16,
            panels,
        )
}

/// `Ihat(q) = (4/pi) int_0^{pi/2} Vhat_q(theta) / h(cos^2 theta) dtheta`.
pub fn integral_ihat(m: usize, q: usize) -> f64 {
    let h = limiting_h(m);
    let panels = 2 * q + 8;
    4.0 / PI
        * integrate_composite(
            |t: f64| dirichlet_v_hat(q, t) / h_limit_at(&h, t.cos().powi(2)),
            0.0,
            0.5 * PI,
            16,
            panels,
        )
}

/// Assemble `X`, `Y`, `T_m = I - XY` and the Schur-complement apparatus.
pub fn build_tm(m: usize) -> Result<TmSystem> {
    if m < 1 {
        return Err(Error::InvalidParameter("build_tm needs m >= 1".into()));
    }
    let a_m = a_half(m);
    let c: Vec<f64> = (0..(2 * m - 1).max(2)).map(|l| c_coeff(m, l)).collect();
    let d: Vec<f64> = (0..m).map(|k| d_coeff(m, k)).collect();
    let gamma_c = 1.0 - c[1] / 4.0;

    let p = m - 1;
    // R(i,j) = Ihat(i+j-1), v(j) = sqrt(m/(2m-1)) I(j) - 1/(2 sqrt m)
    let mut r = DMatrix::<f64>::zeros(p, p);
    let ihat: Vec<f64> = if p > 0 {
        (1..=2 * p - 1)
            .into_par_iter()
            .map(|q| integral_ihat(m, q))
            .collect()
    } else {
        Vec::new()
    };
    for i in 0..p {
        for j in 0..p {
            r[(i, j)] = ihat[i + j];
        }
    }
    let iq: Vec<f64> = (1..=p).into_par_iter().map(|q| integral_i(m, q)).collect();
    let sm = (m as f64 / (2.0 * m as f64 - 1.0)).sqrt();
    let v: Vec<f64> = (1..=p)
        .map(|j| sm * iq[j - 1] - 0.5 / (m as f64).sqrt())
        .collect();
    let v0: Vec<f64> = (1..=p)
        .map(|j| {
            if j == 1 {
                0.5 * sm - 0.5 / (m as f64).sqrt()
            } else {
                -0.5 / (m as f64).sqrt()
            }
        })
        .collect();
    let v1: Vec<f64> = (1..=p)
        .map(|j| sm * (iq[j - 1] - if j == 1 { 0.5 } else { 0.0 }))
        .collect();

    let mut x = DMatrix::<f64>::zeros(m, m);
    for i in 0..p {
        for j in 0..p {
            x[(i, j)] = r[(i, j)];
        }
        x[(i, p)] = v[i];
        x[(p, i)] = v[i];
    }
    x[(p, p)] = 1.0 - 1.0 / (2.0 * m as f64 - 1.0).sqrt();

    let mut y = DMatrix::<f64>::zeros(m, m);
    for i in 0..p {
        for j in 0..p {
            y[(i, j)] = c[i + j + 1]; // c_{i+j-1} with 1-based block indices
        }
    }
    y[(p, p)] = 0.5;

    let t_m = DMatrix::<f64>::identity(m, m) - &x * &y;

    // Qhat = Q U_0^{-1} with U_0^{-1} = [[1/gamma, u/(4 gamma)], [0, I]]
    let mut qhat = DMatrix::<f64>::zeros(p, p);
    if p > 0 {
        let q_blk = y.view((0, 0), (p, p)).into_owned();
        let mut u0_inv = DMatrix::<f64>::identity(p, p);
        u0_inv[(0, 0)] = 1.0 / gamma_c;
        for j in 1..p {
            u0_inv[(0, j)] = c[j + 1] / (4.0 * gamma_c);
        }
        qhat = q_blk * u0_inv;
    }

    Ok(TmSystem {
        m,
        a_m,
        c,
        d,
        gamma_c,
        x,
        y,
        t_m,
        r,
        qhat,
        v,
        v0,
        v1,
    })
}

impl TmSystem {
    /// `sum_{ij} |Qhat_{ij}|` (the upper bound used for the `inf -> 1` norm).
    pub fn qhat_norm_inf1(&self) -> f64 {
        self.qhat.iter().map(|e| e.abs()).sum()
    }

    /// `|| v Qhat ||_1`.
    pub fn v_qhat_norm1(&self) -> f64 {
        let p = self.m - 1;
        (0..p)
            .map(|j| {
                (0..p)
                    .map(|i| self.v[i] * self.qhat[(i, j)])
                    .sum::<f64>()
                    .abs()
            })
            .sum()
    }

    /// `v Qhat v^t`.
    pub fn v_qhat_v(&self) -> f64 {
        let p = self.m - 1;
        let mut s = 0.0;
        for i in 0..p {
            for j in 0..p {
                s += self.v[i] * self.qhat[(i, j)] * self.v[j];
            }
        }
        s
    }
}

/// Oscillatory-integral bounds: `|I(q) - delta_{1q}/2| <= 2.22/(2m)` and
/// `|Ihat(q) - delta_{1q}/4| <= 2.18/(2m)` for `1 <= q <= q_max`.
pub fn verify_integral_bounds(m: usize, q_max: usize) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let defects: Vec<(f64, f64)> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let kron = if q == 1 { 1.0 } else { 0.0 };
            let di = (integral_i(m, q) - 0.5 * kron).abs();
            let dh = (integral_ihat(m, q) - 0.25 * kron).abs();
            (di, dh)
        })
        .collect();
    let (mut wi, mut wh) = (0.0f64, 0.0f64);
    for (di, dh) in defects {
        wi = wi.max(di);
        wh = wh.max(dh);
    }
    rep.push(BoundCheck::new(
        format!("max_q |I(q) - d1q/2| (m={m})"),
        wi,
        2.22 / (2.0 * m as f64),
    ));
    rep.push(BoundCheck::new(
        format!("max_q |Ihat(q) - d1q/4| (m={m})"),
        wh,
        2.18 / (2.0 * m as f64),
    ));
    rep
}

/// The three norm bounds on the Schur-complement system plus the exact
/// `inf -> 1` norm identity and the monotone `d_j / c_j` ratios.
pub fn verify_schur_bounds(sys: &TmSystem) -> VerifyReport {
    let m = sys.m;
    let mf = m as f64;
    let mut rep = VerifyReport::default();
    let norm = sys.qhat_norm_inf1();
    rep.push(BoundCheck::new(
        format!("||Qhat||_inf->1 (m={m})"),
        norm,
        mf * (PI / 12.0 + 0.5),
    ));
    let exact = sys.d[0] * sys.d[0] / (4.0 * sys.gamma_c) + 0.5 * mf * sys.c[1];
    rep.push(BoundCheck::new(
        format!("| ||Qhat|| - exact identity | (m={m})"),
        (norm - exact).abs() / exact.max(1.0),
        1e-12,
    ));
    rep.push(BoundCheck::new(
        format!("||v Qhat||_1 (m={m})"),
        sys.v_qhat_norm1(),
        0.3918 * mf.sqrt(),
    ));
    rep.push(BoundCheck::new(
        format!("v Qhat v^t (m={m})"),
        sys.v_qhat_v(),
        1.0 / (2.0 * mf - 1.0).sqrt(),
    ));
    // 0 <= d_j / c_j <= d_1 / c_1
    if m >= 3 {
        let cap = sys.d[1] / sys.c[1];
        let mut worst = f64::NEG_INFINITY;
        let mut least = f64::INFINITY;
        for j in 1..m - 1 {
            let ratio = sys.d[j] / sys.c[j];
            worst = worst.max(ratio);
            least = least.min(ratio);
        }
        rep.push(BoundCheck::new(
            format!("max_j d_j/c_j (m={m})"),
            worst,
            cap + 1e-14,
        ));
        rep.push(BoundCheck::new(
            format!("-min_j d_j/c_j (m={m})"),
            -least,
            0.0 + 1e-14,
        ));
    }
    rep
}

/// Determinant and 1-norm condition number of `T_m`.
pub fn verify_tm_invertible(m: usize) -> Result<(f64, f64)> {
    let sys = build_tm(m)?;
    let det = sys.t_m.clone().lu().determinant();
    let inv = sys
        .t_m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular {
            what: format!("T_{m}"),
            cond: f64::INFINITY,
            limit: 1e6,
        })?;
    let norm1 = |a: &DMatrix<f64>| -> f64 {
        (0..a.ncols())
            .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    Ok((det, norm1(&sys.t_m) * norm1(&inv)))
}

/// `u(x) = 1/h(x^2) - (1-x^2)/2 + 1/(4m)` on `[0, 1]`.
pub fn aux_u(m: usize, x: f64) -> f64 {
    let h = limiting_h(m);
    1.0 / h_limit_at(&h, x * x) - 0.5 * (1.0 - x * x) + 0.25 / m as f64
}

/// `W_q(theta) = (4/pi)(theta + sum_{k<q} sin(2k theta)/k)`.
pub fn aux_wq(q: usize, theta: f64) -> f64 {
    let mut s = theta;
    for k in 1..q {
        s += (2.0 * k as f64 * theta).sin() / k as f64;
    }
    4.0 / PI * s
}

/// `What_q = (W_q + W_{q+1}) / 2`.
pub fn aux_wq_hat(q: usize, theta: f64) -> f64 {
    0.5 * (aux_wq(q, theta) + aux_wq(q + 1, theta))
}

/// Shape checks on `u`, `W_q`, `What_q`: endpoint values of `u`, its lower
/// bound, and the `[0, 2.44]` / `[0, 2.36]` ranges on a dense grid.
pub fn verify_aux_functions(m: usize, q_max: usize) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let mf = m as f64;
    rep.push(BoundCheck::new(
        format!("|u(0)| (m={m})"),
        aux_u(m, 0.0).abs(),
        1e-12,
    ));
    rep.push(BoundCheck::new(
        format!("|u(1) - 1/(2m)| (m={m})"),
        (aux_u(m, 1.0) - 0.5 / mf).abs(),
        1e-12,
    ));
    let min_u = (0..=400)
        .map(|i| aux_u(m, i as f64 / 400.0))
        .fold(f64::INFINITY, f64::min);
    rep.push(BoundCheck::new(
        format!("-min u - 1/(4m) (m={m})"),
        -min_u,
        0.25 / mf,
    ));
    let grid: Vec<f64> = (0..=600).map(|i| 0.5 * PI * i as f64 / 600.0).collect();
    let (mut wq_max, mut wq_min, mut wh_max, mut wh_min) = (
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
    );
    for q in 1..=q_max {
        for &t in &grid {
            let w = aux_wq(q, t);
            wq_max = wq_max.max(w);
            wq_min = wq_min.min(w);
            let wh = aux_wq_hat(q, t);
            wh_max = wh_max.max(wh);
            wh_min = wh_min.min(wh);
        }
    }
    rep.push(BoundCheck::new(
        format!("max W_q (q<={q_max})"),
        wq_max,
        2.44,
    ));
    rep.push(BoundCheck::new("-min W_q", -wq_min, 1e-12));
    rep.push(BoundCheck::new(
        format!("max What_q (q<={q_max})"),
        wh_max,
        2.36,
    ));
    rep.push(BoundCheck::new("-min What_q", -wh_min, 1e-12));
    rep
}

/// `a Y a^t` with `a = (1, ..., 1, sqrt(m/(2m-1)))`; equal to `m/2`.
pub fn a_y_a(m: usize) -> Result<f64> {
    let sys = build_tm_y_only(m)?;
    let mf = m as f64;
    let mut a = vec![1.0; m];
    a[m - 1] = (mf / (2.0 * mf - 1.0)).sqrt();
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            s += a[i] * sys[(i, j)] * a[j];
        }
    }
    Ok(s)
}

/// `Y` alone (no oscillatory integrals needed).
fn build_tm_y_only(m: usize) -> Result<DMatrix<f64>> {
    if m < 1 {
        return Err(Error::InvalidParameter("m >= 1".into()));
    }
    let p = m - 1;
    let mut y = DMatrix::<f64>::zeros(m, m);
    for i in 0..p {
        for j in 0..p {
            y[(i, j)] = c_coeff(m, i + j + 1);
        }
    }
    y[(p, p)] = 0.5;
    Ok(y)
}

/// Exact lower/upper bounds on `d_0` and the `sum d_j = (m/2) c_1` identity.
pub fn verify_d_sums(m: usize) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let mf = m as f64;
    let d0 = d_coeff(m, 0);
    let sum: f64 = (0..m).map(|k| d_coeff(m, k)).sum();
    let c1 = c_coeff(m, 1);
    rep.push(BoundCheck::new(
        format!("|sum d_j - (m/2) c_1| (m={m})"),
        (sum - 0.5 * mf * c1).abs() / (0.5 * mf * c1).max(1e-30),
        1e-12,
    ));
    if m >= 2 {
        rep.push(BoundCheck::new(
            format!("d_0 upper (m={m})"),
            d0,
            0.5 * (mf * PI).sqrt(),
        ));
        rep.push(BoundCheck::new(
            format!("d_0 lower (m={m})"),
            0.5 * (mf * PI).sqrt() - 1.0,
            d0,
        ));
        // closed form d_0 = (sqrt(pi)/2) Gamma(m+1)/Gamma(m+1/2) - m/(2m-1)
        let closed = 0.5 * PI.sqrt() * gamma(mf + 1.0) / gamma(mf + 0.5) - mf / (2.0 * mf - 1.0);
        rep.push(BoundCheck::new(
            format!("|d_0 - closed form| (m={m})"),
            (d0 - closed).abs(),
            1e-11 * d0.max(1.0),
        ));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_m_closed_forms() {
        // m=2: c_1 = 2/3, gamma = 5/6, d_0 = 2/3
        let sys = build_tm(2).unwrap();
        assert_relative_eq!(sys.c[1], 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(sys.gamma_c, 5.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(sys.d[0], 2.0 / 3.0, max_relative = 1e-14);
        // cross-check d_0 against the Gamma-function form
        let closed = 0.5 * PI.sqrt() * gamma(3.0) / gamma(2.5) - 2.0 / 3.0;
        assert_relative_eq!(sys.d[0], closed, max_relative = 1e-13);
        // c_1 = (2m-2)/(2m-1) generally
        for m in 2..=20 {
            assert_relative_eq!(
                c_coeff(m, 1),
                (2.0 * m as f64 - 2.0) / (2.0 * m as f64 - 1.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn m1_trivial_system() {
        let sys = build_tm(1).unwrap();
        assert_eq!(sys.x.nrows(), 1);
        assert_relative_eq!(sys.x[(0, 0)], 0.0, epsilon = 1e-14);
        assert_relative_eq!(sys.t_m[(0, 0)], 1.0, epsilon = 1e-14);
        let (det, cond) = verify_tm_invertible(1).unwrap();
        assert_relative_eq!(det, 1.0, epsilon = 1e-12);
        assert!(cond < 1.0 + 1e-12);
    }

    #[test]
    fn integral_bounds_small_sweep() {
        for m in 2..=6 {
            let rep = verify_integral_bounds(m, 40);
            assert!(rep.all_hold(), "m = {m}: {:?}", rep.worst());
        }
    }

    #[test]
    fn ihat_small_for_large_q() {
        // no exact vanishing, but |Ihat(q)| stays within the Lemma bound
        let m = 4;
        for q in m..3 * m {
            let v = integral_ihat(m, q).abs();
            assert!(v <= 2.18 / (2.0 * m as f64) + 1e-12, "q = {q}: {v}");
        }
    }

    #[test]
    fn schur_bounds_and_exact_norm() {
        for m in 2..=16 {
            let sys = build_tm(m).unwrap();
            let rep = verify_schur_bounds(&sys);
            assert!(rep.all_hold(), "m = {m}: {:?}", rep.worst());
        }
    }

    #[test]
    fn tm_invertible_and_yx_spectrum() {
        for m in 1..=10 {
            let (det, cond) = verify_tm_invertible(m).unwrap();
            assert!(det.abs() > 1e-8, "m = {m}: det {det}");
            assert!(cond < 1e6, "m = {m}: cond {cond}");
        }
        // det(I - XY) = det(I - YX)
        let sys = build_tm(5).unwrap();
        let other = DMatrix::<f64>::identity(5, 5) - &sys.y * &sys.x;
        assert_relative_eq!(
            sys.t_m.clone().lu().determinant(),
            other.lu().determinant(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn aux_function_shapes() {
        for m in 2..=16 {
            let rep = verify_aux_functions(m, 12);
            assert!(rep.all_hold(), "m = {m}: {:?}", rep.worst());
        }
        // W_1(theta) = 4 theta / pi, so W_1(pi/2) = 2
        assert_relative_eq!(aux_wq(1, 0.5 * PI), 2.0, max_relative = 1e-14);
        assert_relative_eq!(aux_wq(1, 0.3), 4.0 * 0.3 / PI, max_relative = 1e-14);
    }

    #[test]
    fn a_y_a_identity() {
        assert_relative_eq!(a_y_a(1).unwrap(), 0.5, max_relative = 1e-14);
        // m=2: d_0 + d_1 + (1/2) m/(2m-1) = 2/3 + 0 + 1/3 = 1
        assert_relative_eq!(a_y_a(2).unwrap(), 1.0, max_relative = 1e-13);
        for m in 3..=50 {
            assert_relative_eq!(a_y_a(m).unwrap(), 0.5 * m as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn d_sum_identities() {
        for m in 2..=64 {
            let rep = verify_d_sums(m);
            assert!(rep.all_hold(), "m = {m}: {:?}", rep.worst());
        }
    }

    #[test]
    fn h_matches_terminating_hypergeometric() {
        // h(x) = 4m/(2m-1) 2F1(1, 1-m; 3/2-m; x) (terminating series)
        for m in 1..=16usize {
            let h = limiting_h(m);
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 0..m - 1 {
                    let kf = k as f64;
                    term *= (1.0 + kf) * (1.0 - m as f64 + kf)
                        / ((1.5 - m as f64 + kf) * (1.0 + kf))
                        * x;
                    sum += term;
                }
                let hyp = 4.0 * m as f64 / (2.0 * m as f64 - 1.0) * sum;
                let direct = h_limit_at(&h, x);
                assert_relative_eq!(direct, hyp, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn i_integral_against_x_substitution() {
        // same integral in the original variable on (0,1):
        // I(q) = (2/pi) int_0^1 sin((q-1/2) arccos(2x-1)) / (h(x) x^{1/2} (1-x)) dx,
        // via x = sin^2 phi to keep the endpoints tame for the oracle
        let m = 3;
        let h = limiting_h(m);
        for q in 1..=4usize {
            let oracle = 2.0 / PI
                * integrate_composite(
                    |phi: f64| {
                        let x = phi.sin().powi(2);
                        let arg = (q as f64 - 0.5) * (2.0 * x - 1.0).acos();
                        // dx = 2 sin cos dphi; x^{1/2} = sin, (1-x) = cos^2
                        arg.sin() * 2.0 / (h_limit_at(&h, x) * phi.cos())
                    },
                    1e-9,
                    0.5 * PI - 1e-9,
                    16,
                    600,
                );
            assert_relative_eq!(
                integral_i(m, q),
                oracle,
                max_relative = 1e-6,
                epsilon = 1e-8
            );
        }
    }
}
