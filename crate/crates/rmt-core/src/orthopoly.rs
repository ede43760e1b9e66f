//! Orthonormal polynomials for a Laguerre-type weight: recurrence coefficients
//! via a discretized Stieltjes procedure in extended precision, forward
//! evaluation of the orthonormal functions `phi_k = p_k sqrt(w)` and their
//! derivatives, the Christoffel–Darboux kernel, Cauchy-transform constants at
//! the origin, and antiderivative (epsilon-transform) tables.
//!
//! Only `compute_recurrence` runs in extended precision: the Stieltjes stage
//! is where cancellation lives. Everything downstream evaluates the rounded
//! `f64` table.

use crate::error::{Error, Result};
use crate::prec::{big_ln_abs, gauss_legendre_ep, EpCtx};
use crate::quad::{FuncTable, QuadGrid};
use crate::weights::Weight;
use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

/// Controls for the extended-precision recurrence stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub mantissa_bits: usize,
    pub panel_count: usize,
    pub nodes_per_panel: usize,
}

impl PrecisionContext {
    /// Defaults for a given maximum degree: 256-bit mantissas (overridable via
    /// `RMT_PRECISION_BITS`) and a grid fine enough to resolve polynomials of
    /// degree `2 n_max` against the weight.
    pub fn for_degree(n_max: usize) -> Self {
        let bits = std::env::var("RMT_PRECISION_BITS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(256)
            .max(64);
        let nodes_per_panel = 24;
        let total = (7 * (n_max + 2)).max(240);
        let panel_count = total.div_ceil(nodes_per_panel);
        PrecisionContext {
            mantissa_bits: bits,
            panel_count,
            nodes_per_panel,
        }
    }

    pub fn validate(&self, n_max: usize) -> Result<()> {
        if self.mantissa_bits < 53 {
            return Err(Error::InvalidParameter(
                "mantissa_bits must be >= 53".into(),
            ));
        }
        if self.panel_count * self.nodes_per_panel < 4 * n_max {
            return Err(Error::InvalidParameter(format!(
                "quadrature too coarse: {} * {} < 4 * {}",
                self.panel_count, self.nodes_per_panel, n_max
            )));
        }
        Ok(())
    }
}

/// Three-term recurrence data for the orthonormal functions:
/// `x phi_k = b_k phi_{k+1} + a_k phi_k + b_{k-1} phi_{k-1}`.
///
/// `gamma` holds the leading coefficients of `p_k`; for steep weights and
/// large `k` these leave the `f64` range, so `ln_gamma` carries the exact
/// logarithms alongside.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceTable {
    pub n_max: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub gamma: Vec<f64>,
    pub ln_gamma: Vec<f64>,
    pub p_at_zero: Vec<f64>,
    /// Upper end of the quadrature support used by the Stieltjes stage.
    pub x_support: f64,
}

/// Serialization form with decimal strings, preserving provenance digits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceTableJson {
    pub n_max: usize,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub gamma: Vec<String>,
    pub ln_gamma: Vec<String>,
    pub p_at_zero: Vec<String>,
    pub x_support: String,
}

impl RecurrenceTable {
    pub fn to_decimal_json(&self) -> RecurrenceTableJson {
        let f = |v: &Vec<f64>| v.iter().map(|x| format!("{x:.17e}")).collect();
        RecurrenceTableJson {
            n_max: self.n_max,
            a: f(&self.a),
            b: f(&self.b),
            gamma: f(&self.gamma),
            ln_gamma: f(&self.ln_gamma),
            p_at_zero: f(&self.p_at_zero),
            x_support: format!("{:.17e}", self.x_support),
        }
    }
}

/// Upper integration cutoff: the point where `x^{2 n_max + alpha} e^{-V(x)}`
/// has fallen `decimal_digits` digits below its maximum.
pub fn support_cutoff(w: &Weight, n_max: usize, decimal_digits: f64) -> f64 {
    let p = 2.0 * n_max as f64 + w.alpha;
    // maximum of x^p e^{-V}: x V'(x) = p
    let rho = |x: f64| x * w.eval_v_prime(x) - p;
    let mut hi = 1.0;
    while rho(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = hi / 2.0;
    if rho(lo) > 0.0 {
        lo = 1e-12;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_star = 0.5 * (lo + hi);
    let g = |x: f64| w.eval_v(x) - p * x.ln();
    let drop = decimal_digits * std::f64::consts::LN_10 + 20.0;
    let target = g(x_star) + drop;
    let mut hi = x_star * 2.0;
    while g(hi) < target {
        hi *= 2.0;
        if hi > 1e15 {
            break;
        }
    }
    let mut lo = x_star;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Discretized Stieltjes procedure in extended precision.
///
/// Builds a composite Gauss rule for the measure `w(x) dx` on `[0, X]` (in the
/// variable `t = sqrt(x)`, graded toward the origin), iterates
/// `a_k = <x pi_k, pi_k> / <pi_k, pi_k>` and
/// `b_k^2 = <pi_{k+1}, pi_{k+1}> / <pi_k, pi_k>` on monic polynomials, and
/// accumulates leading coefficients and values at zero. The result is rounded
/// to `f64`.
pub fn compute_recurrence(
    w: &Weight,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<RecurrenceTable> {
    ctx.validate(n_max)?;
    let m = w.degree();
    if n_max < m + 2 {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must be at least deg V + 2 = {}",
            m + 2
        )));
    }
    let digits = ctx.mantissa_bits as f64 * std::f64::consts::LOG10_2;
    let x_max = support_cutoff(w, n_max + 1, 2.0 * digits);

    let mut ep = EpCtx::new(ctx.mantissa_bits);
    let q = ctx.nodes_per_panel;
    let (ref_nodes, ref_weights) = gauss_legendre_ep(q, &ep);

    // panel boundaries in t, geometric grading of the first uniform panel
    let t_max = x_max.sqrt();
    let grade_levels = 40usize;
    let h = t_max / ctx.panel_count as f64;
    let mut t_breaks: Vec<f64> = Vec::new();
    t_breaks.push(0.0);
    for j in (0..grade_levels).rev() {
        t_breaks.push(h * 0.5f64.powi(j as i32 + 1));
    }
    for p in 1..=ctx.panel_count {
        t_breaks.push(h * p as f64);
    }

    // nodes, and total weights W_i = gl_w * (h/2) * 2 t * w(x)
    let alpha_ep = ep.from_f64(w.alpha);
    let vc: Vec<BigFloat> = w.v_coeffs.iter().map(|&c| ep.from_f64(c)).collect();
    let mut xs: Vec<BigFloat> = Vec::new();
    let mut ws: Vec<BigFloat> = Vec::new();
    for p in 0..t_breaks.len() - 1 {
        let c = ep.from_f64(0.5 * (t_breaks[p] + t_breaks[p + 1]));
        let half = ep.from_f64(0.5 * (t_breaks[p + 1] - t_breaks[p]));
        for i in 0..q {
            let t = ep.add(&c, &ep.mul(&half, &ref_nodes[i]));
            let x = ep.mul(&t, &t);
            // V(x) by Horner
            let mut v = vc[vc.len() - 1].clone();
            for cj in vc.iter().rev().skip(1) {
                v = ep.add(&ep.mul(&v, &x), cj);
            }
            let wexp = ep.exp(&v.neg());
            let xpow = ep.powf(&x, &alpha_ep);
            let wx = ep.mul(&wexp, &xpow);
            let two_t = ep.add(&t, &t);
            let wt = ep.mul(&ep.mul(&ref_weights[i], &half), &ep.mul(&two_t, &wx));
            xs.push(x);
            ws.push(wt);
        }
    }
    let n_nodes = xs.len();

    // Stieltjes iteration on monic polynomial values
    let mut pi_prev: Vec<BigFloat> = vec![ep.from_f64(0.0); n_nodes];
    let mut pi_cur: Vec<BigFloat> = vec![ep.from_f64(1.0); n_nodes];
    let mut pi0_prev = ep.from_f64(0.0);
    let mut pi0_cur = ep.from_f64(1.0);

    let dot = |ep: &EpCtx, f: &dyn Fn(usize) -> BigFloat| -> BigFloat {
        let mut s = ep.from_f64(0.0);
        for i in 0..n_nodes {
            s = ep.add(&s, &f(i));
        }
        s
    };

    let mut s_cur = dot(&ep, &|i| ws[i].clone());
    let ln_s0 = big_ln_abs(&s_cur);
    if !(ep.to_f64(&s_cur) > 0.0) {
        return Err(Error::PrecisionExhausted { degree: 0 });
    }

    let mut a = Vec::with_capacity(n_max + 1);
    let mut b = Vec::with_capacity(n_max + 1);
    let mut b2_ep: Vec<BigFloat> = Vec::new();
    let mut ln_norm = Vec::with_capacity(n_max + 2);
    ln_norm.push(big_ln_abs(&s_cur));
    let mut p_at_zero = Vec::with_capacity(n_max + 1);

    let loss_limit = 0.9 * ctx.mantissa_bits as f64 * std::f64::consts::LN_2;

    for k in 0..=n_max {
        let num = dot(&ep, &|i| {
            ep.mul(&ep.mul(&xs[i], &pi_cur[i]), &ep.mul(&pi_cur[i], &ws[i]))
        });
        let ak = ep.div(&num, &s_cur);
        a.push(ep.to_f64(&ak));
        p_at_zero.push((k, pi0_cur.clone()));

        // pi_{k+1} = (x - a_k) pi_k - b_{k-1}^2 pi_{k-1}
        let b2 = if k == 0 {
            ep.from_f64(0.0)
        } else {
            b2_ep[k - 1].clone()
        };
        let mut pi_next = Vec::with_capacity(n_nodes);
        for i in 0..n_nodes {
            let t1 = ep.mul(&ep.sub(&xs[i], &ak), &pi_cur[i]);
            let t2 = ep.mul(&b2, &pi_prev[i]);
            pi_next.push(ep.sub(&t1, &t2));
        }
        let pi0_next = ep.sub(&ep.mul(&ak.neg(), &pi0_cur), &ep.mul(&b2, &pi0_prev));
        let s_next = dot(&ep, &|i| ep.mul(&ep.mul(&pi_next[i], &pi_next[i]), &ws[i]));

        if !(ep.to_f64(&ep.div(&s_next, &s_cur)) > 0.0) {
            return Err(Error::PrecisionExhausted { degree: k + 1 });
        }
        // relative loss guard: norms decaying more than ~90% of the mantissa
        // below the geometric trend signal breakdown
        if big_ln_abs(&s_next) < ln_s0 + 2.0 * (k as f64 + 1.0) * (-loss_limit) {
            return Err(Error::PrecisionExhausted { degree: k + 1 });
        }

        let b2k = ep.div(&s_next, &s_cur);
        b.push(ep.to_f64(&ep.sqrt(&b2k)));
        b2_ep.push(b2k);
        ln_norm.push(big_ln_abs(&s_next));

        pi_prev = pi_cur;
        pi_cur = pi_next;
        pi0_prev = pi0_cur;
        pi0_cur = pi0_next;
        s_cur = s_next;
    }

    // gamma_k = <pi_k, pi_k>^{-1/2}; p_k(0) = gamma_k * pi_k(0)
    let mut gamma = Vec::with_capacity(n_max + 1);
    let mut ln_gamma = Vec::with_capacity(n_max + 1);
    let mut p0 = Vec::with_capacity(n_max + 1);
    for (k, pi0) in p_at_zero {
        let lg = -0.5 * ln_norm[k];
        ln_gamma.push(lg);
        gamma.push(lg.exp());
        let lp = big_ln_abs(&pi0) + lg;
        let sign = if ep.to_f64(&pi0) >= 0.0 { 1.0 } else { -1.0 };
        p0.push(sign * lp.exp());
    }

    Ok(RecurrenceTable {
        n_max,
        a,
        b,
        gamma,
        ln_gamma,
        p_at_zero: p0,
        x_support: x_max,
    })
}

impl RecurrenceTable {
    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.n_max,
            });
        }
        Ok(())
    }

    /// `phi_k(x)` by forward recurrence on the phi values directly; the
    /// `sqrt(w)` factor is absorbed at `k = 0` so bare polynomial overflow
    /// never occurs.
    pub fn phi(&self, w: &Weight, k: usize, x: f64) -> Result<f64> {
        self.check_k(k)?;
        let mut buf = vec![0.0; k + 1];
        self.phi_all(w, k, x, &mut buf)?;
        Ok(buf[k])
    }

    /// All of `phi_0(x) .. phi_kmax(x)` in one recurrence pass.
    pub fn phi_all(&self, w: &Weight, kmax: usize, x: f64, out: &mut [f64]) -> Result<()> {
        self.check_k(kmax)?;
        if x < 0.0 {
            return Err(Error::Domain(format!("phi evaluated at x = {x} < 0")));
        }
        assert!(out.len() >= kmax + 1);
        let sw = w.eval_sqrt(x);
        out[0] = self.gamma[0] * sw;
        if kmax == 0 {
            return Ok(());
        }
        out[1] = (x - self.a[0]) * out[0] / self.b[0];
        for k in 1..kmax {
            out[k + 1] = ((x - self.a[k]) * out[k] - self.b[k - 1] * out[k - 1]) / self.b[k];
        }
        Ok(())
    }

    /// `phi_k'(x)` for `x > 0`: the polynomial-derivative recurrence plus the
    /// logarithmic derivative of `sqrt(w)`.
    pub fn phi_deriv(&self, w: &Weight, k: usize, x: f64) -> Result<f64> {
        let (phi, dphi) = self.phi_and_deriv_all(w, k, x)?;
        let _ = phi;
        Ok(dphi[k])
    }

    /// `(phi_0..phi_k, phi_0'..phi_k')` at `x > 0`.
    pub fn phi_and_deriv_all(
        &self,
        w: &Weight,
        kmax: usize,
        x: f64,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_k(kmax)?;
        if x <= 0.0 {
            return Err(Error::Domain("phi derivative needs x > 0".into()));
        }
        let mut phi = vec![0.0; kmax + 1];
        self.phi_all(w, kmax, x, &mut phi)?;
        // v_k = p_k' sqrt(w):  x v_k = b_k v_{k+1} + a_k v_k + b_{k-1} v_{k-1} - phi_k
        let mut v = vec![0.0; kmax + 1];
        if kmax >= 1 {
            v[1] = phi[0] / self.b[0];
            for k in 1..kmax {
                v[k + 1] = ((x - self.a[k]) * v[k] + phi[k] - self.b[k - 1] * v[k - 1]) / self.b[k];
            }
        }
        let logw_half = 0.5 * w.alpha / x - 0.5 * w.eval_v_prime(x);
        let dphi: Vec<f64> = (0..=kmax).map(|k| v[k] + logw_half * phi[k]).collect();
        Ok((phi, dphi))
    }

    /// Christoffel–Darboux kernel `K_n(x, y) = sum_{k < n} phi_k(x) phi_k(y)`
    /// by direct summation (no removable singularity on the diagonal).
    pub fn cd_kernel(&self, w: &Weight, n: usize, x: f64, y: f64) -> Result<f64> {
        if n == 0 || n > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.n_max,
            });
        }
        let mut fx = vec![0.0; n];
        let mut fy = vec![0.0; n];
        self.phi_all(w, n - 1, x, &mut fx)?;
        self.phi_all(w, n - 1, y, &mut fy)?;
        Ok(fx.iter().zip(&fy).map(|(a, b)| a * b).sum())
    }

    /// Two-term Christoffel–Darboux ratio form, kept as an internal
    /// cross-check of the direct summation (x != y).
    pub fn cd_kernel_ratio(&self, w: &Weight, n: usize, x: f64, y: f64) -> Result<f64> {
        if n >= self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.n_max - 1,
            });
        }
        let mut fx = vec![0.0; n + 1];
        let mut fy = vec![0.0; n + 1];
        self.phi_all(w, n, x, &mut fx)?;
        self.phi_all(w, n, y, &mut fy)?;
        Ok(self.b[n - 1] * (fx[n] * fy[n - 1] - fx[n - 1] * fy[n]) / (x - y))
    }

    /// Zeros of `p_k` as eigenvalues of the k-by-k Jacobi matrix.
    pub fn jacobi_zeros(&self, k: usize) -> Result<Vec<f64>> {
        self.check_k(k)?;
        let mut jm = nalgebra::DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            jm[(i, i)] = self.a[i];
            if i + 1 < k {
                jm[(i, i + 1)] = self.b[i];
                jm[(i + 1, i)] = self.b[i];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(jm);
        let mut z: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        z.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(z)
    }
}

/// `int_0^infty p_j(y) w(y) / y dy`, the (rescaled real) Cauchy transform of
/// `p_j w` at the origin. Needs `alpha > 0` so the integrand is `y^{alpha-1}`
/// at the endpoint; verified by doubling the grid resolution.
pub fn cauchy_at_zero(table: &RecurrenceTable, w: &Weight, j: usize) -> Result<f64> {
    if j > table.n_max {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: table.n_max,
        });
    }
    let eval = |panels: usize| -> f64 {
        let grid = QuadGrid::new(table.x_support, panels, 16, 40);
        let mut buf = vec![0.0; j + 1];
        let vals: Vec<f64> = grid
            .x
            .iter()
            .map(|&x| {
                table.phi_all(w, j, x, &mut buf).expect("x >= 0 on grid");
                buf[j] * w.eval_sqrt(x) / x
            })
            .collect();
        grid.integrate(&vals)
    };
    let base = (4 * (j + 2)).max(64);
    let v1 = eval(base);
    let v2 = eval(2 * base);
    if (v1 - v2).abs() > 1e-8 * (1.0 + v2.abs()) {
        return Err(Error::QuadratureNonConvergence(format!(
            "cauchy transform at 0 for j = {j}: {v1:.15e} vs {v2:.15e}"
        )));
    }
    Ok(v2)
}

/// Tables of `phi_0 .. phi_kmax` (values and cumulative integrals) on a grid.
pub struct PhiTables {
    pub grid: QuadGrid,
    pub phi: Vec<FuncTable>,
}

/// Tabulate the first `kmax + 1` orthonormal functions on `grid` with one
/// recurrence pass per node.
pub fn tabulate_phi(
    w: &Weight,
    table: &RecurrenceTable,
    kmax: usize,
    grid: QuadGrid,
) -> Result<PhiTables> {
    if kmax > table.n_max {
        return Err(Error::IndexOutOfRange {
            index: kmax,
            max: table.n_max,
        });
    }
    let n_nodes = grid.len();
    let mut vals: Vec<Vec<f64>> = vec![vec![0.0; n_nodes]; kmax + 1];
    let mut buf = vec![0.0; kmax + 1];
    for (i, &x) in grid.x.iter().enumerate() {
        table.phi_all(w, kmax, x, &mut buf)?;
        for k in 0..=kmax {
            vals[k][i] = buf[k];
        }
    }
    let phi = vals.into_iter().map(|v| FuncTable::new(&grid, v)).collect();
    Ok(PhiTables { grid, phi })
}
