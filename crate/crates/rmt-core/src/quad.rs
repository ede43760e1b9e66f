//! Gauss–Legendre quadrature: single rules, composite grids on `[0, x_max]`
//! with the substitution `x = t^2`, and spectral partial integration within
//! panels.
//!
//! The `x = t^2` substitution turns the `x^alpha` endpoint behavior of
//! Laguerre-type integrands into `t^{2 alpha + 1}`, which a geometrically
//! graded first panel then resolves to full accuracy. Partial integrals inside
//! a panel are evaluated by re-expanding nodal data in Legendre polynomials
//! and integrating the expansion term by term, so cumulative integrals retain
//! spectral accuracy at arbitrary points, not just at panel boundaries.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre polynomial with Chebyshev-style initial guesses.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..(q + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(q, x);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
        let (_, dp) = legendre_pair(q, 0.0);
        weights[q / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

/// `(P_q(x), P_q'(x))` by the three-term recurrence.
fn legendre_pair(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if q == 0 {
        return (1.0, 0.0);
    }
    for k in 1..q {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Value of `P_l(x)` for l = 0..lmax, written into `out`.
fn legendre_all(lmax: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if lmax == 0 {
        return;
    }
    out[1] = x;
    for k in 1..lmax {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Fixed-order Gauss–Legendre integration of `f` over `[a, b]`.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(q);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        s += w * f(c + h * x);
    }
    s * h
}

/// Composite Gauss–Legendre integration over `[a, b]` with `panels` equal panels.
pub fn integrate_composite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    q: usize,
    panels: usize,
) -> f64 {
    let (nodes, weights) = gauss_legendre(q);
    let mut s = 0.0;
    for p in 0..panels {
        let pa = a + (b - a) * p as f64 / panels as f64;
        let pb = a + (b - a) * (p + 1) as f64 / panels as f64;
        let c = 0.5 * (pa + pb);
        let h = 0.5 * (pb - pa);
        let mut sp = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            sp += w * f(c + h * x);
        }
        s += sp * h;
    }
    s
}

/// Panel-doubling integration that stops when two successive refinements agree
/// to `rel_tol`. Returns an error when the requested tolerance is not reached.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let q = 16;
    let mut panels = 1usize;
    let mut prev = integrate_composite(&f, a, b, q, panels);
    for _ in 0..14 {
        panels *= 2;
        let cur = integrate_composite(&f, a, b, q, panels);
        if (cur - prev).abs() <= rel_tol * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence(format!(
        "composite rule on [{a}, {b}] did not settle at rel_tol {rel_tol}"
    )))
}

/// Composite Gauss–Legendre grid on `[0, x_max]` built in the variable
/// `t = sqrt(x)`, geometrically graded toward the origin.
///
/// All stored weights are for integration in `x` (the `2t` Jacobian is folded
/// in), so `integrate` approximates `int_0^{x_max} f(x) dx` from nodal values.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    /// Panel order.
    pub q: usize,
    /// Panel boundaries in t, ascending, length = panels + 1.
    t_breaks: Vec<f64>,
    /// Legendre coefficient matrix: coef[l][i] maps nodal values to the
    /// degree-l Legendre coefficient on the reference panel.
    lcoef: Vec<Vec<f64>>,
    /// Nodes in x = t^2, ascending, length = panels * q.
    pub x: Vec<f64>,
    /// Nodes in t.
    pub t: Vec<f64>,
    /// dx-integration weights at the nodes.
    pub w: Vec<f64>,
}

impl QuadGrid {
    /// `base_panels` uniform panels in t on `[0, sqrt(x_max)]`; the first is
    /// split into `grade_levels` geometric subpanels (ratio 2) toward 0.
    pub fn new(x_max: f64, base_panels: usize, q: usize, grade_levels: usize) -> Self {
        assert!(x_max > 0.0 && base_panels >= 1 && q >= 2);
        let t_max = x_max.sqrt();
        let h = t_max / base_panels as f64;
        let mut t_breaks = Vec::with_capacity(base_panels + grade_levels + 1);
        t_breaks.push(0.0);
        for j in (0..grade_levels).rev() {
            t_breaks.push(h * 0.5f64.powi(j as i32 + 1));
        }
        for p in 1..=base_panels {
            t_breaks.push(h * p as f64);
        }
        let (ref_nodes, ref_weights) = gauss_legendre(q);

        // Legendre analysis matrix on the reference panel.
        let mut lcoef = vec![vec![0.0; q]; q];
        let mut pl = vec![0.0; q];
        for (i, &tau) in ref_nodes.iter().enumerate() {
            legendre_all(q - 1, tau, &mut pl);
            for l in 0..q {
                lcoef[l][i] = (2.0 * l as f64 + 1.0) / 2.0 * ref_weights[i] * pl[l];
            }
        }

        let panels = t_breaks.len() - 1;
        let mut x = Vec::with_capacity(panels * q);
        let mut t = Vec::with_capacity(panels * q);
        let mut w = Vec::with_capacity(panels * q);
        for p in 0..panels {
            let c = 0.5 * (t_breaks[p] + t_breaks[p + 1]);
            let hh = 0.5 * (t_breaks[p + 1] - t_breaks[p]);
            for (tau, wq) in ref_nodes.iter().zip(&ref_weights) {
                let tj = c + hh * tau;
                t.push(tj);
                x.push(tj * tj);
                w.push(wq * hh * 2.0 * tj);
            }
        }
        QuadGrid {
            q,
            t_breaks,
            lcoef,
            x,
            t,
            w,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.t_breaks.len() - 1
    }

    pub fn x_max(&self) -> f64 {
        let t = *self.t_breaks.last().unwrap();
        t * t
    }

    /// Tabulate `f` at the grid nodes.
    pub fn tabulate<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.x.iter().map(|&xi| f(xi)).collect()
    }

    /// `int_0^{x_max} f dx` from nodal values.
    pub fn integrate(&self, vals: &[f64]) -> f64 {
        assert_eq!(vals.len(), self.len());
        vals.iter().zip(&self.w).map(|(v, w)| v * w).sum()
    }

    /// `<f, g> = int f g dx` from two nodal tables.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        if f.len() != self.len() || g.len() != self.len() {
            return Err(Error::GridMismatch(format!(
                "table lengths {} / {} vs grid {}",
                f.len(),
                g.len(),
                self.len()
            )));
        }
        Ok(f.iter()
            .zip(g)
            .zip(&self.w)
            .map(|((a, b), w)| a * b * w)
            .sum())
    }

    /// Cumulative-integral table of `f dx` from nodal values.
    pub fn cumulative(&self, vals: &[f64]) -> CumTable {
        assert_eq!(vals.len(), self.len());
        let panels = self.panels();
        let q = self.q;
        // dt-integrand g(t) = f(x(t)) * 2t at the nodes
        let mut coeffs = vec![0.0; panels * q];
        let mut panel_start = Vec::with_capacity(panels + 1);
        panel_start.push(0.0);
        let mut acc = 0.0;
        for p in 0..panels {
            let hh = 0.5 * (self.t_breaks[p + 1] - self.t_breaks[p]);
            for l in 0..q {
                let mut c = 0.0;
                for i in 0..q {
                    let g = vals[p * q + i] * 2.0 * self.t[p * q + i];
                    c += self.lcoef[l][i] * g;
                }
                coeffs[p * q + l] = c * hh;
            }
            // full-panel integral = 2 * c_0
            acc += 2.0 * coeffs[p * q];
            panel_start.push(acc);
        }
        CumTable {
            coeffs,
            panel_start,
        }
    }

    /// Locate the panel containing `t`, clamped to the grid.
    fn panel_of_t(&self, t: f64) -> usize {
        let idx = self.t_breaks.partition_point(|&b| b <= t);
        idx.saturating_sub(1).min(self.panels() - 1)
    }

    /// Evaluate the cumulative integral `int_0^x f dx` at an arbitrary point.
    pub fn cum_at(&self, table: &CumTable, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let t = x.sqrt();
        let tmax = *self.t_breaks.last().unwrap();
        if t >= tmax {
            return *table.panel_start.last().unwrap();
        }
        let p = self.panel_of_t(t);
        let a = self.t_breaks[p];
        let b = self.t_breaks[p + 1];
        let tau = (2.0 * t - a - b) / (b - a);
        let q = self.q;
        // antiderivatives of Legendre polynomials from the panel start
        let mut pl = vec![0.0; q + 1];
        legendre_all(q, tau, &mut pl);
        let mut s = table.panel_start[p] + table.coeffs[p * q] * (tau + 1.0);
        for l in 1..q {
            let ql = (pl[l + 1] - pl[l - 1]) / (2.0 * l as f64 + 1.0);
            s += table.coeffs[p * q + l] * ql;
        }
        s
    }
}

/// Per-panel Legendre expansion of a tabulated integrand plus running totals,
/// produced by [`QuadGrid::cumulative`].
#[derive(Debug, Clone)]
pub struct CumTable {
    coeffs: Vec<f64>,
    panel_start: Vec<f64>,
}

impl CumTable {
    pub fn total(&self) -> f64 {
        *self.panel_start.last().unwrap()
    }
}

/// A tabulated function together with its cumulative integral on a shared grid.
#[derive(Debug, Clone)]
pub struct FuncTable {
    pub values: Vec<f64>,
    pub cum: CumTable,
}

impl FuncTable {
    pub fn new(grid: &QuadGrid, values: Vec<f64>) -> Self {
        let cum = grid.cumulative(&values);
        FuncTable { values, cum }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &QuadGrid, f: F) -> Self {
        Self::new(grid, grid.tabulate(f))
    }

    /// `int_0^infty f dx` (over the truncated support).
    pub fn total(&self) -> f64 {
        self.cum.total()
    }

    /// `int_0^x f`.
    pub fn int0(&self, grid: &QuadGrid, x: f64) -> f64 {
        grid.cum_at(&self.cum, x)
    }

    /// `(eps f)(x) = 1/2 int sgn(x - y) f(y) dy = int_0^x f - 1/2 int_0^infty f`.
    pub fn eps(&self, grid: &QuadGrid, x: f64) -> f64 {
        self.int0(grid, x) - 0.5 * self.total()
    }
}
