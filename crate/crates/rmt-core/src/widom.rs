//! The finite-rank correction system for the orthogonal and symplectic
//! kernels at even `n`: the boundary functions `psi_1`, `psi_2`, the bases
//! `Phi_1 = (phi_{n-1}, ..., phi_{n-m+1}, psi_1)` and
//! `Phi_2 = (phi_n, ..., phi_{n+m-2}, psi_2)`, the matrices `A`, `B`, `C`,
//! `G_11`, `Ghat_11`, and the scalar kernels
//!
//! `S_{n/2,4}(x,y)  = K_n(x,y) - Phi_2(x) A_21 eps Phi_1(y)^t - Phi_2(x) G_11 eps Phi_2(y)^t`
//! `S_{n,1}(x,y)    = K_n(x,y) - Phi_1(x) A_12 eps Phi_2(y)^t - Phi_1(x) Ghat_11 eps Phi_1(y)^t`
//!
//! together with their epsilon-transforms, y-derivatives, and the assembled
//! 2x2 matrix kernels with lambda-conjugation.

use crate::equilibrium::{equilibrium, EquilibriumData};
use crate::error::{Error, Result};
use crate::limits::gamma;
use crate::orthopoly::RecurrenceTable;
use crate::quad::{FuncTable, QuadGrid};
use crate::weights::{Beta, Weight};
use nalgebra::DMatrix;

/// Grid controls for the inner-product / epsilon-table stage.
#[derive(Debug, Clone)]
pub struct QuadConfig {
    /// Base panel count; `None` picks `max(48, ceil(1.6 (n + m)))`.
    pub base_panels: Option<usize>,
    pub nodes_per_panel: usize,
    pub grade_levels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            base_panels: None,
            nodes_per_panel: 16,
            grade_levels: 30,
        }
    }
}

impl QuadConfig {
    /// Same layout with the panel count scaled (for stability probes).
    pub fn refined(&self, n: usize, m: usize, factor: usize) -> Self {
        QuadConfig {
            base_panels: Some(default_panels(n, m, self) * factor),
            nodes_per_panel: self.nodes_per_panel,
            grade_levels: self.grade_levels,
        }
    }
}

fn default_panels(n: usize, m: usize, cfg: &QuadConfig) -> usize {
    cfg.base_panels
        .unwrap_or_else(|| (((n + m) as f64 * 1.6).ceil() as usize).max(48))
}

/// The assembled system at even `n`.
pub struct WidomSystem {
    pub n: usize,
    pub m: usize,
    pub weight: Weight,
    pub eq: EquilibriumData,
    pub table: RecurrenceTable,
    pub d_n: f64,
    /// Cauchy-transform constants `int p_j w / y dy` at `j = n-1, n`.
    pub cauchy_nm1: f64,
    pub cauchy_n: f64,
    pub a21: DMatrix<f64>,
    pub a12: DMatrix<f64>,
    /// Skew-symmetrized `B = <eps Phi^t, Phi>` with its raw asymmetry defect.
    pub b: DMatrix<f64>,
    pub b_asymmetry: f64,
    pub c: DMatrix<f64>,
    pub g11: DMatrix<f64>,
    pub ghat11: DMatrix<f64>,
    /// Relative disagreement of the two `Ghat_11` routes.
    pub ghat11_defect: f64,
    pub cond_c11: f64,
    pub cond_chat22: f64,
    pub eps_phi1_inf: Vec<f64>,
    pub eps_phi2_inf: Vec<f64>,
    grid: QuadGrid,
    /// Tables for `phi_0 .. phi_{kmax}`, then `psi_1`, `psi_2`.
    tabs: Vec<FuncTable>,
    kmax: usize,
    psi1_fac: f64,
    psi2_fac: f64,
}

/// Extent of the integration domain: scaled position `u > 1` where the
/// exponential decay of the top-index function has burned `target` nats.
fn support_extent(eq: &EquilibriumData, target: f64) -> f64 {
    let n = eq.n as f64;
    let mut lo = 1.0;
    let mut hi = 2.0;
    while 0.5 * n * eq.exp_mass(hi) < target {
        hi *= 2.0;
        if hi > 1e6 {
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * n * eq.exp_mass(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Build the system. Requires `n` even, `m + 2 <= n`, `alpha > 0`, and a
/// recurrence table reaching degree `n + max(m, 2) - 2`.
pub fn build(
    w: &Weight,
    n: usize,
    table: &RecurrenceTable,
    eq: &EquilibriumData,
    cfg: &QuadConfig,
) -> Result<WidomSystem> {
    let m = w.degree();
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("n must be even, got {n}")));
    }
    if n < m + 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= m + 2, got n = {n}, m = {m}"
        )));
    }
    if w.alpha <= 0.0 {
        return Err(Error::InvalidParameter(
            "the beta = 1, 4 formalism needs alpha > 0".into(),
        ));
    }
    if eq.n != n {
        return Err(Error::InvalidParameter(
            "equilibrium data built at a different n".into(),
        ));
    }
    let kmax = n + m.max(2) - 2;
    if table.n_max < kmax + 1 {
        return Err(Error::IndexOutOfRange {
            index: kmax + 1,
            max: table.n_max,
        });
    }

    // negative constant d_n = -Gamma(alpha) beta_n^{a/2} / (ctilde^{a/2} n^a e^{V(0)/2})
    let a = w.alpha;
    let nf = n as f64;
    let d_n = -gamma(a) * eq.beta_n.powf(0.5 * a)
        / (eq.tilde_c_n.powf(0.5 * a) * nf.powf(a) * (0.5 * w.eval_v(0.0)).exp());
    if !d_n.is_finite() || d_n == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "d_n not representable for alpha = {a} at n = {n}"
        )));
    }

    // integration domain: past the soft edge of the top index until the
    // exponential decay has burned ~40 nats
    let eq_top = equilibrium(w, kmax + 1)?;
    let x_max = eq_top.beta_n * support_extent(&eq_top, 40.0) * 1.02;
    let panels = default_panels(n, m, cfg);
    let grid = QuadGrid::new(x_max, panels, cfg.nodes_per_panel, cfg.grade_levels);

    // one recurrence pass per node fills phi_0..kmax, then psi_1, psi_2
    let n_nodes = grid.len();
    let mut vals: Vec<Vec<f64>> = vec![vec![0.0; n_nodes]; kmax + 3];
    let mut sqrtw_over_x = vec![0.0; n_nodes];
    let mut vprime = vec![0.0; n_nodes];
    let psi1_fac = a * d_n * (eq.beta_n / nf).sqrt();
    let psi2_fac = (eq.beta_n / nf).sqrt() / d_n;
    // Cauchy constants from the same grid
    let mut buf = vec![0.0; kmax + 1];
    for (i, &x) in grid.x.iter().enumerate() {
        table.phi_all(w, kmax, x, &mut buf)?;
        for k in 0..=kmax {
            vals[k][i] = buf[k];
        }
        sqrtw_over_x[i] = w.eval_sqrt(x) / x;
        vprime[i] = w.eval_v_prime(x);
    }
    let cauchy_nm1 = grid.inner(&vals[n - 1], &sqrtw_over_x)?;
    let cauchy_n = grid.inner(&vals[n], &sqrtw_over_x)?;
    let b_nm1 = table.b[n - 1];
    for i in 0..n_nodes {
        let x = grid.x[i];
        // psi_tilde_1 by the summed form (no 1/x cancellation)
        let mut s = 0.0;
        for k in 0..n {
            s += table.p_at_zero[k] * vals[k][i];
        }
        vals[kmax + 1][i] = psi1_fac * s;
        vals[kmax + 2][i] =
            psi2_fac * b_nm1 * (cauchy_nm1 * vals[n][i] - cauchy_n * vals[n - 1][i]) / x;
    }
    let tabs: Vec<FuncTable> = vals.into_iter().map(|v| FuncTable::new(&grid, v)).collect();

    let sys_indices = SysIndices { n, m, kmax };

    // A_21 = -(n/beta_n) [[Q_n, 0], [0, 1/2]]
    let mut a21 = DMatrix::<f64>::zeros(m, m);
    for i in 1..m {
        for j in 1..m {
            // Q_n(i,j) = (beta_n / 2n) <V' phi_{n-j}, phi_{n+i-1}>
            let fa: Vec<f64> = tabs[n - j]
                .values
                .iter()
                .zip(&vprime)
                .map(|(p, v)| p * v)
                .collect();
            let ip = grid.inner(&fa, &tabs[n + i - 1].values)?;
            a21[(i - 1, j - 1)] = -(nf / eq.beta_n) * eq.beta_n / (2.0 * nf) * ip;
        }
    }
    a21[(m - 1, m - 1)] = -nf / (2.0 * eq.beta_n);
    let a12 = a21.transpose();

    // B(i, j) = <eps Phi_i, Phi_j> over the concatenated basis
    let mut eps_tab: Vec<Vec<f64>> = Vec::with_capacity(2 * m);
    let mut val_tab: Vec<&[f64]> = Vec::with_capacity(2 * m);
    for idx in sys_indices.all() {
        let t = &tabs[idx];
        eps_tab.push(grid.x.iter().map(|&x| t.eps(&grid, x)).collect());
        val_tab.push(&t.values);
    }
    let mut b_raw = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..2 * m {
        for j in 0..2 * m {
            b_raw[(i, j)] = grid.inner(&eps_tab[i], val_tab[j])?;
        }
    }
    // entries are O(beta_n / n); normalize the defect by that natural unit
    // so the m = 1 case (where B itself vanishes to leading order) stays sane
    let scale = b_raw
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()))
        .max(eq.beta_n / nf);
    let asym = (&b_raw + b_raw.transpose())
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()));
    let b_asymmetry = asym / scale;
    if b_asymmetry > 1e-5 {
        return Err(Error::Validation(format!(
            "B matrix asymmetry {b_asymmetry:.3e} exceeds 1e-5 (quadrature failure)"
        )));
    }
    let b = (&b_raw - b_raw.transpose()) * 0.5;

    // C = [[I, 0], [0, 0]] + B A
    let mut a_full = DMatrix::<f64>::zeros(2 * m, 2 * m);
    a_full.view_mut((0, m), (m, m)).copy_from(&a12);
    a_full.view_mut((m, 0), (m, m)).copy_from(&a21);
    let mut c = &b * &a_full;
    for i in 0..m {
        c[(i, i)] += 1.0;
    }

    let c11 = c.view((0, 0), (m, m)).into_owned();
    let c12 = c.view((0, m), (m, m)).into_owned();
    let c21 = c.view((m, 0), (m, m)).into_owned();
    let c22 = c.view((m, m), (m, m)).into_owned();
    let chat22 = DMatrix::<f64>::identity(m, m) - &c22;

    let norm1 = |a: &DMatrix<f64>| -> f64 {
        (0..a.ncols())
            .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let c11_inv = c11.clone().try_inverse().ok_or(Error::Singular {
        what: "C11".into(),
        cond: f64::INFINITY,
        limit: 1e8,
    })?;
    let cond_c11 = norm1(&c11) * norm1(&c11_inv);
    if cond_c11 > 1e8 {
        return Err(Error::Singular {
            what: "C11".into(),
            cond: cond_c11,
            limit: 1e8,
        });
    }
    let chat22_inv = chat22.clone().try_inverse().ok_or(Error::Singular {
        what: "I - C22".into(),
        cond: f64::INFINITY,
        limit: 1e8,
    })?;
    let cond_chat22 = norm1(&chat22) * norm1(&chat22_inv);
    if cond_chat22 > 1e8 {
        return Err(Error::Singular {
            what: "I - C22".into(),
            cond: cond_chat22,
            limit: 1e8,
        });
    }

    let g11 = &a21 * &c11_inv * &c12;
    let b22 = b.view((m, m), (m, m)).into_owned();
    let ghat11 = -(&a12) * &chat22_inv * &c21;
    let ghat11_alt = -(&a12) * &b22 * chat22_inv.transpose() * &a21;
    let gscale = ghat11.iter().fold(0.0f64, |acc, &e| acc.max(e.abs()));
    let ghat11_defect = if gscale > 0.0 {
        (&ghat11 - &ghat11_alt)
            .iter()
            .fold(0.0f64, |acc, &e| acc.max(e.abs()))
            / gscale
    } else {
        (&ghat11 - &ghat11_alt)
            .iter()
            .fold(0.0f64, |acc, &e| acc.max(e.abs()))
    };

    let eps_phi1_inf: Vec<f64> = sys_indices
        .phi1()
        .map(|idx| 0.5 * tabs[idx].total())
        .collect();
    let eps_phi2_inf: Vec<f64> = sys_indices
        .phi2()
        .map(|idx| 0.5 * tabs[idx].total())
        .collect();

    Ok(WidomSystem {
        n,
        m,
        weight: w.clone(),
        eq: eq.clone(),
        table: table.clone(),
        d_n,
        cauchy_nm1,
        cauchy_n,
        a21,
        a12,
        b,
        b_asymmetry,
        c,
        g11,
        ghat11,
        ghat11_defect,
        cond_c11,
        cond_chat22,
        eps_phi1_inf,
        eps_phi2_inf,
        grid,
        tabs,
        kmax,
        psi1_fac,
        psi2_fac,
    })
}

/// Table indices of the two bases inside the shared table vector.
struct SysIndices {
    n: usize,
    m: usize,
    kmax: usize,
}

impl SysIndices {
    /// `Phi_1 = (phi_{n-1}, phi_{n-2}, ..., phi_{n-m+1}, psi_1)`.
    fn phi1(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.m)
            .map(move |i| self.n - i)
            .chain(std::iter::once(self.kmax + 1))
    }

    /// `Phi_2 = (phi_n, phi_{n+1}, ..., phi_{n+m-2}, psi_2)`.
    fn phi2(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.m - 1)
            .map(move |j| self.n + j)
            .chain(std::iter::once(self.kmax + 2))
    }

    fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.phi1().chain(self.phi2())
    }
}

impl WidomSystem {
    fn indices(&self) -> SysIndices {
        SysIndices {
            n: self.n,
            m: self.m,
            kmax: self.kmax,
        }
    }

    pub fn grid(&self) -> &QuadGrid {
        &self.grid
    }

    /// `psi_tilde_1(x)` by the summed form (valid at all `x >= 0`).
    pub fn psi1_tilde(&self, x: f64) -> Result<f64> {
        let mut buf = vec![0.0; self.n];
        self.table.phi_all(&self.weight, self.n - 1, x, &mut buf)?;
        Ok((0..self.n).map(|k| self.table.p_at_zero[k] * buf[k]).sum())
    }

    /// `psi_tilde_2(x)` by the Cauchy-transform form; needs `x > 0`.
    pub fn psi2_tilde(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain("psi_tilde_2 needs x > 0".into()));
        }
        let mut buf = vec![0.0; self.n + 1];
        self.table.phi_all(&self.weight, self.n, x, &mut buf)?;
        Ok(self.table.b[self.n - 1]
            * (self.cauchy_nm1 * buf[self.n] - self.cauchy_n * buf[self.n - 1])
            / x)
    }

    pub fn psi1(&self, x: f64) -> Result<f64> {
        Ok(self.psi1_fac * self.psi1_tilde(x)?)
    }

    pub fn psi2(&self, x: f64) -> Result<f64> {
        Ok(self.psi2_fac * self.psi2_tilde(x)?)
    }

    /// Values of the first basis at `x`.
    pub fn phi1_at(&self, x: f64) -> Result<Vec<f64>> {
        let mut buf = vec![0.0; self.n];
        self.table.phi_all(&self.weight, self.n - 1, x, &mut buf)?;
        let mut out: Vec<f64> = (1..self.m).map(|i| buf[self.n - i]).collect();
        out.push(
            self.psi1_fac
                * (0..self.n)
                    .map(|k| self.table.p_at_zero[k] * buf[k])
                    .sum::<f64>(),
        );
        Ok(out)
    }

    /// Values of the second basis at `x`.
    pub fn phi2_at(&self, x: f64) -> Result<Vec<f64>> {
        let mut buf = vec![0.0; self.n + self.m.max(2) - 1];
        self.table
            .phi_all(&self.weight, self.n + self.m.max(2) - 2, x, &mut buf)?;
        let mut out: Vec<f64> = (0..self.m - 1).map(|j| buf[self.n + j]).collect();
        if x <= 0.0 {
            return Err(Error::Domain(
                "Phi_2 contains psi_2, which needs x > 0".into(),
            ));
        }
        out.push(
            self.psi2_fac
                * self.table.b[self.n - 1]
                * (self.cauchy_nm1 * buf[self.n] - self.cauchy_n * buf[self.n - 1])
                / x,
        );
        Ok(out)
    }

    /// Epsilon transforms of the bases at `y`.
    pub fn eps_phi1_at(&self, y: f64) -> Vec<f64> {
        self.indices()
            .phi1()
            .map(|idx| self.tabs[idx].eps(&self.grid, y))
            .collect()
    }

    pub fn eps_phi2_at(&self, y: f64) -> Vec<f64> {
        self.indices()
            .phi2()
            .map(|idx| self.tabs[idx].eps(&self.grid, y))
            .collect()
    }

    /// `int_0^y` of the bases (hard-edge route of the rewrite identities).
    pub fn int0_phi1_at(&self, y: f64) -> Vec<f64> {
        self.indices()
            .phi1()
            .map(|idx| self.tabs[idx].int0(&self.grid, y))
            .collect()
    }

    pub fn int0_phi2_at(&self, y: f64) -> Vec<f64> {
        self.indices()
            .phi2()
            .map(|idx| self.tabs[idx].int0(&self.grid, y))
            .collect()
    }

    /// Christoffel–Darboux part `K_n(x, y)`.
    pub fn cd(&self, x: f64, y: f64) -> Result<f64> {
        self.table.cd_kernel(&self.weight, self.n, x, y)
    }

    /// `eps_x K_n(x, y) = sum_{k<n} (eps phi_k)(x) phi_k(y)`.
    fn eps_cd(&self, x: f64, y: f64) -> Result<f64> {
        let mut buf = vec![0.0; self.n];
        self.table.phi_all(&self.weight, self.n - 1, y, &mut buf)?;
        let mut s = 0.0;
        for k in 0..self.n {
            s += self.tabs[k].eps(&self.grid, x) * buf[k];
        }
        Ok(s)
    }

    /// `d/dy K_n(x, y)`.
    fn cd_dy(&self, x: f64, y: f64) -> Result<f64> {
        let mut bx = vec![0.0; self.n];
        self.table.phi_all(&self.weight, self.n - 1, x, &mut bx)?;
        let (_, dphi) = self.table.phi_and_deriv_all(&self.weight, self.n - 1, y)?;
        Ok((0..self.n).map(|k| bx[k] * dphi[k]).sum())
    }

    fn quad_form(u: &[f64], mat: &DMatrix<f64>, v: &[f64]) -> f64 {
        let m = u.len();
        let mut s = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                row += mat[(i, j)] * v[j];
            }
            s += u[i] * row;
        }
        s
    }

    /// Scalar kernel `S_{n/2,4}(x, y)`.
    pub fn s4(&self, x: f64, y: f64) -> Result<f64> {
        let p2 = self.phi2_at(x)?;
        let e1 = self.eps_phi1_at(y);
        let e2 = self.eps_phi2_at(y);
        Ok(self.cd(x, y)?
            - Self::quad_form(&p2, &self.a21, &e1)
            - Self::quad_form(&p2, &self.g11, &e2))
    }

    /// Scalar kernel `S_{n,1}(x, y)`.
    pub fn s1(&self, x: f64, y: f64) -> Result<f64> {
        let p1 = self.phi1_at(x)?;
        let e2 = self.eps_phi2_at(y);
        let e1 = self.eps_phi1_at(y);
        Ok(self.cd(x, y)?
            - Self::quad_form(&p1, &self.a12, &e2)
            - Self::quad_form(&p1, &self.ghat11, &e1))
    }

    /// `(eps S_{n/2,4})(x, y)` (epsilon acting on the first argument).
    pub fn eps_s4(&self, x: f64, y: f64) -> Result<f64> {
        let e1x = self.eps_phi1_at(x);
        let _ = &e1x;
        let ep2x = self.eps_phi2_at(x);
        let e1 = self.eps_phi1_at(y);
        let e2 = self.eps_phi2_at(y);
        Ok(self.eps_cd(x, y)?
            - Self::quad_form(&ep2x, &self.a21, &e1)
            - Self::quad_form(&ep2x, &self.g11, &e2))
    }

    /// `(eps S_{n,1})(x, y)`.
    pub fn eps_s1(&self, x: f64, y: f64) -> Result<f64> {
        let ep1x = self.eps_phi1_at(x);
        let e2 = self.eps_phi2_at(y);
        let e1 = self.eps_phi1_at(y);
        Ok(self.eps_cd(x, y)?
            - Self::quad_form(&ep1x, &self.a12, &e2)
            - Self::quad_form(&ep1x, &self.ghat11, &e1))
    }

    /// `d/dy S_{n/2,4}(x, y)`.
    pub fn ds4_dy(&self, x: f64, y: f64) -> Result<f64> {
        let p2 = self.phi2_at(x)?;
        let v1 = self.phi1_at(y)?;
        let v2 = self.phi2_at(y)?;
        Ok(self.cd_dy(x, y)?
            - Self::quad_form(&p2, &self.a21, &v1)
            - Self::quad_form(&p2, &self.g11, &v2))
    }

    /// `d/dy S_{n,1}(x, y)`.
    pub fn ds1_dy(&self, x: f64, y: f64) -> Result<f64> {
        let p1 = self.phi1_at(x)?;
        let v2 = self.phi2_at(y)?;
        let v1 = self.phi1_at(y)?;
        Ok(self.cd_dy(x, y)?
            - Self::quad_form(&p1, &self.a12, &v2)
            - Self::quad_form(&p1, &self.ghat11, &v1))
    }

    /// Residual of the exact relation
    /// `A_21 eps Phi_1(inf)^t + G_11 eps Phi_2(inf)^t = 0`, normalized.
    pub fn more_c_residual(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            let mut s = 0.0;
            for j in 0..m {
                s += self.a21[(i, j)] * self.eps_phi1_inf[j]
                    + self.g11[(i, j)] * self.eps_phi2_inf[j];
            }
            worst = worst.max(s.abs());
        }
        let a_scale = self.a21.iter().fold(0.0f64, |acc, &e| acc.max(e.abs()));
        // at m = 1 the identity forces eps psi_1(inf) itself to vanish, so the
        // second basis sets the natural magnitude of the eps vectors
        let e_scale = self
            .eps_phi1_inf
            .iter()
            .chain(self.eps_phi2_inf.iter())
            .fold(0.0f64, |acc, &e| acc.max(e.abs()));
        worst / (a_scale * e_scale).max(1e-300)
    }

    /// The 2x2 matrix kernel `K_{n,1}` or `K_{n/2,4}`.
    pub fn matrix_kernel(&self, beta: Beta, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        match beta {
            Beta::Symplectic => {
                let s = self.s4(x, y)?;
                let sd = self.ds4_dy(x, y)?;
                let es = self.eps_s4(x, y)?;
                let st = self.s4(y, x)?;
                Ok([[0.5 * s, -0.5 * sd], [0.5 * es, 0.5 * st]])
            }
            Beta::Orthogonal => {
                let s = self.s1(x, y)?;
                let sd = self.ds1_dy(x, y)?;
                let es = self.eps_s1(x, y)?;
                let st = self.s1(y, x)?;
                let sg = if x > y {
                    1.0
                } else if x < y {
                    -1.0
                } else {
                    0.0
                };
                Ok([[s, -sd], [es - 0.5 * sg, st]])
            }
            Beta::Unitary => Err(Error::InvalidParameter(
                "the matrix kernel is defined for beta = 1, 4; use cd() for beta = 2".into(),
            )),
        }
    }
}

/// Lambda-conjugation: scales the (1,2) entry by `lambda^{-2}` and the (2,1)
/// entry by `lambda^2`.
pub fn conjugate(k: [[f64; 2]; 2], lambda: f64) -> [[f64; 2]; 2] {
    [
        [k[0][0], k[0][1] / (lambda * lambda)],
        [k[1][0] * lambda * lambda, k[1][1]],
    ]
}
