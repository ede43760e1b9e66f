//! Nyström discretization of Fredholm determinants for scalar and 2x2-block
//! kernels, and the eigenvalue-distribution functions built from them: gap
//! probabilities, smallest/largest-eigenvalue laws at finite `n`, and their
//! Bessel / Airy / sine limits.
//!
//! For block operators the regularized 2-determinant equals the plain
//! determinant after discretization: `det_2(I - K) = det(I - K) e^{tr K -
//! tr K_11 - tr K_22}`, and the matrix trace of the discretized operator is
//! exactly the sum of its diagonal-block traces, so the regularization factor
//! is identically one. The continuum regularization compensates an
//! off-diagonal non-trace-classness that a finite grid never sees.

use crate::error::{Error, Result};
use crate::limits::{airy_kernel, bessel_kernel, sine_kernel};
use crate::limits::{bulk_limit, hard_edge_limit, soft_edge_limit, Mat2};
use crate::orthopoly::RecurrenceTable;
use crate::quad::gauss_legendre;
use crate::weights::{Beta, Weight};
use crate::widom::WidomSystem;
use nalgebra::DMatrix;

/// Gauss–Legendre rule on `(a, b)`: nodes strictly interior, weights positive
/// and summing to `b - a`.
#[derive(Debug, Clone)]
pub struct NystromGrid {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NystromGrid {
    pub fn new(a: f64, b: f64, order: usize) -> Result<Self> {
        if !(b > a) || order < 2 {
            return Err(Error::InvalidParameter(format!(
                "Nystrom grid needs b > a and order >= 2, got ({a}, {b}) at {order}"
            )));
        }
        let (t, wt) = gauss_legendre(order);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        Ok(NystromGrid {
            a,
            b,
            nodes: t.iter().map(|x| c + h * x).collect(),
            weights: wt.iter().map(|w| w * h).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Hard-edge conjugation weight `g(xi) = diag(xi^delta, xi^-delta)` with
/// `max(0, (1-alpha)/2) < delta < 1/2`.
#[derive(Debug, Clone, Copy)]
pub struct DeltaWeighting {
    pub delta: f64,
}

impl DeltaWeighting {
    /// Midpoint of the legal interval.
    pub fn for_alpha(alpha: f64) -> Self {
        let lo = (0.5 * (1.0 - alpha)).max(0.0);
        DeltaWeighting {
            delta: 0.5 * (lo + 0.5),
        }
    }

    pub fn custom(delta: f64, alpha: f64) -> Result<Self> {
        let lo = (0.5 * (1.0 - alpha)).max(0.0);
        if !(delta > lo && delta < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} outside the open interval ({lo}, 0.5)"
            )));
        }
        Ok(DeltaWeighting { delta })
    }

    /// Entrywise conjugation `g(x) K g(y)^{-1}`.
    fn apply(&self, k: Mat2, x: f64, y: f64) -> Mat2 {
        let d = self.delta;
        [
            [k[0][0] * (x / y).powf(d), k[0][1] * (x * y).powf(d)],
            [k[1][0] * (x * y).powf(-d), k[1][1] * (y / x).powf(d)],
        ]
    }
}

/// Sign and log-magnitude determinant from an LU factorization, immune to
/// overflow of the raw product.
fn det_via_lu(mat: DMatrix<f64>) -> f64 {
    let n = mat.nrows();
    let lu = mat.lu();
    let mut log_abs = 0.0;
    let mut sign = 1.0f64;
    for i in 0..n {
        let d = lu.u()[(i, i)];
        if d == 0.0 {
            return 0.0;
        }
        log_abs += d.abs().ln();
        if d < 0.0 {
            sign = -sign;
        }
    }
    // permutation parity
    if lu.p().len() % 2 == 1 {
        sign = -sign;
    }
    sign * log_abs.exp()
}

/// `det(I - M)` with `M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)`.
pub fn det_scalar<K>(kernel: K, grid: &NystromGrid) -> Result<f64>
where
    K: Fn(f64, f64) -> Result<f64>,
{
    let n = grid.order();
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= sw[i] * kernel(grid.nodes[i], grid.nodes[j])? * sw[j];
        }
    }
    Ok(det_via_lu(m))
}

/// `det(I - M)` for a 2x2 block kernel, with optional hard-edge conjugation.
pub fn det_block2<K>(
    kernel: K,
    grid: &NystromGrid,
    weighting: Option<DeltaWeighting>,
) -> Result<f64>
where
    K: Fn(f64, f64) -> Result<Mat2>,
{
    let n = grid.order();
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut m = DMatrix::<f64>::identity(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let mut k = kernel(grid.nodes[i], grid.nodes[j])?;
            if let Some(g) = weighting {
                k = g.apply(k, grid.nodes[i], grid.nodes[j]);
            }
            for a in 0..2 {
                for b in 0..2 {
                    let v = k[a][b];
                    if !v.is_finite() {
                        return Err(Error::Domain(format!(
                            "kernel entry ({a},{b}) unbounded at ({}, {})",
                            grid.nodes[i], grid.nodes[j]
                        )));
                    }
                    m[(a * n + i, b * n + j)] -= sw[i] * v * sw[j];
                }
            }
        }
    }
    Ok(det_via_lu(m))
}

/// Which kernel backs a distribution computation.
pub enum Source<'a> {
    /// `beta = 2` at finite `n` via the Christoffel–Darboux kernel.
    FiniteUnitary {
        w: &'a Weight,
        table: &'a RecurrenceTable,
        n: usize,
    },
    /// `beta = 1, 4` at finite (even) `n` via the assembled system.
    FiniteWidom(&'a WidomSystem),
    /// Scaling limits; `alpha` feeds the hard-edge Bessel kernels.
    Limit { alpha: f64 },
}

fn sqrt_det(det: f64) -> Result<f64> {
    if det < -1e-8 {
        return Err(Error::NegativeDeterminant(det));
    }
    Ok(det.max(0.0).sqrt())
}

/// Gap probability on `(a, b)`: `det`, `sqrt(det)` or `sqrt(det_2)` of the
/// restricted operator, per symmetry class.
fn gap_probability(beta: Beta, source: &Source, a: f64, b: f64, order: usize) -> Result<f64> {
    let grid = NystromGrid::new(a, b, order)?;
    match (beta, source) {
        (Beta::Unitary, Source::FiniteUnitary { w, table, n }) => {
            det_scalar(|x, y| table.cd_kernel(w, *n, x, y), &grid)
        }
        (Beta::Unitary, Source::Limit { .. }) => Err(Error::InvalidParameter(
            "beta = 2 limit gaps are regime-specific; use the dedicated functions".into(),
        )),
        (Beta::Symplectic, Source::FiniteWidom(sys)) => {
            let det = det_block2(
                |x, y| sys.matrix_kernel(Beta::Symplectic, x, y),
                &grid,
                None,
            )?;
            sqrt_det(det)
        }
        (Beta::Orthogonal, Source::FiniteWidom(sys)) => {
            // det_2 = det at the discrete level (see module docs)
            let det = det_block2(
                |x, y| sys.matrix_kernel(Beta::Orthogonal, x, y),
                &grid,
                None,
            )?;
            sqrt_det(det)
        }
        _ => Err(Error::InvalidParameter("source does not match beta".into())),
    }
}

/// `P(lambda_1 <= s)`: smallest-eigenvalue distribution. For finite sources
/// `s` is a physical threshold; for limits it is the hard-edge variable.
pub fn smallest_eig_cdf(beta: Beta, source: &Source, s: f64, order: usize) -> Result<f64> {
    if !(s > 0.0) {
        return Ok(0.0);
    }
    match source {
        Source::Limit { alpha } => {
            let grid = NystromGrid::new(0.0, s, order)?;
            match beta {
                Beta::Unitary => {
                    let det = det_scalar(|x, y| Ok(bessel_kernel(*alpha, x, y)), &grid)?;
                    Ok(1.0 - det)
                }
                Beta::Symplectic => {
                    let g = DeltaWeighting::for_alpha(*alpha);
                    let det =
                        det_block2(|x, y| hard_edge_limit(true, *alpha, x, y), &grid, Some(g))?;
                    Ok(1.0 - sqrt_det(det)?)
                }
                Beta::Orthogonal => {
                    let g = DeltaWeighting::for_alpha(*alpha);
                    let det =
                        det_block2(|x, y| hard_edge_limit(false, *alpha, x, y), &grid, Some(g))?;
                    Ok(1.0 - sqrt_det(det)?)
                }
            }
        }
        _ => Ok(1.0 - gap_probability(beta, source, 0.0, s, order)?),
    }
}

/// `P(lambda_max <= s)`: largest-eigenvalue distribution. Finite sources
/// truncate the gap `(s, infinity)` where the weight has decayed; limit
/// sources use the Airy kernels on `(s, s + T)` with a superexponential tail.
pub fn largest_eig_cdf(beta: Beta, source: &Source, s: f64, order: usize) -> Result<f64> {
    match source {
        Source::Limit { .. } => {
            let top = (s + 8.0).max(12.0);
            let grid = NystromGrid::new(s, top, order)?;
            match beta {
                Beta::Unitary => det_scalar(|x, y| Ok(airy_kernel(x, y)), &grid),
                Beta::Symplectic => {
                    let det = det_block2(|x, y| Ok(soft_edge_limit(true, x, y)), &grid, None)?;
                    sqrt_det(det)
                }
                Beta::Orthogonal => {
                    let det = det_block2(|x, y| Ok(soft_edge_limit(false, x, y)), &grid, None)?;
                    sqrt_det(det)
                }
            }
        }
        Source::FiniteUnitary { w, table, n } => {
            let top = finite_cutoff(w, *n, s)?;
            let grid = NystromGrid::new(s, top, order)?;
            det_scalar(|x, y| table.cd_kernel(w, *n, x, y), &grid)
        }
        Source::FiniteWidom(sys) => {
            let top = finite_cutoff(&sys.weight, sys.n, s)?;
            let grid = NystromGrid::new(s, top, order)?;
            let det = det_block2(|x, y| sys.matrix_kernel(beta, x, y), &grid, None)?;
            sqrt_det(det)
        }
    }
}

/// Upper truncation point for finite-n gaps on `(s, infinity)`.
fn finite_cutoff(w: &Weight, n: usize, s: f64) -> Result<f64> {
    let eq = crate::equilibrium::equilibrium(w, n)?;
    let mut u = 1.1;
    while 0.5 * n as f64 * eq.exp_mass(u) < 45.0 && u < 64.0 {
        u *= 1.3;
    }
    Ok((eq.beta_n * u).max(s * 1.5 + 1.0))
}

/// Probability of no eigenvalue in the symmetric bulk window
/// `(center - xi u, center + xi u)`, where `u` is the bulk spacing unit.
/// Finite sources take `x_bulk` in `(0, 1)`; limit sources ignore it and work
/// on `(-xi, xi)` directly.
pub fn bulk_gap(beta: Beta, source: &Source, x_bulk: f64, xi: f64, order: usize) -> Result<f64> {
    if xi == 0.0 {
        return Ok(1.0);
    }
    if xi < 0.0 {
        return Err(Error::InvalidParameter("bulk window needs xi >= 0".into()));
    }
    match source {
        Source::Limit { .. } => {
            let grid = NystromGrid::new(-xi, xi, order)?;
            match beta {
                Beta::Unitary => det_scalar(|x, y| Ok(sine_kernel(x - y)), &grid),
                Beta::Symplectic => {
                    let det = det_block2(|x, y| Ok(bulk_limit(true, x, y)), &grid, None)?;
                    sqrt_det(det)
                }
                Beta::Orthogonal => {
                    let det = det_block2(|x, y| Ok(bulk_limit(false, x, y)), &grid, None)?;
                    sqrt_det(det)
                }
            }
        }
        Source::FiniteUnitary { w, table, n } => {
            let eq = crate::equilibrium::equilibrium(w, *n)?;
            let unit = eq.beta_n / (*n as f64 * eq.omega(x_bulk)?);
            let c = eq.beta_n * x_bulk;
            let grid = NystromGrid::new(c - xi * unit, c + xi * unit, order)?;
            det_scalar(|x, y| table.cd_kernel(w, *n, x, y), &grid)
        }
        Source::FiniteWidom(sys) => {
            let scale = if beta == Beta::Symplectic { 2.0 } else { 1.0 };
            let unit = scale * sys.eq.beta_n / (sys.n as f64 * sys.eq.omega(x_bulk)?);
            let c = sys.eq.beta_n * x_bulk;
            let grid = NystromGrid::new(c - xi * unit, c + xi * unit, order)?;
            let det = det_block2(|x, y| sys.matrix_kernel(beta, x, y), &grid, None)?;
            sqrt_det(det)
        }
    }
}

/// l-point correlation for the unitary ensemble:
/// `R_l(x_1..x_l) = det[K_n(x_i, x_j)]`.
pub fn correlation_beta2(
    w: &Weight,
    table: &RecurrenceTable,
    n: usize,
    points: &[f64],
) -> Result<f64> {
    let l = points.len();
    if l == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let mut m = DMatrix::<f64>::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            m[(i, j)] = table.cd_kernel(w, n, points[i], points[j])?;
        }
    }
    Ok(det_via_lu(m))
}

/// Evaluate `f` at `order` and `2 * order`, returning the refined value and
/// the self-convergence gap.
pub fn self_convergence<F>(f: F, order: usize) -> Result<(f64, f64)>
where
    F: Fn(usize) -> Result<f64>,
{
    let v1 = f(order)?;
    let v2 = f(2 * order)?;
    Ok((v2, (v1 - v2).abs()))
}
