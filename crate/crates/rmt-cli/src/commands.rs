use crate::output::{fnum, write_csv, write_loglog_svg, RunManifest};
use crate::wparse::{parse_field, parse_list, parse_range};
use crate::Command;
use anyhow::{bail, Context, Result};
use rmt_core::equilibrium::equilibrium;
use rmt_core::fredholm::{self, Source};
use rmt_core::limits::{
    airy_kernel, bessel_kernel, bulk_limit, hard_edge_limit, sine_kernel, soft_edge_limit, Regime,
    ScalingConstants,
};
use rmt_core::mc::{self, Extreme, SamplerConfig};
use rmt_core::orthopoly::{compute_recurrence, PrecisionContext, RecurrenceTable};
use rmt_core::tmtheory;
use rmt_core::weights::{Beta, Weight};
use rmt_core::widom::{build, conjugate, QuadConfig, WidomSystem};
use std::path::Path;

pub fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Recurrence {
            alpha,
            v,
            n_max,
            out,
            json,
        } => recurrence(alpha, &v, n_max, out.as_deref(), json.as_deref()),
        Command::Equilibrium { alpha, v, n, out } => cmd_equilibrium(alpha, &v, &n, out.as_deref()),
        Command::Widom {
            alpha,
            v,
            n,
            dump_dir,
        } => cmd_widom(alpha, &v, n, &dump_dir),
        Command::Kernel {
            alpha,
            v,
            n,
            beta,
            regime,
            x_bulk,
            lattice,
            out,
        } => cmd_kernel(
            alpha,
            &v,
            n,
            beta,
            &regime,
            x_bulk,
            &lattice,
            out.as_deref(),
        ),
        Command::Converge {
            alpha,
            v,
            beta,
            regime,
            n,
            out,
            plot,
        } => cmd_converge(
            alpha,
            &v,
            beta,
            &regime,
            &n,
            out.as_deref(),
            plot.as_deref(),
        ),
        Command::Gap {
            regime,
            beta,
            alpha,
            v,
            s,
            xi,
            x_bulk,
            limit,
            n,
            order,
            out,
        } => cmd_gap(
            &regime,
            beta,
            alpha,
            &v,
            s,
            xi,
            x_bulk,
            limit,
            n,
            order,
            out.as_deref(),
        ),
        Command::ExtremeCdf {
            which,
            beta,
            alpha,
            v,
            limit,
            n,
            s_list,
            order,
            out,
        } => cmd_extreme(
            &which,
            beta,
            alpha,
            &v,
            limit,
            n,
            &s_list,
            order,
            out.as_deref(),
        ),
        Command::TmVerify { m, q_max, out } => cmd_tm_verify(&m, q_max, out.as_deref()),
        Command::AsymptCompare {
            alpha,
            v,
            n,
            out,
            plot,
        } => cmd_asympt(alpha, &v, &n, out.as_deref(), plot.as_deref()),
        Command::Sample {
            beta,
            n,
            a,
            samples,
            seed,
            which,
            thresholds,
            density,
            raw,
            out,
        } => cmd_sample(
            beta,
            n,
            a,
            samples,
            seed,
            &which,
            thresholds.as_deref(),
            density.as_deref(),
            raw,
            out.as_deref(),
        ),
    }
}

fn weight_of(alpha: f64, v: &str) -> Result<Weight> {
    let coeffs = parse_field(v)?;
    Weight::new(alpha, coeffs).map_err(|e| anyhow::anyhow!(e))
}

fn parse_beta(b: u8) -> Result<Beta> {
    Beta::from_u8(b).map_err(|e| anyhow::anyhow!(e))
}

fn parse_regime(s: &str) -> Result<Regime> {
    match s {
        "hard" => Ok(Regime::Hard),
        "soft" => Ok(Regime::Soft),
        "bulk" => Ok(Regime::Bulk),
        _ => bail!("regime must be hard, soft or bulk, got {s:?}"),
    }
}

fn base_manifest(sub: &str, alpha: f64, v: &str) -> RunManifest {
    let mut m = RunManifest::new(sub);
    m.set("alpha", alpha).set("V", v).set(
        "precision_bits",
        std::env::var("RMT_PRECISION_BITS").unwrap_or_else(|_| "256".into()),
    );
    m
}

fn table_for(w: &Weight, n_max: usize) -> Result<RecurrenceTable> {
    let ctx = PrecisionContext::for_degree(n_max);
    compute_recurrence(w, n_max, &ctx).map_err(|e| anyhow::anyhow!(e))
}

fn widom_for(w: &Weight, n: usize, table: &RecurrenceTable) -> Result<WidomSystem> {
    let eq = equilibrium(w, n).map_err(|e| anyhow::anyhow!(e))?;
    build(w, n, table, &eq, &QuadConfig::default()).map_err(|e| anyhow::anyhow!(e))
}

fn recurrence(
    alpha: f64,
    v: &str,
    n_max: usize,
    out: Option<&Path>,
    json: Option<&Path>,
) -> Result<i32> {
    let w = weight_of(alpha, v)?;
    let t = table_for(&w, n_max)?;
    let mut man = base_manifest("recurrence", alpha, v);
    man.set("n_max", n_max);
    let rows: Vec<Vec<String>> = (0..=n_max)
        .map(|k| {
            vec![
                k.to_string(),
                fnum(t.a[k]),
                fnum(t.b[k]),
                fnum(t.gamma[k]),
                fnum(t.ln_gamma[k]),
                fnum(t.p_at_zero[k]),
            ]
        })
        .collect();
    write_csv(
        out,
        &man,
        &["k", "a_k", "b_k", "gamma_k", "ln_gamma_k", "p_k_at_0"],
        &rows,
    )?;
    if let Some(jp) = json {
        std::fs::write(jp, serde_json::to_string_pretty(&t.to_decimal_json())?)?;
    }
    Ok(0)
}

fn cmd_equilibrium(alpha: f64, v: &str, n_list: &str, out: Option<&Path>) -> Result<i32> {
    let w = weight_of(alpha, v)?;
    let ns: Vec<usize> = parse_list(n_list)?;
    let m = w.degree();
    let mut man = base_manifest("equilibrium", alpha, v);
    man.set("n", n_list).set("m", m);
    let mut header: Vec<String> = vec![
        "n".into(),
        "beta_n".into(),
        "c_n".into(),
        "tilde_c_n".into(),
        "norm_residual".into(),
    ];
    for k in 0..m {
        header.push(format!("h_{k}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut rows = Vec::new();
    for &n in &ns {
        let eq = equilibrium(&w, n).map_err(|e| anyhow::anyhow!(e))?;
        let norm = {
            use std::f64::consts::PI;
            let val = rmt_core::quad::integrate_composite(
                |phi: f64| 2.0 * phi.cos().powi(2) * eq.h_at(phi.sin().powi(2)),
                0.0,
                0.5 * PI,
                20,
                96,
            );
            val / (2.0 * PI) - 1.0
        };
        let mut row = vec![
            n.to_string(),
            fnum(eq.beta_n),
            fnum(eq.c_n),
            fnum(eq.tilde_c_n),
            fnum(norm),
        ];
        for k in 0..m {
            row.push(fnum(eq.h_coeffs[k]));
        }
        rows.push(row);
    }
    write_csv(out, &man, &header_refs, &rows)?;
    Ok(0)
}

fn matrix_rows(mat: &rmt_core::nalgebra::DMatrix<f64>) -> Vec<Vec<String>> {
    (0..mat.nrows())
        .map(|i| (0..mat.ncols()).map(|j| fnum(mat[(i, j)])).collect())
        .collect()
}

fn cmd_widom(alpha: f64, v: &str, n: usize, dir: &Path) -> Result<i32> {
    let w = weight_of(alpha, v)?;
    let m = w.degree();
    let table = table_for(&w, n + m.max(2))?;
    let sys = widom_for(&w, n, &table)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut man = base_manifest("widom", alpha, v);
    man.set("n", n).set("m", m);
    let cols: Vec<String> = (0..2 * m).map(|j| format!("col{j}")).collect();
    let cols_m: Vec<String> = (0..m).map(|j| format!("col{j}")).collect();
    let refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    let refs_m: Vec<&str> = cols_m.iter().map(|s| s.as_str()).collect();
    write_csv(
        Some(&dir.join("a21.csv")),
        &man,
        &refs_m,
        &matrix_rows(&sys.a21),
    )?;
    write_csv(Some(&dir.join("b.csv")), &man, &refs, &matrix_rows(&sys.b))?;
    write_csv(Some(&dir.join("c.csv")), &man, &refs, &matrix_rows(&sys.c))?;
    write_csv(
        Some(&dir.join("g11.csv")),
        &man,
        &refs_m,
        &matrix_rows(&sys.g11),
    )?;
    write_csv(
        Some(&dir.join("ghat11.csv")),
        &man,
        &refs_m,
        &matrix_rows(&sys.ghat11),
    )?;
    let quad = QuadConfig::default();
    let meta = serde_json::json!({
        "manifest": serde_json::from_str::<serde_json::Value>(&man.to_json())?,
        "manifest_sha256": man.sha256(),
        "n": n,
        "m": m,
        "alpha": alpha,
        "quadrature": {
            "nodes_per_panel": quad.nodes_per_panel,
            "grade_levels": quad.grade_levels,
            "base_panels": quad.base_panels,
        },
        "beta_n": sys.eq.beta_n,
        "c_n": sys.eq.c_n,
        "tilde_c_n": sys.eq.tilde_c_n,
        "d_n": sys.d_n,
        "b_asymmetry": sys.b_asymmetry,
        "ghat11_route_defect": sys.ghat11_defect,
        "cond_c11": sys.cond_c11,
        "cond_chat22": sys.cond_chat22,
        "eps_phi1_inf": sys.eps_phi1_inf,
        "eps_phi2_inf": sys.eps_phi2_inf,
        "more_c_residual": sys.more_c_residual(),
    });
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    println!(
        "wrote a21/b/c/g11/ghat11 CSVs and meta.json to {} (B asymmetry {:.2e}, \
         eps-identity residual {:.2e})",
        dir.display(),
        sys.b_asymmetry,
        sys.more_c_residual()
    );
    Ok(0)
}

/// Scaled finite-n kernel entries and limit entries at one lattice pair.
fn kernel_rows(
    w: &Weight,
    table: &RecurrenceTable,
    sys: Option<&WidomSystem>,
    n: usize,
    beta: Beta,
    regime: Regime,
    x_bulk: f64,
    lattice: &[f64],
) -> Result<Vec<Vec<String>>> {
    let eq = equilibrium(w, n).map_err(|e| anyhow::anyhow!(e))?;
    let sc = ScalingConstants::new(
        &eq,
        regime,
        if regime == Regime::Bulk {
            Some(x_bulk)
        } else {
            None
        },
    )
    .map_err(|e| anyhow::anyhow!(e))?;
    let beta4 = beta == Beta::Symplectic;
    let mut rows = Vec::new();
    for &xi in lattice {
        for &eta in lattice {
            let x = sc.physical(xi, beta4);
            let y = sc.physical(eta, beta4);
            let mut row = vec![n.to_string(), fnum(xi), fnum(eta)];
            match beta {
                Beta::Unitary => {
                    let fin = sc.unit(false)
                        * table
                            .cd_kernel(w, n, x, y)
                            .map_err(|e| anyhow::anyhow!(e))?;
                    let lim = match regime {
                        Regime::Hard => bessel_kernel(w.alpha, xi, eta),
                        Regime::Soft => airy_kernel(xi, eta),
                        Regime::Bulk => sine_kernel(xi - eta),
                    };
                    row.push(fnum(fin));
                    row.push(fnum(lim));
                }
                _ => {
                    let sys = sys.expect("widom system for beta = 1, 4");
                    let fin = conjugate(
                        sys.matrix_kernel(beta, x, y)
                            .map_err(|e| anyhow::anyhow!(e))?,
                        sc.conj_lambda(beta4),
                    );
                    let lim = match regime {
                        Regime::Hard => hard_edge_limit(beta4, w.alpha, xi, eta)
                            .map_err(|e| anyhow::anyhow!(e))?,
                        Regime::Soft => soft_edge_limit(beta4, xi, eta),
                        Regime::Bulk => bulk_limit(beta4, xi, eta),
                    };
                    for a in 0..2 {
                        for b in 0..2 {
                            row.push(fnum(sc.unit(beta4) * fin[a][b]));
                        }
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            row.push(fnum(lim[a][b]));
                        }
                    }
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn cmd_kernel(
    alpha: f64,
    v: &str,
    n: usize,
    beta: u8,
    regime: &str,
    x_bulk: f64,
    lattice: &str,
    out: Option<&Path>,
) -> Result<i32> {
    let w = weight_of(alpha, v)?;
    let beta = parse_beta(beta)?;
    let regime = parse_regime(regime)?;
    let lat: Vec<f64> = parse_list(lattice)?;
    let m = w.degree();
    let table = table_for(&w, n + m.max(2))?;
    let sys = if beta != Beta::Unitary {
        Some(widom_for(&w, n, &table)?)
    } else {
        None
    };
    let mut man = base_manifest("kernel", alpha, v);
    man.set("n", n)
        .set("beta", beta.as_u8())
        .set("regime", format!("{regime:?}"));
    man.set("lattice", lattice).set("x_bulk", x_bulk);
    let header: Vec<&str> = if beta == Beta::Unitary {
        vec!["n", "xi", "eta", "finite_scaled", "limit"]
    } else {
        vec![
            "n", "xi", "eta", "fin11", "fin12", "fin21", "fin22", "lim11", "lim12", "lim21",
            "lim22",
        ]
    };
    let rows = kernel_rows(&w, &table, sys.as_ref(), n, beta, regime, x_bulk, &lat)?;
    write_csv(out, &man, &header, &rows)?;
    Ok(0)
}

/// Weighted sup error of the scaled kernel against its limit, following the
/// entry weights of the corresponding error statements.
fn converge_errs(
    w: &Weight,
    table: &RecurrenceTable,
    n: usize,
    beta: Beta,
    regime: Regime,
) -> Result<Vec<f64>> {
    let hard: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
    let soft: [f64; 7] = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0];
    let bulk: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let bulk_pts: [f64; 3] = [0.3, 0.5, 0.7];
    let eq = equilibrium(w, n).map_err(|e| anyhow::anyhow!(e))?;
    let alpha = w.alpha;
    let beta4 = beta == Beta::Symplectic;
    let n_entries = if beta == Beta::Unitary { 1 } else { 4 };
    let mut worst = vec![0.0f64; n_entries];
    let sys = if beta != Beta::Unitary {
        Some(widom_for(w, n, table)?)
    } else {
        None
    };
    let mut visit = |sc: &ScalingConstants, xi: f64, eta: f64| -> Result<()> {
        let x = sc.physical(xi, beta4);
        let y = sc.physical(eta, beta4);
        match beta {
            Beta::Unitary => {
                let fin = sc.unit(false)
                    * table
                        .cd_kernel(w, n, x, y)
                        .map_err(|e| anyhow::anyhow!(e))?;
                let (lim, wt) = match sc.regime {
                    Regime::Hard => (
                        bessel_kernel(alpha, xi, eta),
                        xi.powf(0.5 * alpha) * eta.powf(0.5 * alpha),
                    ),
                    Regime::Soft => (airy_kernel(xi, eta), 1.0),
                    Regime::Bulk => (sine_kernel(xi - eta), 1.0),
                };
                worst[0] = worst[0].max((fin - lim).abs() / wt);
            }
            _ => {
                let sys = sys.as_ref().unwrap();
                let fin = conjugate(
                    sys.matrix_kernel(beta, x, y)
                        .map_err(|e| anyhow::anyhow!(e))?,
                    sc.conj_lambda(beta4),
                );
                let lim = match sc.regime {
                    Regime::Hard => {
                        hard_edge_limit(beta4, alpha, xi, eta).map_err(|e| anyhow::anyhow!(e))?
                    }
                    Regime::Soft => soft_edge_limit(beta4, xi, eta),
                    Regime::Bulk => bulk_limit(beta4, xi, eta),
                };
                let wts: [[f64; 2]; 2] = match (sc.regime, beta4) {
                    (Regime::Hard, true) => {
                        let c = xi.powf(0.5 * alpha) * eta.powf(0.5 * alpha);
                        [[c / xi, c / (xi * eta)], [c, c / eta]]
                    }
                    (Regime::Hard, false) => [
                        [
                            xi.powf(0.5 * alpha),
                            xi.powf(0.5 * alpha) * eta.powf(0.5 * alpha - 1.0),
                        ],
                        [1.0, eta.powf(0.5 * alpha)],
                    ],
                    _ => [[1.0, 1.0], [1.0, 1.0]],
                };
                for a in 0..2 {
                    for b in 0..2 {
                        worst[2 * a + b] = worst[2 * a + b]
                            .max((sc.unit(beta4) * fin[a][b] - lim[a][b]).abs() / wts[a][b]);
                    }
                }
            }
        }
        Ok(())
    };
    match regime {
        Regime::Hard => {
            let sc =
                ScalingConstants::new(&eq, Regime::Hard, None).map_err(|e| anyhow::anyhow!(e))?;
            for &xi in &hard {
                for &eta in &hard {
                    visit(&sc, xi, eta)?;
                }
            }
        }
        Regime::Soft => {
            let sc =
                ScalingConstants::new(&eq, Regime::Soft, None).map_err(|e| anyhow::anyhow!(e))?;
            for &xi in &soft {
                for &eta in &soft {
                    visit(&sc, xi, eta)?;
                }
            }
        }
        Regime::Bulk => {
            for &x0 in &bulk_pts {
                let sc = ScalingConstants::new(&eq, Regime::Bulk, Some(x0))
                    .map_err(|e| anyhow::anyhow!(e))?;
                for &xi in &bulk {
                    for &eta in &bulk {
                        visit(&sc, xi, eta)?;
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn cmd_converge(
    alpha: f64,
    v: &str,
    beta: u8,
    regime: &str,
    n_list: &str,
    out: Option<&Path>,
    plot: Option<&Path>,
) -> Result<i32> {
    let w = weight_of(alpha, v)?;
    let beta = parse_beta(beta)?;
    let regime = parse_regime(regime)?;
    let ns: Vec<usize> = parse_list(n_list)?;
    let m = w.degree();
    let n_top = *ns.iter().max().unwrap();
    let table = table_for(&w, n_top + m.max(2))?;
    let mut man = base_manifest("converge", alpha, v);
    man.set("beta", beta.as_u8())
        .set("regime", format!("{regime:?}"))
        .set("n", n_list);
    let mut rows = Vec::new();
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for &n in &ns {
        let errs = converge_errs(&w, &table, n, beta, regime)?;
        for (e, err) in errs.iter().enumerate() {
            let entry = if errs.len() == 1 {
                "K".to_string()
            } else {
                format!("{}{}", e / 2 + 1, e % 2 + 1)
            };
            rows.push(vec![n.to_string(), entry.clone(), fnum(*err)]);
            match series.iter_mut().find(|(name, _)| *name == entry) {
                Some((_, pts)) => pts.push((n as f64, *err)),
                None => series.push((entry, vec![(n as f64, *err)])),
            }
        }
    }
    write_csv(out, &man, &["n", "entry", "sup_weighted_err"], &rows)?;
    if let Some(pp) = plot {
        write_loglog_svg(
            pp,
            &format!(
                "{regime:?} edge, beta = {}: weighted sup error vs n",
                beta.as_u8()
            ),
            &series,
        )?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gap(
    regime: &str,
    beta: u8,
    alpha: f64,
    v: &str,
    s: f64,
    xi: f64,
    x_bulk: f64,
    limit: bool,
    n: Option<usize>,
    order: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let beta = parse_beta(beta)?;
    let regime = parse_regime(regime)?;
    let mut man = RunManifest::new("gap");
    man.set("regime", format!("{regime:?}"))
        .set("beta", beta.as_u8())
        .set("alpha", alpha)
        .set("limit", limit)
        .set("order", order);
    let mut holder: (Option<Weight>, Option<RecurrenceTable>, Option<WidomSystem>) =
        (None, None, None);
    if !limit {
        let n = n.context("--n required without --limit")?;
        let ww = weight_of(alpha, v)?;
        let m = ww.degree();
        let tt = table_for(&ww, n + m.max(2))?;
        let sys = if beta == Beta::Unitary {
            None
        } else {
            Some(widom_for(&ww, n, &tt)?)
        };
        holder = (Some(ww), Some(tt), sys);
        man.set("V", v).set("n", n);
    }
    match regime {
        Regime::Hard | Regime::Soft => man.set("s", s),
        Regime::Bulk => man.set("xi", xi).set("x_bulk", x_bulk),
    };
    let compute = |order: usize| -> Result<f64> {
        let src = if limit {
            Source::Limit { alpha }
        } else if beta == Beta::Unitary {
            Source::FiniteUnitary {
                w: w_ref(&holder.0)?,
                table: t_ref(&holder.1)?,
                n: n.unwrap(),
            }
        } else {
            Source::FiniteWidom(s_ref(&holder.2)?)
        };
        let p = match regime {
            Regime::Hard => fredholm::smallest_eig_cdf(beta, &src, s, order),
            Regime::Soft => fredholm::largest_eig_cdf(beta, &src, s, order),
            Regime::Bulk => fredholm::bulk_gap(beta, &src, x_bulk, xi, order),
        }
        .map_err(|e| anyhow::anyhow!(e))?;
        Ok(p)
    };
    let p1 = compute(order)?;
    let p2 = compute(2 * order)?;
    let row = vec![fnum(s), fnum(p2), order.to_string(), fnum((p1 - p2).abs())];
    write_csv(
        out,
        &man,
        &["s", "probability", "order", "self_conv_err"],
        &[row],
    )?;
    if out.is_some() {
        println!(
            "probability = {p2:.12} (self-convergence {:.2e})",
            (p1 - p2).abs()
        );
    }
    Ok(0)
}

fn w_ref(w: &Option<Weight>) -> Result<&Weight> {
    w.as_ref().context("internal: weight missing")
}
fn t_ref(t: &Option<RecurrenceTable>) -> Result<&RecurrenceTable> {
    t.as_ref().context("internal: table missing")
}
fn s_ref(s: &Option<WidomSystem>) -> Result<&WidomSystem> {
    s.as_ref().context("internal: system missing")
}

#[allow(clippy::too_many_arguments)]
fn cmd_extreme(
    which: &str,
    beta: u8,
    alpha: f64,
    v: &str,
    limit: bool,
    n: Option<usize>,
    s_list: &str,
    order: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let beta = parse_beta(beta)?;
    let ss: Vec<f64> = parse_list(s_list)?;
    let smallest = match which {
        "smallest" => true,
        "largest" => false,
        _ => bail!("--which must be smallest or largest"),
    };
    let mut man = RunManifest::new("extreme-cdf");
    man.set("which", which)
        .set("beta", beta.as_u8())
        .set("alpha", alpha)
        .set("limit", limit)
        .set("order", order)
        .set("s_list", s_list);
    let mut holder: (Option<Weight>, Option<RecurrenceTable>, Option<WidomSystem>) =
        (None, None, None);
    if !limit {
        let n = n.context("--n required without --limit")?;
        let ww = weight_of(alpha, v)?;
        let m = ww.degree();
        let tt = table_for(&ww, n + m.max(2))?;
        let sys = if beta == Beta::Unitary {
            None
        } else {
            Some(widom_for(&ww, n, &tt)?)
        };
        holder = (Some(ww), Some(tt), sys);
        man.set("V", v).set("n", n);
    }
    let mut rows = Vec::new();
    for &s in &ss {
        let eval = |order: usize| -> Result<f64> {
            let src = if limit {
                Source::Limit { alpha }
            } else if beta == Beta::Unitary {
                Source::FiniteUnitary {
                    w: w_ref(&holder.0)?,
                    table: t_ref(&holder.1)?,
                    n: n.unwrap(),
                }
            } else {
                Source::FiniteWidom(s_ref(&holder.2)?)
            };
            let p = if smallest {
                fredholm::smallest_eig_cdf(beta, &src, s, order)
            } else {
                fredholm::largest_eig_cdf(beta, &src, s, order)
            }
            .map_err(|e| anyhow::anyhow!(e))?;
            Ok(p)
        };
        let p1 = eval(order)?;
        let p2 = eval(2 * order)?;
        rows.push(vec![
            fnum(s),
            fnum(p2),
            order.to_string(),
            fnum((p1 - p2).abs()),
        ]);
    }
    write_csv(
        out,
        &man,
        &["s", "probability", "order", "self_conv_err"],
        &rows,
    )?;
    Ok(0)
}

fn cmd_tm_verify(m_spec: &str, q_max: usize, out: Option<&Path>) -> Result<i32> {
    let ms = parse_range(m_spec)?;
    let mut man = RunManifest::new("tm-verify");
    man.set("m", m_spec).set("q_max", q_max);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for &m in &ms {
        let (det, cond) = tmtheory::verify_tm_invertible(m).map_err(|e| anyhow::anyhow!(e))?;
        let mut ok = det.abs() > 1e-8 && cond < 1e6;
        let mut min_slack = f64::INFINITY;
        let mut slack_of = |rep: &tmtheory::VerifyReport| {
            for c in &rep.checks {
                min_slack = min_slack.min(c.slack);
            }
        };
        if m >= 2 {
            let sys = tmtheory::build_tm(m).map_err(|e| anyhow::anyhow!(e))?;
            let schur = tmtheory::verify_schur_bounds(&sys);
            ok &= schur.all_hold();
            slack_of(&schur);
            let ints = tmtheory::verify_integral_bounds(m, q_max);
            ok &= ints.all_hold();
            slack_of(&ints);
            let aux = tmtheory::verify_aux_functions(m, q_max.min(50));
            ok &= aux.all_hold();
            slack_of(&aux);
            let dsum = tmtheory::verify_d_sums(m);
            ok &= dsum.all_hold();
            slack_of(&dsum);
        }
        let aya = tmtheory::a_y_a(m).map_err(|e| anyhow::anyhow!(e))?;
        let aya_defect = (aya / (0.5 * m as f64) - 1.0).abs();
        ok &= aya_defect < 1e-12;
        all_ok &= ok;
        rows.push(vec![
            m.to_string(),
            fnum(det),
            fnum(cond),
            fnum(if min_slack.is_finite() {
                min_slack
            } else {
                f64::NAN
            }),
            fnum(aya_defect),
            if ok { "pass".into() } else { "FAIL".into() },
        ]);
    }
    write_csv(
        out,
        &man,
        &[
            "m",
            "det_tm",
            "cond_tm",
            "min_slack",
            "aya_defect",
            "status",
        ],
        &rows,
    )?;
    if all_ok {
        if out.is_some() {
            println!("all checks pass for m in {m_spec}");
        }
        Ok(0)
    } else {
        eprintln!("tm-verify: at least one bound failed (see status column)");
        Ok(2)
    }
}

fn cmd_asympt(
    alpha: f64,
    v: &str,
    n_list: &str,
    out: Option<&Path>,
    plot: Option<&Path>,
) -> Result<i32> {
    use rmt_core::asymptotics::{phi_hat_leading, psi_hat_leading, Region, RegionConfig};
    let w = weight_of(alpha, v)?;
    let ns: Vec<usize> = parse_list(n_list)?;
    let m = w.degree();
    let n_top = *ns.iter().max().unwrap();
    let table = table_for(&w, n_top + m.max(2))?;
    let mut man = base_manifest("asympt-compare", alpha, v);
    man.set("n", n_list);
    let regions = [
        Region::Bessel,
        Region::Bulk,
        Region::Airy,
        Region::Exponential,
    ];
    let mut rows = Vec::new();
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for &n in &ns {
        let sys = widom_for(&w, n, &table)?;
        let eq = &sys.eq;
        let rc = RegionConfig::new(n).map_err(|e| anyhow::anyhow!(e))?;
        for &region in &regions {
            let (lo, hi) = match region {
                Region::Bessel => (0.0, rc.bessel_top),
                Region::Bulk => (rc.bessel_top, rc.airy_lo),
                Region::Airy => (rc.airy_lo, rc.airy_hi),
                Region::Exponential => (rc.airy_hi, 1.8),
            };
            let (a, b) = (lo + 0.2 * (hi - lo), hi - 0.2 * (hi - lo));
            let pts: Vec<f64> = (0..24).map(|i| a + (b - a) * i as f64 / 23.0).collect();
            let mut sup = vec![0.0f64; 3];
            let mut scale = vec![0.0f64; 3];
            for &x in &pts {
                let phys = eq.beta_n * x;
                let trio = [
                    (
                        "phi",
                        eq.beta_n.sqrt()
                            * table.phi(&w, n, phys).map_err(|e| anyhow::anyhow!(e))?,
                        phi_hat_leading(region, &w, eq, x).map_err(|e| anyhow::anyhow!(e))?,
                    ),
                    (
                        "psi1",
                        eq.beta_n.sqrt() * sys.psi1(phys).map_err(|e| anyhow::anyhow!(e))?,
                        psi_hat_leading(1, region, &w, eq, x).map_err(|e| anyhow::anyhow!(e))?,
                    ),
                    (
                        "psi2",
                        eq.beta_n.sqrt() * sys.psi2(phys).map_err(|e| anyhow::anyhow!(e))?,
                        psi_hat_leading(2, region, &w, eq, x).map_err(|e| anyhow::anyhow!(e))?,
                    ),
                ];
                for (k, (name, exact, lead)) in trio.iter().enumerate() {
                    sup[k] = sup[k].max((exact - lead).abs());
                    scale[k] = scale[k].max(lead.abs()).max(exact.abs());
                    rows.push(vec![
                        format!("{region:?}"),
                        n.to_string(),
                        fnum(x),
                        (*name).into(),
                        fnum(*exact),
                        fnum(*lead),
                        fnum((exact - lead).abs() / scale[k].max(1e-300)),
                    ]);
                }
            }
            for (k, name) in ["phi", "psi1", "psi2"].iter().enumerate() {
                let key = format!("{region:?}/{name}");
                let rel = sup[k] / scale[k].max(1e-300);
                match series.iter_mut().find(|(s, _)| *s == key) {
                    Some((_, pts)) => pts.push((n as f64, rel)),
                    None => series.push((key, vec![(n as f64, rel)])),
                }
            }
        }
    }
    write_csv(
        out,
        &man,
        &["region", "n", "x", "func", "exact", "leading", "rel_err"],
        &rows,
    )?;
    if let Some(pp) = plot {
        write_loglog_svg(pp, "leading-order relative error vs n", &series)?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    beta: u8,
    n: usize,
    a: f64,
    samples: usize,
    seed: u64,
    which: &str,
    thresholds: Option<&str>,
    density: Option<&str>,
    raw: bool,
    out: Option<&Path>,
) -> Result<i32> {
    let beta = parse_beta(beta)?;
    let cfg = SamplerConfig {
        n,
        beta,
        a_param: a,
        seed,
        n_samples: samples,
    };
    cfg.validate().map_err(|e| anyhow::anyhow!(e))?;
    let extreme = match which {
        "smallest" => Extreme::Smallest,
        "largest" => Extreme::Largest,
        _ => bail!("--which must be smallest or largest"),
    };
    let mut man = RunManifest::new("sample");
    man.set("beta", beta.as_u8())
        .set("n", n)
        .set("a", a)
        .set("samples", samples)
        .set("seed", seed)
        .set("which", which);
    if let Some(spec) = density {
        let parts: Vec<f64> = parse_list(spec)?;
        if parts.len() != 3 {
            bail!("--density wants lo,hi,bins");
        }
        let bins = parts[2] as usize;
        man.set("density", spec);
        let counts = mc::empirical_density(&cfg, parts[0], parts[1], bins)
            .map_err(|e| anyhow::anyhow!(e))?;
        let rows: Vec<Vec<String>> = counts
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                let lo = parts[0] + (parts[1] - parts[0]) * b as f64 / bins as f64;
                let hi = parts[0] + (parts[1] - parts[0]) * (b + 1) as f64 / bins as f64;
                vec![fnum(lo), fnum(hi), fnum(c)]
            })
            .collect();
        write_csv(out, &man, &["bin_lo", "bin_hi", "mean_count"], &rows)?;
    } else if raw {
        let ext = mc::sample_extremes(&cfg, extreme).map_err(|e| anyhow::anyhow!(e))?;
        let rows: Vec<Vec<String>> = ext
            .iter()
            .enumerate()
            .map(|(i, &x)| vec![i.to_string(), fnum(x)])
            .collect();
        write_csv(out, &man, &["draw", "extreme"], &rows)?;
    } else {
        let spec = thresholds.context("--thresholds (or --density/--raw) required")?;
        let ts: Vec<f64> = parse_list(spec)?;
        man.set("thresholds", spec);
        let (probs, errs) =
            mc::empirical_extreme_cdf(&cfg, extreme, &ts).map_err(|e| anyhow::anyhow!(e))?;
        let rows: Vec<Vec<String>> = ts
            .iter()
            .zip(probs.iter().zip(&errs))
            .map(|(&t, (&p, &e))| vec![fnum(t), fnum(p), fnum(e)])
            .collect();
        write_csv(out, &man, &["threshold", "probability", "stderr"], &rows)?;
    }
    Ok(0)
}
