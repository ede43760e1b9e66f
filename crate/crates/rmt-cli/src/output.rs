//! Reproducible artifacts: every CSV embeds the run manifest (and its hash)
//! as comment lines, so identical manifests produce byte-identical files.

use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Canonical description of a run: subcommand plus its parameters in a
/// stable key order.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serialization")
    }

    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_json().as_bytes());
        hex_string(&h.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Write a CSV with a named header and manifest comment lines.
pub fn write_csv(
    path: Option<&Path>,
    manifest: &RunManifest,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut buf = String::new();
    buf.push_str(&format!("# manifest: {}\n", manifest.to_json()));
    buf.push_str(&format!("# manifest-sha256: {}\n", manifest.sha256()));
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, buf)?,
        None => std::io::stdout().write_all(buf.as_bytes())?,
    }
    Ok(())
}

pub fn fnum(x: f64) -> String {
    format!("{x:.17e}")
}

/// Minimal log-log line plot: one polyline per series.
pub fn write_loglog_svg(
    path: &Path,
    title: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    let (w, h) = (640.0, 440.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .collect();
    if pts.is_empty() {
        anyhow::bail!("nothing to plot (need positive data on log axes)");
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &pts {
        x0 = x0.min(x.log10());
        x1 = x1.max(x.log10());
        y0 = y0.min(y.log10());
        y1 = y1.max(y.log10());
    }
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| ml + (x.log10() - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y.log10() - y0) / (y1 - y0) * (h - mt - mb);
    let colors = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        0.5 * w,
        title
    ));
    // frame
    svg.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        w - ml - mr,
        h - mt - mb
    ));
    // decade ticks
    for d in (x0.floor() as i64)..=(x1.ceil() as i64) {
        let xx = ml + (d as f64 - x0) / (x1 - x0) * (w - ml - mr);
        if xx >= ml - 1.0 && xx <= w - mr + 1.0 {
            svg.push_str(&format!(
                "<line x1=\"{xx}\" y1=\"{}\" x2=\"{xx}\" y2=\"{}\" stroke=\"#ccc\"/>\n\
                 <text x=\"{xx}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">1e{d}</text>\n",
                mt,
                h - mb,
                h - mb + 16.0
            ));
        }
    }
    for d in (y0.floor() as i64)..=(y1.ceil() as i64) {
        let yy = h - mb - (d as f64 - y0) / (y1 - y0) * (h - mt - mb);
        if yy >= mt - 1.0 && yy <= h - mb + 1.0 {
            svg.push_str(&format!(
                "<line x1=\"{ml}\" y1=\"{yy}\" x2=\"{}\" y2=\"{yy}\" stroke=\"#ccc\"/>\n\
                 <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">1e{d}</text>\n",
                w - mr,
                ml - 6.0,
                yy + 4.0
            ));
        }
    }
    for (si, (name, data)) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let path_d: Vec<String> = data
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .enumerate()
            .map(|(i, (x, y))| {
                format!(
                    "{}{:.2},{:.2}",
                    if i == 0 { "M" } else { "L" },
                    sx(*x),
                    sy(*y)
                )
            })
            .collect();
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            path_d.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            w - mr - 150.0,
            mt + 18.0 + 16.0 * si as f64
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_hash_is_stable() {
        let mut m = RunManifest::new("gap");
        m.set("beta", 2).set("s", 4.0);
        let a = m.sha256();
        let mut m2 = RunManifest::new("gap");
        m2.set("s", 4.0).set("beta", 2);
        assert_eq!(a, m2.sha256());
        assert_eq!(a.len(), 64);
    }
}
