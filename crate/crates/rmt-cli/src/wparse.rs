//! Mini-grammar for external-field polynomials: sums of terms like
//! `x`, `2x`, `0.5x^3`, `1.25`, joined by `+` / `-`. Whitespace ignored.

use anyhow::{bail, Result};

/// Parse a field expression into ascending-degree coefficients.
pub fn parse_field(spec: &str) -> Result<Vec<f64>> {
    let cleaned: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        bail!("empty field expression");
    }
    let mut coeffs: Vec<f64> = Vec::new();
    let mut term = String::new();
    let mut terms: Vec<String> = Vec::new();
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !term.ends_with('^') {
            terms.push(term.clone());
            term.clear();
        }
        if !(ch == '+' && term.is_empty() && i > 0) {
            term.push(ch);
        }
    }
    terms.push(term);
    for t in terms {
        let t = t.strip_prefix('+').unwrap_or(&t).to_string();
        let (coef_str, degree) = match t.find('x') {
            None => (t.as_str(), 0usize),
            Some(ix) => {
                let deg = match t[ix + 1..].strip_prefix('^') {
                    None if t[ix + 1..].is_empty() => 1usize,
                    None => bail!("malformed term {t:?}"),
                    Some(d) => d
                        .parse::<usize>()
                        .map_err(|_| anyhow::anyhow!("bad exponent in term {t:?}"))?,
                };
                (&t[..ix], deg)
            }
        };
        let coef: f64 = match coef_str {
            "" => 1.0,
            "-" => -1.0,
            s => s
                .parse()
                .map_err(|_| anyhow::anyhow!("bad coefficient in term {t:?}"))?,
        };
        if coeffs.len() <= degree {
            coeffs.resize(degree + 1, 0.0);
        }
        coeffs[degree] += coef;
    }
    Ok(coeffs)
}

/// Parse `a,b,c` into numbers.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("cannot parse list element {p:?}"))
        })
        .collect()
}

/// Parse `lo..hi` (inclusive) or a comma list into integers.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse()?;
        let hi: usize = hi.trim().parse()?;
        if hi < lo {
            bail!("empty range {s:?}");
        }
        Ok((lo..=hi).collect())
    } else {
        parse_list(s)
    }
}
