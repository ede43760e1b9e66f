//! Thin extended-precision layer over `astro-float`, used only by the
//! Stieltjes recurrence stage. All downstream evaluation is plain `f64`.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Extended-precision context: precision in bits plus the shared constants
/// cache needed by transcendental functions.
pub struct EpCtx {
    pub bits: usize,
    consts: Consts,
}

impl EpCtx {
    pub fn new(bits: usize) -> Self {
        EpCtx {
            bits: bits.max(64),
            consts: Consts::new().expect("constants cache"),
        }
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn from_i64(&self, k: i64) -> BigFloat {
        BigFloat::from_i64(k, self.bits)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.consts)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.consts)
    }

    /// `x^p` for real `p > 0`, `x > 0` (via exp/ln; exact shortcut by `pow`).
    pub fn powf(&mut self, x: &BigFloat, p: &BigFloat) -> BigFloat {
        x.pow(p, self.bits, RM, &mut self.consts)
    }

    /// Round to nearest `f64`.
    pub fn to_f64(&self, a: &BigFloat) -> f64 {
        big_to_f64(a)
    }
}

/// Lossy conversion `BigFloat -> f64` (round toward zero in the last bit;
/// overflow saturates to infinity, deep underflow flushes to zero).
pub fn big_to_f64(a: &BigFloat) -> f64 {
    if a.is_nan() {
        return f64::NAN;
    }
    if a.is_inf_pos() {
        return f64::INFINITY;
    }
    if a.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if a.is_zero() {
        return 0.0;
    }
    let (words, _n, sign, e, _inexact) = a.as_raw_parts().expect("finite value");
    // mantissa is little-endian with the top bit of the last word set;
    // value = frac * 2^e with frac in [1/2, 1)
    let nw = words.len();
    let top = words[nw - 1] as f64;
    let next = if nw >= 2 { words[nw - 2] as f64 } else { 0.0 };
    let frac = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let mag = frac * exp2i(e as i64);
    match sign {
        Sign::Pos => mag,
        Sign::Neg => -mag,
    }
}

/// `2^e` with saturation outside the `f64` exponent range.
fn exp2i(e: i64) -> f64 {
    if e > 1100 {
        f64::INFINITY
    } else if e < -1100 {
        0.0
    } else if e >= -1000 && e <= 1000 {
        f64::powi(2.0, e as i32)
    } else {
        // split to dodge intermediate overflow/underflow
        f64::powi(2.0, (e / 2) as i32) * f64::powi(2.0, (e - e / 2) as i32)
    }
}

/// Natural logarithm of the magnitude, computed from the raw exponent so it
/// stays finite far outside the `f64` range.
pub fn big_ln_abs(a: &BigFloat) -> f64 {
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (words, _n, _s, e, _i) = a.as_raw_parts().expect("finite value");
    let nw = words.len();
    let top = words[nw - 1] as f64;
    let next = if nw >= 2 { words[nw - 2] as f64 } else { 0.0 };
    let frac = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    frac.ln() + (e as f64) * std::f64::consts::LN_2
}

/// Gauss–Legendre reference nodes and weights on `[-1, 1]` in extended
/// precision. Newton iteration seeded by the `f64` nodes.
pub fn gauss_legendre_ep(q: usize, ctx: &EpCtx) -> (Vec<BigFloat>, Vec<BigFloat>) {
    let (nodes64, _) = crate::quad::gauss_legendre(q);
    let one = ctx.from_f64(1.0);
    let two = ctx.from_f64(2.0);
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    for &x0 in &nodes64 {
        let mut x = ctx.from_f64(x0);
        // quadratic convergence: 5 iterations take 53 bits beyond 2^11 bits
        for _ in 0..6 {
            let (p, dp) = legendre_pair_ep(q, &x, ctx);
            let dx = ctx.div(&p, &dp);
            x = ctx.sub(&x, &dx);
        }
        let (_, dp) = legendre_pair_ep(q, &x, ctx);
        let x2 = ctx.mul(&x, &x);
        let den = ctx.mul(&ctx.sub(&one, &x2), &ctx.mul(&dp, &dp));
        weights.push(ctx.div(&two, &den));
        nodes.push(x);
    }
    (nodes, weights)
}

fn legendre_pair_ep(q: usize, x: &BigFloat, ctx: &EpCtx) -> (BigFloat, BigFloat) {
    let mut p0 = ctx.from_f64(1.0);
    let mut p1 = x.clone();
    for k in 1..q {
        let kf = ctx.from_i64(k as i64);
        let k1 = ctx.from_i64(k as i64 + 1);
        let c = ctx.from_i64(2 * k as i64 + 1);
        let p2 = ctx.div(
            &ctx.sub(&ctx.mul(&ctx.mul(&c, x), &p1), &ctx.mul(&kf, &p0)),
            &k1,
        );
        p0 = p1;
        p1 = p2;
    }
    let qf = ctx.from_i64(q as i64);
    let num = ctx.mul(&qf, &ctx.sub(&ctx.mul(x, &p1), &p0));
    let den = ctx.sub(&ctx.mul(x, x), &ctx.from_f64(1.0));
    (p1, ctx.div(&num, &den))
}
