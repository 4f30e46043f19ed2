//! Parsing of complex amplitudes from command-line tokens.
//!
//! Accepted forms per component: `0.5`, `-0.25`, `i`, `-i`, `0.5i`,
//! `0.5+0.5i`, `1-0.3i`. Components are comma-separated.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

pub fn parse_complex(token: &str) -> Result<Complex64> {
    let t = token.trim();
    if t.is_empty() {
        bail!("empty amplitude token");
    }
    if !t.ends_with('i') {
        let re: f64 = t.parse().with_context(|| format!("bad real amplitude {t:?}"))?;
        return Ok(Complex64::new(re, 0.0));
    }
    let body = &t[..t.len() - 1];
    // split into real part and imaginary coefficient at the last +/- that is
    // not an exponent sign and not the leading sign
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im: f64 = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse().with_context(|| format!("bad imaginary part in {t:?}"))?,
    };
    let re: f64 = if re_str.is_empty() {
        0.0
    } else {
        re_str.parse().with_context(|| format!("bad real part in {t:?}"))?
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_amplitudes(list: &str) -> Result<Vec<Complex64>> {
    list.split(',').map(parse_complex).collect()
}
