//! Parsing of complex literals and angles given on the command line.

use std::f64::consts::PI;

use laguerre_core::{annulus_bounds, Complex64, Degree};

/// An angle in radians: a number, or a multiple of `pi` such as `pi/8`,
/// `3pi/16`, `-2*pi/5` or `0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.trim().replace('π', "pi").chars().filter(|c| !c.is_whitespace()).collect();
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| format!("invalid angle '{s}'"));
    };
    let head = t[..at].trim_end_matches('*');
    let tail = &t[at + 2..];
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("invalid angle '{s}'"))?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("invalid angle '{s}'"))?,
    };
    Ok(coeff * PI / divisor)
}

fn parse_real(s: &str, whole: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("invalid complex literal '{whole}'"))
}

/// `a+bi`, `a-bi`, `a`, `bi`, polar `r@theta`, or `r e^{i theta}`. The
/// named points `s0-theta1`, `inv-s0-theta1`, `r0` and `inv-r0` refer to the
/// annulus radii of degree `n` (which must then be at least 5).
pub fn parse_complex(s: &str, n: Option<Degree>) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(z) = named_point(&t, n)? {
        return Ok(z);
    }
    if let Some((r, theta)) = t.split_once('@') {
        return Ok(Complex64::from_polar(parse_real(r, s)?, parse_angle(theta)?));
    }
    if let Some(at) = t.find("e^") {
        let r = if at == 0 { 1.0 } else { parse_real(&t[..at], s)? };
        let exp = t[at + 2..].trim_start_matches('{').trim_end_matches('}');
        let theta = exp
            .strip_prefix('i')
            .or_else(|| exp.strip_suffix('i'))
            .ok_or_else(|| format!("invalid complex literal '{s}'"))?;
        return Ok(Complex64::from_polar(r, parse_angle(theta.trim_matches(|c| c == '(' || c == ')'))?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&t, s)?, 0.0));
    };
    // Split at the last sign that is not the leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => parse_real(p.trim_end_matches('*'), s),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(parse_real(&body[..k], s)?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn named_point(t: &str, n: Option<Degree>) -> Result<Option<Complex64>, String> {
    let names = ["s0-theta1", "inv-s0-theta1", "r0", "inv-r0"];
    if !names.contains(&t) {
        return Ok(None);
    }
    let n = n.ok_or_else(|| format!("'{t}' needs a degree"))?;
    let b = annulus_bounds(n).map_err(|e| format!("'{t}' needs n >= 5: {e}"))?;
    let theta1 = PI / n.as_f64();
    Ok(Some(match t {
        "s0-theta1" => Complex64::from_polar(b.s0, theta1),
        "inv-s0-theta1" => Complex64::from_polar(b.s0.recip(), theta1),
        "r0" => Complex64::new(b.r0, 0.0),
        _ => Complex64::new(b.r0.recip(), 0.0),
    }))
}
