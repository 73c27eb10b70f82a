//! Tiny grammar for angle expressions: `pi`, `pi/4`, `3*pi/2`, `-pi`, or a
//! plain decimal, avoiding decimal-π drift on the command line.

use std::f64::consts::PI;

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().replace(' ', "");
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, t),
    };
    if !t.contains("pi") {
        return t
            .parse::<f64>()
            .map(|v| sign * v)
            .map_err(|_| format!("cannot parse angle '{s}'"));
    }
    let (num_part, den): (&str, f64) = match t.split_once('/') {
        Some((n, d)) => (
            n,
            d.parse::<f64>()
                .map_err(|_| format!("bad denominator in '{s}'"))?,
        ),
        None => (t.as_str(), 1.0),
    };
    if den == 0.0 {
        return Err(format!("zero denominator in '{s}'"));
    }
    let coeff = match num_part.strip_suffix("pi") {
        Some("") => 1.0,
        Some(c) => {
            let c = c.strip_suffix('*').unwrap_or(c);
            c.parse::<f64>().map_err(|_| format!("bad coefficient in '{s}'"))?
        }
        None => return Err(format!("expected a pi-fraction in '{s}'")),
    };
    Ok(sign * coeff * PI / den)
}
