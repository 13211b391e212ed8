//! Parsing of lengths, inverse lengths and angles given on the command line.
//!
//! Lengths and inverse lengths must carry a unit so that millimetres and metres
//! cannot be confused; everything is converted to metres.

use std::f64::consts::PI;

fn split_unit<'a>(s: &'a str, units: &[(&str, f64)]) -> Option<(&'a str, f64)> {
    let s = s.trim();
    units
        .iter()
        .find_map(|&(u, scale)| s.strip_suffix(u).map(|v| (v.trim(), scale)))
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("cannot read {what} from '{s}'"))?;
    if !v.is_finite() {
        return Err(format!("{what} must be finite, got '{s}'"));
    }
    Ok(v)
}

/// `50mm`, `0.05m`.
pub fn parse_length(s: &str) -> Result<f64, String> {
    let (v, scale) = split_unit(s, &[("mm", 1e-3), ("m", 1.0)])
        .ok_or_else(|| format!("length '{s}' needs a unit suffix, mm or m"))?;
    Ok(number(v, "length")? * scale)
}

/// `0.1414/mm`, `141.4/m`, in 1/m.
pub fn parse_inverse_length(s: &str) -> Result<f64, String> {
    let (v, scale) = split_unit(s, &[("/mm", 1e3), ("/m", 1.0)])
        .ok_or_else(|| format!("inverse length '{s}' needs a unit suffix, /mm or /m"))?;
    Ok(number(v, "inverse length")? * scale)
}

/// Radians, `45deg`, or multiples of pi such as `pi/4`, `2pi/3`, `0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(v) = s.strip_suffix("deg") {
        return Ok(number(v.trim(), "angle")? * PI / 180.0);
    }
    let Some(at) = s.find("pi") else {
        return number(s, "angle");
    };
    let (head, tail) = (s[..at].trim().trim_end_matches('*'), s[at + 2..].trim());
    let factor = if head.is_empty() {
        1.0
    } else {
        number(head, "angle")?
    };
    let divisor = match tail.strip_prefix('/') {
        Some(d) => number(d.trim(), "angle")?,
        None if tail.is_empty() => 1.0,
        None => return Err(format!("cannot read angle from '{s}'")),
    };
    Ok(factor * PI / divisor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units() {
        assert_eq!(parse_length("50mm").unwrap(), 0.05);
        assert_eq!(parse_length("0.05 m").unwrap(), 0.05);
        assert!(parse_length("0.05").is_err());
        assert!((parse_inverse_length("0.2/mm").unwrap() - 200.0).abs() < 1e-12);
        assert_eq!(parse_inverse_length("3/m").unwrap(), 3.0);
        assert!(parse_inverse_length("3").is_err());
        assert!((parse_angle("pi/4").unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("45deg").unwrap() - PI / 4.0).abs() < 1e-15);
        assert_eq!(parse_angle("1.0").unwrap(), 1.0);
        assert!(parse_angle("pi+1").is_err());
    }
}
