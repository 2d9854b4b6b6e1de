//! Parsing of parameter grids and complex numbers from flag values.

use std::str::FromStr;

use musb_core::Complex64;

use crate::CliError;

/// `"start:stop:count"` (inclusive, evenly spaced) or a comma list
/// `"a,b,c"`. A single number is a one-point grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::usage("empty grid"));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(CliError::usage(format!("range grid must be start:stop:count, got {spec:?}")));
        };
        let start = parse_real(start)?;
        let stop = parse_real(stop)?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("grid count must be a nonnegative integer, got {count:?}")))?;
        return Ok(linspace(start, stop, count));
    }
    spec.split(',').map(parse_real).collect()
}

/// Evenly spaced points including both ends; `count = 1` gives `start`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn parse_real(s: &str) -> Result<f64, CliError> {
    let v = f64::from_str(s.trim()).map_err(|_| CliError::usage(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("not a finite number: {s:?}")))
    }
}

/// Accepts `a`, `bi`, `a+bi`, `a-bi` (also with `j`), e.g. `0.5-1.2i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::usage(format!("malformed complex number {s:?}; expected a+bi"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(parse_real(&t).map_err(|_| bad())?, 0.0));
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex64::new(parse_real(re).map_err(|_| bad())?, parse_real(im).map_err(|_| bad())?))
}

/// Rectangular complex grid `"re0:re1:n,im0:im1:m"`, row-major in the
/// imaginary part.
pub fn parse_complex_grid(spec: &str) -> Result<Vec<Complex64>, CliError> {
    let Some((re, im)) = spec.split_once(',') else {
        return Err(CliError::usage(format!("complex grid must be re0:re1:n,im0:im1:m, got {spec:?}")));
    };
    let re = parse_grid(re)?;
    let im = parse_grid(im)?;
    let points: Vec<Complex64> = im
        .iter()
        .flat_map(|&y| re.iter().map(move |&x| Complex64::new(x, y)))
        .collect();
    if points.is_empty() {
        return Err(CliError::usage("complex grid is empty"));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        assert_eq!(parse_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("-0.4,0,3").unwrap(), vec![-0.4, 0.0, 3.0]);
        assert_eq!(parse_grid("2").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1:0").unwrap().is_empty());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), Complex64::new(0.5, 0.25));
        assert_eq!(parse_complex("-1-2i").unwrap(), Complex64::new(-1.0, -2.0));
        assert_eq!(parse_complex("3i").unwrap(), Complex64::new(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e+1j").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("x+yi").is_err());
    }

    #[test]
    fn complex_grid_shape() {
        let g = parse_complex_grid("-1:1:3,0:2:2").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[4], Complex64::new(0.0, 2.0));
        assert!(parse_complex_grid("0:1:0,0:1:3").is_err());
    }
}
