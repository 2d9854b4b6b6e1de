//! Named probe functions `p(q)·e^{-rate·q²}` and their JSON form.

use std::path::Path;

use musb_core::heat::sigma_polygauss;
use musb_core::transforms::ground_state;
use musb_core::{Complex64, MuParam, PolyGauss};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Serialized probe: `coeffs[k] = [re, im]` multiplies `q^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub name: String,
    pub coeffs: Vec<[f64; 2]>,
    pub rate: f64,
}

impl ProbeSpec {
    pub fn from_polygauss(name: impl Into<String>, f: &PolyGauss) -> Self {
        ProbeSpec {
            name: name.into(),
            coeffs: f.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            rate: f.rate(),
        }
    }

    pub fn to_polygauss(&self) -> Result<PolyGauss, CliError> {
        let coeffs = self.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        PolyGauss::new(coeffs, self.rate)
            .map_err(|e| CliError::usage(format!("probe {:?}: {e}", self.name)))
    }
}

pub const BUILTIN_NAMES: &str = "const, gauss, sigma, ground, hermite-0 .. hermite-5";

/// Builtin probes; `hermite-k` is `q^k e^{-q²/2t}`, `sigma` is `σ_{μ,t}` and
/// `ground` its square root.
pub fn builtin(name: &str, mu: f64, t: f64) -> Result<Option<ProbeSpec>, CliError> {
    let p = MuParam::new(mu, t).map_err(CliError::from_core)?;
    let f = match name {
        "const" => PolyGauss::from_real(&[1.0], 0.0),
        "gauss" => PolyGauss::from_real(&[1.0], 0.5),
        "sigma" => Ok(sigma_polygauss(&p)),
        "ground" => ground_state(mu, t),
        other => match other.strip_prefix("hermite-").map(str::parse::<usize>) {
            Some(Ok(k)) if k <= 5 => PolyGauss::monomial(k, 0.5 / t),
            Some(_) => return Err(CliError::usage(format!("unknown builtin probe {other:?}; builtins: {BUILTIN_NAMES}"))),
            None => return Ok(None),
        },
    }
    .map_err(CliError::from_core)?;
    Ok(Some(ProbeSpec::from_polygauss(name, &f)))
}

/// A builtin name, or else a path to a JSON [`ProbeSpec`].
pub fn resolve(name_or_path: &str, mu: f64, t: f64) -> Result<ProbeSpec, CliError> {
    if let Some(spec) = builtin(name_or_path, mu, t)? {
        return Ok(spec);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(CliError::usage(format!(
            "probe {name_or_path:?} is neither a builtin ({BUILTIN_NAMES}) nor a file"
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read probe file {}: {e}", path.display())))?;
    let spec: ProbeSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid probe file {}: {e}", path.display())))?;
    spec.to_polygauss()?;
    Ok(spec)
}
