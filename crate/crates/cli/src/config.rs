//! Run configuration: flat key=value files with command-line overrides.

use frobpencil_core::C64;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Compute,
    Verify,
    Sweep,
    Oracle,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Compute => "compute",
            Mode::Verify => "verify",
            Mode::Sweep => "sweep",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub genus: usize,
    pub n: usize,
    pub k: usize,
    /// Genus 0: the free coefficients `a_0..a_{n-2}` of `f`.
    /// Genus 1: `gamma_1..gamma_{n-1}, c0`.
    pub coeffs: Option<Vec<C64>>,
    pub tau: C64,
    pub p_a: C64,
    pub p_b: C64,
    /// Sweep grid `(rows, cols)` over the periods.
    pub grid: (usize, usize),
    /// Half-width of the period sweep window.
    pub grid_radius: f64,
    pub seed: u64,
    /// Multiplier applied to the per-genus default thresholds.
    pub tol_scale: f64,
    /// Trials for oracle mode.
    pub count: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Verify,
            genus: 0,
            n: 3,
            k: 2,
            coeffs: None,
            tau: C64::new(0.3, 1.1),
            p_a: C64::new(1.0, 0.0),
            p_b: C64::new(2.0, 1.0),
            grid: (5, 5),
            grid_radius: 0.4,
            seed: 1,
            tol_scale: 1.0,
            count: 50,
            out: None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parse `re+imi` and plain-real complex literals: `0.3+1.1i`, `-2e-3-0.5i`,
/// `1.5`, `2i`, `-i`.
pub fn parse_complex(s: &str) -> Result<C64, ConfigError> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err(ConfigError("empty complex literal".into()));
    }
    let err = || ConfigError(format!("cannot parse complex number `{s}`"));
    if !t.ends_with('i') {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| err());
    }
    let body = &t[..t.len() - 1];
    // split at the last +/- that is not part of an exponent and not leading
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && bytes[i - 1] as char != 'e' && bytes[i - 1] as char != 'E' {
            split = Some(i);
            break;
        }
    }
    match split {
        None => {
            // pure imaginary
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|_| err())?,
            };
            Ok(C64::new(0.0, im))
        }
        Some(i) => {
            let re: f64 = body[..i].parse().map_err(|_| err())?;
            let im_str = &body[i..];
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|_| err())?,
            };
            Ok(C64::new(re, im))
        }
    }
}

pub fn parse_complex_list(s: &str) -> Result<Vec<C64>, ConfigError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_complex)
        .collect()
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), ConfigError> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(ConfigError(format!("grid must look like 5x5, got `{s}`")));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad grid rows `{s}`")))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad grid cols `{s}`")))?;
    if a == 0 || b == 0 {
        return Err(ConfigError("grid must be nonempty".into()));
    }
    Ok((a, b))
}

/// Key=value file, `#` comments. Returns the raw pairs for the caller to
/// apply before command-line overrides.
pub fn read_config_file(path: &std::path::Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            )));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "mode" => {
                self.mode = match value {
                    "compute" => Mode::Compute,
                    "verify" => Mode::Verify,
                    "sweep" => Mode::Sweep,
                    "oracle" => Mode::Oracle,
                    other => return Err(ConfigError(format!("unknown mode `{other}`"))),
                }
            }
            "genus" => {
                self.genus = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad genus `{value}`")))?;
                if self.genus > 1 {
                    return Err(ConfigError("genus must be 0 or 1".into()));
                }
            }
            "n" => {
                self.n = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad n `{value}`")))?
            }
            "k" => {
                self.k = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad k `{value}`")))?
            }
            "coeffs" => self.coeffs = Some(parse_complex_list(value)?),
            "tau" => self.tau = parse_complex(value)?,
            "pa" => self.p_a = parse_complex(value)?,
            "pb" => self.p_b = parse_complex(value)?,
            "grid" => self.grid = parse_grid(value)?,
            "grid_radius" => {
                self.grid_radius = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad grid_radius `{value}`")))?
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad seed `{value}`")))?
            }
            "tol" => {
                self.tol_scale = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad tol `{value}`")))?;
                if self.tol_scale <= 0.0 {
                    return Err(ConfigError("tol must be positive".into()));
                }
            }
            "count" => {
                self.count = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad count `{value}`")))?
            }
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(ConfigError(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError("n must be at least 2".into()));
        }
        if self.k < 2 || self.k > self.n {
            return Err(ConfigError(format!(
                "k must satisfy 2 <= k <= n (k={}, n={})",
                self.k, self.n
            )));
        }
        if self.genus == 1 && self.tau.im <= 0.0 {
            return Err(ConfigError("tau must have positive imaginary part".into()));
        }
        if let Some(coeffs) = &self.coeffs {
            let want = if self.genus == 0 { self.n - 1 } else { self.n };
            if coeffs.len() != want {
                return Err(ConfigError(format!(
                    "coeffs must have {want} entries at genus {} with n = {}, got {}",
                    self.genus,
                    self.n,
                    coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.3+1.1i").unwrap(), C64::new(0.3, 1.1));
        assert_eq!(parse_complex("-2e-3-0.5i").unwrap(), C64::new(-2e-3, -0.5));
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("2+1i").unwrap(), C64::new(2.0, 1.0));
        assert!(parse_complex("nonsense").is_err());
    }

    #[test]
    fn grid_literals() {
        assert_eq!(parse_grid("5x5").unwrap(), (5, 5));
        assert!(parse_grid("0x3").is_err());
    }
}
