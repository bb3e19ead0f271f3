//! Text descriptors for states and beam-splitter settings.
//!
//! States are written `kind[:params]`, with comma-separated `key=value`
//! parameters:
//!
//! | descriptor | state |
//! |---|---|
//! | `fock:3`, `fock:n=3,cutoff=10` | `|3⟩` |
//! | `coherent:beta=3`, `coherent:beta=1+0.5i` | coherent state |
//! | `thermal:nbar=9` | Bose-Einstein mixture |
//! | `oddcat:alpha=2` | odd cat state |
//! | `smss:r=0.5,phi=0` | squeezed vacuum |
//! | `pasmss:r=0.5,phi=0` | photon-added squeezed vacuum |
//! | `superposition:1,3`, `superposition:1=0.6,3=0.8i` | normalized Fock superposition |
//! | `custom:file=state.json` | amplitudes or density matrix from JSON |
//!
//! `cutoff=N` fixes the cutoff (rejected if the tail is not negligible) and
//! `truncate=N` keeps a lossy truncation; without either the cutoff is chosen
//! automatically.
//!
//! A custom state file holds one of
//! `{"amplitudes": [...]}`, `{"rho": [[...], ...]}` or `{"diagonal": [...]}`,
//! where each entry is a number or a `[re, im]` pair.

use std::path::Path;
use std::str::FromStr;

use homlab_core::bs::BeamSplitter;
use homlab_core::numerics::{BigInt, BigRational};
use homlab_core::states::{
    coherent, fock, odd_cat, photon_added_smss, smss, superposition, thermal, Cutoff, MixedState, PureState, State,
};
use homlab_core::Complex64;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::error::{CliError, CliResult, Context};

fn bad(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("{flag}: {msg}"))
}

/// Exact rational from `p/q`, an integer or a finite decimal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(digits, scale);
    Some(if neg { -value } else { value })
}

/// `"1/2"`, `"0.75"`, `"balanced"` (exact) or `"theta=1.0472"` (radians).
pub fn parse_bs(spec: &str, flag: &str) -> CliResult<BeamSplitter> {
    let spec = spec.trim();
    if spec == "balanced" {
        return Ok(BeamSplitter::balanced());
    }
    if let Some(theta) = spec.strip_prefix("theta=") {
        let theta: f64 = theta.trim().parse().map_err(|_| bad(flag, format!("cannot read angle '{theta}'")))?;
        return BeamSplitter::angle(theta).context(flag);
    }
    let t = parse_rational(spec)
        .ok_or_else(|| bad(flag, format!("expected a fraction like 1/2 or theta=<radians>, got '{spec}'")))?;
    BeamSplitter::exact(t).context(flag)
}

/// Parses a state descriptor; `flag` names the option in error messages.
pub fn parse_state(desc: &str, flag: &str) -> CliResult<State> {
    let desc = desc.trim();
    let (kind, rest) = desc.split_once(':').unwrap_or((desc, ""));
    if kind == "custom" {
        let path = rest
            .strip_prefix("file=")
            .ok_or_else(|| bad(flag, "custom states need file=<path>"))?;
        return load_custom(Path::new(path), flag);
    }
    let params = Params::parse(rest, flag)?;
    let state: State = match kind {
        "fock" => {
            let n = match params.positional.as_slice() {
                [n] => parse_usize(n, flag, "n")?,
                [] => params.usize("n")?.ok_or_else(|| bad(flag, "fock needs a photon number"))?,
                _ => return Err(bad(flag, "fock takes one photon number")),
            };
            let cutoff = params.usize("cutoff")?.unwrap_or(n);
            params.finish(&["n", "cutoff"])?;
            fock(n, cutoff).context(flag)?.into()
        }
        "coherent" => {
            let beta = params.complex("beta")?.ok_or_else(|| bad(flag, "coherent needs beta=<value>"))?;
            let cutoff = params.cutoff()?;
            params.finish(&["beta", "cutoff", "truncate"])?;
            coherent(beta, cutoff).context(flag)?.into()
        }
        "thermal" => {
            let nbar = params.real("nbar")?.ok_or_else(|| bad(flag, "thermal needs nbar=<value>"))?;
            let cutoff = params.cutoff()?;
            params.finish(&["nbar", "cutoff", "truncate"])?;
            State::Mixed(thermal(nbar, cutoff).context(flag)?)
        }
        "oddcat" => {
            let alpha = params.complex("alpha")?.ok_or_else(|| bad(flag, "oddcat needs alpha=<value>"))?;
            let cutoff = params.cutoff()?;
            params.finish(&["alpha", "cutoff", "truncate"])?;
            odd_cat(alpha, cutoff).context(flag)?.into()
        }
        "smss" | "pasmss" => {
            let r = params.real("r")?.ok_or_else(|| bad(flag, format!("{kind} needs r=<value>")))?;
            let phi = params.real("phi")?.unwrap_or(0.0);
            let cutoff = params.cutoff()?;
            params.finish(&["r", "phi", "cutoff", "truncate"])?;
            if kind == "smss" {
                smss(r, phi, cutoff).context(flag)?.into()
            } else {
                photon_added_smss(r, phi, cutoff).context(flag)?.into()
            }
        }
        "superposition" => {
            let mut terms = Vec::new();
            for p in &params.positional {
                terms.push((parse_usize(p, flag, "photon number")?, Complex64::one()));
            }
            for (k, v) in &params.named {
                let n = parse_usize(k, flag, "photon number")?;
                let w = Complex64::from_str(v).map_err(|_| bad(flag, format!("cannot read weight '{v}'")))?;
                terms.push((n, w));
            }
            superposition(&terms).context(flag)?.into()
        }
        "" => return Err(bad(flag, "empty state descriptor")),
        other => {
            return Err(bad(
                flag,
                format!("unknown state kind '{other}' (fock, coherent, thermal, oddcat, smss, pasmss, superposition, custom)"),
            ))
        }
    };
    Ok(state)
}

fn parse_usize(s: &str, flag: &str, what: &str) -> CliResult<usize> {
    s.trim().parse().map_err(|_| bad(flag, format!("{what} '{s}' is not a non-negative integer")))
}

struct Params<'a> {
    flag: &'a str,
    positional: Vec<String>,
    named: Vec<(String, String)>,
}

impl<'a> Params<'a> {
    fn parse(rest: &str, flag: &'a str) -> CliResult<Self> {
        let mut positional = Vec::new();
        let mut named = Vec::new();
        for token in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token.split_once('=') {
                Some((k, v)) => named.push((k.trim().to_string(), v.trim().to_string())),
                None => positional.push(token.to_string()),
            }
        }
        Ok(Params { flag, positional, named })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.named.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn usize(&self, key: &str) -> CliResult<Option<usize>> {
        self.get(key).map(|v| parse_usize(v, self.flag, key)).transpose()
    }

    fn real(&self, key: &str) -> CliResult<Option<f64>> {
        self.get(key)
            .map(|v| v.parse::<f64>().map_err(|_| bad(self.flag, format!("{key}='{v}' is not a number"))))
            .transpose()
    }

    fn complex(&self, key: &str) -> CliResult<Option<Complex64>> {
        self.get(key)
            .map(|v| Complex64::from_str(v).map_err(|_| bad(self.flag, format!("{key}='{v}' is not a complex number"))))
            .transpose()
    }

    fn cutoff(&self) -> CliResult<Cutoff> {
        match (self.usize("cutoff")?, self.usize("truncate")?) {
            (Some(_), Some(_)) => Err(bad(self.flag, "give either cutoff or truncate, not both")),
            (Some(n), None) => Ok(Cutoff::Fixed(n)),
            (None, Some(n)) => Ok(Cutoff::Truncate(n)),
            (None, None) => Ok(Cutoff::Auto),
        }
    }

    fn finish(&self, allowed: &[&str]) -> CliResult<()> {
        if let Some((k, _)) = self.named.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(bad(self.flag, format!("unknown parameter '{k}'")));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl Entry {
    fn value(&self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(*x, 0.0),
            Entry::Pair([re, im]) => Complex64::new(*re, *im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomFile {
    label: Option<String>,
    amplitudes: Option<Vec<Entry>>,
    rho: Option<Vec<Vec<Entry>>>,
    diagonal: Option<Vec<f64>>,
}

fn load_custom(path: &Path, flag: &str) -> CliResult<State> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: CustomFile =
        serde_json::from_str(&text).map_err(|e| bad(flag, format!("{}: {e}", path.display())))?;
    let label = file.label.clone().unwrap_or_else(|| format!("custom:{}", path.display()));
    match (file.amplitudes, file.rho, file.diagonal) {
        (Some(amps), None, None) => {
            let amps = amps.iter().map(Entry::value).collect();
            Ok(PureState::from_amplitudes(amps, label).context(flag)?.into())
        }
        (None, Some(rows), None) => {
            let dim = rows.len();
            if rows.iter().any(|r| r.len() != dim) {
                return Err(bad(flag, format!("{}: rho must be square", path.display())));
            }
            let rho = rows.iter().flatten().map(Entry::value).collect();
            Ok(State::Mixed(MixedState::from_matrix(dim, rho, label).context(flag)?))
        }
        (None, None, Some(diag)) => Ok(State::Mixed(MixedState::from_diagonal(&diag, label).context(flag)?)),
        _ => Err(bad(
            flag,
            format!("{}: give exactly one of amplitudes, rho, diagonal", path.display()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use homlab_core::numerics::ratio;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("0.75"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("1"), Some(ratio(1, 1)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1e-3"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn settings() {
        assert_eq!(parse_bs("1/2", "--bs").unwrap(), BeamSplitter::balanced());
        assert_eq!(parse_bs("balanced", "--bs").unwrap(), BeamSplitter::balanced());
        assert_eq!(parse_bs("theta=1.0472", "--bs").unwrap(), BeamSplitter::Angle(1.0472));
        let e = parse_bs("3/2", "--bs").unwrap_err();
        assert_eq!(e.code(), 3);
        assert!(e.to_string().starts_with("--bs"));
        assert_eq!(parse_bs("half", "--bs").unwrap_err().code(), 2);
    }

    #[test]
    fn states() {
        let s = parse_state("fock:3", "--a").unwrap();
        assert_eq!(s.cutoff(), 3);
        assert_eq!(parse_state("fock:n=2,cutoff=6", "--a").unwrap().cutoff(), 6);
        let c = parse_state("coherent:beta=3", "--b").unwrap();
        assert!(matches!(c, State::Pure(ref p) if (p.mean_photon_number() - 9.0).abs() < 1e-6));
        let c = parse_state("coherent:beta=1+1i", "--b").unwrap();
        assert!(matches!(c, State::Pure(ref p) if (p.mean_photon_number() - 2.0).abs() < 1e-6));
        assert!(matches!(parse_state("thermal:nbar=9", "--b").unwrap(), State::Mixed(_)));
        assert!(parse_state("oddcat:alpha=2", "--a").is_ok());
        assert!(parse_state("pasmss:r=0.5", "--a").is_ok());
        assert!(parse_state("smss:r=0.5,phi=0.2", "--a").is_ok());
        let s = parse_state("superposition:1,3", "--a").unwrap();
        assert_eq!(s.label(), "superposition:1,3");
        assert!(parse_state("superposition:1=0.6,3=0.8i", "--a").is_ok());
        assert_eq!(parse_state("coherent:beta=3,truncate=5", "--b").unwrap().cutoff(), 5);
    }

    #[test]
    fn state_errors_name_the_flag() {
        for (desc, code) in [
            ("laser:3", 2),
            ("fock", 2),
            ("fock:x", 2),
            ("coherent:beta=3,colour=red", 2),
            ("coherent:beta=3,cutoff=5", 3),
            ("thermal:nbar=-1", 3),
            ("oddcat:alpha=0", 3),
            ("custom:file=/nonexistent/state.json", 4),
        ] {
            let e = parse_state(desc, "--b").unwrap_err();
            assert_eq!(e.code(), code, "{desc}: {e}");
            assert!(e.to_string().contains("--b") || code == 4, "{e}");
        }
    }

    #[test]
    fn custom_files() {
        let dir = tempfile::tempdir().unwrap();
        let pure = dir.path().join("pure.json");
        std::fs::write(&pure, r#"{"amplitudes": [0.6, [0, 0.8]]}"#).unwrap();
        let s = parse_state(&format!("custom:file={}", pure.display()), "--a").unwrap();
        assert!(matches!(s, State::Pure(ref p) if p.amplitude(1) == Complex64::new(0.0, 0.8)));
        let mixed = dir.path().join("mixed.json");
        std::fs::write(&mixed, r#"{"label": "m", "rho": [[0.5, [0.1, 0.2]], [[0.1, -0.2], 0.5]]}"#).unwrap();
        let s = parse_state(&format!("custom:file={}", mixed.display()), "--a").unwrap();
        assert_eq!(s.label(), "m");
        let diag = dir.path().join("diag.json");
        std::fs::write(&diag, r#"{"diagonal": [0.25, 0.75]}"#).unwrap();
        assert!(parse_state(&format!("custom:file={}", diag.display()), "--a").is_ok());
        let both = dir.path().join("both.json");
        std::fs::write(&both, r#"{"diagonal": [1], "amplitudes": [1]}"#).unwrap();
        assert_eq!(parse_state(&format!("custom:file={}", both.display()), "--a").unwrap_err().code(), 2);
    }
}
