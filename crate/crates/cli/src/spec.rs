//! Channel-spec files: one `key: value` (or `key = value`) pair per line,
//! `#` starts a comment.
//!
//! ```text
//! kind: pauli              # pauli | depolarizing | xz | generalized_pauli | kraus
//! p: (0.97, 0.01, 0.01, 0.01)
//! ```
//!
//! * `pauli`: `p` (or `probabilities`) lists the I, X, Y, Z weights.
//! * `depolarizing`: scalar `p`.
//! * `xz`: bit-flip rate `p`, phase-flip rate `q` (defaults to `p`).
//! * `generalized_pauli`: `dimension` d and `d²` weights, index `k·d + l`
//!   for `X^k Z^l`.
//! * `kraus`: input `dimension` and one `kraus` line per operator holding its
//!   row-major entries (`;` may separate rows). Complex entries use `a+bi`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use lownoise::channel::{depolarizing, generalized_pauli, pauli, xz_channel};
use lownoise::{Channel, Matrix, C64};
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("{}{message}", location(*.line))]
pub struct SpecError {
    pub line: Option<usize>,
    pub message: String,
}

fn location(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError { line: Some(line), message: message.into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Pauli,
    Depolarizing,
    Xz,
    GeneralizedPauli,
    Kraus,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Pauli => "pauli",
            Kind::Depolarizing => "depolarizing",
            Kind::Xz => "xz",
            Kind::GeneralizedPauli => "generalized_pauli",
            Kind::Kraus => "kraus",
        })
    }
}

/// A parsed spec: the channel and the kind it was declared as.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub kind: Kind,
    pub channel: Channel,
}

struct Entry {
    line: usize,
    value: String,
}

pub fn parse(text: &str) -> Result<ChannelSpec, SpecError> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut kraus: Vec<Entry> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(sep) = content.find([':', '=']) else {
            return err(line, format!("expected `key: value`, got `{content}`"));
        };
        let key = content[..sep].trim().to_ascii_lowercase();
        let value = content[sep + 1..].trim().to_string();
        if value.is_empty() {
            return err(line, format!("key `{key}` has no value"));
        }
        if key == "kraus" {
            kraus.push(Entry { line, value });
            continue;
        }
        if !matches!(key.as_str(), "kind" | "dimension" | "p" | "q" | "probabilities") {
            return err(line, format!("unknown key `{key}`"));
        }
        if let Some(prev) = entries.get(&key) {
            return err(line, format!("duplicate key `{key}` (first set on line {})", prev.line));
        }
        entries.insert(key, Entry { line, value });
    }

    let missing = |key: &str| SpecError { line: Some(last_line.max(1)), message: format!("missing key `{key}`") };
    let kind_entry = entries.get("kind").ok_or_else(|| missing("kind"))?;
    let kind = match kind_entry.value.to_ascii_lowercase().as_str() {
        "pauli" => Kind::Pauli,
        "depolarizing" => Kind::Depolarizing,
        "xz" => Kind::Xz,
        "generalized_pauli" => Kind::GeneralizedPauli,
        "kraus" => Kind::Kraus,
        other => return err(kind_entry.line, format!("unknown kind `{other}`")),
    };
    if kind != Kind::Kraus {
        if let Some(first) = kraus.first() {
            return err(first.line, format!("`kraus` lines are only allowed for kind kraus, not {kind}"));
        }
    }

    let dimension = match entries.get("dimension") {
        Some(e) => Some((e.line, parse_usize(e)?)),
        None => None,
    };
    if matches!(kind, Kind::Pauli | Kind::Depolarizing | Kind::Xz) {
        if let Some((line, d)) = dimension {
            if d != 2 {
                return err(line, format!("{kind} channels act on qubits, got dimension {d}"));
            }
        }
    }
    let allowed: &[&str] = match kind {
        Kind::Pauli => &["kind", "dimension", "p", "probabilities"],
        Kind::Depolarizing => &["kind", "dimension", "p"],
        Kind::Xz => &["kind", "dimension", "p", "q"],
        Kind::GeneralizedPauli => &["kind", "dimension", "p", "probabilities"],
        Kind::Kraus => &["kind", "dimension"],
    };
    let mut keys: Vec<_> = entries.iter().collect();
    keys.sort_by_key(|(_, e)| e.line);
    if let Some((key, e)) = keys.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return err(e.line, format!("key `{key}` does not apply to kind {kind}"));
    }

    let weights = || -> Result<&Entry, SpecError> {
        match (entries.get("p"), entries.get("probabilities")) {
            (Some(a), Some(b)) => err(a.line.max(b.line), "give either `p` or `probabilities`, not both"),
            (Some(e), None) | (None, Some(e)) => Ok(e),
            (None, None) => Err(missing("p")),
        }
    };
    let build = |line: usize, r: lownoise::Result<Channel>| r.or_else(|e| err(line, e.to_string()));

    let channel = match kind {
        Kind::Pauli => {
            let e = weights()?;
            let w = parse_reals(e)?;
            let Ok(probs) = <[f64; 4]>::try_from(w.as_slice()) else {
                return err(e.line, format!("pauli needs 4 weights (I, X, Y, Z), got {}", w.len()));
            };
            build(e.line, pauli(probs))?
        }
        Kind::Depolarizing => {
            let e = entries.get("p").ok_or_else(|| missing("p"))?;
            build(e.line, depolarizing(parse_real(e)?))?
        }
        Kind::Xz => {
            let e = entries.get("p").ok_or_else(|| missing("p"))?;
            let p = parse_real(e)?;
            let (line, q) = match entries.get("q") {
                Some(q) => (q.line, parse_real(q)?),
                None => (e.line, p),
            };
            build(line, xz_channel(p, q))?
        }
        Kind::GeneralizedPauli => {
            let (_, d) = dimension.ok_or_else(|| missing("dimension"))?;
            let e = weights()?;
            let w = parse_reals(e)?;
            if w.len() != d * d {
                return err(e.line, format!("dimension {d} needs {} weights, got {}", d * d, w.len()));
            }
            build(e.line, generalized_pauli(d, &w))?
        }
        Kind::Kraus => {
            let (dim_line, d_in) = dimension.ok_or_else(|| missing("dimension"))?;
            if d_in == 0 {
                return err(dim_line, "dimension must be positive");
            }
            if kraus.is_empty() {
                return Err(missing("kraus"));
            }
            let mut ops = Vec::with_capacity(kraus.len());
            let mut d_out = None;
            for e in &kraus {
                let entries = parse_complexes(e)?;
                if entries.len() % d_in != 0 {
                    return err(e.line, format!("{} entries do not fill rows of length {d_in}", entries.len()));
                }
                let rows = entries.len() / d_in;
                if *d_out.get_or_insert(rows) != rows {
                    return err(e.line, format!("Kraus operator has {rows} rows, earlier ones have {}", d_out.unwrap()));
                }
                ops.push(Matrix::from_fn(rows, d_in, |i, j| entries[i * d_in + j]));
            }
            build(kraus[0].line, Channel::new(ops))?
        }
    };
    Ok(ChannelSpec { kind, channel })
}

fn parse_usize(e: &Entry) -> Result<usize, SpecError> {
    e.value.parse().or_else(|_| err(e.line, format!("expected a positive integer, got `{}`", e.value)))
}

fn parse_real(e: &Entry) -> Result<f64, SpecError> {
    match e.value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(e.line, format!("expected a number, got `{}`", e.value)),
    }
}

fn list_items(value: &str) -> impl Iterator<Item = &str> {
    let inner = value.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    inner.split([',', ';']).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_reals(e: &Entry) -> Result<Vec<f64>, SpecError> {
    list_items(&e.value)
        .map(|s| match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => err(e.line, format!("expected a number, got `{s}`")),
        })
        .collect()
}

fn parse_complexes(e: &Entry) -> Result<Vec<C64>, SpecError> {
    list_items(&e.value)
        .map(|s| {
            let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            match Complex::<f64>::from_str(&compact) {
                Ok(z) if z.re.is_finite() && z.im.is_finite() => Ok(z),
                _ => err(e.line, format!("expected a complex number, got `{s}`")),
            }
        })
        .collect()
}
