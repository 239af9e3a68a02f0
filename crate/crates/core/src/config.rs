//! Plain-text configuration: `key = value` lines.
//!
//! Lines starting with `#` and blank lines are ignored.  Vectors are
//! comma-separated integers, lists of vectors are separated by semicolons,
//! rationals are written `p/q` or as plain integers.
//!
//! Model keys (`rank_n1`, `euler_char`, `h_pairing` required):
//!
//! ```text
//! name                 = conifold-variant
//! rank_n1              = 1
//! exceptional_coords   = 0
//! effective_generators = 1
//! euler_char           = 2
//! h_pairing            = 1
//! y_pairing            = 0
//! chi_pairing          = 1
//! fiber_cycles         = 1
//! n_min_quadratic      = -2
//! # alternatively: n_min_table = 0:0; 1:-2; 2:-8
//! ```

use crate::error::{Error, Result};
use crate::exact::{rat_int, Rat};
use crate::lattice::{FlopModel, NMin};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Parses `key = value` lines; duplicate keys are rejected.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                idx + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if out.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("duplicate key '{key}'")));
        }
    }
    Ok(out)
}

pub fn parse_i64(value: &str) -> Result<i64> {
    value
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::Config(format!("expected integer, got '{value}'")))
}

pub fn parse_usize(value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("expected nonnegative integer, got '{value}'")))
}

/// Comma-separated integer vector; the empty string is the empty vector.
pub fn parse_vec(value: &str) -> Result<Vec<i64>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed.split(',').map(parse_i64).collect()
}

/// Semicolon-separated list of comma-separated vectors.
pub fn parse_vec_list(value: &str) -> Result<Vec<Vec<i64>>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed.split(';').map(parse_vec).collect()
}

/// Rational written `p/q` or as a plain integer.
pub fn parse_rat(value: &str) -> Result<Rat> {
    let trimmed = value.trim();
    if let Some((num, den)) = trimmed.split_once('/') {
        let n = num
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Config(format!("bad rational numerator '{num}'")))?;
        let d = den
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Config(format!("bad rational denominator '{den}'")))?;
        if d == BigInt::from(0) {
            return Err(Error::Config(format!("zero denominator in '{trimmed}'")));
        }
        Ok(Rat::new(n, d))
    } else {
        let n = trimmed
            .parse::<i64>()
            .map_err(|_| Error::Config(format!("expected rational, got '{value}'")))?;
        Ok(rat_int(n))
    }
}

/// Builds a model from configuration text.
pub fn model_from_config(text: &str) -> Result<FlopModel> {
    let kv = parse_kv(text)?;
    let get = |key: &str| kv.get(key).map(String::as_str);
    let require = |key: &str| {
        get(key).ok_or_else(|| Error::Config(format!("model config missing key '{key}'")))
    };

    let rank_n1 = parse_usize(require("rank_n1")?)?;
    let name = get("name").unwrap_or("custom").to_string();
    let exceptional_coords = match get("exceptional_coords") {
        Some(v) => parse_vec(v)?
            .into_iter()
            .map(|i| {
                usize::try_from(i)
                    .map_err(|_| Error::Config(format!("negative coordinate index {i}")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let effective_generators = match get("effective_generators") {
        Some(v) => parse_vec_list(v)?,
        None => (0..rank_n1)
            .map(|i| {
                let mut g = vec![0; rank_n1];
                g[i] = 1;
                g
            })
            .collect(),
    };
    let euler_char = parse_i64(require("euler_char")?)?;
    let h_pairing = parse_vec(require("h_pairing")?)?;
    let y_pairing = match get("y_pairing") {
        Some(v) => parse_vec(v)?,
        None => vec![0; rank_n1],
    };
    let chi_pairing = match get("chi_pairing") {
        Some(v) => parse_vec(v)?,
        None => h_pairing.clone(),
    };
    let fiber_cycles = match get("fiber_cycles") {
        Some(v) => parse_vec_list(v)?,
        None => {
            // Default fibre cycle: sum of the exceptional generators.
            let mut cycle = vec![0; rank_n1];
            for g in &effective_generators {
                let exceptional = g
                    .iter()
                    .enumerate()
                    .all(|(i, &c)| c == 0 || exceptional_coords.contains(&i));
                if exceptional {
                    for (c, gi) in cycle.iter_mut().zip(g) {
                        *c += gi;
                    }
                }
            }
            vec![cycle]
        }
    };
    let n_min = match (get("n_min_quadratic"), get("n_min_table")) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give only one of n_min_quadratic and n_min_table".into(),
            ))
        }
        (Some(c), None) => NMin::Quadratic(parse_i64(c)?),
        (None, Some(t)) => {
            let mut table = BTreeMap::new();
            for entry in t.split(';') {
                let entry = entry.trim();
                if entry.is_empty() {
                    continue;
                }
                let Some((class, bound)) = entry.rsplit_once(':') else {
                    return Err(Error::Config(format!(
                        "n_min_table entry '{entry}' is not 'class:bound'"
                    )));
                };
                table.insert(parse_vec(class)?, parse_i64(bound)?);
            }
            NMin::Table(table)
        }
        (None, None) => NMin::Quadratic(-2),
    };

    let known = [
        "name",
        "rank_n1",
        "exceptional_coords",
        "effective_generators",
        "euler_char",
        "h_pairing",
        "y_pairing",
        "chi_pairing",
        "fiber_cycles",
        "n_min_quadratic",
        "n_min_table",
    ];
    for key in kv.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown model key '{key}'")));
        }
    }

    FlopModel::new(
        name,
        rank_n1,
        exceptional_coords,
        effective_generators,
        euler_char,
        h_pairing,
        y_pairing,
        chi_pairing,
        fiber_cycles,
        n_min,
    )
}

/// Resolves a model argument: a built-in name or a path to a config file.
pub fn resolve_model(spec: &str) -> Result<FlopModel> {
    if let Ok(model) = FlopModel::builtin(spec) {
        return Ok(model);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::Config(format!("cannot read model '{spec}': {e}")))?;
    model_from_config(&text)
}
