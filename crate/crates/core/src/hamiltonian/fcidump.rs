//! FCIDUMP interchange format.
//!
//! Header `&FCI NORB=..,NELEC=..,MS2=.., ORBSYM=.., &END` (a lone `/` also
//! closes it), followed by `value i j k l` records with 1-based orbital
//! indices. `i j 0 0` is a one-electron integral, `0 0 0 0` the core energy,
//! `i 0 0 0` an orbital energy (ignored). ORBSYM and ISYM are read but unused.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::Hamiltonian;
use crate::error::{Error, Result};

/// Conflicting duplicate records above this difference are rejected.
const DUPLICATE_TOL: f64 = 1e-10;
/// Integrals at or below this magnitude are not written.
const WRITE_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Core,
    One(usize, usize),
    Two(usize, usize, usize, usize),
}

fn canonical_two(i: usize, j: usize, k: usize, l: usize) -> (usize, usize, usize, usize) {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    let (k, l) = if k >= l { (k, l) } else { (l, k) };
    if (i, j) >= (k, l) {
        (i, j, k, l)
    } else {
        (k, l, i, j)
    }
}

fn header_err(message: impl Into<String>) -> Error {
    Error::Fcidump {
        line: 1,
        message: message.into(),
    }
}

struct Header {
    norb: usize,
    nelec: usize,
    /// Line index (0-based) of the first integral record.
    body_start: usize,
}

fn parse_header(lines: &[&str]) -> Result<Header> {
    let mut text = String::new();
    let mut end = None;
    for (n, line) in lines.iter().enumerate() {
        let upper = line.to_ascii_uppercase();
        let closes = upper.contains("&END") || upper.trim() == "/" || upper.trim_end().ends_with('/');
        text.push_str(&upper.replace("&END", " ").replace('/', " "));
        text.push(' ');
        if closes {
            end = Some(n + 1);
            break;
        }
    }
    let body_start = end.ok_or_else(|| header_err("header is not terminated by &END or /"))?;
    let text = text.trim_start();
    let Some(rest) = text.strip_prefix("&FCI") else {
        return Err(header_err("header must start with &FCI"));
    };

    let mut values: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    for token in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if let Some((key, val)) = token.split_once('=') {
            let key = key.trim().to_string();
            let entry = values.entry(key.clone()).or_default();
            if !val.is_empty() {
                entry.push(val.to_string());
            }
            current = Some(key);
        } else if let Some(key) = &current {
            values.get_mut(key).expect("key inserted above").push(token.to_string());
        } else {
            return Err(header_err(format!("unexpected token `{token}` in header")));
        }
    }
    let scalar = |key: &str| -> Result<usize> {
        let v = values
            .get(key)
            .and_then(|v| v.first())
            .ok_or_else(|| header_err(format!("header is missing {key}")))?;
        v.parse::<usize>()
            .map_err(|_| header_err(format!("{key}={v} is not a non-negative integer")))
    };
    let norb = scalar("NORB")?;
    let nelec = scalar("NELEC")?;
    if let Some(ms2) = values.get("MS2").and_then(|v| v.first()) {
        ms2.parse::<i64>()
            .map_err(|_| header_err(format!("MS2={ms2} is not an integer")))?;
    }
    if norb == 0 {
        return Err(header_err("NORB must be positive"));
    }
    Ok(Header {
        norb,
        nelec,
        body_start,
    })
}

fn parse_value(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "e").parse().ok()
}

/// Parses FCIDUMP text into a symmetrized Hamiltonian; absent integrals are zero.
pub fn parse_fcidump(text: &str) -> Result<Hamiltonian> {
    let lines: Vec<&str> = text.lines().collect();
    let header = parse_header(&lines)?;
    let norb = header.norb;

    let mut seen: HashMap<Key, f64> = HashMap::new();
    for (n, line) in lines.iter().enumerate().skip(header.body_start) {
        let line_no = n + 1;
        let err = |message: String| Error::Fcidump {
            line: line_no,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(err(format!("expected `value i j k l`, got {} fields", toks.len())));
        }
        let value = parse_value(toks[0]).ok_or_else(|| err(format!("bad value `{}`", toks[0])))?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            *slot = tok
                .parse::<usize>()
                .map_err(|_| err(format!("bad index `{tok}`")))?;
            if *slot > norb {
                return Err(err(format!("index {} out of range [1, {norb}]", *slot)));
            }
        }
        let key = match idx {
            [0, 0, 0, 0] => Key::Core,
            [i, 0, 0, 0] if i > 0 => continue,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (a, b) = if i >= j { (i, j) } else { (j, i) };
                Key::One(a - 1, b - 1)
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (a, b, c, d) = canonical_two(i - 1, j - 1, k - 1, l - 1);
                Key::Two(a, b, c, d)
            }
            _ => return Err(err(format!("invalid index pattern {idx:?}"))),
        };
        if let Some(&prev) = seen.get(&key) {
            if (prev - value).abs() > DUPLICATE_TOL {
                return Err(err(format!(
                    "conflicting duplicate for {key:?}: {prev} vs {value}"
                )));
            }
        } else {
            seen.insert(key, value);
        }
    }

    let r = norb;
    let mut e_core = 0.0;
    let mut h = DMatrix::zeros(r, r);
    let mut v = vec![0.0; r.pow(4)];
    for (key, value) in seen {
        match key {
            Key::Core => e_core = value,
            Key::One(i, j) => {
                h[(i, j)] = value;
                h[(j, i)] = value;
            }
            Key::Two(i, j, k, l) => {
                for (a, b, c, d) in [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ] {
                    v[((a * r + b) * r + c) * r + d] = value;
                }
            }
        }
    }
    Hamiltonian::new(header.nelec, e_core, h, v).map_err(|e| header_err(e.to_string()))
}

/// Serializes a Hamiltonian; values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_fcidump(h: &Hamiltonian) -> String {
    let r = h.r_spatial();
    let n = h.n_electrons();
    let mut out = String::new();
    let orbsym = vec!["1"; r].join(",");
    let _ = writeln!(out, " &FCI NORB={r},NELEC={n},MS2={},", n % 2);
    let _ = writeln!(out, "  ORBSYM={orbsym},");
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    for i in 0..r {
        for j in 0..=i {
            for k in 0..=i {
                let lmax = if k == i { j } else { k };
                for l in 0..=lmax {
                    let val = h.eri(i, j, k, l);
                    if val.abs() > WRITE_CUTOFF {
                        let _ = writeln!(out, "{val:?} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..r {
        for j in 0..=i {
            let val = h.h_one()[(i, j)];
            if val.abs() > WRITE_CUTOFF {
                let _ = writeln!(out, "{val:?} {} {} 0 0", i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, "{:?} 0 0 0 0", h.e_core());
    out
}
