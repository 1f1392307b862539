//! Set-system files.
//!
//! Text form:
//!
//! ```text
//! # optional comments
//! lottery n=7 k=3 r=2 p=2 label=fano
//! 0 1 2
//! 0 3 4
//! ```
//!
//! One block per line, strictly ascending 0-based vertices. Files ending in
//! `.json` use the mirror `{"n":7,"k":3,"blocks":[[0,1,2],...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setsystem::{Params, SetSystem, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemFile {
    pub system: SetSystem,
    pub r: Option<u32>,
    pub p: Option<u32>,
    pub label: Option<String>,
}

impl SystemFile {
    pub fn new(system: SetSystem) -> Self {
        SystemFile {
            system,
            r: None,
            p: None,
            label: None,
        }
    }

    pub fn with_params(system: SetSystem, params: &Params) -> Self {
        SystemFile {
            system,
            r: Some(params.r()),
            p: Some(params.p()),
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Parameters recorded in the header, if both `r` and `p` are present.
    pub fn params(&self) -> Option<Result<Params>> {
        match (self.r, self.p) {
            (Some(r), Some(p)) => Some(Params::new(self.system.n(), self.system.k(), r, p)),
            _ => None,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_text(text: &str) -> Result<SystemFile> {
    let mut header: Option<Header> = None;
    let mut blocks: Vec<Vec<Vertex>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((n, k, ..)) = &header else {
            header = Some(parse_header(line, line_no)?);
            continue;
        };
        let (n, k) = (*n, *k);
        let mut block = Vec::with_capacity(k as usize);
        for tok in line.split_whitespace() {
            let v: Vertex = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("`{tok}` is not a vertex index")))?;
            if v >= n {
                return Err(parse_err(line_no, format!("vertex {v} outside [0, {n})")));
            }
            if block.last().is_some_and(|&last| last >= v) {
                return Err(parse_err(line_no, "block vertices must be strictly ascending"));
            }
            block.push(v);
        }
        if block.len() != k as usize {
            return Err(parse_err(
                line_no,
                format!("block has {} vertices, expected k={k}", block.len()),
            ));
        }
        blocks.push(block);
    }
    let (n, k, r, p, label) = header.ok_or_else(|| parse_err(1, "missing `lottery` header"))?;
    Ok(SystemFile {
        system: SetSystem::new(n, k, blocks)?,
        r,
        p,
        label,
    })
}

type Header = (u32, u32, Option<u32>, Option<u32>, Option<String>);

fn parse_header(line: &str, line_no: usize) -> Result<Header> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("lottery") {
        return Err(parse_err(line_no, "expected header `lottery n=<n> k=<k> ...`"));
    }
    let (mut n, mut k, mut r, mut p, mut label) = (None, None, None, None, None);
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("header field `{tok}` is not key=value")))?;
        let number = || -> Result<u32> {
            value
                .parse()
                .map_err(|_| parse_err(line_no, format!("`{key}` needs an integer, got `{value}`")))
        };
        match key {
            "n" => n = Some(number()?),
            "k" => k = Some(number()?),
            "r" => r = Some(number()?),
            "p" => p = Some(number()?),
            "label" => label = Some(value.to_string()),
            _ => return Err(parse_err(line_no, format!("unknown header field `{key}`"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(line_no, "header lacks n="))?;
    let k = k.ok_or_else(|| parse_err(line_no, "header lacks k="))?;
    Ok((n, k, r, p, label))
}

pub fn emit_text(file: &SystemFile) -> String {
    let sys = &file.system;
    let mut out = format!("lottery n={} k={}", sys.n(), sys.k());
    if let Some(r) = file.r {
        out.push_str(&format!(" r={r}"));
    }
    if let Some(p) = file.p {
        out.push_str(&format!(" p={p}"));
    }
    if let Some(label) = &file.label {
        let label: String = label
            .chars()
            .map(|c| if c.is_whitespace() || c == '#' { '_' } else { c })
            .collect();
        out.push_str(&format!(" label={label}"));
    }
    out.push('\n');
    for b in sys.blocks() {
        let line: Vec<String> = b.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonSystem {
    n: u32,
    k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    blocks: Vec<Vec<Vertex>>,
}

pub fn parse_json(text: &str) -> Result<SystemFile> {
    let raw: JsonSystem = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    for (i, b) in raw.blocks.iter().enumerate() {
        if b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structural(format!(
                "block #{i} {b:?} is not strictly ascending"
            )));
        }
    }
    Ok(SystemFile {
        system: SetSystem::new(raw.n, raw.k, raw.blocks)?,
        r: raw.r,
        p: raw.p,
        label: raw.label,
    })
}

pub fn emit_json(file: &SystemFile) -> String {
    let raw = JsonSystem {
        n: file.system.n(),
        k: file.system.k(),
        r: file.r,
        p: file.p,
        label: file.label.clone(),
        blocks: file.system.blocks().to_vec(),
    };
    let mut s = serde_json::to_string(&raw).expect("plain data serializes");
    s.push('\n');
    s
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a system file, choosing the format by extension.
pub fn load(path: &Path) -> Result<SystemFile> {
    let text = fs::read_to_string(path)?;
    if is_json(path) {
        parse_json(&text)
    } else {
        parse_text(&text)
    }
}

pub fn save(path: &Path, file: &SystemFile) -> Result<()> {
    let text = if is_json(path) {
        emit_json(file)
    } else {
        emit_text(file)
    };
    fs::write(path, text)?;
    Ok(())
}
