//! Plain-text operator files.
//!
//! ```text
//! # comment
//! format = "qqo-tensor/1"
//! b[1][1][1] = 1.0
//! ```
//!
//! Three formats are accepted: `qqo-tensor/1` with entries `b[m][l][k]`,
//! `qqo-diagonal/1` with entries `b[i][k]`, and `qqo-abc/1` with keys `a`,
//! `b`, `c`. Indices are 1-based and omitted entries are 0.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::families::{AbcParams, DiagonalQO};
use crate::operator::QqoTensor;

pub const TENSOR_FORMAT: &str = "qqo-tensor/1";
pub const DIAGONAL_FORMAT: &str = "qqo-diagonal/1";
pub const ABC_FORMAT: &str = "qqo-abc/1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorSpec {
    Tensor(QqoTensor),
    Diagonal(DiagonalQO),
    Abc(AbcParams),
}

impl OperatorSpec {
    pub fn tensor(&self) -> QqoTensor {
        match self {
            OperatorSpec::Tensor(t) => *t,
            OperatorSpec::Diagonal(d) => d.to_tensor(),
            OperatorSpec::Abc(p) => p.to_tensor(),
        }
    }

    pub fn format_name(&self) -> &'static str {
        match self {
            OperatorSpec::Tensor(_) => TENSOR_FORMAT,
            OperatorSpec::Diagonal(_) => DIAGONAL_FORMAT,
            OperatorSpec::Abc(_) => ABC_FORMAT,
        }
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn entries(text: &str) -> Result<Vec<Entry<'_>>> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(parse_error(line, "missing key before `=`"));
        }
        if let Some(first) = seen.insert(key, line) {
            return Err(parse_error(line, format!("key `{key}` already set on line {first}")));
        }
        out.push(Entry { line, key, value });
    }
    Ok(out)
}

fn number(e: &Entry<'_>) -> Result<f64> {
    let v: f64 = e
        .value
        .parse()
        .map_err(|_| parse_error(e.line, format!("key `{}`: `{}` is not a number", e.key, e.value)))?;
    if !v.is_finite() {
        return Err(parse_error(e.line, format!("key `{}`: value must be finite", e.key)));
    }
    Ok(v)
}

/// Parses `b[i][j]...` with 1-based indices in `1..=3`.
fn indices<const N: usize>(e: &Entry<'_>) -> Result<[usize; N]> {
    let bad = || {
        parse_error(
            e.line,
            format!("unknown key `{}`; expected b{}", e.key, "[1..3]".repeat(N)),
        )
    };
    let mut rest = e.key.strip_prefix('b').ok_or_else(bad)?;
    let mut out = [0usize; N];
    for slot in out.iter_mut() {
        let inner = rest.strip_prefix('[').ok_or_else(bad)?;
        let (digits, tail) = inner.split_once(']').ok_or_else(bad)?;
        let i: usize = digits.trim().parse().map_err(|_| bad())?;
        if !(1..=3).contains(&i) {
            return Err(parse_error(e.line, format!("key `{}`: index {i} outside 1..3", e.key)));
        }
        *slot = i - 1;
        rest = tail;
    }
    if !rest.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_operator(text: &str) -> Result<OperatorSpec> {
    let all = entries(text)?;
    let header = all
        .iter()
        .find(|e| e.key == "format")
        .ok_or_else(|| parse_error(1, "missing `format` key"))?;
    let name = header.value.trim_matches('"');
    let body = all.iter().filter(|e| e.key != "format");
    match name {
        TENSOR_FORMAT => {
            let mut t = QqoTensor::zero();
            for e in body {
                let [m, l, k] = indices::<3>(e)?;
                t.set(m, l, k, number(e)?);
            }
            Ok(OperatorSpec::Tensor(t))
        }
        DIAGONAL_FORMAT => {
            let mut d = DiagonalQO::default();
            for e in body {
                let [i, k] = indices::<2>(e)?;
                d.b[i][k] = number(e)?;
            }
            Ok(OperatorSpec::Diagonal(d))
        }
        ABC_FORMAT => {
            let mut p = AbcParams { a: 0.0, b: 0.0, c: 0.0 };
            for e in body {
                let v = number(e)?;
                match e.key {
                    "a" => p.a = v,
                    "b" => p.b = v,
                    "c" => p.c = v,
                    other => {
                        return Err(parse_error(e.line, format!("unknown key `{other}`; expected a, b or c")))
                    }
                }
            }
            Ok(OperatorSpec::Abc(p))
        }
        other => Err(parse_error(
            header.line,
            format!("key `format`: unsupported format `{other}`"),
        )),
    }
}

/// Writes all 27 entries in lexicographic `(m, l, k)` order.
pub fn write_tensor(t: &QqoTensor) -> String {
    let mut s = format!("format = \"{TENSOR_FORMAT}\"\n");
    for m in 0..3 {
        for l in 0..3 {
            for k in 0..3 {
                let _ = writeln!(s, "b[{}][{}][{}] = {:?}", m + 1, l + 1, k + 1, t.get(m, l, k));
            }
        }
    }
    s
}

pub fn write_diagonal(d: &DiagonalQO) -> String {
    let mut s = format!("format = \"{DIAGONAL_FORMAT}\"\n");
    for i in 0..3 {
        for k in 0..3 {
            let _ = writeln!(s, "b[{}][{}] = {:?}", i + 1, k + 1, d.b[i][k]);
        }
    }
    s
}

pub fn write_abc(p: &AbcParams) -> String {
    format!(
        "format = \"{ABC_FORMAT}\"\na = {:?}\nb = {:?}\nc = {:?}\n",
        p.a, p.b, p.c
    )
}

pub fn write_operator(spec: &OperatorSpec) -> String {
    match spec {
        OperatorSpec::Tensor(t) => write_tensor(t),
        OperatorSpec::Diagonal(d) => write_diagonal(d),
        OperatorSpec::Abc(p) => write_abc(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{self, Stream};
    use rand::Rng;

    #[test]
    fn parses_tensor_with_comments_and_defaults() {
        let text = "# single entry\nformat = \"qqo-tensor/1\"\n\nb[1][1][1] = 1.5 # trailing\n";
        let spec = parse_operator(text).unwrap();
        assert_eq!(spec.tensor(), QqoTensor::single(0, 0, 0, 1.5));
        assert_eq!(spec.format_name(), TENSOR_FORMAT);
    }

    #[test]
    fn parses_abc_and_diagonal() {
        let spec = parse_operator("format = \"qqo-abc/1\"\na = 0.5\nb = -0.25\nc = 0.125\n").unwrap();
        assert_eq!(spec, OperatorSpec::Abc(AbcParams { a: 0.5, b: -0.25, c: 0.125 }));
        let spec = parse_operator("format = \"qqo-diagonal/1\"\nb[2][3] = 0.7\n").unwrap();
        let OperatorSpec::Diagonal(d) = spec else { panic!() };
        assert_eq!(d.b[1][2], 0.7);
        assert_eq!(spec.tensor().get(1, 1, 2), 0.7);
    }

    #[test]
    fn round_trips() {
        let mut rng = sampling::rng(1, Stream::TensorDraws);
        for _ in 0..50 {
            let t = QqoTensor::from_fn(|_, _, _| rng.random_range(-1.0..1.0));
            assert_eq!(parse_operator(&write_tensor(&t)).unwrap().tensor(), t);
            let d = DiagonalQO::new(std::array::from_fn(|_| std::array::from_fn(|_| rng.random::<f64>())));
            assert_eq!(parse_operator(&write_diagonal(&d)).unwrap(), OperatorSpec::Diagonal(d));
            let p = AbcParams { a: rng.random(), b: rng.random(), c: rng.random() };
            assert_eq!(parse_operator(&write_abc(&p)).unwrap(), OperatorSpec::Abc(p));
        }
    }

    #[test]
    fn writer_order_is_lexicographic() {
        let text = write_tensor(&QqoTensor::zero());
        let keys: Vec<&str> = text.lines().skip(1).map(|l| l.split(" =").next().unwrap()).collect();
        assert_eq!(keys.len(), 27);
        assert_eq!(keys[0], "b[1][1][1]");
        assert_eq!(keys[1], "b[1][1][2]");
        assert_eq!(keys[26], "b[3][3][3]");
    }

    fn err(text: &str) -> (usize, String) {
        match parse_operator(text) {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_line_and_key() {
        let (line, msg) = err("format = \"qqo-tensor/1\"\nb[1][1][1] = x\n");
        assert_eq!(line, 2);
        assert!(msg.contains("b[1][1][1]"), "{msg}");

        let (line, msg) = err("format = \"qqo-tensor/1\"\n\nb[4][1][1] = 1\n");
        assert_eq!(line, 3);
        assert!(msg.contains("b[4][1][1]"));

        let (line, msg) = err("format = \"qqo-abc/1\"\nd = 1\n");
        assert_eq!(line, 2);
        assert!(msg.contains("`d`"));

        let (line, _) = err("format = \"qqo-abc/1\"\na = 1\na = 2\n");
        assert_eq!(line, 3);

        let (line, msg) = err("format = \"qqo-matrix/9\"\n");
        assert_eq!(line, 1);
        assert!(msg.contains("format"));

        let (_, msg) = err("a = 1\n");
        assert!(msg.contains("format"));

        let (line, _) = err("format = \"qqo-tensor/1\"\nb[1][1][1] 1.0\n");
        assert_eq!(line, 2);

        let (line, msg) = err("format = \"qqo-tensor/1\"\nb[1][1][1] = inf\n");
        assert_eq!(line, 2);
        assert!(msg.contains("finite"));

        let (line, _) = err("format = \"qqo-diagonal/1\"\nb[1][1][1] = 1\n");
        assert_eq!(line, 2);
    }
}
