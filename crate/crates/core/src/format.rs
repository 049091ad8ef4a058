//! On-disk hypergraph formats and float formatting shared by reports.
//!
//! Text: a header line `N M n`, then `M` lines of `n` ascending vertex ids
//! separated by single spaces. JSON: `{"vertex_count":N,"uniformity":n,"edges":[[..],..]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::FormatError;
use crate::hypergraph::Hypergraph;

pub fn to_text(h: &Hypergraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", h.vertex_count(), h.edge_count(), h.uniformity()).unwrap();
    for e in h.edges() {
        let mut first = true;
        for v in e {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn from_text(s: &str) -> Result<Hypergraph, FormatError> {
    let mut lines = s
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(FormatError::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let nums = parse_ints(hline, header)?;
    let [vertex_count, m, n] = nums[..] else {
        return Err(FormatError::Parse {
            line: hline,
            message: format!("header needs 3 integers, found {}", nums.len()),
        });
    };
    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines {
        if edges.len() == m {
            return Err(FormatError::Parse {
                line,
                message: format!("more than {m} edges"),
            });
        }
        edges.push(parse_ints(line, text)?);
    }
    if edges.len() != m {
        return Err(FormatError::Parse {
            line: s.lines().count(),
            message: format!("expected {m} edges, found {}", edges.len()),
        });
    }
    Ok(Hypergraph::new(vertex_count, n, edges)?)
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<usize>, FormatError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| FormatError::Parse {
                line,
                message: format!("{tok:?}: {e}"),
            })
        })
        .collect()
}

pub fn to_json(h: &Hypergraph) -> String {
    serde_json::to_string(h).expect("hypergraph serializes")
}

pub fn from_json(s: &str) -> Result<Hypergraph, FormatError> {
    Ok(serde_json::from_str(s)?)
}

/// Reads either format, choosing JSON when the first non-blank byte is `{`.
pub fn from_any(s: &str) -> Result<Hypergraph, FormatError> {
    if s.trim_start().starts_with('{') {
        from_json(s)
    } else {
        from_text(s)
    }
}

/// Formats a float with 17 significant digits (`d.dddddddddddddddde±x`).
/// Non-finite values become `inf`, `-inf`, `nan`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// serde helper: writes an `f64` as a JSON number with 17 significant digits,
/// or as a string for non-finite values (JSON has no infinities).
pub fn ser_f64_17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        let raw = RawValue::from_string(fmt17(*x)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    } else {
        s.serialize_str(&fmt17(*x))
    }
}

pub fn ser_vec_f64_17<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&F17(*x))?;
    }
    seq.end()
}

struct F17(f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_f64_17(&self.0, s)
    }
}

/// Counterpart of [`ser_f64_17`]: accepts numbers or the strings
/// `inf`, `-inf`, `nan`.
pub fn de_f64_17<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }
    match NumOrStr::deserialize(d)? {
        NumOrStr::Num(x) => Ok(x),
        NumOrStr::Str(s) => match s.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => other.parse().map_err(serde::de::Error::custom),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::fano;

    #[test]
    fn text_roundtrip_is_bit_exact() {
        let f = fano();
        let text = to_text(&f);
        assert!(text.starts_with("7 7 3\n0 1 2\n"));
        assert_eq!(from_text(&text).unwrap(), f);
        assert_eq!(to_text(&from_text(&text).unwrap()), text);
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let f = fano();
        let json = to_json(&f);
        assert!(json.starts_with(r#"{"vertex_count":7,"uniformity":3,"edges":[[0,1,2]"#));
        assert_eq!(to_json(&from_json(&json).unwrap()), json);
        assert_eq!(from_any(&json).unwrap(), f);
    }

    #[test]
    fn header_only_file() {
        let h = Hypergraph::empty(9, 3);
        assert_eq!(to_text(&h), "9 0 3\n");
        assert_eq!(from_text("9 0 3\n").unwrap(), h);
    }

    #[test]
    fn text_errors() {
        assert!(from_text("").is_err());
        assert!(from_text("3 1\n0 1 2\n").is_err());
        assert!(from_text("3 2 2\n0 1\n").is_err());
        assert!(from_text("3 1 2\n0 x\n").is_err());
        assert!(matches!(
            from_text("3 1 2\n1 1\n"),
            Err(FormatError::Invalid(_))
        ));
        assert!(from_json(r#"{"vertex_count":3,"uniformity":2,"edges":[[0,5]]}"#).is_err());
    }

    #[test]
    fn fmt17_roundtrips() {
        for x in [0.1, 1.0 / 3.0, 123456.789e-300, f64::MIN_POSITIVE, 0.0, -2.5] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt17(f64::NEG_INFINITY), "-inf");
    }
}
