//! Line-oriented text format for instances (`stochcuts-v1`).
//!
//! ```text
//! stochcuts-v1
//! # comment lines start with '#'
//! name thm1
//! dims <n1> <n2> <m1> <m2> <scenarios>
//! binary <j>...          integer <j>...       (default: continuous)
//! ub <j> <value>         (default +inf; binaries are capped at 1 anyway)
//! c <j> <value>          A <i> <j> <value>    b <i> <value>
//! d <k> <value>          W <i> <k> <value>
//! p <s> <value>          T <s> <i> <j> <value>    h <s> <i> <value>
//! end
//! ```
//!
//! Indices are 0-based. Vectors and matrices are sparse: omitted entries are
//! zero, repeated entries are summed (with a warning). Numbers are written
//! with Rust's shortest round-trip formatting, so `parse(emit(i)) == i`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Instance, Scenario, VarKind};
use crate::sparse::CsrMatrix;

pub const SCHEMA_VERSION: &str = "stochcuts-v1";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown schema version {0:?} (expected {SCHEMA_VERSION})")]
    UnknownSchema(String),
    #[error("line {line}: dimension mismatch: {msg}")]
    Dimension { line: usize, msg: String },
    #[error("no scenarios")]
    NoScenarios,
    #[error("instance violates invariants: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct ParsedInstance {
    pub name: String,
    pub instance: Instance,
    pub warnings: Vec<String>,
}

pub fn emit(instance: &Instance, name: &str) -> String {
    emit_with_comments(instance, name, &[])
}

pub fn emit_with_comments(instance: &Instance, name: &str, comments: &[String]) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "{SCHEMA_VERSION}").unwrap();
    for c in comments {
        writeln!(w, "# {c}").unwrap();
    }
    writeln!(w, "name {name}").unwrap();
    writeln!(
        w,
        "dims {} {} {} {} {}",
        instance.n1(),
        instance.n2(),
        instance.m1(),
        instance.m2(),
        instance.num_scenarios()
    )
    .unwrap();
    for (kind, key) in [(VarKind::Binary, "binary"), (VarKind::Integer, "integer")] {
        let idx: Vec<String> = instance
            .integrality
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == kind)
            .map(|(j, _)| j.to_string())
            .collect();
        if !idx.is_empty() {
            writeln!(w, "{key} {}", idx.join(" ")).unwrap();
        }
    }
    for (j, &u) in instance.first_stage_upper.iter().enumerate() {
        if u != f64::INFINITY {
            writeln!(w, "ub {j} {u}").unwrap();
        }
    }
    vector(w, "c", "", &instance.first_stage_cost);
    matrix(w, "A", "", &instance.first_stage_matrix);
    vector(w, "b", "", &instance.first_stage_rhs);
    vector(w, "d", "", &instance.second_stage_cost);
    matrix(w, "W", "", &instance.recourse);
    for (s, sc) in instance.scenarios.iter().enumerate() {
        writeln!(w, "p {s} {}", sc.probability).unwrap();
        let prefix = format!("{s} ");
        matrix(w, "T", &prefix, &sc.technology);
        vector(w, "h", &prefix, &sc.rhs);
    }
    writeln!(w, "end").unwrap();
    out
}

fn vector(w: &mut String, key: &str, prefix: &str, v: &[f64]) {
    for (i, &x) in v.iter().enumerate() {
        if x != 0.0 {
            writeln!(w, "{key} {prefix}{i} {x}").unwrap();
        }
    }
}

fn matrix(w: &mut String, key: &str, prefix: &str, m: &CsrMatrix) {
    for (r, c, v) in m.triplets() {
        writeln!(w, "{key} {prefix}{r} {c} {v}").unwrap();
    }
}

struct Dims {
    n1: usize,
    n2: usize,
    m1: usize,
    m2: usize,
    s: usize,
}

pub fn parse(text: &str) -> Result<ParsedInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, header)) if header == SCHEMA_VERSION => {}
        Some((_, header)) => return Err(ParseError::UnknownSchema(header.to_string())),
        None => return Err(ParseError::UnknownSchema(String::new())),
    }

    let mut name = String::new();
    let mut dims: Option<Dims> = None;
    let mut warnings = Vec::new();
    let mut integrality: BTreeMap<usize, VarKind> = BTreeMap::new();
    let mut upper: BTreeMap<usize, f64> = BTreeMap::new();
    let mut c = SparseVec::default();
    let mut b = SparseVec::default();
    let mut d = SparseVec::default();
    let mut a = Vec::new();
    let mut wm = Vec::new();
    let mut probs: BTreeMap<usize, f64> = BTreeMap::new();
    let mut t: BTreeMap<usize, Vec<(usize, usize, f64)>> = BTreeMap::new();
    let mut h: BTreeMap<usize, SparseVec> = BTreeMap::new();
    let mut ended = false;

    for (line, text) in lines {
        if ended {
            return Err(syntax(line, "content after 'end'"));
        }
        let mut tok = text.split_whitespace();
        let key = tok.next().expect("non-empty line");
        let args: Vec<&str> = tok.collect();
        if key == "name" {
            name = args.join(" ");
            continue;
        }
        if key == "dims" {
            let v = ints(line, &args, 5)?;
            dims = Some(Dims {
                n1: v[0],
                n2: v[1],
                m1: v[2],
                m2: v[3],
                s: v[4],
            });
            if v[4] == 0 {
                return Err(ParseError::NoScenarios);
            }
            continue;
        }
        if key == "end" {
            ended = true;
            continue;
        }
        let dm = dims
            .as_ref()
            .ok_or_else(|| syntax(line, "'dims' must precede data lines"))?;
        let check = |what: &str, idx: usize, limit: usize| -> Result<(), ParseError> {
            if idx >= limit {
                Err(ParseError::Dimension {
                    line,
                    msg: format!("{what} index {idx} out of range (< {limit})"),
                })
            } else {
                Ok(())
            }
        };
        match key {
            "binary" | "integer" => {
                let kind = if key == "binary" { VarKind::Binary } else { VarKind::Integer };
                for s in &args {
                    let j = int(line, s)?;
                    check("variable", j, dm.n1)?;
                    integrality.insert(j, kind);
                }
            }
            "ub" => {
                let (j, v) = index_value(line, &args)?;
                check("variable", j, dm.n1)?;
                upper.insert(j, v);
            }
            "c" | "b" | "d" => {
                let (i, v) = index_value(line, &args)?;
                let (vec, limit) = match key {
                    "c" => (&mut c, dm.n1),
                    "b" => (&mut b, dm.m1),
                    _ => (&mut d, dm.n2),
                };
                check(key, i, limit)?;
                vec.add(key, i, v, &mut warnings);
            }
            "A" | "W" => {
                let (r, col, v) = triplet(line, &args)?;
                let (rows, cols, store) = if key == "A" {
                    (dm.m1, dm.n1, &mut a)
                } else {
                    (dm.m2, dm.n2, &mut wm)
                };
                check("row", r, rows)?;
                check("column", col, cols)?;
                store.push((r, col, v));
            }
            "p" => {
                let (s, v) = index_value(line, &args)?;
                check("scenario", s, dm.s)?;
                if probs.insert(s, v).is_some() {
                    return Err(syntax(line, &format!("probability of scenario {s} given twice")));
                }
            }
            "T" => {
                if args.len() != 4 {
                    return Err(syntax(line, "expected 'T <s> <i> <j> <value>'"));
                }
                let s = int(line, args[0])?;
                check("scenario", s, dm.s)?;
                let (r, col, v) = triplet(line, &args[1..])?;
                check("row", r, dm.m2)?;
                check("column", col, dm.n1)?;
                t.entry(s).or_default().push((r, col, v));
            }
            "h" => {
                if args.len() != 3 {
                    return Err(syntax(line, "expected 'h <s> <i> <value>'"));
                }
                let s = int(line, args[0])?;
                check("scenario", s, dm.s)?;
                let (i, v) = index_value(line, &args[1..])?;
                check("row", i, dm.m2)?;
                h.entry(s).or_default().add(&format!("h[{s}]"), i, v, &mut warnings);
            }
            other => return Err(syntax(line, &format!("unknown key {other:?}"))),
        }
    }

    let dm = dims.ok_or_else(|| syntax(0, "missing 'dims' line"))?;
    if !ended {
        return Err(syntax(0, "missing 'end' line"));
    }

    let matrix = |key: &str,
                  rows: usize,
                  cols: usize,
                  entries: Vec<(usize, usize, f64)>,
                  warnings: &mut Vec<String>|
     -> Result<CsrMatrix, ParseError> {
        let (m, dup) = CsrMatrix::from_triplets(rows, cols, entries)
            .map_err(|e| ParseError::Dimension { line: 0, msg: e.to_string() })?;
        if dup > 0 {
            warnings.push(format!("{key}: {dup} duplicate entries summed"));
        }
        Ok(m)
    };

    let mut scenarios = Vec::with_capacity(dm.s);
    for s in 0..dm.s {
        let tech = matrix(
            &format!("T[{s}]"),
            dm.m2,
            dm.n1,
            t.remove(&s).unwrap_or_default(),
            &mut warnings,
        )?;
        scenarios.push(Scenario {
            probability: probs.get(&s).copied().unwrap_or(0.0),
            technology: tech,
            rhs: h.remove(&s).unwrap_or_default().dense(dm.m2),
        });
    }

    let instance = Instance {
        first_stage_cost: c.dense(dm.n1),
        first_stage_matrix: matrix("A", dm.m1, dm.n1, a, &mut warnings)?,
        first_stage_rhs: b.dense(dm.m1),
        integrality: (0..dm.n1)
            .map(|j| integrality.get(&j).copied().unwrap_or(VarKind::Continuous))
            .collect(),
        first_stage_upper: (0..dm.n1)
            .map(|j| upper.get(&j).copied().unwrap_or(f64::INFINITY))
            .collect(),
        second_stage_cost: d.dense(dm.n2),
        recourse: matrix("W", dm.m2, dm.n2, wm, &mut warnings)?,
        scenarios,
    };
    let violations = instance.validate();
    if !violations.is_empty() {
        return Err(ParseError::Invalid(violations));
    }
    Ok(ParsedInstance {
        name,
        instance,
        warnings,
    })
}

#[derive(Default)]
struct SparseVec(BTreeMap<usize, f64>);

impl SparseVec {
    fn add(&mut self, key: &str, i: usize, v: f64, warnings: &mut Vec<String>) {
        match self.0.get_mut(&i) {
            Some(x) => {
                *x += v;
                warnings.push(format!("{key}: duplicate entry {i} summed"));
            }
            None => {
                self.0.insert(i, v);
            }
        }
    }

    fn dense(self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, v) in self.0 {
            out[i] = v;
        }
        out
    }
}

fn syntax(line: usize, msg: &str) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.to_string(),
    }
}

fn int(line: usize, s: &str) -> Result<usize, ParseError> {
    s.parse().map_err(|_| syntax(line, &format!("expected an index, got {s:?}")))
}

fn num(line: usize, s: &str) -> Result<f64, ParseError> {
    let v: f64 = s.parse().map_err(|_| syntax(line, &format!("expected a number, got {s:?}")))?;
    if v.is_nan() {
        return Err(syntax(line, "NaN is not allowed"));
    }
    Ok(v)
}

fn ints(line: usize, args: &[&str], n: usize) -> Result<Vec<usize>, ParseError> {
    if args.len() != n {
        return Err(syntax(line, &format!("expected {n} integers")));
    }
    args.iter().map(|s| int(line, s)).collect()
}

fn index_value(line: usize, args: &[&str]) -> Result<(usize, f64), ParseError> {
    if args.len() != 2 {
        return Err(syntax(line, "expected '<index> <value>'"));
    }
    Ok((int(line, args[0])?, num(line, args[1])?))
}

fn triplet(line: usize, args: &[&str]) -> Result<(usize, usize, f64), ParseError> {
    if args.len() != 3 {
        return Err(syntax(line, "expected '<row> <col> <value>'"));
    }
    Ok((int(line, args[0])?, int(line, args[1])?, num(line, args[2])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{builtin, generate_sslp, GeneratorConfig};

    #[test]
    fn thm1_round_trip() {
        let inst = builtin("thm1").unwrap();
        let text = emit(&inst, "thm1");
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed.name, "thm1");
        assert_eq!(parsed.instance, inst);
        assert!(parsed.warnings.is_empty());
        assert_eq!(emit(&parsed.instance, "thm1"), text);
    }

    #[test]
    fn zero_scenarios() {
        let text = "stochcuts-v1\nname x\ndims 1 1 0 1 0\nend\n";
        assert!(matches!(parse(text), Err(ParseError::NoScenarios)));
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let text = "stochcuts-v1\ndims 1 1 0 1 1\nbinary 0\nub 0 1\nd 0 1\nW 0 0 2\nW 0 0 3\np 0 1\nend\n";
        let parsed = parse(text).unwrap();
        assert_eq!(parsed.instance.recourse.get(0, 0), 5.0);
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn error_categories() {
        assert!(matches!(parse("stochcuts-v9\n"), Err(ParseError::UnknownSchema(_))));
        assert!(matches!(
            parse("stochcuts-v1\ndims 1 1 0 1 1\nW 3 0 1\nend\n"),
            Err(ParseError::Dimension { .. })
        ));
        assert!(matches!(
            parse("stochcuts-v1\ndims 1 1 0 1 1\nW zero 0 1\nend\n"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse("stochcuts-v1\ndims 1 1 0 1 2\np 0 0.5\np 1 0.6\nend\n"),
            Err(ParseError::Invalid(_))
        ));
    }

    #[test]
    fn generated_file_is_byte_identical() {
        let cfg = GeneratorConfig::sslp(4, 6, 5, 9);
        let a = emit_with_comments(&generate_sslp(&cfg).unwrap(), "g", &cfg.describe());
        let b = emit_with_comments(&generate_sslp(&cfg).unwrap(), "g", &cfg.describe());
        assert_eq!(a, b);
        assert_eq!(parse(&a).unwrap().instance, generate_sslp(&cfg).unwrap());
    }
}
