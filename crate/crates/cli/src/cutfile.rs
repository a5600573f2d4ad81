//! Cut pools as CSV: `kind,rhs,x,theta,origin`, with `x` a space-separated
//! coefficient list, `theta` space-separated `s:coef` pairs and `origin`
//! space-separated scenario indices.

use std::io::{BufRead, BufReader, Read, Write};

use anyhow::{anyhow, bail, Context, Result};

use stochcuts::{Cut, CutKind};

pub const CUTS_VERSION: &str = "stochcuts-cuts-v1";

const KINDS: [CutKind; 5] = [
    CutKind::Benders,
    CutKind::PbBenC,
    CutKind::Lagrangian,
    CutKind::PbLagC,
    CutKind::Feasibility,
];

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_cuts<W: Write>(mut out: W, cuts: &[Cut]) -> Result<()> {
    writeln!(out, "# {CUTS_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "rhs", "x", "theta", "origin"])?;
    for c in cuts {
        w.write_record([
            c.kind.name().to_string(),
            c.rhs.to_string(),
            join(&c.x_coeffs),
            join(c.theta_coeffs.iter().map(|(s, v)| format!("{s}:{v}"))),
            join(&c.origin),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn numbers<T: std::str::FromStr>(field: &str, what: &str) -> Result<Vec<T>> {
    field
        .split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| anyhow!("bad {what} entry {t:?}")))
        .collect()
}

pub fn read_cuts<R: Read>(input: R) -> Result<Vec<Cut>> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim().trim_start_matches('#').trim() != CUTS_VERSION {
        bail!("not a cut file (expected a `# {CUTS_VERSION}` first line)");
    }
    let mut r = csv::Reader::from_reader(reader);
    let mut cuts = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| rec.get(k).ok_or_else(|| anyhow!("cut {i}: missing column {k}"));
        let kind = KINDS
            .into_iter()
            .find(|k| k.name() == field(0).unwrap_or(""))
            .ok_or_else(|| anyhow!("cut {i}: unknown kind"))?;
        let rhs = field(1)?.parse::<f64>().with_context(|| format!("cut {i}: rhs"))?;
        let x_coeffs = numbers::<f64>(field(2)?, "x")?;
        let mut theta_coeffs = Vec::new();
        for pair in field(3)?.split_whitespace() {
            let (s, v) = pair
                .split_once(':')
                .ok_or_else(|| anyhow!("cut {i}: bad theta entry {pair:?}"))?;
            theta_coeffs.push((s.parse()?, v.parse()?));
        }
        let origin = numbers::<usize>(field(4)?, "origin")?;
        cuts.push(Cut {
            kind,
            x_coeffs,
            theta_coeffs,
            rhs,
            origin,
        });
    }
    Ok(cuts)
}
