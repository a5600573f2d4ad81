//! Run traces and their CSV form.
//!
//! The CSV starts with a `# stochcuts-trace-v1` line followed by a header
//! row. `ccut` counts partition-based Lagrangian cuts, `fcut` all other cuts
//! (Benders, partition-based Benders, per-scenario Lagrangian, feasibility).

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cut, CutKind};

pub const TRACE_VERSION: &str = "stochcuts-trace-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    BendersRound,
    LagrangianRound,
    Refinement,
    Termination,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::BendersRound => "benders_round",
            EventKind::LagrangianRound => "lagrangian_round",
            EventKind::Refinement => "refinement",
            EventKind::Termination => "termination",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            EventKind::BendersRound,
            EventKind::LagrangianRound,
            EventKind::Refinement,
            EventKind::Termination,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CutCounts {
    pub benders: usize,
    pub pbbenc: usize,
    pub lagrangian: usize,
    pub pblagc: usize,
    pub feasibility: usize,
}

impl CutCounts {
    pub fn of(cuts: &[Cut]) -> Self {
        let mut c = CutCounts::default();
        for cut in cuts {
            match cut.kind {
                CutKind::Benders => c.benders += 1,
                CutKind::PbBenC => c.pbbenc += 1,
                CutKind::Lagrangian => c.lagrangian += 1,
                CutKind::PbLagC => c.pblagc += 1,
                CutKind::Feasibility => c.feasibility += 1,
            }
        }
        c
    }

    pub fn ccut(&self) -> usize {
        self.pblagc
    }

    pub fn fcut(&self) -> usize {
        self.benders + self.pbbenc + self.lagrangian + self.feasibility
    }

    pub fn total(&self) -> usize {
        self.ccut() + self.fcut()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent {
    pub wall_seconds: f64,
    pub kind: EventKind,
    /// Best lower bound so far.
    pub lower_bound: f64,
    pub upper_bound: Option<f64>,
    pub cuts: CutCounts,
    pub partition_size: usize,
    pub refinements: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    pub events: Vec<TraceEvent>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceEvent> {
        self.events.last()
    }

    /// Lower bounds and timestamps never decrease, upper bounds never
    /// increase. Returns the first offending event index.
    pub fn check_monotone(&self) -> std::result::Result<(), usize> {
        for (i, w) in self.events.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            let ub_ok = match (a.upper_bound, b.upper_bound) {
                (Some(u), Some(v)) => v <= u,
                _ => true,
            };
            if b.lower_bound < a.lower_bound || b.wall_seconds < a.wall_seconds || !ub_ok {
                return Err(i + 1);
            }
        }
        Ok(())
    }

    /// Events with the wall-clock column dropped, for determinism checks.
    pub fn without_timing(&self) -> Vec<TraceEvent> {
        self.events
            .iter()
            .map(|e| TraceEvent {
                wall_seconds: 0.0,
                ..e.clone()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub run_id: String,
    pub algorithm: String,
    pub instance: String,
    pub scenarios: usize,
    pub event_index: usize,
    pub event: String,
    pub wall_seconds: f64,
    pub lower_bound: f64,
    pub upper_bound: Option<f64>,
    pub ccut: usize,
    pub fcut: usize,
    pub partition_size: usize,
    pub refine: usize,
    pub detail: String,
}

pub fn trace_rows(
    trace: &RunTrace,
    run_id: &str,
    algorithm: &str,
    instance: &str,
    scenarios: usize,
) -> Vec<TraceRow> {
    trace
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| TraceRow {
            run_id: run_id.to_string(),
            algorithm: algorithm.to_string(),
            instance: instance.to_string(),
            scenarios,
            event_index: i,
            event: e.kind.name().to_string(),
            wall_seconds: e.wall_seconds,
            lower_bound: e.lower_bound,
            upper_bound: e.upper_bound,
            ccut: e.cuts.ccut(),
            fcut: e.cuts.fcut(),
            partition_size: e.partition_size,
            refine: e.refinements,
            detail: e.detail.clone(),
        })
        .collect()
}

pub fn write_rows<W: Write>(mut out: W, rows: &[TraceRow]) -> Result<()> {
    writeln!(out, "# {TRACE_VERSION}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "run_id",
        "algorithm",
        "instance",
        "scenarios",
        "event_index",
        "event",
        "wall_seconds",
        "lower_bound",
        "upper_bound",
        "ccut",
        "fcut",
        "partition_size",
        "refine",
        "detail",
    ])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let version = first.trim().trim_start_matches('#').trim();
    if version != TRACE_VERSION {
        return Err(Error::InvalidConfig(format!(
            "unsupported trace version {version:?} (expected {TRACE_VERSION})"
        )));
    }
    let mut r = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
