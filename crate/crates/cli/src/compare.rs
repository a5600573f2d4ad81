use std::io::{Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use stochcuts::drivers::Termination;
use stochcuts::trace::CutCounts;

use crate::load::{expand, NamedInstance};
use crate::solve::{solve_one, write_trace, Solved};
use crate::{parse_algorithm, RunFlags, EXIT_OK};

/// Rows whose lower bound is within this of the best are marked.
pub const TIE_TOL: f64 = 1e-6;

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Instance files, globs or built-in names.
    #[arg(long, num_args = 1.., required = true)]
    pub instances: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "benders,bdd,apblagc")]
    pub algos: Vec<String>,
    /// Runs executed at the same time.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// One trace CSV per run is written into this directory.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    #[command(flatten)]
    pub flags: RunFlags,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub instance: String,
    pub algorithm: String,
    pub lower_bound: f64,
    pub ccut: usize,
    pub fcut: usize,
    pub seconds: f64,
    pub refine: usize,
    pub partition_size: usize,
    pub termination: String,
    pub best: bool,
}

const HEADER: [&str; 10] = [
    "instance",
    "algorithm",
    "lower_bound",
    "ccut",
    "fcut",
    "seconds",
    "refine",
    "partition_size",
    "termination",
    "best",
];

fn row(inst: &NamedInstance, s: &Solved) -> CompareRow {
    let r = &s.result;
    let counts = CutCounts::of(&r.cuts);
    CompareRow {
        instance: inst.name.clone(),
        algorithm: r.algorithm.name().to_string(),
        lower_bound: r.lower_bound,
        ccut: counts.ccut(),
        fcut: counts.fcut(),
        seconds: s.seconds,
        refine: r.refinements,
        partition_size: r.partition.len(),
        termination: r.termination.name().to_string(),
        best: false,
    }
}

/// Marks, per instance, every row within `TIE_TOL` of the largest bound.
pub fn mark_best(rows: &mut [CompareRow]) {
    let mut names: Vec<String> = rows.iter().map(|r| r.instance.clone()).collect();
    names.dedup();
    for name in names {
        let best = rows
            .iter()
            .filter(|r| r.instance == name)
            .map(|r| r.lower_bound)
            .fold(f64::NEG_INFINITY, f64::max);
        for r in rows.iter_mut().filter(|r| r.instance == name) {
            r.best = r.lower_bound >= best - TIE_TOL;
        }
    }
}

pub fn format_table(rows: &[CompareRow]) -> String {
    let cells: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.instance.clone(),
                r.algorithm.clone(),
                format!("{:.6}{}", r.lower_bound, if r.best { "*" } else { "" }),
                r.ccut.to_string(),
                r.fcut.to_string(),
                format!("{:.2}", r.seconds),
                r.refine.to_string(),
                r.partition_size.to_string(),
                r.termination.clone(),
            ]
        })
        .collect();
    let head = ["instance", "algo", "lower bound", "Ccut", "Fcut", "T(s)", "Refine", "|N|", "stop"];
    let mut width: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for c in &cells {
        for (w, v) in width.iter_mut().zip(c) {
            *w = (*w).max(v.chars().count());
        }
    }
    let line = |vals: &[String]| {
        vals.iter()
            .zip(&width)
            .map(|(v, w)| format!("{v:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&head.map(String::from)) + "\n";
    for c in &cells {
        out += &line(c);
        out.push('\n');
    }
    out
}

pub fn write_csv<W: Write>(out: W, rows: &[CompareRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.algorithm.clone(),
            r.lower_bound.to_string(),
            r.ccut.to_string(),
            r.fcut.to_string(),
            r.seconds.to_string(),
            r.refine.to_string(),
            r.partition_size.to_string(),
            r.termination.clone(),
            if r.best { "*" } else { "" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CompareRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(HEADER) {
        bail!("unexpected comparison header");
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != HEADER.len() {
            bail!("comparison row has {} fields", rec.len());
        }
        rows.push(CompareRow {
            instance: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            lower_bound: rec[2].parse()?,
            ccut: rec[3].parse()?,
            fcut: rec[4].parse()?,
            seconds: rec[5].parse()?,
            refine: rec[6].parse()?,
            partition_size: rec[7].parse()?,
            termination: rec[8].to_string(),
            best: &rec[9] == "*",
        });
    }
    Ok(rows)
}

fn run_cells(cells: &[(usize, String)], instances: &[NamedInstance], a: &CompareArgs) -> Vec<Result<Solved>> {
    let one = |(i, algo): &(usize, String)| solve_one(&instances[*i], algo, &a.flags);
    #[cfg(feature = "parallel")]
    if a.jobs > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build() {
            return pool.install(|| cells.par_iter().map(one).collect());
        }
    }
    cells.iter().map(one).collect()
}

pub fn run(a: &CompareArgs) -> Result<u8> {
    if a.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    for algo in &a.algos {
        parse_algorithm(algo)?;
    }
    let instances = expand(&a.instances)?;
    let cells: Vec<(usize, String)> = (0..instances.len())
        .flat_map(|i| a.algos.iter().map(move |algo| (i, algo.clone())))
        .collect();
    let solved = run_cells(&cells, &instances, a);
    if let Some(dir) = &a.trace_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut rows = Vec::new();
    let mut timed_out = 0;
    for ((i, algo), s) in cells.iter().zip(solved) {
        let s = s?;
        let inst = &instances[*i];
        if let Some(dir) = &a.trace_dir {
            let id = format!("{}-{algo}", inst.name);
            write_trace(&dir.join(format!("{id}.csv")), &id, inst, &s.result)?;
        }
        if s.result.termination == Termination::TimeLimit {
            timed_out += 1;
        }
        rows.push(row(inst, &s));
    }
    mark_best(&mut rows);
    print!("{}", format_table(&rows));
    if timed_out > 0 {
        eprintln!("note: {timed_out} run(s) stopped at the time limit");
    }
    if let Some(path) = &a.csv_out {
        let file = std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_csv(file, &rows)?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(instance: &str, lb: f64) -> CompareRow {
        CompareRow {
            instance: instance.into(),
            algorithm: "bdd".into(),
            lower_bound: lb,
            ccut: 0,
            fcut: 3,
            seconds: 0.5,
            refine: 0,
            partition_size: 2,
            termination: "stall".into(),
            best: false,
        }
    }

    #[test]
    fn ties_are_all_marked() {
        let mut rows = vec![r("a", 1.0), r("a", 1.0 - 5e-7), r("a", 0.9), r("b", -3.0)];
        mark_best(&mut rows);
        let marks: Vec<bool> = rows.iter().map(|r| r.best).collect();
        assert_eq!(marks, vec![true, true, false, true]);
    }

    #[test]
    fn csv_round_trip() {
        let mut rows = vec![r("x,y", 0.1 + 0.2), r("x,y", -1e-300)];
        mark_best(&mut rows);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }
}
