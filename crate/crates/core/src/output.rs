//! CSV and JSON rendering of run results.
//!
//! CSV output is a sequence of sections, each introduced by a `# name` line
//! and followed by a headed table. Floats are written in shortest
//! round-trip form so the output is byte-stable across runs.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{IntervalType2, Triangular};
use crate::model::{evaluate, Design, ProblemInstance};
use crate::moo::Objectives;
use crate::pipeline::{
    Comparison, DefuzzDeviation, DefuzzRow, FrontExport, PayoffSection, ReferenceCheck, Report,
    SolutionRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn flag(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

struct Sections<W: Write> {
    out: W,
}

impl<W: Write> Sections<W> {
    fn section<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        writeln!(self.out, "# {name}")?;
        let mut w = csv::Writer::from_writer(&mut self.out);
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        drop(w);
        writeln!(self.out)?;
        Ok(())
    }
}

fn json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

const DEFUZZ_HEADER: [&str; 19] = [
    "subsystem", "fuzzy", "km_left", "km_right", "km", "ub_left", "ub_right", "ub", "nt", "gc",
    "t1_centroid", "ref_km_left", "ref_km_right", "ref_km", "ref_ub_left", "ref_ub_right",
    "ref_ub", "ref_nt", "ref_gc",
];

fn defuzz_record(r: &DefuzzRow) -> Vec<String> {
    vec![
        r.subsystem.to_string(),
        r.fuzzy.clone(),
        opt(r.km_left),
        opt(r.km_right),
        opt(r.km),
        opt(r.ub_left),
        opt(r.ub_right),
        opt(r.ub),
        opt(r.nt),
        opt(r.gc),
        opt(r.t1_centroid),
        opt(r.ref_km_left),
        opt(r.ref_km_right),
        opt(r.ref_km),
        opt(r.ref_ub_left),
        opt(r.ref_ub_right),
        opt(r.ref_ub),
        opt(r.ref_nt),
        opt(r.ref_gc),
    ]
}

fn deviation_record(d: &DefuzzDeviation) -> Vec<String> {
    vec![d.quantity.clone(), num(d.max_abs_delta), d.worst_subsystem.to_string()]
}

/// Defuzzification table with its deviation summary.
#[derive(Debug, Serialize)]
pub struct DefuzzOutput<'a> {
    pub rows: &'a [DefuzzRow],
    pub deviations: &'a [DefuzzDeviation],
}

pub fn write_defuzz<W: Write>(o: &DefuzzOutput<'_>, format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => json(o, out),
        Format::Csv => {
            let mut s = Sections { out };
            s.section("defuzzification", &DEFUZZ_HEADER, o.rows.iter().map(defuzz_record))?;
            s.section(
                "defuzzification_deviations",
                &["quantity", "max_abs_delta", "worst_subsystem"],
                o.deviations.iter().map(deviation_record),
            )
        }
    }
}

fn payoff_rows(p: &PayoffSection) -> Vec<Vec<String>> {
    let t = &p.table;
    let row = |k: &str, v: f64, r: Option<f64>, d: Option<&Design>, b: Option<bool>| {
        vec![
            k.to_string(),
            num(v),
            opt(r),
            r.map(|r| num(v - r)).unwrap_or_default(),
            d.map(ToString::to_string).unwrap_or_default(),
            flag(b),
        ]
    };
    vec![
        row("r_max", t.r_max, p.reference_r_max, Some(&t.r_max_design), p.r_max_bounds_references),
        row("c_at_r_max", t.c_at_r_max, None, None, None),
        row("c_min", t.c_min, p.reference_c_min, Some(&t.c_min_design), p.c_min_bounds_references),
        row("r_at_c_min", t.r_at_c_min, None, None, None),
        row("r_floor", t.r_floor, None, None, None),
        row("c_ceiling", t.c_ceiling, None, None, None),
    ]
}

const PAYOFF_HEADER: [&str; 6] = [
    "quantity", "value", "reference", "deviation", "design", "bounds_references",
];

/// Payoff table on its own.
pub fn write_payoff<W: Write>(p: &PayoffSection, format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => json(p, out),
        Format::Csv => Sections { out }.section("payoff", &PAYOFF_HEADER, payoff_rows(p)),
    }
}

const SOLUTION_HEADER: [&str; 14] = [
    "method", "params", "label", "reliability", "cost", "design", "score", "ties",
    "convergence", "reference_reliability", "reference_cost", "reference_design",
    "matches_reference", "set",
];

fn solution_record(s: &SolutionRow, set: &str) -> Vec<String> {
    vec![
        s.method.clone(),
        s.params.clone(),
        s.label.clone(),
        num(s.reliability),
        num(s.cost),
        s.design.to_string(),
        num(s.score),
        s.ties.to_string(),
        opt(s.convergence),
        opt(s.reference_reliability),
        opt(s.reference_cost),
        s.reference_design.as_ref().map(ToString::to_string).unwrap_or_default(),
        flag(s.matches_reference),
        set.to_string(),
    ]
}

const CHECK_HEADER: [&str; 11] = [
    "group", "method", "params", "reliability", "cost", "design", "resolved_design",
    "evaluated_reliability", "evaluated_cost", "feasible", "status",
];

fn check_record(c: &ReferenceCheck) -> Vec<String> {
    vec![
        c.group.clone(),
        c.method.clone(),
        c.params.clone(),
        num(c.reliability),
        num(c.cost),
        c.design.to_string(),
        c.resolved_design.as_ref().map(ToString::to_string).unwrap_or_default(),
        opt(c.evaluated_reliability),
        opt(c.evaluated_cost),
        flag(c.feasible),
        c.status.to_string(),
    ]
}

pub fn write_report<W: Write>(r: &Report, format: Format, out: W) -> Result<()> {
    if format == Format::Json {
        return json(r, out);
    }
    let mut s = Sections { out };
    s.section(
        "run",
        &["reduction", "profile", "grid", "convergence_normalization", "reliability_source", "feasible_designs"],
        [vec![
            r.reduction.to_string(),
            r.profile.to_string(),
            r.grid.to_string(),
            r.convergence_normalization.to_string(),
            r.reliabilities.source.clone(),
            r.feasible_designs.to_string(),
        ]],
    )?;
    s.section(
        "reliabilities",
        &["subsystem", "value"],
        r.reliabilities
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1).to_string(), num(*v)]),
    )?;
    s.section("defuzzification", &DEFUZZ_HEADER, r.defuzzification.iter().map(defuzz_record))?;
    s.section(
        "defuzzification_deviations",
        &["quantity", "max_abs_delta", "worst_subsystem"],
        r.defuzzification_deviations.iter().map(deviation_record),
    )?;
    s.section("payoff", &PAYOFF_HEADER, payoff_rows(&r.payoff))?;
    s.section(
        "solutions",
        &SOLUTION_HEADER,
        r.solutions.iter().map(|x| solution_record(x, "computed")),
    )?;
    s.section("reference_checks", &CHECK_HEADER, r.reference_checks.iter().map(check_record))?;
    if let Some(c) = &r.calibration {
        s.section(
            "calibration",
            &["expected", "ideal", "range"],
            c.expected
                .iter()
                .zip(&c.ideal)
                .zip(&c.range)
                .map(|((e, i), g)| vec![num(*e), num(*i), num(*g)]),
        )?;
        s.section(
            "calibration_summary",
            &["ideal_max_error", "range_max_error", "tolerance", "matched"],
            [vec![
                num(c.ideal_max_error),
                num(c.range_max_error),
                num(c.tolerance),
                c.matched.map(|m| m.to_string()).unwrap_or_else(|| "none".into()),
            ]],
        )?;
    }
    Ok(())
}

pub fn write_comparison<W: Write>(c: &Comparison, format: Format, out: W) -> Result<()> {
    if format == Format::Json {
        return json(c, out);
    }
    let mut s = Sections { out };
    s.section(
        "comparison_run",
        &["it2_reduction", "t1_inputs"],
        [vec![c.it2_reduction.to_string(), c.t1_inputs.clone()]],
    )?;
    s.section(
        "reliabilities",
        &["subsystem", "it2", "t1"],
        c.it2_reliabilities
            .values
            .iter()
            .zip(&c.t1_reliabilities.values)
            .enumerate()
            .map(|(i, (a, b))| vec![(i + 1).to_string(), num(*a), num(*b)]),
    )?;
    s.section("it2_payoff", &PAYOFF_HEADER, payoff_rows(&c.it2_payoff))?;
    s.section("t1_payoff", &PAYOFF_HEADER, payoff_rows(&c.t1_payoff))?;
    s.section(
        "solutions",
        &SOLUTION_HEADER,
        c.rows.iter().flat_map(|r| {
            [solution_record(&r.it2, "it2"), solution_record(&r.t1, "t1")]
        }),
    )?;
    s.section(
        "reference_checks",
        &CHECK_HEADER,
        c.it2_reference_checks
            .iter()
            .chain(&c.t1_reference_checks)
            .map(check_record),
    )
}

/// One line of the front export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    /// `front` or `sweep`.
    pub kind: String,
    pub w_reliability: Option<f64>,
    pub cost: f64,
    pub reliability: f64,
    pub design: Design,
    pub on_front: bool,
}

pub fn front_records(f: &FrontExport) -> Vec<FrontRecord> {
    let front = f.front.iter().map(|(d, o)| FrontRecord {
        kind: "front".into(),
        w_reliability: None,
        cost: o.cost,
        reliability: o.reliability,
        design: d.clone(),
        on_front: true,
    });
    let sweep = f.sweep.iter().map(|s| FrontRecord {
        kind: "sweep".into(),
        w_reliability: Some(s.w_reliability),
        cost: s.solution.evaluation.cost,
        reliability: s.solution.evaluation.reliability,
        design: s.solution.design.clone(),
        on_front: s.on_front,
    });
    front.chain(sweep).collect()
}

pub fn write_front<W: Write>(f: &FrontExport, format: Format, out: W) -> Result<()> {
    let records = front_records(f);
    match format {
        Format::Json => json(&records, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &records {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn read_front<R: std::io::Read>(input: R) -> Result<Vec<FrontRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<FrontRecord>, _>>()
        .map_err(|e| Error::Parse(format!("front file: {e}")))
}

/// Checks an exported front against the instance it came from: every row
/// re-evaluates to its recorded objectives and is feasible, front rows are
/// mutually non-dominated, and the `on_front` flag of each sweep row agrees
/// with membership in the exported front.
pub fn verify_front(inst: &ProblemInstance, records: &[FrontRecord]) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidInstance(msg));
    for r in records {
        let e = evaluate(inst, &r.design)?;
        if !e.feasible {
            return bad(format!("{} design {} is infeasible", r.kind, r.design));
        }
        if e.reliability != r.reliability || e.cost != r.cost {
            return bad(format!(
                "{} design {} evaluates to ({}, {}), recorded ({}, {})",
                r.kind, r.design, e.reliability, e.cost, r.reliability, r.cost
            ));
        }
    }
    let front: Vec<_> = records.iter().filter(|r| r.kind == "front").collect();
    let obj = |r: &FrontRecord| Objectives::new(r.reliability, r.cost);
    for a in &front {
        if let Some(b) = front.iter().find(|b| obj(b).dominates(&obj(a))) {
            return bad(format!("front design {} is dominated by {}", a.design, b.design));
        }
    }
    for s in records.iter().filter(|r| r.kind == "sweep") {
        let member = front.iter().any(|f| obj(f) == obj(s));
        if member != s.on_front {
            return bad(format!(
                "sweep point w={} flagged on_front={} but membership is {member}",
                opt(s.w_reliability),
                s.on_front
            ));
        }
    }
    Ok(())
}

/// Generated type-1 and interval type-2 reliabilities, one row per value.
#[derive(Debug, Serialize)]
pub struct GeneratedRow {
    pub index: usize,
    pub r: f64,
    pub t1: Triangular,
    pub it2: IntervalType2,
}

pub fn write_generated<W: Write>(rows: &[GeneratedRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => json(&rows, out),
        Format::Csv => Sections { out }.section(
            "generated",
            &["index", "r", "t1", "it2"],
            rows.iter().map(|g| {
                vec![g.index.to_string(), num(g.r), g.t1.to_string(), g.it2.to_string()]
            }),
        ),
    }
}
