//! CSV output. Floats are written with at least ten significant digits and
//! always round-trip exactly.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::fuzzy::SurfaceRow;
use crate::ledger::Category;
use crate::network::Network;
use crate::sim::{Comparison, RunSummary};

pub type CsvResult<T> = Result<T, csv::Error>;

/// Shortest round-trip representation, padded to ten significant digits.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.000000000".to_owned();
    }
    let shortest = format!("{x}");
    let significant = shortest
        .trim_start_matches('-')
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    if significant >= 10 {
        return shortest;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    let padded = format!("{x:.decimals$}");
    // padding must not change the value
    if padded.parse::<f64>() == Ok(x) {
        padded
    } else {
        shortest
    }
}

fn ids(list: &[u32]) -> String {
    list.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

/// `round,alive,residual_j,ch_count,relay_count`
pub fn write_rounds<W: Write>(out: W, run: &RunSummary) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "alive", "residual_j", "ch_count", "relay_count"])?;
    for m in &run.metrics {
        w.write_record([
            m.round.to_string(),
            m.alive.to_string(),
            fmt_f64(m.residual_j),
            m.ch_count.to_string(),
            m.relay_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-round decisions and the energy spent in each ledger category.
pub fn write_trace<W: Write>(out: W, run: &RunSummary) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["round".to_owned(), "ch_ids".into(), "relays".into(), "cluster_sizes".into()];
    header.extend(Category::ALL.iter().map(|c| format!("{}_j", c.name())));
    header.push("ledger_gap_j".into());
    w.write_record(&header)?;
    for m in &run.metrics {
        let relays = m
            .outcome
            .relays
            .iter()
            .map(|(s, r)| format!("{s}>{r}"))
            .collect::<Vec<_>>()
            .join(";");
        let sizes = m
            .outcome
            .cluster_sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let mut rec = vec![m.round.to_string(), ids(&m.outcome.cluster_heads), relays, sizes];
        rec.extend(Category::ALL.iter().map(|&c| fmt_f64(m.debits.get(c))));
        rec.push(fmt_f64(m.ledger_gap));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `protocol,seed,fnd,final_alive`; a run without deaths reports an empty FND.
pub fn write_summary<'a, W: Write>(out: W, runs: impl IntoIterator<Item = &'a RunSummary>) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["protocol", "seed", "fnd", "final_alive"])?;
    for r in runs {
        w.write_record([
            r.protocol.name().to_owned(),
            r.seed.to_string(),
            r.fnd.map(|f| f.to_string()).unwrap_or_default(),
            r.final_alive.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `protocol,runs,median_fnd,min_fnd,max_fnd,median_final_alive`
pub fn write_compare<W: Write>(out: W, cmp: &Comparison) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["protocol", "runs", "median_fnd", "min_fnd", "max_fnd", "median_final_alive"])?;
    for s in &cmp.stats {
        w.write_record([
            s.protocol.name().to_owned(),
            s.runs.to_string(),
            fmt_f64(s.median_fnd),
            s.min_fnd.to_string(),
            s.max_fnd.to_string(),
            fmt_f64(s.median_final_alive),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `x1,x2,output`
pub fn write_surface<W: Write>(out: W, rows: &[SurfaceRow]) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x1", "x2", "output"])?;
    for r in rows {
        w.write_record([fmt_f64(r.x1), fmt_f64(r.x2), fmt_f64(r.output)])?;
    }
    w.flush()?;
    Ok(())
}

/// `id,x,y,class,energy,alive`
pub fn write_population<W: Write>(out: W, net: &Network) -> CsvResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "x", "y", "class", "energy", "alive"])?;
    for n in &net.nodes {
        w.write_record([
            n.id.to_string(),
            fmt_f64(n.position.x),
            fmt_f64(n.position.y),
            n.class.name().to_owned(),
            fmt_f64(n.energy),
            u8::from(n.alive).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RoundRow {
    pub round: u64,
    pub alive: usize,
    pub residual_j: f64,
    pub ch_count: usize,
    pub relay_count: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SummaryRow {
    pub protocol: String,
    pub seed: u64,
    pub fnd: Option<u64>,
    pub final_alive: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CompareRow {
    pub protocol: String,
    pub runs: usize,
    pub median_fnd: f64,
    pub min_fnd: u64,
    pub max_fnd: u64,
    pub median_final_alive: f64,
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> CsvResult<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
