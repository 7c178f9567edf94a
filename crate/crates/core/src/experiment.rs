//! Single runs and paired multi-seed comparisons, persisted as CSV.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::SimulationConfig;
use crate::coverage::CoveragePlan;
use crate::error::{Error, Result};
use crate::metrics::{mean, RoundRecord, SimulationResult};
use crate::protocol::{run_simulation, ProtocolKind};

pub const CSV_HEADER: &str = "round,alive,sleeping,heads,direct_to_bs,residual_energy_j,dissipated_round_j,dissipated_cum_j,energy_variance_j2,coverage";

pub const SUMMARY_HEADER: &str = "seed,leach_fnd,proposed_fnd,leach_hna,proposed_hna,leach_mean_coverage,proposed_mean_coverage,leach_final_dissipation_j,proposed_final_dissipation_j,fnd_improvement_pct,hna_improvement_pct";

const SIG_DIGITS: i32 = 9;

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 <= |v| < 1e9`.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (SIG_DIGITS - 1 - exp) as usize, v);
        trim_fraction(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "none".to_string(), |r| r.to_string())
}

pub fn csv_row(r: &RoundRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.round,
        r.alive,
        r.sleeping,
        r.heads,
        r.direct_to_bs,
        format_sig(r.residual_energy_total),
        format_sig(r.dissipated_this_round),
        format_sig(r.dissipated_cumulative),
        format_sig(r.energy_variance),
        format_sig(r.coverage),
    )
}

pub fn footer(result: &SimulationResult) -> String {
    format!(
        "# fnd={} hna={} seed={} protocol={}",
        opt(result.fnd_round),
        opt(result.hna_round),
        result.seed,
        result.protocol
    )
}

pub fn write_run_csv<W: Write>(result: &SimulationResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &result.records {
        writeln!(out, "{}", csv_row(r))?;
    }
    writeln!(out, "{}", footer(result))?;
    out.flush()
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Runs one protocol on one seed and writes its per-round CSV.
pub fn run_command(
    config: &SimulationConfig,
    protocol: ProtocolKind,
    seed: u64,
    out_path: &Path,
) -> Result<SimulationResult> {
    let result = run_simulation(config, &config.policy_for(protocol), seed)?;
    write_file(out_path, |out| write_run_csv(&result, out))?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub fnd: Option<u64>,
    pub hna: Option<u64>,
    pub rounds_executed: u64,
    pub mean_coverage: f64,
    pub final_dissipation: f64,
}

impl RunSummary {
    pub fn of(result: &SimulationResult) -> Self {
        Self {
            fnd: result.fnd_round,
            hna: result.hna_round,
            rounds_executed: result.records.len() as u64,
            mean_coverage: result.mean_coverage(),
            final_dissipation: result.final_dissipation(),
        }
    }

    /// FND, or the executed round count when no node died (a lower bound).
    pub fn fnd_or_censored(&self) -> f64 {
        self.fnd.unwrap_or(self.rounds_executed) as f64
    }

    pub fn hna_or_censored(&self) -> f64 {
        self.hna.unwrap_or(self.rounds_executed) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedRun {
    pub seed: u64,
    pub leach: SimulationResult,
    pub proposed: SimulationResult,
}

impl PairedRun {
    pub fn fnd_improvement_pct(&self) -> f64 {
        pct(RunSummary::of(&self.proposed).fnd_or_censored(), RunSummary::of(&self.leach).fnd_or_censored())
    }

    pub fn hna_improvement_pct(&self) -> f64 {
        pct(RunSummary::of(&self.proposed).hna_or_censored(), RunSummary::of(&self.leach).hna_or_censored())
    }
}

fn pct(new: f64, base: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (new / base - 1.0) * 100.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub runs: Vec<PairedRun>,
}

impl Comparison {
    fn mean_of(&self, f: impl Fn(&PairedRun) -> f64) -> f64 {
        mean(self.runs.iter().map(f))
    }

    pub fn mean_fnd(&self, kind: ProtocolKind) -> f64 {
        self.mean_of(|r| RunSummary::of(r.get(kind)).fnd_or_censored())
    }

    pub fn mean_hna(&self, kind: ProtocolKind) -> f64 {
        self.mean_of(|r| RunSummary::of(r.get(kind)).hna_or_censored())
    }

    /// Percentage gain of the mean FND of the proposed protocol over LEACH.
    pub fn mean_fnd_improvement_pct(&self) -> f64 {
        pct(self.mean_fnd(ProtocolKind::Proposed), self.mean_fnd(ProtocolKind::Leach))
    }

    pub fn mean_hna_improvement_pct(&self) -> f64 {
        pct(self.mean_hna(ProtocolKind::Proposed), self.mean_hna(ProtocolKind::Leach))
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SUMMARY_HEADER}").unwrap();
        for run in &self.runs {
            let (l, p) = (RunSummary::of(&run.leach), RunSummary::of(&run.proposed));
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                run.seed,
                opt(l.fnd),
                opt(p.fnd),
                opt(l.hna),
                opt(p.hna),
                format_sig(l.mean_coverage),
                format_sig(p.mean_coverage),
                format_sig(l.final_dissipation),
                format_sig(p.final_dissipation),
                format_sig(run.fnd_improvement_pct()),
                format_sig(run.hna_improvement_pct()),
            )
            .unwrap();
        }
        let avg = |kind, f: fn(&RunSummary) -> f64| self.mean_of(|r| f(&RunSummary::of(r.get(kind))));
        use ProtocolKind::{Leach, Proposed};
        writeln!(
            s,
            "mean,{},{},{},{},{},{},{},{},{},{}",
            format_sig(self.mean_fnd(Leach)),
            format_sig(self.mean_fnd(Proposed)),
            format_sig(self.mean_hna(Leach)),
            format_sig(self.mean_hna(Proposed)),
            format_sig(avg(Leach, |r| r.mean_coverage)),
            format_sig(avg(Proposed, |r| r.mean_coverage)),
            format_sig(avg(Leach, |r| r.final_dissipation)),
            format_sig(avg(Proposed, |r| r.final_dissipation)),
            format_sig(self.mean_fnd_improvement_pct()),
            format_sig(self.mean_hna_improvement_pct()),
        )
        .unwrap();
        writeln!(
            s,
            "# mean_fnd_improvement_pct={} mean_hna_improvement_pct={} seeds={}",
            format_sig(self.mean_fnd_improvement_pct()),
            format_sig(self.mean_hna_improvement_pct()),
            self.runs.len()
        )
        .unwrap();
        s
    }
}

impl PairedRun {
    pub fn get(&self, kind: ProtocolKind) -> &SimulationResult {
        match kind {
            ProtocolKind::Leach => &self.leach,
            ProtocolKind::Proposed => &self.proposed,
        }
    }
}

/// Runs both protocols on each seed over the same deployment. Cells run in
/// parallel; results come back in seed order.
pub fn compare(config: &SimulationConfig, seeds: &[u64]) -> Result<Comparison> {
    if seeds.is_empty() {
        return Err(Error::config("seeds", "comparison needs at least one seed"));
    }
    config.validate()?;
    let cells: Vec<(u64, ProtocolKind)> = seeds
        .iter()
        .flat_map(|&s| ProtocolKind::ALL.map(|k| (s, k)))
        .collect();
    let results: Vec<SimulationResult> = cells
        .par_iter()
        .map(|&(seed, kind)| run_simulation(config, &config.policy_for(kind), seed))
        .collect::<Result<_>>()?;
    let mut it = results.into_iter();
    let runs = seeds
        .iter()
        .map(|&seed| {
            let leach = it.next().expect("one result per cell");
            let proposed = it.next().expect("one result per cell");
            PairedRun { seed, leach, proposed }
        })
        .collect();
    Ok(Comparison { runs })
}

pub fn run_csv_name(kind: ProtocolKind, seed: u64) -> String {
    format!("{kind}_seed{seed}.csv")
}

/// Paired comparison written to `out_dir`: one CSV per (protocol, seed) plus
/// `summary.csv`.
pub fn compare_command(config: &SimulationConfig, seeds: &[u64], out_dir: &Path) -> Result<Comparison> {
    let comparison = compare(config, seeds)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for run in &comparison.runs {
        for kind in ProtocolKind::ALL {
            let path = out_dir.join(run_csv_name(kind, run.seed));
            write_file(&path, |out| write_run_csv(run.get(kind), out))?;
        }
    }
    let summary: PathBuf = out_dir.join("summary.csv");
    let text = comparison.summary_csv();
    write_file(&summary, |out| out.write_all(text.as_bytes()))?;
    Ok(comparison)
}

/// Human-readable coverage plan, with both node-count roundings.
pub fn plan_report(plan: &CoveragePlan, total_nodes: u64, field_area: f64) -> String {
    format!(
        "target_coverage = {}\n\
         sensing_range_m = {}\n\
         duty_fraction = {}\n\
         field_area_m2 = {}\n\
         total_nodes = {total_nodes}\n\
         required_density_per_m2 = {}\n\
         required_nodes_exact = {}\n\
         required_nodes_ceil = {}\n\
         required_nodes_floor = {}\n\
         max_sleep_ceil = {}\n\
         max_sleep_floor = {}\n",
        format_sig(plan.target_coverage),
        format_sig(plan.sensing_range),
        format_sig(plan.duty_fraction),
        format_sig(field_area),
        format_sig(plan.required_density),
        format_sig(plan.required_density * field_area),
        plan.required_nodes,
        plan.required_nodes_floor,
        plan.max_sleep,
        plan.max_sleep_floor,
    )
}
