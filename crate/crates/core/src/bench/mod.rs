//! Sampler benchmarks on the formula family
//! `x1 & ... & xM & (x{M+1} | ... | x{M+N})`, whose 2^N - 1 models are
//! known in closed form: all-ones prefix, nonzero suffix.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, VarTable};
use crate::infer::{search, Evidence, Progress, SampleLog, SamplerConfig};
use crate::normalize::{Clause, ClauseSet};
use crate::rbm::compile;

/// Default number of samples between coverage checkpoints.
pub const DEFAULT_CADENCE: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineFormula {
    pub m: usize,
    pub n: usize,
}

impl PipelineFormula {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(
                "the disjunction needs at least one variable".into(),
            ));
        }
        if n > 62 || m + n > 4096 {
            return Err(Error::InvalidArgument(format!(
                "formula size M={m}, N={n} is out of range"
            )));
        }
        Ok(PipelineFormula { m, n })
    }

    pub fn var_count(&self) -> usize {
        self.m + self.n
    }

    /// Number of satisfying assignments, `2^N - 1`.
    pub fn model_count(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn vars(&self) -> VarTable {
        VarTable::from_names((1..=self.var_count()).map(|i| format!("x{i}"))).expect("distinct identifiers")
    }

    pub fn formula(&self) -> Formula {
        let mut parts: Vec<Formula> = (0..self.m).map(Formula::var).collect();
        parts.push(Formula::or((self.m..self.var_count()).map(Formula::var).collect()));
        Formula::and(parts)
    }

    pub fn is_satisfying(&self, bits: &[u8]) -> bool {
        bits.len() == self.var_count() && bits[..self.m].iter().all(|&b| b == 1) && bits[self.m..].contains(&1)
    }

    /// Every satisfying assignment, in increasing suffix order.
    pub fn satisfying(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        (1..=self.model_count()).map(move |k| {
            let mut bits = vec![1u8; self.m];
            bits.extend((0..self.n).map(|p| ((k >> (self.n - 1 - p)) & 1) as u8));
            bits
        })
    }
}

/// Strict DNF of the family: for each `j` in the disjunction, the prefix,
/// `x_j`, and the negation of every later disjunct.
pub fn build_class_sdnf(pf: PipelineFormula) -> Result<ClauseSet> {
    let total = pf.var_count();
    let clauses = (pf.m..total)
        .map(|j| {
            let mut pos: Vec<usize> = (0..pf.m).collect();
            pos.push(j);
            Clause::new(pos, (j + 1..total).collect()).expect("disjoint literals")
        })
        .collect();
    ClauseSet::from_exclusive(total, clauses)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub samples: u64,
    pub coverage: f64,
    pub accuracy: f64,
    /// Seconds since the run started, interpolated between sync points.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRun {
    pub run_id: usize,
    pub seed: u64,
    pub samples_drawn: u64,
    pub checkpoints: Vec<Checkpoint>,
    /// Sample index at which the last satisfying assignment was found.
    pub samples_to_full: Option<u64>,
    pub accepted: usize,
    pub false_accepts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckpointSummary {
    pub samples: u64,
    pub coverage_mean: f64,
    pub coverage_sd: f64,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub m: usize,
    pub n: usize,
    pub runs: Vec<CoverageRun>,
    /// Mean and standard deviation across runs at every checkpoint.
    pub summary: Vec<CheckpointSummary>,
    /// Set when no samples were requested: coverage is 0 and accuracy is
    /// reported as 1 over an empty accepted set.
    pub vacuous: bool,
}

impl CoverageReport {
    pub fn full_coverage_runs(&self) -> usize {
        self.runs.iter().filter(|r| r.samples_to_full.is_some()).count()
    }

    /// Samples needed for full coverage divided by `2^(M+N)`, averaged over
    /// the runs that got there.
    pub fn search_space_ratio(&self) -> Option<f64> {
        let done: Vec<u64> = self.runs.iter().filter_map(|r| r.samples_to_full).collect();
        if done.is_empty() {
            return None;
        }
        let mean = done.iter().sum::<u64>() as f64 / done.len() as f64;
        Some(mean / 2f64.powi((self.m + self.n) as i32))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["run_id", "samples", "coverage", "accuracy"])?;
        for run in &self.runs {
            for c in &run.checkpoints {
                out.serialize((run.run_id, c.samples, c.coverage, c.accuracy))?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Seed of run `run` in a benchmark seeded with `base`.
pub fn run_seed(base: u64, run: usize) -> u64 {
    base.wrapping_add((run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Compiles the family's SDNF and runs `runs` independent searches with no
/// evidence, checkpointing coverage and accuracy every `cadence` samples.
pub fn run_coverage(pf: PipelineFormula, cfg: &SamplerConfig, runs: usize, cadence: u64) -> Result<CoverageReport> {
    if cadence < 1 {
        return Err(Error::InvalidArgument("checkpoint cadence must be at least 1".into()));
    }
    if cfg.max_samples == 0 {
        let runs = (0..runs)
            .map(|r| CoverageRun {
                run_id: r,
                seed: run_seed(cfg.seed, r),
                samples_drawn: 0,
                checkpoints: vec![Checkpoint {
                    samples: 0,
                    coverage: 0.0,
                    accuracy: 1.0,
                    wall_time: 0.0,
                }],
                samples_to_full: None,
                accepted: 0,
                false_accepts: 0,
            })
            .collect::<Vec<_>>();
        let summary = summarize(&runs);
        return Ok(CoverageReport {
            m: pf.m,
            n: pf.n,
            runs,
            summary,
            vacuous: true,
        });
    }
    let model = compile(&build_class_sdnf(pf)?, cfg.epsilon, 1.0)?.model;
    let ev = Evidence::none(pf.var_count());
    let runs = (0..runs)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(cfg.seed, r);
            let log = search(&model, &ev, &SamplerConfig { seed, ..cfg.clone() })?;
            Ok(coverage_run(pf, r, seed, &log, cadence))
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&runs);
    Ok(CoverageReport {
        m: pf.m,
        n: pf.n,
        runs,
        summary,
        vacuous: false,
    })
}

fn coverage_run(pf: PipelineFormula, run_id: usize, seed: u64, log: &SampleLog, cadence: u64) -> CoverageRun {
    // (first_seen, satisfying) in discovery order.
    let mut found: Vec<(u64, bool)> = log
        .accepted
        .iter()
        .map(|(a, acc)| (acc.first_seen, pf.is_satisfying(a.bits())))
        .collect();
    found.sort_unstable();
    let total = pf.model_count() as f64;

    let mut marks: Vec<u64> = (1..=log.samples_drawn / cadence).map(|k| k * cadence).collect();
    if marks.last() != Some(&log.samples_drawn) {
        marks.push(log.samples_drawn);
    }
    let mut checkpoints = Vec::with_capacity(marks.len());
    let (mut idx, mut good, mut bad) = (0, 0usize, 0usize);
    for s in marks {
        while idx < found.len() && found[idx].0 <= s {
            if found[idx].1 {
                good += 1;
            } else {
                bad += 1;
            }
            idx += 1;
        }
        checkpoints.push(Checkpoint {
            samples: s,
            coverage: good as f64 / total,
            accuracy: if good + bad == 0 {
                1.0
            } else {
                good as f64 / (good + bad) as f64
            },
            wall_time: interpolate_time(&log.progress, s).as_secs_f64(),
        });
    }
    let satisfying: Vec<u64> = found.iter().filter(|f| f.1).map(|f| f.0).collect();
    CoverageRun {
        run_id,
        seed,
        samples_drawn: log.samples_drawn,
        checkpoints,
        samples_to_full: (satisfying.len() as u64 == pf.model_count()).then(|| *satisfying.last().expect("nonempty")),
        accepted: found.len(),
        false_accepts: found.len() - satisfying.len(),
    }
}

/// Elapsed time at sample `s`, linear between recorded sync points.
fn interpolate_time(progress: &[Progress], s: u64) -> Duration {
    let mut prev = Progress {
        samples: 0,
        elapsed: Duration::ZERO,
    };
    for p in progress {
        if p.samples >= s {
            if p.samples == prev.samples {
                return p.elapsed;
            }
            let frac = (s - prev.samples) as f64 / (p.samples - prev.samples) as f64;
            return prev.elapsed + (p.elapsed - prev.elapsed).mul_f64(frac);
        }
        prev = *p;
    }
    prev.elapsed
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Per-checkpoint statistics. Runs that stopped early carry their final
/// values forward.
fn summarize(runs: &[CoverageRun]) -> Vec<CheckpointSummary> {
    let Some(longest) = runs.iter().max_by_key(|r| r.checkpoints.len()) else {
        return Vec::new();
    };
    longest
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, cp)| {
            let at = |r: &CoverageRun| r.checkpoints[k.min(r.checkpoints.len() - 1)];
            let cov: Vec<f64> = runs.iter().map(|r| at(r).coverage).collect();
            let acc: Vec<f64> = runs.iter().map(|r| at(r).accuracy).collect();
            let (coverage_mean, coverage_sd) = mean_sd(&cov);
            let (accuracy_mean, accuracy_sd) = mean_sd(&acc);
            CheckpointSummary {
                samples: cp.samples,
                coverage_mean,
                coverage_sd,
                accuracy_mean,
                accuracy_sd,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub m: usize,
    pub n: usize,
    pub run_id: usize,
    /// Seconds until the last satisfying assignment was found, or the
    /// time spent when `censored`.
    pub seconds: f64,
    pub samples: u64,
    pub censored: bool,
}

/// Wall-clock time to full coverage for each `n` in `n_list`, `runs` times
/// each. Runs execute one after another so timings do not compete.
pub fn run_timing(
    m: usize,
    n_list: &[usize],
    cfg: &SamplerConfig,
    runs: usize,
    timeout: Option<Duration>,
) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let pf = PipelineFormula::new(m, n)?;
        let model = compile(&build_class_sdnf(pf)?, cfg.epsilon, 1.0)?.model;
        let ev = Evidence::none(pf.var_count());
        for r in 0..runs {
            let run_cfg = SamplerConfig {
                seed: run_seed(cfg.seed, r),
                target: Some(pf.model_count() as usize),
                time_limit: timeout,
                ..cfg.clone()
            };
            let start = Instant::now();
            let log = search(&model, &ev, &run_cfg)?;
            let spent = start.elapsed();
            let run = coverage_run(pf, r, run_cfg.seed, &log, u64::MAX);
            let (seconds, samples, censored) = match run.samples_to_full {
                Some(s) => (interpolate_time(&log.progress, s).as_secs_f64(), s, false),
                None => (spent.as_secs_f64(), log.samples_drawn, true),
            };
            rows.push(TimingRow {
                m,
                n,
                run_id: r,
                seconds,
                samples,
                censored,
            });
        }
    }
    Ok(rows)
}

pub fn write_timing_csv<W: Write>(rows: &[TimingRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["M", "N", "run_id", "seconds", "censored"])?;
    for r in rows {
        out.serialize((r.m, r.n, r.run_id, r.seconds, r.censored as u8))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
