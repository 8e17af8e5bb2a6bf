//! Reasoning over a model: Gibbs-sampling search for satisfying
//! assignments under clamped evidence, and exact ranking of completions by
//! free energy when few variables are free.

mod chain;

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{Assignment, VarTable};
use crate::rbm::{acceptance_threshold, check_confidence, RbmModel};

pub use chain::chain_rng;
use chain::Chain;

/// Largest number of free variables [`rank_exact`] will enumerate.
pub const RANK_LIMIT: usize = 20;

/// Free-energy slack when comparing against the acceptance threshold.
pub const ACCEPT_TOLERANCE: f64 = 1e-9;

// Cached pre-activations are rebuilt this often to bound rounding drift.
const REFRESH_EVERY: u64 = 4096;

/// Clamped variables and their values; every other variable is free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    n: usize,
    clamped: BTreeMap<usize, u8>,
}

impl Evidence {
    pub fn none(n: usize) -> Self {
        Evidence {
            n,
            clamped: BTreeMap::new(),
        }
    }

    pub fn new<I: IntoIterator<Item = (usize, bool)>>(n: usize, clamps: I) -> Result<Self> {
        let mut clamped = BTreeMap::new();
        for (i, v) in clamps {
            if i >= n {
                return Err(Error::VariableOutOfRange { index: i, len: n });
            }
            if clamped.insert(i, v as u8).is_some_and(|old| old != v as u8) {
                return Err(Error::InvalidArgument(format!("variable {i} clamped twice")));
            }
        }
        Ok(Evidence { n, clamped })
    }

    /// Parses `name=bit` pairs separated by commas, e.g. `n=1,q=0`.
    pub fn parse(spec: &str, vars: &VarTable) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("malformed clamp `{item}`, expected name=0|1")))?;
            let index = vars.lookup(name.trim())?;
            let bit = match value.trim() {
                "1" | "true" | "T" => true,
                "0" | "false" | "F" => false,
                other => return Err(Error::InvalidArgument(format!("malformed clamp value `{other}`"))),
            };
            pairs.push((index, bit));
        }
        Evidence::new(vars.len(), pairs)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn clamped(&self) -> &BTreeMap<usize, u8> {
        &self.clamped
    }

    pub fn is_clamped(&self, i: usize) -> bool {
        self.clamped.contains_key(&i)
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.clamped.contains_key(i)).collect()
    }

    pub fn respected_by(&self, bits: &[u8]) -> bool {
        bits.len() == self.n && self.clamped.iter().all(|(&i, &v)| bits[i] == v)
    }

    fn apply(&self, bits: &mut [u8]) {
        for (&i, &v) in &self.clamped {
            bits[i] = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Total samples across all chains (burn-in excluded).
    pub max_samples: u64,
    /// Discarded sweeps at the start of each chain.
    pub burn_in: u64,
    pub chains: usize,
    pub temperature: f64,
    pub confidence: f64,
    /// Margin used for the acceptance threshold `-log(1 + exp(c * eps))`.
    pub epsilon: f64,
    /// Stop once this many distinct assignments were accepted.
    pub target: Option<usize>,
    /// Sweeps per chain between synchronisation points (progress marks,
    /// target and time checks).
    pub round: u64,
    /// Start temperature of an optional linear anneal down to `temperature`.
    pub anneal_from: Option<f64>,
    pub time_limit: Option<Duration>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            max_samples: 100_000,
            burn_in: 0,
            chains: 1,
            temperature: 1.0,
            confidence: 5.0,
            epsilon: 0.5,
            target: None,
            round: 10_000,
            anneal_from: None,
            time_limit: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.max_samples < 1 {
            return bad("max_samples must be at least 1".into());
        }
        if self.chains < 1 {
            return bad("chains must be at least 1".into());
        }
        if self.round < 1 {
            return bad("round must be at least 1".into());
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad(format!("temperature must be positive, got {}", self.temperature));
        }
        if let Some(t0) = self.anneal_from {
            if !(t0.is_finite() && t0 > 0.0) {
                return bad(format!("anneal start temperature must be positive, got {t0}"));
            }
        }
        check_confidence(self.confidence)?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        acceptance_threshold(self.confidence, self.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accepted {
    /// Interleaved sample index (1-based) at which it was first accepted:
    /// step `s` of chain `k` out of `K` has index `s * K + k + 1`.
    pub first_seen: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub samples: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Exhausted,
    TargetReached,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleLog {
    pub accepted: BTreeMap<Assignment, Accepted>,
    pub samples_drawn: u64,
    pub wall_time: Duration,
    /// Cumulative samples and time at each synchronisation point.
    pub progress: Vec<Progress>,
    pub stop: StopReason,
}

impl SampleLog {
    pub fn empty() -> Self {
        SampleLog {
            accepted: BTreeMap::new(),
            samples_drawn: 0,
            wall_time: Duration::ZERO,
            progress: Vec::new(),
            stop: StopReason::Exhausted,
        }
    }

    /// Combines two logs; the accepted set is a union keeping the earliest
    /// index, so merging is associative and order-independent for it.
    pub fn merge(mut self, other: SampleLog) -> SampleLog {
        for (a, acc) in other.accepted {
            self.accepted
                .entry(a)
                .and_modify(|e| e.first_seen = e.first_seen.min(acc.first_seen))
                .or_insert(acc);
        }
        self.samples_drawn += other.samples_drawn;
        self.wall_time = self.wall_time.max(other.wall_time);
        self
    }
}

/// One sweep of Gibbs sampling at the model's temperature: hidden units
/// from `p(h|x)`, then the free visible units from `p(x|h)`. Clamped bits
/// are left unchanged.
pub fn gibbs_step<R: Rng + ?Sized>(m: &RbmModel, x: &Assignment, ev: &Evidence, rng: &mut R) -> Result<Assignment> {
    m.check_visible(x.len())?;
    if !ev.respected_by(x.bits()) {
        return Err(Error::InvalidArgument(
            "assignment does not match the clamped evidence".into(),
        ));
    }
    let tau = m.temperature;
    let pre = m.pre_activations(x.bits());
    let h: Vec<u8> = pre
        .iter()
        .map(|&p| (rng.gen::<f64>() < crate::rbm::sigmoid(p / tau)) as u8)
        .collect();
    let mut bits = x.bits().to_vec();
    for b in ev.free() {
        let act = m.visible_bias[b]
            + (0..m.n_hidden)
                .filter(|&j| h[j] == 1)
                .map(|j| m.weight(b, j))
                .sum::<f64>();
        bits[b] = (rng.gen::<f64>() < crate::rbm::sigmoid(act / tau)) as u8;
    }
    Assignment::from_bits(bits)
}

/// Searches for assignments whose free energy reaches the acceptance
/// threshold, with the evidence clamped.
pub fn search(m: &RbmModel, ev: &Evidence, cfg: &SamplerConfig) -> Result<SampleLog> {
    search_logged(m, ev, cfg, None, None)
}

/// Like [`search`], additionally streaming one CSV row per sample to `sink`:
/// `sample_index,chain_id,free_energy,accepted,coverage_so_far`.
///
/// `coverage_so_far` is the number of distinct accepted assignments,
/// divided by `coverage_denominator` when one is given.
pub fn search_logged(
    m: &RbmModel,
    ev: &Evidence,
    cfg: &SamplerConfig,
    mut sink: Option<&mut dyn Write>,
    coverage_denominator: Option<usize>,
) -> Result<SampleLog> {
    cfg.validate()?;
    m.check_visible(ev.len())?;
    let start = Instant::now();
    let threshold = cfg.threshold() + ACCEPT_TOLERANCE;
    let free = ev.free();
    let k = cfg.chains as u64;

    let mut chains: Vec<ChainState> = (0..cfg.chains)
        .map(|c| {
            let mut x = vec![0u8; m.n_visible];
            ev.apply(&mut x);
            let mut chain = Chain::new(m, x, &free, chain_rng(cfg.seed, c as u64));
            chain.randomize();
            let quota = cfg.max_samples / k + u64::from((c as u64) < cfg.max_samples % k);
            ChainState {
                chain,
                id: c as u64,
                steps: 0,
                quota,
                seen: HashSet::new(),
            }
        })
        .collect();

    let schedule = Schedule::new(cfg);
    chains.par_iter_mut().for_each(|st| {
        for s in 0..cfg.burn_in {
            st.chain.step(schedule.at(s, cfg.burn_in + st.quota));
        }
    });

    if let Some(w) = sink.as_deref_mut() {
        writeln!(w, "sample_index,chain_id,free_energy,accepted,coverage_so_far")?;
    }

    let mut log = SampleLog::empty();
    loop {
        let logging = sink.is_some();
        let outs: Vec<RoundOut> = chains
            .par_iter_mut()
            .map(|st| st.run_round(cfg, &schedule, threshold, logging))
            .collect();

        log.samples_drawn += outs.iter().map(|o| o.steps).sum::<u64>();
        let mut events: Vec<Event> = outs.into_iter().flat_map(|o| o.events).collect();
        events.sort_unstable_by_key(|e| e.index);
        for e in events {
            if let Some(bits) = e.bits {
                log.accepted
                    .entry(Assignment::from_bits(bits)?)
                    .or_insert(Accepted { first_seen: e.index });
            }
            if let Some(w) = sink.as_deref_mut() {
                let found = log.accepted.len() as f64;
                let coverage = coverage_denominator.map_or(found, |d| found / d as f64);
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    e.index, e.chain, e.free_energy, e.accepted as u8, coverage
                )?;
            }
        }
        log.progress.push(Progress {
            samples: log.samples_drawn,
            elapsed: start.elapsed(),
        });

        if cfg.target.is_some_and(|t| log.accepted.len() >= t) {
            log.stop = StopReason::TargetReached;
            break;
        }
        if chains.iter().all(|st| st.steps >= st.quota) {
            log.stop = StopReason::Exhausted;
            break;
        }
        if cfg.time_limit.is_some_and(|t| start.elapsed() >= t) {
            log.stop = StopReason::TimeLimit;
            break;
        }
    }
    log.wall_time = start.elapsed();
    Ok(log)
}

struct Schedule {
    from: Option<f64>,
    to: f64,
}

impl Schedule {
    fn new(cfg: &SamplerConfig) -> Self {
        Schedule {
            from: cfg.anneal_from,
            to: cfg.temperature,
        }
    }

    fn at(&self, step: u64, total: u64) -> f64 {
        match self.from {
            Some(t0) if total > 1 => t0 + (self.to - t0) * (step as f64 / (total - 1) as f64),
            _ => self.to,
        }
    }
}

struct ChainState<'m> {
    chain: Chain<'m>,
    id: u64,
    steps: u64,
    quota: u64,
    seen: HashSet<Vec<u8>>,
}

struct Event {
    index: u64,
    chain: u64,
    free_energy: f64,
    accepted: bool,
    /// Present the first time this chain accepts an assignment.
    bits: Option<Vec<u8>>,
}

#[derive(Default)]
struct RoundOut {
    steps: u64,
    /// Every sample when tracing, otherwise only first acceptances.
    events: Vec<Event>,
}

impl ChainState<'_> {
    fn run_round(&mut self, cfg: &SamplerConfig, schedule: &Schedule, threshold: f64, trace: bool) -> RoundOut {
        let mut out = RoundOut::default();
        let end = (self.steps + cfg.round).min(self.quota);
        let k = cfg.chains as u64;
        while self.steps < end {
            let tau = schedule.at(cfg.burn_in + self.steps, cfg.burn_in + self.quota);
            self.chain.step(tau);
            if self.steps % REFRESH_EVERY == REFRESH_EVERY - 1 {
                self.chain.refresh();
            }
            let fe = self.chain.free_energy(cfg.confidence);
            let accepted = fe <= threshold;
            let index = self.steps * k + self.id + 1;
            let bits = (accepted && !self.seen.contains(&self.chain.x)).then(|| {
                self.seen.insert(self.chain.x.clone());
                self.chain.x.clone()
            });
            if trace || bits.is_some() {
                out.events.push(Event {
                    index,
                    chain: self.id,
                    free_energy: fe,
                    accepted,
                    bits,
                });
            }
            self.steps += 1;
            out.steps += 1;
        }
        out
    }
}

/// Visit counts of every full visible state (indexed lexicographically)
/// over `cfg.max_samples` Gibbs sweeps, split across chains like [`search`].
pub fn sample_histogram(m: &RbmModel, ev: &Evidence, cfg: &SamplerConfig) -> Result<Vec<u64>> {
    cfg.validate()?;
    m.check_visible(ev.len())?;
    if m.n_visible > RANK_LIMIT {
        return Err(Error::EnumerationGuard {
            vars: m.n_visible,
            limit: RANK_LIMIT,
        });
    }
    let free = ev.free();
    let k = cfg.chains as u64;
    let schedule = Schedule::new(cfg);
    let per_chain: Vec<Vec<u64>> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let mut x = vec![0u8; m.n_visible];
            ev.apply(&mut x);
            let mut chain = Chain::new(m, x, &free, chain_rng(cfg.seed, c as u64));
            chain.randomize();
            let quota = cfg.max_samples / k + u64::from((c as u64) < cfg.max_samples % k);
            let total = cfg.burn_in + quota;
            let mut counts = vec![0u64; 1 << m.n_visible];
            for s in 0..total {
                chain.step(schedule.at(s, total));
                if s >= cfg.burn_in {
                    let idx = chain.x.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                    counts[idx] += 1;
                }
            }
            counts
        })
        .collect();
    let mut out = vec![0u64; 1 << m.n_visible];
    for counts in per_chain {
        for (o, c) in out.iter_mut().zip(counts) {
            *o += c;
        }
    }
    Ok(out)
}

/// A completion of the free variables with its free energy and conditional
/// probability given the evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCompletion {
    pub assignment: Assignment,
    pub free_energy: f64,
    pub probability: f64,
}

/// Enumerates every completion of the free variables and returns them by
/// descending `P(x_free | x_clamped) ∝ exp(-F)`. Equal probabilities keep
/// lexicographic order of the free bits.
pub fn rank_exact(m: &RbmModel, ev: &Evidence, c: f64) -> Result<Vec<RankedCompletion>> {
    m.check_visible(ev.len())?;
    check_confidence(c)?;
    let free = ev.free();
    if free.len() > RANK_LIMIT {
        return Err(Error::EnumerationGuard {
            vars: free.len(),
            limit: RANK_LIMIT,
        });
    }
    let mut bits = vec![0u8; m.n_visible];
    ev.apply(&mut bits);
    let nf = free.len();
    let mut out: Vec<RankedCompletion> = (0..1u64 << nf)
        .map(|k| {
            for (p, &i) in free.iter().enumerate() {
                bits[i] = ((k >> (nf - 1 - p)) & 1) as u8;
            }
            let fe = m.free_energy(&bits, c).expect("dimensions checked");
            RankedCompletion {
                assignment: Assignment::from_bits(bits.clone()).expect("binary"),
                free_energy: fe,
                probability: 0.0,
            }
        })
        .collect();
    let min_f = out.iter().map(|r| r.free_energy).fold(f64::INFINITY, f64::min);
    let z: f64 = out.iter().map(|r| (min_f - r.free_energy).exp()).sum();
    for r in &mut out {
        r.probability = (min_f - r.free_energy).exp() / z;
    }
    out.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    Ok(out)
}

#[cfg(test)]
mod tests;
