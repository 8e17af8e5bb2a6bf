//! Discriminative training of `p(y | x)` with hidden units seeded from
//! compiled knowledge, plus the CSV dataset format and a synthetic task.

mod data;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::infer::{rank_exact, Evidence};
use crate::normalize::WeightedClauseSet;
use crate::rbm::{check_confidence, compile_weighted, sigmoid, RbmModel, DEFAULT_EPSILON};

pub use data::{synthetic_rule_task, Dataset, DatasetSpec, LabeledExample, Layout, RuleTask};

/// Targets are enumerated exactly; this caps their number.
pub const TARGET_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Randomly initialised hidden units added after the compiled ones.
    pub n_extra_hidden: usize,
    pub seed: u64,
    /// Extra units start uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// Confidence `c` of the free energy defining `p(y | x)`; held fixed.
    pub confidence: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 100,
            batch_size: 10,
            n_extra_hidden: 50,
            seed: 0,
            init_scale: 0.01,
            confidence: 5.0,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            ));
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1".into());
        }
        if self.batch_size < 1 {
            return bad("batch size must be at least 1".into());
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return bad(format!("init scale must be non-negative, got {}", self.init_scale));
        }
        check_confidence(self.confidence)
    }
}

/// Compiles `kb` and appends `cfg.n_extra_hidden` random units. An empty
/// `kb` yields a purely random model over `n_visible` variables.
pub fn init_from_knowledge(kb: &WeightedClauseSet, n_visible: usize, cfg: &TrainConfig) -> Result<RbmModel> {
    if kb.var_count() > n_visible {
        return Err(Error::DimensionMismatch {
            expected: n_visible,
            got: kb.var_count(),
        });
    }
    let base = if kb.is_empty() {
        let mut m = RbmModel::zeros(n_visible, 0);
        m.epsilon = cfg.epsilon;
        m
    } else {
        compile_weighted(&kb.clone().with_var_count(n_visible), cfg.epsilon)?.model
    };
    if cfg.n_extra_hidden == 0 {
        return Ok(base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut extra = RbmModel::zeros(n_visible, cfg.n_extra_hidden);
    let s = cfg.init_scale;
    let mut draw = || if s > 0.0 { rng.gen_range(-s..=s) } else { 0.0 };
    for w in extra.weights.iter_mut() {
        *w = draw();
    }
    for b in extra.hidden_bias.iter_mut() {
        *b = draw();
    }
    base.append_hidden(&extra)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub model: RbmModel,
    /// Mean negative log-likelihood over the data after each epoch.
    pub losses: Vec<f64>,
}

/// Gradient ascent on `sum log p(y | x)`, with `p(y | x)` proportional to
/// `exp(-F(x, y))` and the gradient computed exactly by enumerating the
/// target states.
pub fn train_discriminative(m: &RbmModel, data: &Dataset, cfg: &TrainConfig) -> Result<Training> {
    cfg.validate()?;
    check_dataset(m, data)?;
    let mut model = m.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_1ea7);
    let mut order: Vec<usize> = (0..data.examples.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let grads: Vec<Grad> = batch
                .par_iter()
                .map(|&k| example_gradient(&model, &data.layout, &data.examples[k], cfg.confidence))
                .collect();
            let mut total = Grad::zeros(&model);
            for g in &grads {
                total.add(g);
            }
            let step = cfg.learning_rate / batch.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&total.w) {
                *w += step * g;
            }
            for (a, g) in model.visible_bias.iter_mut().zip(&total.a) {
                *a += step * g;
            }
            for (b, g) in model.hidden_bias.iter_mut().zip(&total.b) {
                *b += step * g;
            }
        }
        losses.push(mean_nll(&model, data, cfg.confidence)?);
    }
    Ok(Training { model, losses })
}

fn check_dataset(m: &RbmModel, data: &Dataset) -> Result<()> {
    m.check_visible(data.layout.len())?;
    if data.layout.targets.is_empty() {
        return Err(Error::InvalidArgument("no target variables designated".into()));
    }
    if data.layout.targets.len() > TARGET_LIMIT {
        return Err(Error::EnumerationGuard {
            vars: data.layout.targets.len(),
            limit: TARGET_LIMIT,
        });
    }
    if data.examples.is_empty() {
        return Err(Error::InvalidArgument("empty training data".into()));
    }
    Ok(())
}

struct Grad {
    w: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Grad {
    fn zeros(m: &RbmModel) -> Self {
        Grad {
            w: vec![0.0; m.weights.len()],
            a: vec![0.0; m.n_visible],
            b: vec![0.0; m.n_hidden],
        }
    }

    fn add(&mut self, other: &Grad) {
        for (x, y) in self.w.iter_mut().zip(&other.w) {
            *x += y;
        }
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += y;
        }
        for (x, y) in self.b.iter_mut().zip(&other.b) {
            *x += y;
        }
    }

    /// Adds `coef * d(-F(v))/d(theta)`.
    fn add_free_energy_term(&mut self, m: &RbmModel, v: &[u8], pre: &[f64], c: f64, coef: f64) {
        let nh = m.n_hidden;
        let s: Vec<f64> = pre.iter().map(|&p| coef * c * sigmoid(c * p)).collect();
        for (b, sj) in self.b.iter_mut().zip(&s) {
            *b += sj;
        }
        for (i, &vi) in v.iter().enumerate() {
            if vi == 1 {
                self.a[i] += coef * c;
                for (w, sj) in self.w[i * nh..(i + 1) * nh].iter_mut().zip(&s) {
                    *w += sj;
                }
            }
        }
    }
}

/// Every target completion of one example with its free energy.
fn completions(m: &RbmModel, layout: &Layout, inputs: &[u8], c: f64) -> Vec<(Vec<u8>, Vec<f64>, f64)> {
    let t = layout.targets.len();
    (0..1u64 << t)
        .map(|k| {
            let targets: Vec<u8> = (0..t).map(|p| ((k >> (t - 1 - p)) & 1) as u8).collect();
            let v = layout.assemble(inputs, &targets);
            let pre = m.pre_activations(&v);
            let f = m.free_energy_from_pre(&v, &pre, c);
            (v, pre, f)
        })
        .collect()
}

fn target_index(targets: &[u8]) -> usize {
    targets.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn posterior(states: &[(Vec<u8>, Vec<f64>, f64)]) -> Vec<f64> {
    let min_f = states.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let un: Vec<f64> = states.iter().map(|s| (min_f - s.2).exp()).collect();
    let z: f64 = un.iter().sum();
    un.into_iter().map(|u| u / z).collect()
}

fn example_gradient(m: &RbmModel, layout: &Layout, ex: &LabeledExample, c: f64) -> Grad {
    let states = completions(m, layout, &ex.inputs, c);
    let p = posterior(&states);
    let truth = target_index(&ex.targets);
    let mut g = Grad::zeros(m);
    for (k, ((v, pre, _), pk)) in states.iter().zip(&p).enumerate() {
        let coef = f64::from(k == truth) - pk;
        if coef != 0.0 {
            g.add_free_energy_term(m, v, pre, c, coef);
        }
    }
    g
}

/// Mean of `-log p(y | x)` over the dataset.
pub fn mean_nll(m: &RbmModel, data: &Dataset, c: f64) -> Result<f64> {
    check_dataset(m, data)?;
    check_confidence(c)?;
    let total: f64 = data
        .examples
        .iter()
        .map(|ex| {
            let states = completions(m, &data.layout, &ex.inputs, c);
            let fs: Vec<f64> = states.iter().map(|s| -s.2).collect();
            let max = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + fs.iter().map(|f| (f - max).exp()).sum::<f64>().ln();
            lse - fs[target_index(&ex.targets)]
        })
        .sum();
    Ok(total / data.examples.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub targets: Vec<u8>,
    pub probability: f64,
}

/// Most probable target completion given the inputs; ties go to the
/// lexicographically smallest targets (all zeros first).
pub fn predict(m: &RbmModel, layout: &Layout, inputs: &[u8], c: f64) -> Result<Prediction> {
    m.check_visible(layout.len())?;
    if inputs.len() != layout.inputs.len() {
        return Err(Error::DimensionMismatch {
            expected: layout.inputs.len(),
            got: inputs.len(),
        });
    }
    let ev = Evidence::new(
        layout.len(),
        layout.inputs.iter().zip(inputs).map(|(&i, &b)| (i, b == 1)),
    )?;
    let top = rank_exact(m, &ev, c)?.swap_remove(0);
    Ok(Prediction {
        targets: layout.targets.iter().map(|&t| top.assignment.bits()[t]).collect(),
        probability: top.probability,
    })
}

/// Fraction of examples whose targets are predicted exactly.
pub fn accuracy(m: &RbmModel, data: &Dataset, c: f64) -> Result<f64> {
    if data.examples.is_empty() {
        return Err(Error::InvalidArgument("empty data".into()));
    }
    let hits = data
        .examples
        .iter()
        .map(|ex| Ok((predict(m, &data.layout, &ex.inputs, c)?.targets == ex.targets) as usize))
        .sum::<Result<usize>>()?;
    Ok(hits as f64 / data.examples.len() as f64)
}
