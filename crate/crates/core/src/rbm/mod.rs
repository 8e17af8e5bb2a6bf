//! Restricted Boltzmann machine parameters, energy, and the compilation of
//! strict clause sets into hidden units.
//!
//! Clause `j` with weight `w'` becomes one hidden unit connected with weight
//! `w'` to its positive variables, `-w'` to its negated ones, and hidden
//! bias `w' * (eps - |pos_j|)`. The unit's pre-activation is then `w' * eps`
//! exactly when the clause holds and at most `w' * (eps - 1)` otherwise, so
//! minimising the energy over the hidden layer yields
//! `-eps * (weighted count of satisfied clauses)`.

mod io;

use crate::error::{Error, Result};
use crate::normalize::{ClauseSet, WeightedClause, WeightedClauseSet};

pub use io::{ClauseUnit, ModelFile};

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RbmModel {
    pub n_visible: usize,
    pub n_hidden: usize,
    /// Row-major `n_visible x n_hidden`.
    pub weights: Vec<f64>,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    pub epsilon: f64,
    pub temperature: f64,
}

impl RbmModel {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        RbmModel {
            n_visible,
            n_hidden,
            weights: vec![0.0; n_visible * n_hidden],
            visible_bias: vec![0.0; n_visible],
            hidden_bias: vec![0.0; n_hidden],
            epsilon: DEFAULT_EPSILON,
            temperature: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let shape = |what: &str, got: usize, expected: usize| {
            if got == expected {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{what} has length {got}, expected {expected}"
                )))
            }
        };
        shape("weights", self.weights.len(), self.n_visible * self.n_hidden)?;
        shape("visible_bias", self.visible_bias.len(), self.n_visible)?;
        shape("hidden_bias", self.hidden_bias.len(), self.n_hidden)?;
        let all = self.weights.iter().chain(&self.visible_bias).chain(&self.hidden_bias);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite parameter".into()));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n_hidden + j]
    }

    pub(crate) fn check_visible(&self, len: usize) -> Result<()> {
        if len != self.n_visible {
            return Err(Error::DimensionMismatch {
                expected: self.n_visible,
                got: len,
            });
        }
        Ok(())
    }

    /// `sum_i w_ij x_i + b_j` for every hidden unit.
    pub fn pre_activations(&self, x: &[u8]) -> Vec<f64> {
        let mut pre = self.hidden_bias.clone();
        self.add_visible_input(x, &mut pre);
        pre
    }

    pub(crate) fn add_visible_input(&self, x: &[u8], pre: &mut [f64]) {
        for (i, &xi) in x.iter().enumerate() {
            if xi == 1 {
                let row = &self.weights[i * self.n_hidden..(i + 1) * self.n_hidden];
                for (p, w) in pre.iter_mut().zip(row) {
                    *p += w;
                }
            }
        }
    }

    pub(crate) fn visible_term(&self, x: &[u8]) -> f64 {
        x.iter()
            .zip(&self.visible_bias)
            .filter(|(&xi, _)| xi == 1)
            .map(|(_, a)| a)
            .sum()
    }

    /// `E(x, h) = -sum w_ij x_i h_j - sum a_i x_i - sum b_j h_j`.
    pub fn energy(&self, x: &[u8], h: &[u8]) -> Result<f64> {
        self.check_visible(x.len())?;
        if h.len() != self.n_hidden {
            return Err(Error::DimensionMismatch {
                expected: self.n_hidden,
                got: h.len(),
            });
        }
        let pre = self.pre_activations(x);
        let hidden: f64 = pre.iter().zip(h).filter(|(_, &hj)| hj == 1).map(|(p, _)| p).sum();
        Ok(-hidden - self.visible_term(x))
    }

    /// Minimum of the energy over hidden states, and a minimiser.
    ///
    /// The hidden units are conditionally independent, so `h_j = 1` exactly
    /// when its pre-activation is positive.
    pub fn min_energy(&self, x: &[u8]) -> Result<(f64, Vec<u8>)> {
        self.check_visible(x.len())?;
        let pre = self.pre_activations(x);
        let h: Vec<u8> = pre.iter().map(|&p| (p > 0.0) as u8).collect();
        let e = -pre.iter().map(|&p| p.max(0.0)).sum::<f64>() - self.visible_term(x);
        // Adding 0.0 turns -0.0 into 0.0 for display.
        Ok((e + 0.0, h))
    }

    /// Free energy with confidence `c`:
    /// `-c * sum a_i x_i - sum_j softplus(c * (sum_i w_ij x_i + b_j))`.
    ///
    /// This is `-log sum_h exp(-c * E(x, h))`; for compiled models
    /// (zero visible bias) only the softplus terms remain.
    pub fn free_energy(&self, x: &[u8], c: f64) -> Result<f64> {
        self.check_visible(x.len())?;
        check_confidence(c)?;
        let pre = self.pre_activations(x);
        Ok(self.free_energy_from_pre(x, &pre, c))
    }

    pub(crate) fn free_energy_from_pre(&self, x: &[u8], pre: &[f64], c: f64) -> f64 {
        -c * self.visible_term(x) - pre.iter().map(|&p| softplus(c * p)).sum::<f64>()
    }

    /// Appends the hidden units of `other` (same visible layer).
    pub fn append_hidden(&self, other: &RbmModel) -> Result<RbmModel> {
        if other.n_visible != self.n_visible {
            return Err(Error::DimensionMismatch {
                expected: self.n_visible,
                got: other.n_visible,
            });
        }
        let n_hidden = self.n_hidden + other.n_hidden;
        let mut weights = Vec::with_capacity(self.n_visible * n_hidden);
        for i in 0..self.n_visible {
            weights.extend_from_slice(&self.weights[i * self.n_hidden..(i + 1) * self.n_hidden]);
            weights.extend_from_slice(&other.weights[i * other.n_hidden..(i + 1) * other.n_hidden]);
        }
        let mut hidden_bias = self.hidden_bias.clone();
        hidden_bias.extend_from_slice(&other.hidden_bias);
        Ok(RbmModel {
            n_visible: self.n_visible,
            n_hidden,
            weights,
            visible_bias: self
                .visible_bias
                .iter()
                .zip(&other.visible_bias)
                .map(|(a, b)| a + b)
                .collect(),
            hidden_bias,
            epsilon: self.epsilon,
            temperature: self.temperature,
        })
    }
}

pub(crate) fn check_confidence(c: f64) -> Result<()> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence must be non-negative, got {c}"
        )));
    }
    Ok(())
}

/// `log(1 + exp(z))` without overflow.
#[inline]
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Acceptance threshold `-log(1 + exp(c * eps))`: the free-energy
/// contribution of one satisfied unit-weight clause.
pub fn acceptance_threshold(c: f64, epsilon: f64) -> f64 {
    -softplus(c * epsilon)
}

/// A compiled model together with the clause each hidden unit encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledRbm {
    pub model: RbmModel,
    pub clause_map: Vec<WeightedClause>,
}

impl CompiledRbm {
    pub fn min_energy(&self, x: &[u8]) -> Result<(f64, Vec<u8>)> {
        self.model.min_energy(x)
    }
}

/// Compiles an unweighted strict clause set, every clause taking `default_weight`.
pub fn compile(cs: &ClauseSet, epsilon: f64, default_weight: f64) -> Result<CompiledRbm> {
    compile_weighted(&WeightedClauseSet::uniform(cs, default_weight), epsilon)
}

/// Compiles weighted clauses, one hidden unit per clause.
pub fn compile_weighted(ws: &WeightedClauseSet, epsilon: f64) -> Result<CompiledRbm> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    if ws.is_empty() {
        return Err(Error::EmptyClauseSet);
    }
    let n_visible = ws.var_count();
    let n_hidden = ws.len();
    let mut model = RbmModel::zeros(n_visible, n_hidden);
    model.epsilon = epsilon;
    for (j, e) in ws.entries().iter().enumerate() {
        let w = e.weight;
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "clause weight must be positive, got {w}"
            )));
        }
        for &t in e.clause.pos() {
            model.weights[t * n_hidden + j] = w;
        }
        for &k in e.clause.neg() {
            model.weights[k * n_hidden + j] = -w;
        }
        model.hidden_bias[j] = w * (epsilon - e.clause.pos().len() as f64);
    }
    Ok(CompiledRbm {
        model,
        clause_map: ws.entries().to_vec(),
    })
}
