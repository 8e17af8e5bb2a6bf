use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rbm::{sigmoid, RbmModel};

/// Generator for chain `chain` of a run seeded with `seed`.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

/// One Gibbs chain. Keeps the hidden pre-activations of the current
/// visible state so each sweep costs one pass over the weights for the
/// hidden layer and an incremental update for the flipped visible bits.
pub(crate) struct Chain<'m> {
    model: &'m RbmModel,
    pub x: Vec<u8>,
    pub pre: Vec<f64>,
    h: Vec<u8>,
    free: &'m [usize],
    pub rng: ChaCha8Rng,
}

impl<'m> Chain<'m> {
    pub fn new(model: &'m RbmModel, x: Vec<u8>, free: &'m [usize], rng: ChaCha8Rng) -> Self {
        let pre = model.pre_activations(&x);
        Chain {
            model,
            x,
            pre,
            h: vec![0; model.n_hidden],
            free,
            rng,
        }
    }

    /// Randomises the free bits and refreshes the cached pre-activations.
    pub fn randomize(&mut self) {
        for &b in self.free {
            self.x[b] = self.rng.gen::<bool>() as u8;
        }
        self.pre = self.model.pre_activations(&self.x);
    }

    /// `h ~ p(h | x)`, then `x_b ~ p(x_b | h)` for every free `b`.
    pub fn step(&mut self, tau: f64) {
        let m = self.model;
        let inv = 1.0 / tau;
        for (hj, &p) in self.h.iter_mut().zip(&self.pre) {
            *hj = (self.rng.gen::<f64>() < sigmoid(p * inv)) as u8;
        }
        let nh = m.n_hidden;
        for &b in self.free {
            let row = &m.weights[b * nh..(b + 1) * nh];
            let act = m.visible_bias[b]
                + row
                    .iter()
                    .zip(&self.h)
                    .filter(|(_, &hj)| hj == 1)
                    .map(|(w, _)| w)
                    .sum::<f64>();
            let new = (self.rng.gen::<f64>() < sigmoid(act * inv)) as u8;
            if new != self.x[b] {
                let sign = if new == 1 { 1.0 } else { -1.0 };
                for (p, w) in self.pre.iter_mut().zip(row) {
                    *p += sign * w;
                }
                self.x[b] = new;
            }
        }
    }

    /// Recomputes the cached pre-activations from scratch.
    pub fn refresh(&mut self) {
        self.pre = self.model.pre_activations(&self.x);
    }

    pub fn free_energy(&self, c: f64) -> f64 {
        self.model.free_energy_from_pre(&self.x, &self.pre, c)
    }
}
