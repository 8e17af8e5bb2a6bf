//! Propositional knowledge compiled into restricted Boltzmann machines.
//!
//! Formulas are parsed ([`formula`]), converted to strict disjunctive normal
//! form ([`normalize`]) and compiled into RBM parameters whose minimum
//! energy over the hidden layer is `-eps` times the (weighted) truth value
//! ([`rbm`]). Satisfying assignments are then searched by Gibbs sampling or
//! ranked exactly by free energy ([`infer`]); compiled knowledge can seed
//! discriminative training ([`learn`]); [`bench`] measures coverage and
//! timing of the sampler on a parameterised formula family.

pub mod bench;
pub mod cli;
pub mod error;
pub mod formula;
pub mod infer;
pub mod learn;
pub mod normalize;
pub mod rbm;

#[cfg(test)]
mod testutil;

pub use error::{Error, ParseError, Result};
