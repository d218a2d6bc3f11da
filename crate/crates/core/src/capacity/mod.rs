//! One-shot classical capacity of classical-to-GPT channels: codes, exact
//! capacity by enumeration, the converse and achievability bounds, the
//! Lemma-3 decoder construction and the random-coding argument.

mod bounds;
mod code;
mod lemma3;
mod random_coding;

pub use bounds::{
    ensemble_beta, ensemble_test, simplex_grid, theorem1_upper_bound, theorem2_lower_bound, within_converse,
    Theorem1Bound, Theorem1Point, Theorem2Bound, Theorem2Grid, Theorem2Params, Theorem2Point,
};
pub use code::{
    average_error, codebook_distribution, converse_witness, decoder_lp, exact_one_shot_capacity,
    exact_one_shot_capacity_with, message_error, multiset_count, multisets, optimal_decoder, CapacityOptions, Code,
    ConverseWitness, ExactCapacity,
};
pub use lemma3::{
    lemma3_construct, lemma3_program, lemma3_verify, slice_effect, ConstructionMethod, LemmaThreeConstruction,
    LemmaThreeInput, LemmaThreeVerification,
};
pub use random_coding::{random_coding_bound_check, EncoderSampling, RandomCodingReport, EXHAUSTIVE_LIMIT};

use crate::error::{Error, Result};
use crate::gpt::ClassicalToGPTChannel;
use crate::rational::{neg_log2, Rational};

#[derive(Clone, Debug)]
pub struct SandwichOptions {
    pub capacity: CapacityOptions,
    /// Simplex-grid denominator for the converse bound; 0 evaluates only the
    /// codebook distribution.
    pub theorem1_k: usize,
    /// Simplex-grid denominator for the achievability bound.
    pub theorem2_k: usize,
    /// Overrides the default `(eps', s, t)` grid.
    pub theorem2_params: Option<Vec<Theorem2Params>>,
}

impl SandwichOptions {
    pub fn new(n_max: usize) -> Self {
        SandwichOptions {
            capacity: CapacityOptions::new(n_max),
            theorem1_k: 2,
            theorem2_k: 2,
            theorem2_params: None,
        }
    }
}

/// Exact capacity together with both bounds and the converse witness.
#[derive(Clone, Debug)]
pub struct CapacityReport {
    pub epsilon: Rational,
    pub exact: ExactCapacity,
    /// Uniform distribution over the optimal codebook.
    pub codebook_distribution: Vec<Rational>,
    /// `beta*` at the codebook distribution.
    pub converse_beta: Rational,
    pub converse_bits: f64,
    pub theorem1: Theorem1Bound,
    /// `None` when no achievability grid point is valid (e.g. `eps = 0`);
    /// the lower bound is then the trivial 0 bits.
    pub theorem2: Option<Theorem2Bound>,
    pub converse: ConverseWitness,
    /// `N* beta_codebook <= 1`.
    pub upper_holds: bool,
    /// Achievability ratio `<= N*`.
    pub lower_holds: bool,
}

impl CapacityReport {
    pub fn exact_bits(&self) -> f64 {
        self.exact.exact_bits
    }

    pub fn lower_bound_bits(&self) -> f64 {
        self.theorem2.as_ref().map_or(0.0, |b| b.best.bits)
    }

    pub fn upper_bound_bits(&self) -> f64 {
        self.theorem1.bits()
    }

    pub fn sandwich_holds(&self) -> bool {
        self.upper_holds && self.lower_holds
    }
}

pub fn capacity_report(channel: &ClassicalToGPTChannel, eps: &Rational, opts: &SandwichOptions) -> Result<CapacityReport> {
    let exact = exact_one_shot_capacity_with(channel, eps, &opts.capacity)?;
    let codebook = codebook_distribution(&exact.witness, channel.letters());
    let theorem1 = theorem1_upper_bound(channel, eps, opts.theorem1_k, std::slice::from_ref(&codebook))?;
    let converse_beta = theorem1.points[0].beta.clone();
    let grid = Theorem2Grid {
        distributions: simplex_grid(channel.letters(), opts.theorem2_k),
        params: opts
            .theorem2_params
            .clone()
            .unwrap_or_else(|| Theorem2Grid::default_params(eps)),
    };
    let theorem2 = match theorem2_lower_bound(channel, eps, &grid) {
        Ok(b) => Some(b),
        Err(Error::EmptyGrid(_)) => None,
        Err(e) => return Err(e),
    };
    let converse = converse_witness(&exact.witness, channel, eps);
    let upper_holds = within_converse(exact.n_star, &converse_beta);
    let lower_holds = theorem2.as_ref().map_or(true, |b| b.best.below(exact.n_star));
    Ok(CapacityReport {
        epsilon: eps.clone(),
        codebook_distribution: codebook,
        converse_bits: neg_log2(&converse_beta),
        converse_beta,
        theorem1,
        theorem2,
        converse,
        upper_holds,
        lower_holds,
        exact,
    })
}
