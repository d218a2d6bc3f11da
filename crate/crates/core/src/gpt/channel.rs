use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gpt::{objects::same_model, ConeModel, EnsembleState, State};
use crate::rational::{Rational, Vector};

/// A classical-to-GPT channel `x -> sigma_x` over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalToGPTChannel {
    name: String,
    alphabet: Vec<String>,
    model: Arc<ConeModel>,
    outputs: Vec<State>,
}

impl ClassicalToGPTChannel {
    pub fn new(name: impl Into<String>, alphabet: Vec<String>, model: &Arc<ConeModel>, outputs: Vec<Vector>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidArgument("channel alphabet is empty".into()));
        }
        if alphabet.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: alphabet.len(),
                found: outputs.len(),
            });
        }
        let outputs = outputs
            .into_iter()
            .map(|v| State::new(model, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassicalToGPTChannel {
            name: name.into(),
            alphabet,
            model: model.clone(),
            outputs,
        })
    }

    /// Builds a channel from states that already carry `model`.
    pub fn from_states(name: impl Into<String>, alphabet: Vec<String>, outputs: Vec<State>) -> Result<Self> {
        let model = outputs
            .first()
            .map(|s| s.model().clone())
            .ok_or_else(|| Error::InvalidArgument("channel alphabet is empty".into()))?;
        if alphabet.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: alphabet.len(),
                found: outputs.len(),
            });
        }
        for s in &outputs {
            same_model(&model, s.model())?;
        }
        Ok(ClassicalToGPTChannel {
            name: name.into(),
            alphabet,
            model,
            outputs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn model(&self) -> &Arc<ConeModel> {
        &self.model
    }

    pub fn outputs(&self) -> &[State] {
        &self.outputs
    }

    pub fn output(&self, x: usize) -> &State {
        &self.outputs[x]
    }

    /// `x -> |x><x|` on the classical `n`-letter model.
    pub fn identity_classical(n: usize) -> Self {
        let model = ConeModel::classical(n).into_shared();
        let outputs = (0..n).map(|x| Vector::basis(n, x)).collect();
        Self::new(format!("id{n}"), letters(n), &model, outputs).expect("basis vectors are states")
    }

    /// Every letter maps to the same state.
    pub fn constant(letters_n: usize, state: &State) -> Self {
        Self::from_states("constant", letters(letters_n), vec![state.clone(); letters_n]).expect("single model")
    }
}

pub(crate) fn letters(n: usize) -> Vec<String> {
    (0..n).map(|x| x.to_string()).collect()
}

/// Checks `p` is a probability vector on `n` letters.
pub fn check_distribution(p: &[Rational], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidDistribution(format!("{} weights for {n} letters", p.len())));
    }
    if p.iter().any(Signed::is_negative) {
        return Err(Error::InvalidDistribution("negative weight".into()));
    }
    if !p.iter().fold(Rational::zero(), |a, b| a + b).is_one() {
        return Err(Error::InvalidDistribution("weights do not sum to 1".into()));
    }
    Ok(())
}

/// `pi^{AB}_P = sum_x P(x) |x><x| (x) sigma_x`, keeping only letters with
/// positive weight.
pub fn build_pi_ab(channel: &ClassicalToGPTChannel, p: &[Rational]) -> Result<EnsembleState> {
    check_distribution(p, channel.letters())?;
    let terms = p
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(x, w)| (w.clone(), x, channel.output(x).clone()))
        .collect();
    EnsembleState::new(channel.letters(), channel.model(), terms)
}
