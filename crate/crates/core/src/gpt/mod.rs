//! Polyhedral GPT systems: cone models, states, effects, measurements,
//! measurement channels and their adjoints, and classical composites.

mod channel;
mod model;
mod objects;

pub use channel::{build_pi_ab, check_distribution, ClassicalToGPTChannel};
#[cfg(test)]
pub(crate) use channel::letters;
pub use model::{validate_model, ConeModel, ValidationOptions, ValidationReport};
pub use objects::{
    adjoint_apply, compose_with_classical, effect_leq, in_dual_cone, marginal_classical, marginal_general,
    measurement_channel_apply, Effect, EnsembleState, Measurement, State,
};
pub(crate) use objects::same_model;
