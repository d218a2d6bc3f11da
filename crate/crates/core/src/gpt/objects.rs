use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gpt::ConeModel;
use crate::rational::{sum_vectors, Rational, Vector};

pub(crate) fn same_model(a: &Arc<ConeModel>, b: &Arc<ConeModel>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ModelMismatch {
            left: a.name().to_string(),
            right: b.name().to_string(),
        })
    }
}

/// `v in K*`, tested against the extreme rays of `K`.
pub fn in_dual_cone(model: &ConeModel, v: &Vector) -> bool {
    model.primal_rays().iter().all(|g| !v.dot(g).is_negative())
}

/// A normalized element of `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    model: Arc<ConeModel>,
    coords: Vector,
}

impl State {
    pub fn new(model: &Arc<ConeModel>, coords: Vector) -> Result<Self> {
        if coords.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: coords.len(),
            });
        }
        if let Some(i) = model.dual_rays().iter().position(|h| h.dot(&coords).is_negative()) {
            return Err(Error::InvalidState(format!(
                "{coords} violates facet {i} of {}",
                model.name()
            )));
        }
        let norm = model.unit().dot(&coords);
        if !norm.is_one() {
            return Err(Error::InvalidState(format!(
                "<u, {coords}> = {} instead of 1",
                crate::rational::format_rational(&norm)
            )));
        }
        Ok(State {
            model: model.clone(),
            coords,
        })
    }

    pub fn model(&self) -> &Arc<ConeModel> {
        &self.model
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }
}

/// An element `e` of `K*` with `0 <= e <= u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Effect {
    model: Arc<ConeModel>,
    coords: Vector,
}

impl Effect {
    pub fn new(model: &Arc<ConeModel>, coords: Vector) -> Result<Self> {
        if coords.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: coords.len(),
            });
        }
        let complement = model.unit().sub(&coords);
        for (j, g) in model.primal_rays().iter().enumerate() {
            if coords.dot(g).is_negative() {
                return Err(Error::InvalidEffect(format!("{coords} is negative on primal ray {j}")));
            }
            if complement.dot(g).is_negative() {
                return Err(Error::InvalidEffect(format!("{coords} exceeds the unit on primal ray {j}")));
            }
        }
        Ok(Effect {
            model: model.clone(),
            coords,
        })
    }

    pub fn zero(model: &Arc<ConeModel>) -> Self {
        Effect {
            model: model.clone(),
            coords: Vector::zeros(model.dim()),
        }
    }

    pub fn unit(model: &Arc<ConeModel>) -> Self {
        Effect {
            model: model.clone(),
            coords: model.unit().clone(),
        }
    }

    pub fn model(&self) -> &Arc<ConeModel> {
        &self.model
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    /// `<e, rho>`
    pub fn prob(&self, state: &State) -> Result<Rational> {
        same_model(&self.model, state.model())?;
        Ok(self.coords.dot(state.coords()))
    }

    pub fn complement(&self) -> Effect {
        Effect {
            model: self.model.clone(),
            coords: self.model.unit().sub(&self.coords),
        }
    }
}

/// `e <= f` in the order induced by `K*`, i.e. `f - e in K*`.
pub fn effect_leq(e: &Effect, f: &Effect) -> Result<bool> {
    same_model(e.model(), f.model())?;
    Ok(in_dual_cone(e.model(), &f.coords.sub(&e.coords)))
}

/// A finite family of effects summing to the unit. Outcome `j` is the
/// index into `effects`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    model: Arc<ConeModel>,
    effects: Vec<Effect>,
}

impl Measurement {
    pub fn new(model: &Arc<ConeModel>, effects: Vec<Vector>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidMeasurement("no outcomes".into()));
        }
        let total = sum_vectors(model.dim(), &effects);
        if effects.iter().any(|e| e.len() != model.dim()) {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: effects.iter().map(Vector::len).find(|&l| l != model.dim()).unwrap_or(0),
            });
        }
        if &total != model.unit() {
            return Err(Error::InvalidMeasurement(format!("effects sum to {total}, not the unit")));
        }
        if let Some(j) = effects.iter().position(|e| !in_dual_cone(model, e)) {
            return Err(Error::InvalidMeasurement(format!("effect {j} is not in the dual cone")));
        }
        Ok(Measurement {
            model: model.clone(),
            effects: effects
                .into_iter()
                .map(|coords| Effect {
                    model: model.clone(),
                    coords,
                })
                .collect(),
        })
    }

    pub fn trivial(model: &Arc<ConeModel>) -> Self {
        Measurement {
            model: model.clone(),
            effects: vec![Effect::unit(model)],
        }
    }

    /// `{E_y}` with `E_{chosen} = u` and every other effect zero.
    pub fn indicator(model: &Arc<ConeModel>, outcomes: usize, chosen: usize) -> Self {
        Measurement {
            model: model.clone(),
            effects: (0..outcomes)
                .map(|y| if y == chosen { Effect::unit(model) } else { Effect::zero(model) })
                .collect(),
        }
    }

    pub fn model(&self) -> &Arc<ConeModel> {
        &self.model
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    /// The measurement channel: `rho -> sum_j <e_j, rho> |j><j|`, a state of
    /// the classical model on `|J|` letters.
    pub fn apply(&self, state: &State) -> Result<State> {
        same_model(&self.model, state.model())?;
        let probs: Vector = self.effects.iter().map(|e| e.coords.dot(state.coords())).collect();
        let classical = ConeModel::classical(self.outcomes()).into_shared();
        State::new(&classical, probs)
    }

    /// The adjoint channel: a classical effect `f` maps to `sum_j f_j e_j`.
    pub fn adjoint(&self, f: &Effect) -> Result<Effect> {
        let n = self.outcomes();
        if f.model().dim() != n || !f.model().is_classical() {
            return Err(Error::ModelMismatch {
                left: format!("classical{n}"),
                right: f.model().name().to_string(),
            });
        }
        if f.coords.iter().any(|x| x.is_negative() || *x > Rational::one()) {
            return Err(Error::InvalidEffect(format!("{} is not in [0, 1]^{n}", f.coords)));
        }
        let mut acc = Vector::zeros(self.model.dim());
        for (fj, ej) in f.coords.iter().zip(&self.effects) {
            acc.add_scaled(fj, &ej.coords);
        }
        Effect::new(&self.model, acc)
    }
}

/// `E(rho)` for measurement `e`.
pub fn measurement_channel_apply(e: &Measurement, rho: &State) -> Result<State> {
    e.apply(rho)
}

/// `E^dagger(f)` for measurement `e` and classical effect `f`.
pub fn adjoint_apply(e: &Measurement, f: &Effect) -> Result<Effect> {
    e.adjoint(f)
}

/// The classical-GPT composite `R^n_+ (x) K`. Coordinates are ordered
/// `x * dim + i`, matching [`Vector::kron`] of a classical vector with a
/// component vector.
pub fn compose_with_classical(n: usize, m: &ConeModel) -> ConeModel {
    let basis: Vec<Vector> = (0..n).map(|x| Vector::basis(n, x)).collect();
    let prod = |rays: &[Vector]| -> Vec<Vector> {
        basis
            .iter()
            .flat_map(|c| rays.iter().map(move |r| c.kron(r)))
            .collect()
    };
    let name = if n == 1 {
        m.name().to_string()
    } else {
        format!("classical{n}*{}", m.name())
    };
    ConeModel::new_unchecked(
        name,
        n * m.dim(),
        prod(m.primal_rays()),
        prod(m.dual_rays()),
        Vector::ones(n).kron(m.unit()),
    )
}

/// `sum_x p_x |x><x| (x) rho_x` kept as its decomposition. Repeated
/// classical indices are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleState {
    alphabet: usize,
    component: Arc<ConeModel>,
    composite: Arc<ConeModel>,
    terms: Vec<(Rational, usize, State)>,
}

impl EnsembleState {
    pub fn new(alphabet: usize, component: &Arc<ConeModel>, terms: Vec<(Rational, usize, State)>) -> Result<Self> {
        let mut total = Rational::zero();
        for (p, x, rho) in &terms {
            if p.is_negative() {
                return Err(Error::InvalidDistribution("negative weight".into()));
            }
            if *x >= alphabet {
                return Err(Error::IndexOutOfRange {
                    index: *x,
                    len: alphabet,
                });
            }
            same_model(component, rho.model())?;
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution("weights do not sum to 1".into()));
        }
        Ok(EnsembleState {
            alphabet,
            component: component.clone(),
            composite: compose_with_classical(alphabet, component).into_shared(),
            terms,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn component(&self) -> &Arc<ConeModel> {
        &self.component
    }

    pub fn composite(&self) -> &Arc<ConeModel> {
        &self.composite
    }

    pub fn terms(&self) -> &[(Rational, usize, State)] {
        &self.terms
    }

    /// Coordinates in the composite model.
    pub fn coords(&self) -> Vector {
        let mut acc = Vector::zeros(self.composite.dim());
        for (p, x, rho) in &self.terms {
            acc.add_scaled(p, &Vector::basis(self.alphabet, *x).kron(rho.coords()));
        }
        acc
    }

    pub fn as_state(&self) -> Result<State> {
        State::new(&self.composite, self.coords())
    }

    /// `sum p_x |x><x|` on the classical model.
    pub fn marginal_classical(&self) -> Result<State> {
        let mut p = Vector::zeros(self.alphabet);
        for (w, x, _) in &self.terms {
            p[*x] += w;
        }
        State::new(&ConeModel::classical(self.alphabet).into_shared(), p)
    }

    /// `sum p_x rho_x` on the component model.
    pub fn marginal_general(&self) -> Result<State> {
        let mut acc = Vector::zeros(self.component.dim());
        for (p, _, rho) in &self.terms {
            acc.add_scaled(p, rho.coords());
        }
        State::new(&self.component, acc)
    }

    /// The product of the two marginals, as a composite state.
    pub fn product_of_marginals(&self) -> Result<State> {
        let a = self.marginal_classical()?;
        let b = self.marginal_general()?;
        State::new(&self.composite, a.coords().kron(b.coords()))
    }
}

pub fn marginal_classical(pi: &EnsembleState) -> Result<State> {
    pi.marginal_classical()
}

pub fn marginal_general(pi: &EnsembleState) -> Result<State> {
    pi.marginal_general()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpt::{validate_model, ValidationOptions};
    use crate::rational::{int, ratio};

    fn gbit() -> Arc<ConeModel> {
        ConeModel::gbit().into_shared()
    }

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn half(xs: &[i64]) -> Vector {
        v(xs).scale(&ratio(1, 2))
    }

    #[test]
    fn effect_order_examples() {
        let c2 = ConeModel::classical(2).into_shared();
        assert!(effect_leq(&Effect::zero(&c2), &Effect::unit(&c2)).unwrap());
        assert!(!effect_leq(&Effect::unit(&c2), &Effect::zero(&c2)).unwrap());

        let g = gbit();
        let e = Effect::new(&g, half(&[1, 1, 0])).unwrap();
        let f = Effect::new(&g, Vector(vec![ratio(3, 4), ratio(1, 4), int(0)])).unwrap();
        assert!(effect_leq(&e, &f).unwrap());
    }

    #[test]
    fn effect_leq_rejects_mixed_models() {
        let a = Effect::unit(&gbit());
        let b = Effect::unit(&ConeModel::classical(3).into_shared());
        assert!(matches!(effect_leq(&a, &b), Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn measurement_channel_examples() {
        let g = gbit();
        let corner = State::new(&g, v(&[1, 1, 1])).unwrap();
        let center = State::new(&g, v(&[1, 0, 0])).unwrap();
        let triv = Measurement::trivial(&g);
        assert_eq!(triv.apply(&corner).unwrap().coords(), &v(&[1]));

        let m = Measurement::new(&g, vec![half(&[1, 1, 0]), half(&[1, -1, 0])]).unwrap();
        assert_eq!(m.apply(&corner).unwrap().coords(), &v(&[1, 0]));
        assert_eq!(m.apply(&center).unwrap().coords(), &half(&[1, 1]));
    }

    #[test]
    fn adjoint_examples() {
        let g = gbit();
        let m = Measurement::new(&g, vec![half(&[1, 1, 0]), half(&[1, -1, 0])]).unwrap();
        let c2 = ConeModel::classical(2).into_shared();
        assert_eq!(m.adjoint(&Effect::unit(&c2)).unwrap().coords(), g.unit());
        let ind = Effect::new(&c2, v(&[0, 1])).unwrap();
        assert_eq!(m.adjoint(&ind).unwrap().coords(), &half(&[1, -1, 0]));
        let f = Effect::new(&c2, half(&[1, 1])).unwrap();
        assert_eq!(m.adjoint(&f).unwrap().coords(), &half(&[1, 0, 0]));
        let c3 = ConeModel::classical(3).into_shared();
        assert!(m.adjoint(&Effect::unit(&c3)).is_err());
    }

    #[test]
    fn invalid_objects_rejected() {
        let g = gbit();
        assert!(matches!(State::new(&g, v(&[1, 2, 0])), Err(Error::InvalidState(_))));
        assert!(matches!(State::new(&g, v(&[2, 0, 0])), Err(Error::InvalidState(_))));
        assert!(matches!(Effect::new(&g, v(&[1, 1, 0])), Err(Error::InvalidEffect(_))));
        assert!(matches!(
            Measurement::new(&g, vec![half(&[1, 1, 0])]),
            Err(Error::InvalidMeasurement(_))
        ));
    }

    #[test]
    fn composite_shapes() {
        let gb = ConeModel::gbit();
        let one = compose_with_classical(1, &gb);
        assert_eq!(one.primal_rays(), gb.primal_rays());
        assert_eq!(one.unit(), gb.unit());

        let cc = compose_with_classical(2, &ConeModel::classical(2));
        assert_eq!(cc.dim(), 4);
        assert!(cc.is_classical());

        let c = compose_with_classical(2, &gb);
        assert_eq!((c.dim(), c.primal_rays().len(), c.dual_rays().len()), (6, 8, 8));
        let opts = ValidationOptions {
            trials: 40,
            seed: 3,
            check_polar: true,
        };
        validate_model(&c, &opts).unwrap();
        validate_model(&compose_with_classical(3, &ConeModel::polygon(5)), &opts).unwrap();
    }

    #[test]
    fn marginals_of_gbit_ensemble() {
        let g = gbit();
        let a = State::new(&g, v(&[1, 1, 1])).unwrap();
        let b = State::new(&g, v(&[1, -1, -1])).unwrap();
        let pi = EnsembleState::new(2, &g, vec![(ratio(1, 2), 0, a.clone()), (ratio(1, 2), 1, b)]).unwrap();
        assert_eq!(pi.marginal_classical().unwrap().coords(), &half(&[1, 1]));
        assert_eq!(pi.marginal_general().unwrap().coords(), &v(&[1, 0, 0]));
        pi.as_state().unwrap();

        let single = EnsembleState::new(2, &g, vec![(int(1), 0, a.clone())]).unwrap();
        assert_eq!(single.marginal_classical().unwrap().coords(), &v(&[1, 0]));
        assert_eq!(single.marginal_general().unwrap().coords(), a.coords());
    }

    #[test]
    fn repeated_indices_merge() {
        let c2 = ConeModel::classical(2).into_shared();
        let s0 = State::new(&c2, v(&[1, 0])).unwrap();
        let s1 = State::new(&c2, v(&[0, 1])).unwrap();
        let pi = EnsembleState::new(3, &c2, vec![(ratio(1, 3), 2, s0), (ratio(2, 3), 2, s1)]).unwrap();
        assert_eq!(pi.marginal_classical().unwrap().coords(), &v(&[0, 0, 1]));
        assert!(matches!(
            EnsembleState::new(2, &c2, vec![(ratio(1, 2), 0, State::new(&c2, v(&[1, 0])).unwrap())]),
            Err(Error::InvalidDistribution(_))
        ));
    }
}
