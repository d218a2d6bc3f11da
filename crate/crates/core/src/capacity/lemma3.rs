use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gpt::{in_dual_cone, same_model, ConeModel, Effect, Measurement};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::rational::{Rational, Vector};

/// The `x`-block of an effect on `R^n_+ (x) K`: the effect `A_x` with
/// `<A_x, rho> = <e, |x><x| (x) rho>` for every `rho`.
pub fn slice_effect(e: &Effect, component: &Arc<ConeModel>, x: usize) -> Result<Effect> {
    let d = component.dim();
    let total = e.coords().len();
    if d == 0 || total % d != 0 {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: total,
        });
    }
    let letters = total / d;
    if x >= letters {
        return Err(Error::IndexOutOfRange { index: x, len: letters });
    }
    Effect::new(component, Vector(e.coords().0[x * d..(x + 1) * d].to_vec()))
}

/// A family of effects `{A_y}` with parameters `1 < s < t`.
#[derive(Clone, Debug)]
pub struct LemmaThreeInput {
    effects: Vec<Effect>,
    s: Rational,
    t: Rational,
}

impl LemmaThreeInput {
    pub fn new(effects: Vec<Effect>, s: Rational, t: Rational) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty effect family".into()))?;
        for e in &effects[1..] {
            same_model(first.model(), e.model())?;
        }
        if s <= Rational::one() || t <= s {
            return Err(Error::InvalidArgument("need 1 < s < t".into()));
        }
        Ok(LemmaThreeInput { effects, s, t })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn model(&self) -> &Arc<ConeModel> {
        self.effects[0].model()
    }

    fn total(&self) -> Vector {
        self.effects
            .iter()
            .fold(Vector::zeros(self.model().dim()), |acc, e| acc.add(e.coords()))
    }

    /// `B_y = -(s - 1) u - t u' + (s + t) A_y` with `u' = sum_z A_z`.
    pub fn b_vectors(&self) -> Vec<Vector> {
        let u = self.model().unit();
        let base = u
            .scale(&-(&self.s - Rational::one()))
            .sub(&self.total().scale(&self.t));
        let k = &self.s + &self.t;
        self.effects.iter().map(|a| base.add(&a.coords().scale(&k))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionMethod {
    /// `E_{y0} = u`, every other effect zero.
    Indicator,
    /// The indicator failed the inequality; the measurement comes from the
    /// feasibility LP `E_y >= max(B_y, 0)` on every primal ray, `sum E_y = u`.
    Program,
}

#[derive(Clone, Debug)]
pub struct LemmaThreeConstruction {
    pub measurement: Measurement,
    pub method: ConstructionMethod,
    /// Index carrying `u` in the indicator rule.
    pub chosen: usize,
    /// Indices with `B_y` in the dual cone (at most one).
    pub nonnegative: Vec<usize>,
    /// No `B_y` was nonnegative and index 0 was taken.
    pub fallback: bool,
    /// The indicator rule alone satisfied the inequality.
    pub indicator_verified: bool,
}

/// Picks the unique `y0` with `B_{y0} >= 0` (or index 0 when there is none)
/// and forms the indicator measurement on it.
///
/// `B_y` not being nonnegative does not make it nonpositive unless the cone
/// order is total, so the indicator can violate `E_y >= B_y` at `y != y0`.
/// In that case the measurement is taken from [`lemma3_program`] instead.
pub fn lemma3_construct(input: &LemmaThreeInput) -> Result<LemmaThreeConstruction> {
    let model = input.model();
    let nonnegative: Vec<usize> = input
        .b_vectors()
        .iter()
        .enumerate()
        .filter(|(_, b)| in_dual_cone(model, b))
        .map(|(y, _)| y)
        .collect();
    if nonnegative.len() > 1 {
        return Err(Error::ContradictionDetected(format!(
            "B_y is nonnegative for indices {nonnegative:?}"
        )));
    }
    let fallback = nonnegative.is_empty();
    let chosen = nonnegative.first().copied().unwrap_or(0);
    let indicator = Measurement::indicator(model, input.effects.len(), chosen);
    let indicator_verified = lemma3_verify(input, &indicator)?.holds;
    let (measurement, method) = if indicator_verified {
        (indicator, ConstructionMethod::Indicator)
    } else {
        (lemma3_program(input)?, ConstructionMethod::Program)
    };
    Ok(LemmaThreeConstruction {
        measurement,
        method,
        chosen,
        nonnegative,
        fallback,
        indicator_verified,
    })
}

/// A measurement with `E_y >= B_y` for all `y`, found by exact LP.
/// Fails with `ContradictionDetected` when no such measurement exists.
pub fn lemma3_program(input: &LemmaThreeInput) -> Result<Measurement> {
    let model = input.model();
    let d = model.dim();
    let k = input.effects.len();
    let mut lp = LinearProgram::minimize(Vector::zeros(k * d));
    for (y, b) in input.b_vectors().iter().enumerate() {
        for g in model.primal_rays() {
            let mut row = Vector::zeros(k * d);
            for i in 0..d {
                row[y * d + i] = g[i].clone();
            }
            lp = lp.ge(row, b.dot(g).max(Rational::zero()));
        }
    }
    for i in 0..d {
        let mut row = Vector::zeros(k * d);
        for y in 0..k {
            row[y * d + i] = Rational::one();
        }
        lp = lp.eq(row, model.unit()[i].clone());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal { point, .. } => {
            Measurement::new(model, (0..k).map(|y| Vector(point.0[y * d..(y + 1) * d].to_vec())).collect())
        }
        LpOutcome::Infeasible { .. } => Err(Error::ContradictionDetected(
            "no measurement satisfies u - E_y <= s (u - A_y) + t sum_{z != y} A_z".into(),
        )),
        other => Err(Error::Solver(format!("feasibility LP came back {}", other.status()))),
    }
}

#[derive(Clone, Debug)]
pub struct LemmaThreeVerification {
    /// `y` with `s (u - A_y) + t sum_{z != y} A_z - (u - E_y)` outside `K*`.
    pub violations: Vec<usize>,
    pub holds: bool,
}

/// Checks `u - E_y <= s (u - A_y) + t sum_{z != y} A_z` for every `y`.
pub fn lemma3_verify(input: &LemmaThreeInput, meas: &Measurement) -> Result<LemmaThreeVerification> {
    same_model(input.model(), meas.model())?;
    if meas.outcomes() != input.effects.len() {
        return Err(Error::DimensionMismatch {
            expected: input.effects.len(),
            found: meas.outcomes(),
        });
    }
    let model = input.model();
    let u = model.unit();
    let total = input.total();
    let violations = (0..input.effects.len())
        .filter(|&y| {
            let a = input.effects[y].coords();
            let others = total.sub(a);
            let rhs = u.sub(a).scale(&input.s).add(&others.scale(&input.t));
            let lhs = u.sub(meas.effects()[y].coords());
            !in_dual_cone(model, &rhs.sub(&lhs))
        })
        .collect::<Vec<_>>();
    Ok(LemmaThreeVerification {
        holds: violations.is_empty(),
        violations,
    })
}
