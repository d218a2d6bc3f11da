//! Hypothesis-testing relative entropy over a polyhedral effect space.
//!
//! `beta*(rho, sigma; eps) = min { <q, sigma> : 0 <= q <= u, <q, rho> >= 1 - eps }`
//! and `D = -log2 beta*`. Every comparison in this module happens on the
//! exact `beta*` scale; `-log2` is monotone so orderings carry over.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gpt::{same_model, Effect, Measurement, State};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::rational::{neg_log2, ratio, Rational, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisTestResult {
    pub epsilon: Rational,
    /// Minimal type-II error `<q, sigma>`.
    pub beta_star: Rational,
    /// `-log2 beta_star`, `+inf` when `beta_star == 0`. Display only.
    pub d_value: f64,
    pub optimal_q: Effect,
}

pub(crate) fn check_epsilon(eps: &Rational) -> Result<()> {
    if eps.is_negative() || *eps > Rational::one() {
        return Err(Error::InvalidEpsilon(format!(
            "{} is outside [0, 1]",
            crate::rational::format_rational(eps)
        )));
    }
    Ok(())
}

/// The test LP: variables are the coordinates of `q`.
fn test_program(rho: &State, sigma: &State, eps: &Rational) -> LinearProgram {
    let model = rho.model();
    let mut lp = LinearProgram::minimize(sigma.coords().clone());
    for g in model.primal_rays() {
        lp = lp
            .ge(g.clone(), Rational::zero())
            .ge(g.neg(), -model.unit().dot(g));
    }
    lp.ge(rho.coords().clone(), Rational::one() - eps)
}

/// Computes `beta*` and an optimal test effect exactly.
pub fn dht(rho: &State, sigma: &State, eps: &Rational) -> Result<HypothesisTestResult> {
    same_model(rho.model(), sigma.model())?;
    check_epsilon(eps)?;
    let lp = test_program(rho, sigma, eps);
    let (beta, point) = match solve_lp(&lp)? {
        LpOutcome::Optimal { value, point } => (value, point),
        other => {
            return Err(Error::Solver(format!(
                "test LP is feasible (q = u) and bounded below by 0 but came back {}",
                other.status()
            )))
        }
    };
    let q = Effect::new(rho.model(), point)?;
    if q.coords().dot(rho.coords()) < Rational::one() - eps || q.coords().dot(sigma.coords()) != beta {
        return Err(Error::Solver("optimal test failed exact re-substitution".into()));
    }
    Ok(HypothesisTestResult {
        epsilon: eps.clone(),
        d_value: neg_log2(&beta),
        beta_star: beta,
        optimal_q: q,
    })
}

#[derive(Clone, Debug)]
pub struct DpiReport {
    pub epsilon: Rational,
    pub before: HypothesisTestResult,
    /// The test on the measured-out classical pair.
    pub after: HypothesisTestResult,
    /// `E^dagger(q_after)`, a feasible test for the original pair.
    pub pulled_back: Effect,
    pub pulled_back_type_one: Rational,
    pub pulled_back_type_two: Rational,
    /// `beta_before <= beta_after`, and the pulled-back test is feasible with
    /// type-II error equal to `beta_after`.
    pub holds: bool,
}

/// Data processing under a measurement channel, checked on the beta scale.
pub fn dpi_check(rho: &State, sigma: &State, eps: &Rational, e: &Measurement) -> Result<DpiReport> {
    same_model(rho.model(), e.model())?;
    let before = dht(rho, sigma, eps)?;
    let after = dht(&e.apply(rho)?, &e.apply(sigma)?, eps)?;
    let pulled_back = e.adjoint(&after.optimal_q)?;
    let t1 = pulled_back.coords().dot(rho.coords());
    let t2 = pulled_back.coords().dot(sigma.coords());
    let holds = before.beta_star <= after.beta_star && t1 >= Rational::one() - eps && t2 == after.beta_star;
    Ok(DpiReport {
        epsilon: eps.clone(),
        before,
        after,
        pulled_back,
        pulled_back_type_one: t1,
        pulled_back_type_two: t2,
        holds,
    })
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    /// `(eps, beta*(eps))` in grid order.
    pub points: Vec<(Rational, Rational)>,
    pub non_increasing: bool,
}

/// Evaluates `beta*` along an ascending epsilon grid.
pub fn monotonicity_scan(rho: &State, sigma: &State, grid: &[Rational]) -> Result<MonotonicityReport> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidEpsilon("grid is not ascending".into()));
    }
    let points = grid
        .iter()
        .map(|eps| Ok((eps.clone(), dht(rho, sigma, eps)?.beta_star)))
        .collect::<Result<Vec<_>>>()?;
    let non_increasing = points.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(MonotonicityReport { points, non_increasing })
}

#[derive(Clone, Debug)]
pub struct ContinuityProbe {
    pub delta_prime: Rational,
    pub beta: Rational,
    /// `beta*(eps - delta') - beta*(eps)`
    pub increase: Rational,
    /// Type-II error of the interpolated test `(d'/eps) u + (1 - d'/eps) q0`
    /// minus `alpha`; always `(d'/eps)(1 - alpha)`.
    pub interpolation_gap: Rational,
    pub within_bound: bool,
}

#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub epsilon: Rational,
    pub eta: Rational,
    pub alpha: Rational,
    /// `eps * eta / (1 - alpha)`
    pub delta: Rational,
    pub probes: Vec<ContinuityProbe>,
    pub holds: bool,
}

/// Probes left-continuity of `beta*` at `eps` with tolerance `eta`, using
/// `delta = eps * eta / (1 - alpha)` where `alpha = beta*(eps)`. Offsets
/// `delta' = delta * i / steps` are clipped at `eps`.
pub fn left_continuity_probe(
    rho: &State,
    sigma: &State,
    eps: &Rational,
    eta: &Rational,
    steps: usize,
) -> Result<ContinuityReport> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::InvalidEpsilon("continuity probe needs 0 < eps <= 1".into()));
    }
    if !eta.is_positive() {
        return Err(Error::InvalidArgument("eta must be positive".into()));
    }
    let base = dht(rho, sigma, eps)?;
    let alpha = base.beta_star.clone();
    if alpha.is_one() {
        return Err(Error::DegenerateCase("beta*(eps) = 1, the probe is vacuous".into()));
    }
    let delta = eps * eta / (Rational::one() - &alpha);
    let q0 = base.optimal_q.coords();
    let unit = rho.model().unit();

    let mut offsets: Vec<Rational> = (1..=steps.max(1))
        .map(|i| (&delta * ratio(i as i64, steps.max(1) as i64)).min(eps.clone()))
        .collect();
    offsets.dedup();

    let mut probes = Vec::with_capacity(offsets.len());
    for dp in offsets {
        let beta = dht(rho, sigma, &(eps - &dp))?.beta_star;
        let increase = &beta - &alpha;
        let w = &dp / eps;
        let q1: Vector = unit.scale(&w).add(&q0.scale(&(Rational::one() - &w)));
        let feasible = q1.dot(rho.coords()) >= Rational::one() - (eps - &dp);
        let gap = q1.dot(sigma.coords()) - &alpha;
        let within_bound = feasible && increase <= gap && gap <= *eta && increase <= *eta;
        probes.push(ContinuityProbe {
            delta_prime: dp,
            beta,
            increase,
            interpolation_gap: gap,
            within_bound,
        });
    }
    let holds = probes.iter().all(|p| p.within_bound);
    Ok(ContinuityReport {
        epsilon: eps.clone(),
        eta: eta.clone(),
        alpha,
        delta,
        probes,
        holds,
    })
}
