//! Flat report rows and their CSV / JSON writers.
//!
//! Every exact quantity appears as a `p/q` string; columns ending in
//! `_decimal` or `_bits` are rounded renderings for reading only.

use std::path::Path;

use serde::Serialize;

use crate::asymptotic::{GapReport, RateReport};
use crate::capacity::{
    CapacityReport, LemmaThreeConstruction, LemmaThreeVerification, RandomCodingReport, Theorem1Bound, Theorem2Bound,
};
use crate::error::{Error, Result};
use crate::gpt::ValidationReport;
use crate::hypothesis::{ContinuityReport, DpiReport, HypothesisTestResult, MonotonicityReport};
use crate::rational::{decimal, format_rational, to_f64, Rational};

fn q(r: &Rational) -> String {
    format_rational(r)
}

fn dec(r: &Rational) -> String {
    decimal(to_f64(r))
}

fn list(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationRow {
    pub model: String,
    pub dim: usize,
    pub primal_rays: usize,
    pub dual_rays: usize,
    pub checks: String,
    pub polar_trials: usize,
    pub polar_seed: String,
    pub polar_members: usize,
}

impl ValidationRow {
    pub fn new(r: &ValidationReport) -> Self {
        let polar = r.polar.as_ref();
        ValidationRow {
            model: r.model.clone(),
            dim: r.dim,
            primal_rays: r.primal_rays,
            dual_rays: r.dual_rays,
            checks: r.checks.join("; "),
            polar_trials: polar.map_or(0, |p| p.trials),
            polar_seed: polar.map_or(String::new(), |p| p.seed.to_string()),
            polar_members: polar.map_or(0, |p| p.members),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DhtRow {
    pub model: String,
    pub rho: String,
    pub sigma: String,
    pub epsilon: String,
    pub beta_star: String,
    pub beta_star_decimal: String,
    pub d_bits: String,
    pub optimal_q: String,
}

impl DhtRow {
    pub fn new(model: &str, rho: &str, sigma: &str, r: &HypothesisTestResult) -> Self {
        DhtRow {
            model: model.into(),
            rho: rho.into(),
            sigma: sigma.into(),
            epsilon: q(&r.epsilon),
            beta_star: q(&r.beta_star),
            beta_star_decimal: dec(&r.beta_star),
            d_bits: decimal(r.d_value),
            optimal_q: list(&r.optimal_q.coords().0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DpiRow {
    pub instance: String,
    pub epsilon: String,
    pub beta_before: String,
    pub beta_after: String,
    pub d_before_bits: String,
    pub d_after_bits: String,
    pub pulled_back_type_one: String,
    pub pulled_back_type_two: String,
    pub holds: bool,
}

impl DpiRow {
    pub fn new(instance: &str, r: &DpiReport) -> Self {
        DpiRow {
            instance: instance.into(),
            epsilon: q(&r.epsilon),
            beta_before: q(&r.before.beta_star),
            beta_after: q(&r.after.beta_star),
            d_before_bits: decimal(r.before.d_value),
            d_after_bits: decimal(r.after.d_value),
            pulled_back_type_one: q(&r.pulled_back_type_one),
            pulled_back_type_two: q(&r.pulled_back_type_two),
            holds: r.holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityRow {
    pub instance: String,
    pub epsilon: String,
    pub beta_star: String,
    pub beta_star_decimal: String,
}

pub fn monotonicity_rows(instance: &str, r: &MonotonicityReport) -> Vec<MonotonicityRow> {
    r.points
        .iter()
        .map(|(e, b)| MonotonicityRow {
            instance: instance.into(),
            epsilon: q(e),
            beta_star: q(b),
            beta_star_decimal: dec(b),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityRow {
    pub instance: String,
    pub epsilon: String,
    pub eta: String,
    pub alpha: String,
    pub delta: String,
    pub delta_prime: String,
    pub beta: String,
    pub increase: String,
    pub interpolation_gap: String,
    pub within_bound: bool,
}

pub fn continuity_rows(instance: &str, r: &ContinuityReport) -> Vec<ContinuityRow> {
    r.probes
        .iter()
        .map(|p| ContinuityRow {
            instance: instance.into(),
            epsilon: q(&r.epsilon),
            eta: q(&r.eta),
            alpha: q(&r.alpha),
            delta: q(&r.delta),
            delta_prime: q(&p.delta_prime),
            beta: q(&p.beta),
            increase: q(&p.increase),
            interpolation_gap: q(&p.interpolation_gap),
            within_bound: p.within_bound,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityRow {
    pub channel: String,
    pub epsilon: String,
    pub n_max: usize,
    pub n_star: usize,
    pub exact_bits: String,
    pub truncated: bool,
    pub witness_encoder: String,
    pub witness_error: String,
    pub codebook_distribution: String,
    pub converse_beta: String,
    pub converse_bits: String,
    pub theorem1_bits: String,
    pub theorem1_distribution: String,
    pub theorem2_bits: String,
    pub theorem2_bits_unclipped: String,
    pub theorem2_distribution: String,
    pub eps_prime: String,
    pub s: String,
    pub t: String,
    pub theorem2_beta: String,
    pub converse_type_one: String,
    pub converse_type_two: String,
    pub sandwich_holds: bool,
}

impl CapacityRow {
    pub fn new(channel: &str, r: &CapacityReport) -> Self {
        let t2 = r.theorem2.as_ref().map(|b| &b.best);
        let opt = |f: &dyn Fn() -> String| if t2.is_some() { f() } else { String::new() };
        CapacityRow {
            channel: channel.into(),
            epsilon: q(&r.epsilon),
            n_max: r.exact.n_max,
            n_star: r.exact.n_star,
            exact_bits: decimal(r.exact_bits()),
            truncated: r.exact.truncated,
            witness_encoder: r
                .exact
                .witness
                .encoder()
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            witness_error: q(&r.exact.best_errors[r.exact.n_star - 1]),
            codebook_distribution: list(&r.codebook_distribution),
            converse_beta: q(&r.converse_beta),
            converse_bits: decimal(r.converse_bits),
            theorem1_bits: decimal(r.upper_bound_bits()),
            theorem1_distribution: list(&r.theorem1.best_point().distribution),
            theorem2_bits: decimal(r.lower_bound_bits()),
            theorem2_bits_unclipped: opt(&|| decimal(t2.unwrap().bits_unclipped)),
            theorem2_distribution: opt(&|| list(&t2.unwrap().distribution)),
            eps_prime: opt(&|| q(&t2.unwrap().params.eps_prime)),
            s: opt(&|| q(&t2.unwrap().params.s)),
            t: opt(&|| q(&t2.unwrap().params.t)),
            theorem2_beta: opt(&|| q(&t2.unwrap().beta)),
            converse_type_one: q(&r.converse.type_one_success),
            converse_type_two: q(&r.converse.type_two),
            sandwich_holds: r.sandwich_holds(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BestErrorRow {
    pub channel: String,
    pub epsilon: String,
    pub n: usize,
    pub best_error: String,
    pub best_error_decimal: String,
}

pub fn best_error_rows(channel: &str, r: &CapacityReport) -> Vec<BestErrorRow> {
    r.exact
        .best_errors
        .iter()
        .enumerate()
        .map(|(i, e)| BestErrorRow {
            channel: channel.into(),
            epsilon: q(&r.epsilon),
            n: i + 1,
            best_error: q(e),
            best_error_decimal: dec(e),
        })
        .collect()
}

/// One converse point per evaluated distribution, then the best
/// achievability point.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub channel: String,
    pub epsilon: String,
    pub bound: String,
    pub distribution: String,
    pub eps_prime: String,
    pub s: String,
    pub t: String,
    pub beta: String,
    pub ratio: String,
    pub bits: String,
}

pub fn bound_rows(channel: &str, eps: &Rational, t1: &Theorem1Bound, t2: Option<&Theorem2Bound>) -> Vec<BoundRow> {
    let mut rows: Vec<BoundRow> = t1
        .points
        .iter()
        .map(|p| BoundRow {
            channel: channel.into(),
            epsilon: q(eps),
            bound: "converse".into(),
            distribution: list(&p.distribution),
            eps_prime: String::new(),
            s: String::new(),
            t: String::new(),
            beta: q(&p.beta),
            ratio: String::new(),
            bits: decimal(p.bits),
        })
        .collect();
    if let Some(b) = t2 {
        let p = &b.best;
        rows.push(BoundRow {
            channel: channel.into(),
            epsilon: q(eps),
            bound: "achievability".into(),
            distribution: list(&p.distribution),
            eps_prime: q(&p.params.eps_prime),
            s: q(&p.params.s),
            t: q(&p.params.t),
            beta: q(&p.beta),
            ratio: q(&p.ratio),
            bits: decimal(p.bits),
        });
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Row {
    pub instance: String,
    pub s: String,
    pub t: String,
    pub family_size: usize,
    pub nonnegative_indices: String,
    pub chosen: usize,
    pub fallback: bool,
    pub indicator_verified: bool,
    pub method: String,
    pub verified: bool,
}

impl Lemma3Row {
    pub fn new(
        instance: &str,
        s: &Rational,
        t: &Rational,
        c: &LemmaThreeConstruction,
        v: &LemmaThreeVerification,
    ) -> Self {
        Lemma3Row {
            instance: instance.into(),
            s: q(s),
            t: q(t),
            family_size: c.measurement.outcomes(),
            nonnegative_indices: c.nonnegative.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(" "),
            chosen: c.chosen,
            fallback: c.fallback,
            indicator_verified: c.indicator_verified,
            method: format!("{:?}", c.method).to_lowercase(),
            verified: v.holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomCodingRow {
    pub channel: String,
    pub n: usize,
    pub eps_prime: String,
    pub s: String,
    pub t: String,
    pub exhaustive: bool,
    pub encoders: usize,
    pub indicator_decoders: usize,
    pub type_one_success: String,
    pub beta: String,
    pub expected_error: String,
    pub expected_direct: String,
    pub chain_middle: String,
    pub final_bound: String,
    pub per_message_violations: usize,
    pub holds: bool,
}

impl RandomCodingRow {
    pub fn new(channel: &str, r: &RandomCodingReport) -> Self {
        RandomCodingRow {
            channel: channel.into(),
            n: r.n,
            eps_prime: q(&r.params.eps_prime),
            s: q(&r.params.s),
            t: q(&r.params.t),
            exhaustive: r.exhaustive,
            encoders: r.encoders,
            indicator_decoders: r.indicator_decoders,
            type_one_success: q(&r.type_one_success),
            beta: q(&r.beta),
            expected_error: q(&r.expected_error),
            expected_direct: q(&r.expected_direct),
            chain_middle: q(&r.chain_middle),
            final_bound: q(&r.final_bound),
            per_message_violations: r.per_message_violations,
            holds: r.holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub channel: String,
    pub epsilon: String,
    pub m: usize,
    pub letters: usize,
    pub n_star: usize,
    pub exact_bits_per_use: String,
    pub theorem1_bits_per_use: String,
    pub theorem1_grid_bits_per_use: String,
    pub theorem2_bits_per_use: String,
    pub eps_prime: String,
    pub s: String,
    pub t: String,
    pub theorem1_beta: String,
    pub n_upper: String,
    pub witness_row: bool,
    pub maximal_decoders: bool,
    pub truncated: bool,
    pub sandwich_holds: bool,
}

pub fn sweep_rows(r: &RateReport) -> Vec<SweepRow> {
    r.rows
        .iter()
        .map(|row| {
            let params = row.theorem2.as_ref().map(|(p, _)| p);
            SweepRow {
                channel: r.channel.clone(),
                epsilon: q(&r.epsilon),
                m: row.m,
                letters: row.letters,
                n_star: row.n_star,
                exact_bits_per_use: decimal(row.per_use(row.exact_bits)),
                theorem1_bits_per_use: decimal(row.per_use(row.theorem1_bits)),
                theorem1_grid_bits_per_use: decimal(row.per_use(row.theorem1_grid_bits)),
                theorem2_bits_per_use: decimal(row.per_use(row.theorem2_bits)),
                eps_prime: params.map_or(String::new(), |p| q(&p.eps_prime)),
                s: params.map_or(String::new(), |p| q(&p.s)),
                t: params.map_or(String::new(), |p| q(&p.t)),
                theorem1_beta: q(&row.theorem1_beta),
                n_upper: row.n_upper.map_or(String::new(), |n| n.to_string()),
                witness_row: row.witness_row,
                maximal_decoders: row.maximal_decoders,
                truncated: row.truncated,
                sandwich_holds: row.sandwich_holds(),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub model: String,
    pub seed: u64,
    pub trials: usize,
    pub in_min: usize,
    pub in_max: usize,
    pub gap: usize,
    pub min_outside_max: usize,
    pub product_states: usize,
    pub product_states_outside_min: usize,
    pub first_gap_vector: String,
    pub first_gap_separator: String,
}

impl GapRow {
    pub fn new(r: &GapReport) -> Self {
        let (v, s) = r
            .first_gap
            .as_ref()
            .map_or((String::new(), String::new()), |(v, s)| (list(&v.0), list(&s.0)));
        GapRow {
            model: r.model.clone(),
            seed: r.seed,
            trials: r.trials,
            in_min: r.in_min,
            in_max: r.in_max,
            gap: r.gap,
            min_outside_max: r.min_outside_max,
            product_states: r.product_states,
            product_states_outside_min: r.product_states_outside_min,
            first_gap_vector: v,
            first_gap_separator: s,
        }
    }
}
