//! Product channels `Phi^{(x)m}`, the minimal/maximal tensor gap, and
//! per-use rates at finite `m`.
//!
//! The working composite has the product rays of the factors as primal
//! rays (minimal tensor cone) and the products of the dual rays as
//! constraints on states. Decoders are constrained by the product primal
//! rays, so for non-classical factors at `m >= 2` they range over the
//! effects of the maximal composite; rows built that way are flagged.

use std::sync::Arc;

use num_traits::One;
use rand::Rng;
use rayon::prelude::*;

use crate::capacity::{
    codebook_distribution, exact_one_shot_capacity_with, optimal_decoder, simplex_grid, theorem1_upper_bound,
    theorem2_lower_bound, within_converse, CapacityOptions, Code, Theorem2Grid, Theorem2Params,
};
use crate::cone::{cone_membership, satisfies_all, Membership};
use crate::error::{Error, Result};
use crate::gpt::{ClassicalToGPTChannel, ConeModel, State};
use crate::rational::{int, log2, neg_log2, ratio, Rational, Vector};
use crate::sampling::{random_state, rng, small_rational, SeededRng};

/// Largest number of channel uses handled.
pub const MAX_USES: usize = 3;

fn kron_all(rays: &[Vector], m: usize) -> Vec<Vector> {
    let mut acc: Vec<Vector> = vec![Vector(vec![Rational::one()])];
    for _ in 0..m {
        acc = acc.iter().flat_map(|a| rays.iter().map(move |r| a.kron(r))).collect();
    }
    acc
}

/// The `m`-fold composite of `model`: product primal rays, product dual
/// rays and unit `u^{(x)m}`. Coordinates follow [`Vector::kron`].
pub fn product_model(model: &Arc<ConeModel>, m: usize) -> Result<Arc<ConeModel>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if m > MAX_USES {
        return Err(Error::ScaleExceeded(format!("m = {m} exceeds {MAX_USES}")));
    }
    if m == 1 {
        return Ok(model.clone());
    }
    let unit = kron_all(std::slice::from_ref(model.unit()), m).remove(0);
    Ok(ConeModel::new_unchecked(
        format!("{}^{m}", model.name()),
        model.dim().pow(m as u32),
        kron_all(model.primal_rays(), m),
        kron_all(model.dual_rays(), m),
        unit,
    )
    .into_shared())
}

/// `Phi^{(x)m}` with letters `X^m` in lexicographic order (first use
/// most significant).
#[derive(Clone, Debug)]
pub struct ProductChannel {
    pub base: ClassicalToGPTChannel,
    pub m: usize,
    pub channel: ClassicalToGPTChannel,
}

impl ProductChannel {
    pub fn model(&self) -> &Arc<ConeModel> {
        self.channel.model()
    }

    /// Letters of `X` making up product letter `index`.
    pub fn word(&self, index: usize) -> Vec<usize> {
        let n = self.base.letters();
        let mut out = vec![0; self.m];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        out
    }
}

pub fn product_channel(base: &ClassicalToGPTChannel, m: usize) -> Result<ProductChannel> {
    let model = product_model(base.model(), m)?;
    if m == 1 {
        return Ok(ProductChannel {
            base: base.clone(),
            m,
            channel: base.clone(),
        });
    }
    let n = base.letters();
    let total = n.pow(m as u32);
    let mut alphabet = Vec::with_capacity(total);
    let mut outputs = Vec::with_capacity(total);
    for index in 0..total {
        let mut rest = index;
        let mut word = vec![0; m];
        for slot in word.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        alphabet.push(word.iter().map(|&x| base.alphabet()[x].as_str()).collect::<Vec<_>>().join("."));
        let coords = word
            .iter()
            .fold(Vector(vec![Rational::one()]), |acc, &x| acc.kron(base.output(x).coords()));
        outputs.push(coords);
    }
    let channel = ClassicalToGPTChannel::new(format!("{}^{m}", base.name()), alphabet, &model, outputs)?;
    Ok(ProductChannel {
        base: base.clone(),
        m,
        channel,
    })
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub model: String,
    pub trials: usize,
    pub seed: u64,
    pub in_min: usize,
    pub in_max: usize,
    /// Vectors in the maximal but not the minimal cone.
    pub gap: usize,
    /// First gap vector and the functional separating it from the minimal cone.
    pub first_gap: Option<(Vector, Vector)>,
    /// Vectors in the minimal but not the maximal cone (must stay 0).
    pub min_outside_max: usize,
    /// Random product states checked against the minimal cone.
    pub product_states: usize,
    pub product_states_outside_min: usize,
}

impl GapReport {
    pub fn consistent(&self) -> bool {
        self.min_outside_max == 0 && self.product_states_outside_min == 0
    }
}

fn center(model: &ConeModel) -> Vector {
    let mut v = Vector::zeros(model.dim());
    for g in model.primal_rays() {
        v = v.add(g);
    }
    let norm = model.unit().dot(&v);
    v.scale(&(Rational::one() / norm))
}

/// `c (x) c` plus a random combination of products of primal-ray
/// differences, or a uniform random vector.
fn gap_probe_vector(r: &mut SeededRng, model: &ConeModel) -> Vector {
    let d = model.dim();
    if r.gen_bool(0.25) {
        return (0..d * d).map(|_| small_rational(r)).collect();
    }
    let c = center(model);
    let rays = model.primal_rays();
    let mut v = c.kron(&c);
    for _ in 0..3 {
        let diff = |r: &mut SeededRng| {
            let a = &rays[r.gen_range(0..rays.len())];
            let b = &rays[r.gen_range(0..rays.len())];
            let scale = Rational::one() / model.unit().dot(a);
            a.scale(&scale).sub(&b.scale(&(Rational::one() / model.unit().dot(b))))
        };
        let (a, b) = (diff(r), diff(r));
        let w = ratio(r.gen_range(-4..=4), 8);
        v.add_scaled(&w, &a.kron(&b));
    }
    v
}

/// Probes the two-copy composite: membership in the minimal cone (conic
/// feasibility over product rays) against nonnegativity on product dual
/// rays.
pub fn min_max_gap_probe(model: &Arc<ConeModel>, m: usize, trials: usize, seed: u64) -> Result<GapReport> {
    if m != 2 {
        return Err(Error::InvalidArgument("the gap probe runs at m = 2".into()));
    }
    let pm = product_model(model, 2)?;
    let mut r = rng(seed);
    let probes: Vec<Vector> = (0..trials).map(|_| gap_probe_vector(&mut r, model)).collect();
    let products: Vec<Vector> = (0..trials.min(20))
        .map(|_| random_state(&mut r, model).coords().kron(random_state(&mut r, model).coords()))
        .collect();

    let checks = probes
        .par_iter()
        .map(|v| Ok((cone_membership(v, pm.primal_rays())?, satisfies_all(v, pm.dual_rays()))))
        .collect::<Result<Vec<_>>>()?;
    let product_checks = products
        .par_iter()
        .map(|v| Ok(cone_membership(v, pm.primal_rays())?.is_member()))
        .collect::<Result<Vec<_>>>()?;

    let mut report = GapReport {
        model: model.name().to_string(),
        trials,
        seed,
        in_min: 0,
        in_max: 0,
        gap: 0,
        first_gap: None,
        min_outside_max: 0,
        product_states: products.len(),
        product_states_outside_min: product_checks.iter().filter(|ok| !**ok).count(),
    };
    for (v, (membership, in_max)) in probes.iter().zip(checks) {
        let in_min = membership.is_member();
        report.in_min += in_min as usize;
        report.in_max += in_max as usize;
        if in_min && !in_max {
            report.min_outside_max += 1;
        }
        if in_max && !in_min {
            report.gap += 1;
            if report.first_gap.is_none() {
                if let Membership::Outside { separator } = membership {
                    report.first_gap = Some((v.clone(), separator));
                }
            }
        }
    }
    Ok(report)
}

/// The PR-box correlation vector on two gbits in the `(1, x, y)` basis:
/// unit normalization, unbiased marginals, correlators `xx = xy = yx = 1`
/// and `yy = -1`.
pub fn gbit_pr_box() -> Vector {
    let mut v = Vector::zeros(9);
    v[0] = int(1);
    v[4] = int(1);
    v[5] = int(1);
    v[7] = int(1);
    v[8] = int(-1);
    v
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Encoders enumerated per message count before falling back to the
    /// distinct-codeword witness.
    pub encoder_budget: u128,
    /// Largest message count tried at any `m`.
    pub n_max: usize,
    pub theorem1_k: usize,
    pub theorem2_k: usize,
    pub theorem2_params: Option<Vec<Theorem2Params>>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            encoder_budget: 5000,
            n_max: 64,
            theorem1_k: 1,
            theorem2_k: 1,
            theorem2_params: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RateRow {
    pub m: usize,
    pub letters: usize,
    /// Message count reported as exact (brute force) or, for flagged rows,
    /// achieved by the witness code.
    pub n_star: usize,
    pub exact_bits: f64,
    /// Enumeration exceeded the budget; `n_star` comes from the witness.
    pub witness_row: bool,
    /// Decoders range over the maximal composite (non-classical, `m >= 2`).
    pub maximal_decoders: bool,
    /// `floor(S / (1 - eps))` with `S` the optimal total success over all
    /// letters; no code with more messages meets the error target.
    pub n_upper: Option<usize>,
    /// Enumeration ended before the error target failed.
    pub truncated: bool,
    pub codebook_distribution: Vec<Rational>,
    /// Converse `beta*` at the codebook distribution.
    pub theorem1_beta: Rational,
    pub theorem1_bits: f64,
    /// Best converse value over the codebook distribution and the grid.
    pub theorem1_grid_bits: f64,
    /// `None` when the achievability grid is empty.
    pub theorem2: Option<(Theorem2Params, Rational)>,
    pub theorem2_bits: f64,
    pub theorem2_bits_unclipped: Option<f64>,
    pub upper_holds: bool,
    pub lower_holds: bool,
}

impl RateRow {
    pub fn per_use(&self, bits: f64) -> f64 {
        bits / self.m as f64
    }

    pub fn sandwich_holds(&self) -> bool {
        self.upper_holds && self.lower_holds
    }
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub epsilon: Rational,
    pub channel: String,
    pub rows: Vec<RateRow>,
}

impl RateReport {
    pub fn sandwich_holds(&self) -> bool {
        self.rows.iter().all(RateRow::sandwich_holds)
    }
}

/// The largest distinct-codeword prefix code `x = 0, 1, ..., N-1` whose
/// optimal decoder meets `eps`.
pub fn prefix_witness(channel: &ClassicalToGPTChannel, eps: &Rational) -> Result<Code> {
    let mut best = None;
    for n in 1..=channel.letters() {
        let encoder: Vec<usize> = (0..n).collect();
        let (decoder, err) = optimal_decoder(channel, &encoder)?;
        if err <= *eps {
            best = Some(Code::new(channel, encoder, decoder)?);
        }
    }
    Ok(best.expect("a single message always decodes"))
}

/// `floor(S / (1 - eps))` where `S` is the optimal total success with one
/// message per letter. Any code's success total is at most `S`.
pub fn message_count_bound(channel: &ClassicalToGPTChannel, eps: &Rational) -> Result<Option<usize>> {
    if *eps >= Rational::one() {
        return Ok(None);
    }
    let all: Vec<usize> = (0..channel.letters()).collect();
    let (_, err) = optimal_decoder(channel, &all)?;
    let success = (Rational::one() - err) * int(all.len() as i64);
    let bound = (success / (Rational::one() - eps)).floor();
    Ok(bound.to_integer().try_into().ok())
}

fn rate_row(pc: &ProductChannel, eps: &Rational, opts: &SweepOptions) -> Result<RateRow> {
    let channel = &pc.channel;
    let copts = CapacityOptions {
        n_max: opts.n_max,
        encoder_budget: opts.encoder_budget,
    };
    let exact = exact_one_shot_capacity_with(channel, eps, &copts)?;
    let n_upper = message_count_bound(channel, eps)?;
    let witness_row = exact.budget_stop.is_some() && exact.truncated;
    let code = if witness_row {
        let w = prefix_witness(channel, eps)?;
        if w.n() > exact.n_star {
            w
        } else {
            exact.witness.clone()
        }
    } else {
        exact.witness.clone()
    };
    let n_star = code.n();
    let codebook = codebook_distribution(&code, channel.letters());
    let t1 = theorem1_upper_bound(channel, eps, opts.theorem1_k, std::slice::from_ref(&codebook))?;
    let theorem1_beta = t1.points[0].beta.clone();
    let grid = Theorem2Grid {
        distributions: simplex_grid(channel.letters(), opts.theorem2_k),
        params: opts
            .theorem2_params
            .clone()
            .unwrap_or_else(|| Theorem2Grid::default_params(eps)),
    };
    let t2 = match theorem2_lower_bound(channel, eps, &grid) {
        Ok(b) => Some(b),
        Err(Error::EmptyGrid(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(RateRow {
        m: pc.m,
        letters: channel.letters(),
        n_star,
        exact_bits: log2(&int(n_star as i64)),
        witness_row,
        maximal_decoders: pc.m >= 2 && !pc.base.model().is_classical(),
        n_upper,
        truncated: exact.truncated && !witness_row,
        codebook_distribution: codebook,
        theorem1_bits: neg_log2(&theorem1_beta),
        upper_holds: within_converse(n_star, &theorem1_beta),
        theorem1_beta,
        theorem1_grid_bits: t1.bits(),
        theorem2: t2.as_ref().map(|b| (b.best.params.clone(), b.best.beta.clone())),
        theorem2_bits: t2.as_ref().map_or(0.0, |b| b.best.bits),
        theorem2_bits_unclipped: t2.as_ref().map(|b| b.best.bits_unclipped),
        lower_holds: t2.as_ref().map_or(true, |b| b.best.below(n_star)),
    })
}

/// One row per `m = 1..=m_max`.
pub fn rate_sweep(base: &ClassicalToGPTChannel, eps: &Rational, m_max: usize, opts: &SweepOptions) -> Result<RateReport> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    if m_max > MAX_USES {
        return Err(Error::ScaleExceeded(format!("m = {m_max} exceeds {MAX_USES}")));
    }
    let rows = (1..=m_max)
        .map(|m| rate_row(&product_channel(base, m)?, eps, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateReport {
        epsilon: eps.clone(),
        channel: base.name().to_string(),
        rows,
    })
}

/// `<e1 (x) e2, s1 (x) s2> = <e1, s1> <e2, s2>` for random product pairs.
pub fn product_evaluation_consistent(model: &Arc<ConeModel>, trials: usize, seed: u64) -> bool {
    let mut r = rng(seed);
    (0..trials).all(|_| {
        let s1 = random_state(&mut r, model);
        let s2 = random_state(&mut r, model);
        let e1 = crate::sampling::random_effect(&mut r, model);
        let e2 = crate::sampling::random_effect(&mut r, model);
        let joint = e1.coords().kron(e2.coords()).dot(&s1.coords().kron(s2.coords()));
        joint == e1.coords().dot(s1.coords()) * e2.coords().dot(s2.coords())
    })
}

/// Every output of the product channel is a state of the product model.
pub fn outputs_are_states(pc: &ProductChannel) -> bool {
    pc.channel
        .outputs()
        .iter()
        .all(|s| State::new(pc.model(), s.coords().clone()).is_ok())
        && pc.channel.outputs().iter().all(|s| {
            cone_membership(s.coords(), pc.model().primal_rays()).is_ok_and(|m| m.is_member())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpt::letters;

    fn gbit_antipodal() -> ClassicalToGPTChannel {
        let g = ConeModel::gbit().into_shared();
        ClassicalToGPTChannel::new(
            "antipodal",
            letters(2),
            &g,
            vec![Vector::from_ints(&[1, 1, 1]), Vector::from_ints(&[1, -1, -1])],
        )
        .unwrap()
    }

    fn constant() -> ClassicalToGPTChannel {
        let c = ConeModel::classical(2).into_shared();
        let s = State::new(&c, Vector(vec![ratio(1, 3), ratio(2, 3)])).unwrap();
        ClassicalToGPTChannel::constant(2, &s)
    }

    #[test]
    fn product_shapes() {
        let id = ClassicalToGPTChannel::identity_classical(2);
        let p1 = product_channel(&id, 1).unwrap();
        assert_eq!(p1.channel, id);
        let p2 = product_channel(&id, 2).unwrap();
        assert!(p2.model().is_classical());
        assert_eq!(p2.model().dim(), 4);
        assert_eq!(p2.channel.alphabet()[2], "1.0");
        assert_eq!(p2.word(2), vec![1, 0]);

        let g2 = product_channel(&gbit_antipodal(), 2).unwrap();
        assert_eq!(g2.model().dim(), 9);
        assert_eq!(g2.model().primal_rays().len(), 16);
        assert!(outputs_are_states(&g2));
        assert!(matches!(product_channel(&id, 4), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn products_evaluate_factorwise() {
        for model in [ConeModel::gbit(), ConeModel::polygon(5), ConeModel::classical(3)] {
            assert!(product_evaluation_consistent(&model.into_shared(), 20, 3));
        }
    }

    #[test]
    fn gap_probe() {
        let c = ConeModel::classical(2).into_shared();
        let r = min_max_gap_probe(&c, 2, 40, 1).unwrap();
        assert_eq!(r.gap, 0);
        assert!(r.consistent());

        let g = ConeModel::gbit().into_shared();
        let pg = product_model(&g, 2).unwrap();
        let pr = gbit_pr_box();
        assert!(satisfies_all(&pr, pg.dual_rays()));
        let m = cone_membership(&pr, pg.primal_rays()).unwrap();
        assert!(!m.is_member());
        assert!(m.verify(&pr, pg.primal_rays()));

        let r = min_max_gap_probe(&g, 2, 60, 1).unwrap();
        assert!(r.consistent());
        assert!(r.gap > 0);
    }

    #[test]
    fn sweeps() {
        let id = ClassicalToGPTChannel::identity_classical(2);
        let rep = rate_sweep(&id, &int(0), 3, &SweepOptions::default()).unwrap();
        for row in &rep.rows {
            assert_eq!(row.per_use(row.exact_bits), 1.0);
            assert!(row.sandwich_holds());
        }
        assert!(!rep.rows[1].witness_row);
        assert!(rep.rows[2].witness_row);
        assert_eq!(rep.rows[2].n_upper, Some(8));

        let rep = rate_sweep(&constant(), &ratio(1, 4), 3, &SweepOptions::default()).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact_bits == 0.0 && r.sandwich_holds()));

        let rep = rate_sweep(&gbit_antipodal(), &int(0), 2, &SweepOptions::default()).unwrap();
        assert!(rep.rows.iter().all(|r| r.per_use(r.exact_bits) == 1.0));
        assert!(rep.rows[1].maximal_decoders);
    }
}
