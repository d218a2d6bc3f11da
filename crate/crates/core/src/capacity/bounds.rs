use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gpt::{build_pi_ab, check_distribution, ClassicalToGPTChannel};
use crate::hypothesis::{check_epsilon, dht, HypothesisTestResult};
use crate::rational::{int, log2, neg_log2, ratio, Rational};

/// All distributions on `letters` points with denominator `k`, in
/// lexicographic order of numerators (largest first weight first).
pub fn simplex_grid(letters: usize, k: usize) -> Vec<Vec<Rational>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            rec(left - a, slots - 1, cur, out);
            cur.pop();
        }
    }
    if letters == 0 || k == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    rec(k, letters, &mut Vec::with_capacity(letters), &mut raw);
    raw.into_iter()
        .map(|c| c.into_iter().map(|a| ratio(a as i64, k as i64)).collect())
        .collect()
}

/// The test `pi^{AB}_P` against `pi^A_P (x) pi^B_P` on the full composite.
pub fn ensemble_test(channel: &ClassicalToGPTChannel, p: &[Rational], eps: &Rational) -> Result<HypothesisTestResult> {
    let pi = build_pi_ab(channel, p)?;
    dht(&pi.as_state()?, &pi.product_of_marginals()?, eps)
}

/// `beta*` of [`ensemble_test`], computed on the letters with positive
/// weight only. Blocks of zero-weight letters vanish from both states, so
/// they never change the optimum.
pub fn ensemble_beta(channel: &ClassicalToGPTChannel, p: &[Rational], eps: &Rational) -> Result<Rational> {
    check_distribution(p, channel.letters())?;
    let support: Vec<usize> = (0..p.len()).filter(|&x| p[x].is_positive()).collect();
    if support.len() == p.len() {
        return Ok(ensemble_test(channel, p, eps)?.beta_star);
    }
    let sub = ClassicalToGPTChannel::from_states(
        channel.name(),
        support.iter().map(|&x| channel.alphabet()[x].clone()).collect(),
        support.iter().map(|&x| channel.output(x).clone()).collect(),
    )?;
    let q: Vec<Rational> = support.iter().map(|&x| p[x].clone()).collect();
    Ok(ensemble_test(&sub, &q, eps)?.beta_star)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Point {
    pub distribution: Vec<Rational>,
    pub beta: Rational,
    /// `-log2 beta`.
    pub bits: f64,
}

#[derive(Clone, Debug)]
pub struct Theorem1Bound {
    pub epsilon: Rational,
    /// Supplied distributions first, then the grid, duplicates removed.
    pub points: Vec<Theorem1Point>,
    /// Index of the smallest beta (largest bound); first on ties.
    pub best: usize,
}

impl Theorem1Bound {
    pub fn best_point(&self) -> &Theorem1Point {
        &self.points[self.best]
    }

    pub fn bits(&self) -> f64 {
        self.best_point().bits
    }
}

/// Evaluates the converse quantity `-log2 beta*(pi^{AB}_P || pi^A_P (x) pi^B_P)`
/// at each supplied distribution and on the denominator-`k` simplex grid.
pub fn theorem1_upper_bound(
    channel: &ClassicalToGPTChannel,
    eps: &Rational,
    k: usize,
    extra: &[Vec<Rational>],
) -> Result<Theorem1Bound> {
    check_epsilon(eps)?;
    if k == 0 && extra.is_empty() {
        return Err(Error::EmptyGrid("no grid and no supplied distribution".into()));
    }
    let mut dists: Vec<Vec<Rational>> = Vec::new();
    for p in extra.iter().cloned().chain(simplex_grid(channel.letters(), k)) {
        if !dists.contains(&p) {
            dists.push(p);
        }
    }
    let points = dists
        .into_par_iter()
        .map(|p| {
            let beta = ensemble_beta(channel, &p, eps)?;
            Ok(Theorem1Point {
                bits: neg_log2(&beta),
                distribution: p,
                beta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = argmin_first(points.iter().map(|pt| &pt.beta));
    Ok(Theorem1Bound {
        epsilon: eps.clone(),
        points,
        best,
    })
}

/// `N * beta <= 1`, i.e. `log2 N <= -log2 beta`, compared exactly.
pub fn within_converse(n: usize, beta: &Rational) -> bool {
    int(n as i64) * beta <= Rational::one()
}

fn argmin_first<'a>(values: impl Iterator<Item = &'a Rational>) -> usize {
    let mut best: Option<(usize, &Rational)> = None;
    for (i, v) in values.enumerate() {
        if best.map_or(true, |(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map_or(0, |(i, _)| i)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Theorem2Params {
    pub eps_prime: Rational,
    pub s: Rational,
    pub t: Rational,
}

impl Theorem2Params {
    pub fn new(eps_prime: Rational, s: Rational, t: Rational) -> Self {
        Theorem2Params { eps_prime, s, t }
    }

    /// `0 < eps' < eps`, `s > 1`, `t > s` and `eps > s eps'`.
    pub fn is_valid_for(&self, eps: &Rational) -> bool {
        self.eps_prime.is_positive()
            && self.eps_prime < *eps
            && self.s > Rational::one()
            && self.t > self.s
            && *eps > &self.s * &self.eps_prime
    }
}

#[derive(Clone, Debug)]
pub struct Theorem2Grid {
    pub distributions: Vec<Vec<Rational>>,
    pub params: Vec<Theorem2Params>,
}

impl Theorem2Grid {
    /// `s in {11/10, 3/2, 2}`, `t in {s + 1/10, 2s, 3s}` and
    /// `eps' = i eps / (11 s)` for `i = 1..=10`.
    pub fn default_params(eps: &Rational) -> Vec<Theorem2Params> {
        let mut out = Vec::new();
        for s in [ratio(11, 10), ratio(3, 2), int(2)] {
            let ts = [&s + ratio(1, 10), &s * int(2), &s * int(3)];
            for i in 1..=10 {
                let eps_prime = eps * ratio(i, 11) / &s;
                for t in &ts {
                    let p = Theorem2Params::new(eps_prime.clone(), s.clone(), t.clone());
                    if p.is_valid_for(eps) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    pub fn default_for(channel: &ClassicalToGPTChannel, eps: &Rational, k: usize) -> Self {
        Theorem2Grid {
            distributions: simplex_grid(channel.letters(), k),
            params: Self::default_params(eps),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Point {
    pub distribution: Vec<Rational>,
    pub params: Theorem2Params,
    /// `beta*` at `eps'`.
    pub beta: Rational,
    /// `(eps - s eps') / (t beta)`; the bound in bits is `log2` of this.
    pub ratio: Rational,
    pub bits_unclipped: f64,
    /// `max(0, bits_unclipped)`.
    pub bits: f64,
}

impl Theorem2Point {
    /// `max(0, log2 ratio) <= log2 n`, compared exactly (`n >= 1`).
    pub fn below(&self, n: usize) -> bool {
        self.ratio <= int(n as i64)
    }
}

#[derive(Clone, Debug)]
pub struct Theorem2Bound {
    pub epsilon: Rational,
    pub best: Theorem2Point,
    /// Number of valid (distribution, parameter) pairs evaluated.
    pub evaluated: usize,
}

/// Maximizes `-log2 beta*_{eps'} - log2(t / (eps - s eps'))` over the grid.
pub fn theorem2_lower_bound(channel: &ClassicalToGPTChannel, eps: &Rational, grid: &Theorem2Grid) -> Result<Theorem2Bound> {
    check_epsilon(eps)?;
    for p in &grid.distributions {
        check_distribution(p, channel.letters())?;
    }
    let params: Vec<&Theorem2Params> = grid.params.iter().filter(|p| p.is_valid_for(eps)).collect();
    if params.is_empty() || grid.distributions.is_empty() {
        return Err(Error::EmptyGrid(format!(
            "no (P, eps', s, t) point is valid for eps = {}",
            crate::rational::format_rational(eps)
        )));
    }
    let mut eps_primes: Vec<&Rational> = params.iter().map(|p| &p.eps_prime).collect();
    eps_primes.sort();
    eps_primes.dedup();
    let jobs: Vec<(usize, &Rational)> = (0..grid.distributions.len())
        .flat_map(|i| eps_primes.iter().map(move |e| (i, *e)))
        .collect();
    let betas: BTreeMap<(usize, Rational), Rational> = jobs
        .par_iter()
        .map(|&(i, e)| Ok(((i, e.clone()), ensemble_beta(channel, &grid.distributions[i], e)?)))
        .collect::<Result<_>>()?;

    let mut best: Option<Theorem2Point> = None;
    let mut evaluated = 0;
    for (i, dist) in grid.distributions.iter().enumerate() {
        for p in &params {
            let beta = &betas[&(i, p.eps_prime.clone())];
            if beta.is_zero() {
                return Err(Error::Solver("type-II error vanished at a type-I level below 1".into()));
            }
            let r = (eps - &p.s * &p.eps_prime) / (&p.t * beta);
            evaluated += 1;
            if best.as_ref().map_or(true, |b| r > b.ratio) {
                let bits_unclipped = log2(&r);
                best = Some(Theorem2Point {
                    distribution: dist.clone(),
                    params: (*p).clone(),
                    beta: beta.clone(),
                    ratio: r,
                    bits_unclipped,
                    bits: bits_unclipped.max(0.0),
                });
            }
        }
    }
    Ok(Theorem2Bound {
        epsilon: eps.clone(),
        best: best.expect("nonempty grid"),
        evaluated,
    })
}
