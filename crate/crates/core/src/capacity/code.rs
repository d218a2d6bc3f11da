use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gpt::{same_model, ClassicalToGPTChannel, Measurement};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::rational::{int, log2, ratio, Rational, Vector};

/// An encoder `g: {0..N-1} -> X` together with an `N`-outcome decoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    encoder: Vec<usize>,
    decoder: Measurement,
}

impl Code {
    pub fn new(channel: &ClassicalToGPTChannel, encoder: Vec<usize>, decoder: Measurement) -> Result<Self> {
        check_encoder(channel, &encoder)?;
        same_model(channel.model(), decoder.model())?;
        if decoder.outcomes() != encoder.len() {
            return Err(Error::DimensionMismatch {
                expected: encoder.len(),
                found: decoder.outcomes(),
            });
        }
        Ok(Code { encoder, decoder })
    }

    /// Message count `N`.
    pub fn n(&self) -> usize {
        self.encoder.len()
    }

    pub fn encoder(&self) -> &[usize] {
        &self.encoder
    }

    pub fn decoder(&self) -> &Measurement {
        &self.decoder
    }
}

fn check_encoder(channel: &ClassicalToGPTChannel, encoder: &[usize]) -> Result<()> {
    if encoder.is_empty() {
        return Err(Error::InvalidArgument("a code needs at least one message".into()));
    }
    if let Some(&x) = encoder.iter().find(|&&x| x >= channel.letters()) {
        return Err(Error::IndexOutOfRange {
            index: x,
            len: channel.letters(),
        });
    }
    Ok(())
}

/// `<u - m_j, sigma_{g(j)}>`.
pub fn message_error(code: &Code, channel: &ClassicalToGPTChannel, j: usize) -> Result<Rational> {
    if j >= code.n() {
        return Err(Error::IndexOutOfRange { index: j, len: code.n() });
    }
    let sigma = channel.output(code.encoder[j]);
    Ok(Rational::one() - code.decoder.effects()[j].coords().dot(sigma.coords()))
}

/// Error averaged over uniformly distributed messages.
pub fn average_error(code: &Code, channel: &ClassicalToGPTChannel) -> Rational {
    let total = (0..code.n())
        .map(|j| message_error(code, channel, j).expect("index in range"))
        .fold(Rational::zero(), |a, b| a + b);
    total / int(code.n() as i64)
}

/// Maximal total success `sum_j <m_j, sigma_{letters[j]}>` over measurements
/// indexed by `letters` (repeats allowed), with an optimal decoder.
pub fn decoder_lp(channel: &ClassicalToGPTChannel, letters: &[usize]) -> Result<(Vec<Vector>, Rational)> {
    check_encoder(channel, letters)?;
    let model = channel.model();
    let d = model.dim();
    let k = letters.len();
    let block = |j: usize, v: &Vector| -> Vector {
        let mut row = Vector::zeros(k * d);
        for i in 0..d {
            row[j * d + i] = v[i].clone();
        }
        row
    };
    let mut objective = Vector::zeros(k * d);
    for (j, &x) in letters.iter().enumerate() {
        objective.add_scaled(&-Rational::one(), &block(j, channel.output(x).coords()));
    }
    let mut lp = LinearProgram::minimize(objective);
    for j in 0..k {
        for g in model.primal_rays() {
            lp = lp.ge(block(j, g), Rational::zero());
        }
    }
    for i in 0..d {
        let mut row = Vector::zeros(k * d);
        for j in 0..k {
            row[j * d + i] = Rational::one();
        }
        lp = lp.eq(row, model.unit()[i].clone());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal { value, point } => {
            let effects = (0..k).map(|j| Vector(point.0[j * d..(j + 1) * d].to_vec())).collect();
            Ok((effects, -value))
        }
        other => Err(Error::Solver(format!("decoder LP came back {}", other.status()))),
    }
}

/// Maximum-likelihood decoding on a classical model: each output symbol goes
/// to the first letter with the largest probability for it.
fn classical_decoder(channel: &ClassicalToGPTChannel, letters: &[usize]) -> (Vec<Vector>, Rational) {
    let model = channel.model();
    let d = model.dim();
    let mut effects = vec![Vector::zeros(d); letters.len()];
    let mut success = Rational::zero();
    for g in model.primal_rays() {
        let axis = g.iter().position(|v| !v.is_zero()).expect("nonzero ray");
        let weight = |x: usize| channel.output(x).coords()[axis].clone();
        let mut best = 0;
        for j in 1..letters.len() {
            if weight(letters[j]) > weight(letters[best]) {
                best = j;
            }
        }
        let u_axis = model.unit()[axis].clone();
        success += &u_axis * weight(letters[best]);
        effects[best][axis] = u_axis;
    }
    (effects, success)
}

/// Optimal total success over the distinct letters of `letters`, with one
/// effect per distinct letter (in first-occurrence order).
fn distinct_success(channel: &ClassicalToGPTChannel, distinct: &[usize]) -> Result<(Vec<Vector>, Rational)> {
    if channel.model().is_classical() {
        Ok(classical_decoder(channel, distinct))
    } else {
        decoder_lp(channel, distinct)
    }
}

fn distinct_letters(encoder: &[usize]) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    encoder.iter().copied().filter(|x| seen.insert(*x)).collect()
}

/// Spreads per-letter effects over messages: the first message carrying a
/// letter gets its effect, later repeats get zero.
fn expand_decoder(encoder: &[usize], distinct: &[usize], effects: &[Vector], d: usize) -> Vec<Vector> {
    let mut used = BTreeSet::new();
    encoder
        .iter()
        .map(|x| {
            if used.insert(*x) {
                let k = distinct.iter().position(|y| y == x).expect("letter present");
                effects[k].clone()
            } else {
                Vector::zeros(d)
            }
        })
        .collect()
}

/// Decoder minimizing the average error for a fixed encoder, and that error.
///
/// Messages sharing a codeword are merged first: only the sum of their
/// effects enters the success probability.
pub fn optimal_decoder(channel: &ClassicalToGPTChannel, encoder: &[usize]) -> Result<(Measurement, Rational)> {
    check_encoder(channel, encoder)?;
    let distinct = distinct_letters(encoder);
    let (effects, success) = distinct_success(channel, &distinct)?;
    let decoder = Measurement::new(
        channel.model(),
        expand_decoder(encoder, &distinct, &effects, channel.model().dim()),
    )?;
    let error = Rational::one() - success / int(encoder.len() as i64);
    Ok((decoder, error))
}

/// Nondecreasing sequences of length `n` over `0..letters`, in
/// lexicographic order.
pub fn multisets(letters: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(letters: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in start..letters {
            cur.push(x);
            rec(letters, n, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(letters, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `C(letters + n - 1, n)`, saturating.
pub fn multiset_count(letters: usize, n: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c.saturating_mul(letters as u128 + i) / (i + 1);
    }
    c
}

#[derive(Clone, Debug)]
pub struct CapacityOptions {
    pub n_max: usize,
    /// Largest number of encoders enumerated for a single `N`; enumeration
    /// stops before the first `N` that exceeds it.
    pub encoder_budget: u128,
}

impl CapacityOptions {
    pub fn new(n_max: usize) -> Self {
        CapacityOptions {
            n_max,
            encoder_budget: u128::MAX,
        }
    }
}

/// Brute-force one-shot capacity over integer message counts.
#[derive(Clone, Debug)]
pub struct ExactCapacity {
    pub epsilon: Rational,
    pub n_max: usize,
    /// Minimal average error for `N = 1, 2, ...` as far as enumerated.
    pub best_errors: Vec<Rational>,
    /// Largest enumerated `N` whose minimal error is at most epsilon.
    pub n_star: usize,
    pub exact_bits: f64,
    pub witness: Code,
    /// The criterion still held at the last enumerated `N`.
    pub truncated: bool,
    /// `N` at which the encoder budget stopped enumeration, if it did.
    pub budget_stop: Option<usize>,
}

impl ExactCapacity {
    pub fn enumerated_up_to(&self) -> usize {
        self.best_errors.len()
    }
}

pub fn exact_one_shot_capacity(channel: &ClassicalToGPTChannel, eps: &Rational, n_max: usize) -> Result<ExactCapacity> {
    exact_one_shot_capacity_with(channel, eps, &CapacityOptions::new(n_max))
}

/// Enumerates all encoders up to message permutation for `N = 1..=n_max` and
/// keeps the lexicographically first optimal encoder at each `N`.
pub fn exact_one_shot_capacity_with(
    channel: &ClassicalToGPTChannel,
    eps: &Rational,
    opts: &CapacityOptions,
) -> Result<ExactCapacity> {
    crate::hypothesis::check_epsilon(eps)?;
    if opts.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let letters = channel.letters();
    let mut cache: BTreeMap<Vec<usize>, (Vec<Vector>, Rational)> = BTreeMap::new();
    let mut best_errors = Vec::new();
    let mut best_codes: Vec<Vec<usize>> = Vec::new();
    let mut budget_stop = None;

    for n in 1..=opts.n_max {
        if multiset_count(letters, n) > opts.encoder_budget {
            budget_stop = Some(n);
            break;
        }
        let encoders = multisets(letters, n);
        let supports: BTreeSet<Vec<usize>> = encoders.iter().map(|e| distinct_letters(e)).collect();
        let missing: Vec<Vec<usize>> = supports.into_iter().filter(|s| !cache.contains_key(s)).collect();
        let solved = missing
            .par_iter()
            .map(|s| distinct_success(channel, s).map(|r| (s.clone(), r)))
            .collect::<Result<Vec<_>>>()?;
        cache.extend(solved);

        let mut best: Option<(Rational, &Vec<usize>)> = None;
        for e in &encoders {
            let success = &cache[&distinct_letters(e)].1;
            let err = Rational::one() - success / int(n as i64);
            if best.as_ref().map_or(true, |(b, _)| err < *b) {
                best = Some((err, e));
            }
        }
        let (err, enc) = best.expect("at least one encoder");
        best_errors.push(err);
        best_codes.push(enc.clone());
    }
    if best_errors.is_empty() {
        return Err(Error::ScaleExceeded(format!(
            "encoder budget {} is below the {} encoders at N = 1",
            opts.encoder_budget, letters
        )));
    }

    let n_star = best_errors.iter().rposition(|e| e <= eps).map_or(1, |i| i + 1);
    let encoder = best_codes[n_star - 1].clone();
    let distinct = distinct_letters(&encoder);
    let effects = &cache[&distinct].0;
    let decoder = Measurement::new(
        channel.model(),
        expand_decoder(&encoder, &distinct, effects, channel.model().dim()),
    )?;
    let witness = Code::new(channel, encoder, decoder)?;
    debug_assert_eq!(average_error(&witness, channel), best_errors[n_star - 1]);
    let truncated = best_errors.last().is_some_and(|e| e <= eps);
    Ok(ExactCapacity {
        epsilon: eps.clone(),
        n_max: opts.n_max,
        exact_bits: log2(&int(n_star as i64)),
        n_star,
        best_errors,
        witness,
        truncated,
        budget_stop,
    })
}

/// `P(x) = |{j : g(j) = x}| / N`, the distribution used in the converse.
pub fn codebook_distribution(code: &Code, letters: usize) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); letters];
    for &x in code.encoder() {
        p[x] += ratio(1, code.n() as i64);
    }
    p
}

/// The diagonal test on the message-indexed joint distribution
/// `P(j, j') = (1/N) <m_{j'}, sigma_{g(j)}>` of a code.
#[derive(Clone, Debug)]
pub struct ConverseWitness {
    pub n: usize,
    pub epsilon: Rational,
    /// `sum_j P(j, j)`, one minus the average error.
    pub type_one_success: Rational,
    /// `sum_j P_A(j) P_B(j)`.
    pub type_two: Rational,
    pub holds: bool,
}

pub fn converse_witness(code: &Code, channel: &ClassicalToGPTChannel, eps: &Rational) -> ConverseWitness {
    let n = code.n();
    let inv = ratio(1, n as i64);
    let joint: Vec<Vec<Rational>> = code
        .encoder()
        .iter()
        .map(|&x| {
            code.decoder()
                .effects()
                .iter()
                .map(|m| &inv * m.coords().dot(channel.output(x).coords()))
                .collect()
        })
        .collect();
    let type_one_success = (0..n).fold(Rational::zero(), |acc, j| acc + &joint[j][j]);
    let p_b: Vec<Rational> = (0..n)
        .map(|jp| (0..n).fold(Rational::zero(), |acc, j| acc + &joint[j][jp]))
        .collect();
    let type_two = p_b.iter().fold(Rational::zero(), |acc, b| acc + &inv * b);
    let holds = type_one_success >= Rational::one() - eps && type_two == inv;
    ConverseWitness {
        n,
        epsilon: eps.clone(),
        type_one_success,
        type_two,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpt::{letters, ConeModel, State};

    fn constant() -> ClassicalToGPTChannel {
        let c = ConeModel::classical(2).into_shared();
        let s = State::new(&c, Vector(vec![ratio(1, 3), ratio(2, 3)])).unwrap();
        ClassicalToGPTChannel::constant(2, &s)
    }

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

    #[test]
    fn message_error_examples() {
        let id = ClassicalToGPTChannel::identity_classical(2);
        let triv = Code::new(&id, vec![1], Measurement::trivial(id.model())).unwrap();
        assert_eq!(message_error(&triv, &id, 0).unwrap(), int(0));
        assert!(matches!(message_error(&triv, &id, 1), Err(Error::IndexOutOfRange { .. })));

        let (dec, err) = optimal_decoder(&id, &[0, 1]).unwrap();
        assert_eq!(err, int(0));
        let code = Code::new(&id, vec![0, 1], dec).unwrap();
        assert_eq!(average_error(&code, &id), int(0));

        let ch = constant();
        let m = Measurement::new(ch.model(), vec![Vector(vec![int(1), ratio(1, 4)]), Vector(vec![int(0), ratio(3, 4)])]).unwrap();
        let code = Code::new(&ch, vec![0, 1], m).unwrap();
        let total = message_error(&code, &ch, 0).unwrap() + message_error(&code, &ch, 1).unwrap();
        assert_eq!(total, int(1));
        assert_eq!(average_error(&code, &ch), ratio(1, 2));
    }

    #[test]
    fn optimal_decoder_examples() {
        assert_eq!(optimal_decoder(&constant(), &[0, 1]).unwrap().1, ratio(1, 2));
        assert_eq!(optimal_decoder(&gbit_antipodal(), &[0, 1]).unwrap().1, int(0));
        assert_eq!(decoder_lp(&gbit_antipodal(), &[0, 1, 1]).unwrap().1, int(2));
    }

    #[test]
    fn classical_shortcut_matches_lp() {
        let c = ConeModel::classical(3).into_shared();
        let ch = ClassicalToGPTChannel::new(
            "noisy",
            letters(3),
            &c,
            vec![
                Vector(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)]),
                Vector(vec![ratio(1, 6), ratio(1, 2), ratio(1, 3)]),
                Vector(vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)]),
            ],
        )
        .unwrap();
        for enc in multisets(3, 3) {
            let d = distinct_letters(&enc);
            assert_eq!(classical_decoder(&ch, &d).1, decoder_lp(&ch, &enc).unwrap().1);
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        for (l, n) in [(3, 4), (2, 5), (4, 2)] {
            assert_eq!(multisets(l, n).len() as u128, multiset_count(l, n));
        }
    }

    #[test]
    fn capacity_examples() {
        let id = ClassicalToGPTChannel::identity_classical(2);
        let r = exact_one_shot_capacity(&id, &int(0), 3).unwrap();
        assert_eq!(r.n_star, 2);
        assert_eq!(r.exact_bits, 1.0);
        assert!(!r.truncated);

        let ch = constant();
        let r = exact_one_shot_capacity(&ch, &ratio(6, 10), 4).unwrap();
        assert_eq!(r.n_star, 2);
        assert_eq!(r.best_errors, vec![int(0), ratio(1, 2), ratio(2, 3), ratio(3, 4)]);
        let r = exact_one_shot_capacity(&ch, &ratio(1, 4), 4).unwrap();
        assert_eq!(r.n_star, 1);
        assert_eq!(r.exact_bits, 0.0);
    }

    #[test]
    fn truncation_and_budget() {
        let id = ClassicalToGPTChannel::identity_classical(2);
        let r = exact_one_shot_capacity(&id, &int(0), 2).unwrap();
        assert!(r.truncated);
        let opts = CapacityOptions {
            n_max: 5,
            encoder_budget: 3,
        };
        let r = exact_one_shot_capacity_with(&id, &int(0), &opts).unwrap();
        assert_eq!(r.budget_stop, Some(3));
        assert_eq!(r.enumerated_up_to(), 2);
    }

    #[test]
    fn converse_witness_with_repeated_codewords() {
        let id = ClassicalToGPTChannel::identity_classical(2);
        let r = exact_one_shot_capacity(&id, &ratio(1, 2), 6).unwrap();
        assert_eq!(r.n_star, 4);
        assert_eq!(r.witness.encoder(), &[0, 0, 0, 1]);
        assert_eq!(codebook_distribution(&r.witness, 2), vec![ratio(3, 4), ratio(1, 4)]);
        let w = converse_witness(&r.witness, &id, &ratio(1, 2));
        assert!(w.holds);
        assert_eq!(w.type_two, ratio(1, 4));
        assert_eq!(w.type_one_success, ratio(1, 2));
    }
}
