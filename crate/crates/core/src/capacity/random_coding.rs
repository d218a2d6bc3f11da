use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::capacity::bounds::{ensemble_test, Theorem2Params};
use crate::capacity::code::{average_error, Code};
use crate::capacity::lemma3::{lemma3_construct, slice_effect, ConstructionMethod, LemmaThreeInput};
use crate::error::{Error, Result};
use crate::gpt::{build_pi_ab, ClassicalToGPTChannel, Effect};
use crate::rational::{int, Rational};
use crate::sampling::rng;

/// How encoders are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncoderSampling {
    /// Every encoder in `X^N`, weighted by its probability.
    Exhaustive,
    /// `trials` encoders with i.i.d. codewords.
    Sampled { trials: usize, seed: u64 },
}

/// Largest `|X|^N` evaluated exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct RandomCodingReport {
    pub n: usize,
    pub params: Theorem2Params,
    pub exhaustive: bool,
    /// `<e, pi^{AB}>` for the optimal test `e` at `eps'`.
    pub type_one_success: Rational,
    /// `<e, pi^A (x) pi^B>`.
    pub beta: Rational,
    pub encoders: usize,
    /// Encoders whose Lemma-3 decoder came from the indicator rule.
    pub indicator_decoders: usize,
    /// Messages (over all encoders) violating the per-message bound
    /// `<u - m_j, sigma_{g(j)}> <= s <u - A_{g(j)}, sigma_{g(j)}> + t sum_{i != j} <A_{g(i)}, sigma_{g(j)}>`.
    pub per_message_violations: usize,
    /// Weighted (exhaustive) or sample mean of the average error.
    pub expected_error: Rational,
    /// The same mean of the per-encoder average of the right-hand side above.
    pub expected_direct: Rational,
    /// `s (1 - <e, pi^{AB}>) + t (N - 1) <e, pi^A (x) pi^B>`.
    pub chain_middle: Rational,
    /// `s eps' + N t <e, pi^A (x) pi^B>`.
    pub final_bound: Rational,
    pub holds: bool,
}

struct EncoderOutcome {
    error: Rational,
    direct: Rational,
    violations: usize,
    indicator: bool,
}

fn evaluate_encoder(
    channel: &ClassicalToGPTChannel,
    slices: &[Effect],
    encoder: &[usize],
    params: &Theorem2Params,
) -> Result<EncoderOutcome> {
    let family: Vec<Effect> = encoder.iter().map(|&x| slices[x].clone()).collect();
    let input = LemmaThreeInput::new(family, params.s.clone(), params.t.clone())?;
    let built = lemma3_construct(&input)?;
    let code = Code::new(channel, encoder.to_vec(), built.measurement)?;
    let n = encoder.len();
    let u = channel.model().unit();
    let mut direct_total = Rational::zero();
    let mut violations = 0;
    for j in 0..n {
        let sigma = channel.output(encoder[j]).coords();
        let own = u.sub(slices[encoder[j]].coords()).dot(sigma);
        let cross = (0..n)
            .filter(|&i| i != j)
            .fold(Rational::zero(), |acc, i| acc + slices[encoder[i]].coords().dot(sigma));
        let rhs = &params.s * own + &params.t * cross;
        let err = Rational::one() - code.decoder().effects()[j].coords().dot(sigma);
        if err > rhs {
            violations += 1;
        }
        direct_total += rhs;
    }
    Ok(EncoderOutcome {
        error: average_error(&code, channel),
        direct: direct_total / int(n as i64),
        violations,
        indicator: built.method == ConstructionMethod::Indicator,
    })
}

/// Draws an index from a rational distribution using one uniform integer
/// below the common denominator.
fn draw(rng: &mut crate::sampling::SeededRng, p: &[Rational]) -> Result<usize> {
    let lcm = p.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let l = lcm
        .to_u64()
        .ok_or_else(|| Error::InvalidDistribution("common denominator too large to sample".into()))?;
    let mut k = BigInt::from(rng.gen_range(0..l));
    for (x, w) in p.iter().enumerate() {
        let weight = w.numer() * (&lcm / w.denom());
        if k < weight {
            return Ok(x);
        }
        k -= weight;
    }
    Ok(p.len() - 1)
}

/// The random-coding argument behind the achievability bound, evaluated
/// exactly: the optimal test at `eps'` is sliced into `{A_x}`, every encoder
/// gets its Lemma-3 decoder, and the averaged error is compared with each
/// step of the chain.
pub fn random_coding_bound_check(
    channel: &ClassicalToGPTChannel,
    p: &[Rational],
    n: usize,
    params: &Theorem2Params,
    sampling: EncoderSampling,
) -> Result<RandomCodingReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(params.eps_prime > Rational::zero() && params.eps_prime < Rational::one())
        || params.s <= Rational::one()
        || params.t <= params.s
    {
        return Err(Error::InvalidArgument("need 0 < eps' < 1 and 1 < s < t".into()));
    }
    let test = ensemble_test(channel, p, &params.eps_prime)?;
    let pi = build_pi_ab(channel, p)?;
    let e = &test.optimal_q;
    let type_one_success = e.coords().dot(&pi.coords());
    let beta = test.beta_star.clone();
    let slices = (0..channel.letters())
        .map(|x| slice_effect(e, channel.model(), x))
        .collect::<Result<Vec<_>>>()?;

    let letters = channel.letters();
    let (weighted, exhaustive): (Vec<(Rational, Vec<usize>)>, bool) = match sampling {
        EncoderSampling::Exhaustive => {
            let count = (letters as u64).checked_pow(n as u32).filter(|&c| c <= EXHAUSTIVE_LIMIT);
            let count = count.ok_or_else(|| {
                Error::ScaleExceeded(format!("{letters}^{n} encoders exceed the exhaustive limit"))
            })?;
            let mut out = Vec::new();
            for idx in 0..count {
                let mut rest = idx;
                let mut enc = vec![0; n];
                for slot in enc.iter_mut().rev() {
                    *slot = (rest % letters as u64) as usize;
                    rest /= letters as u64;
                }
                let w = enc.iter().fold(Rational::one(), |acc, &x| acc * &p[x]);
                if !w.is_zero() {
                    out.push((w, enc));
                }
            }
            (out, true)
        }
        EncoderSampling::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidArgument("trials must be positive".into()));
            }
            let mut r = rng(seed);
            let w = Rational::new(BigInt::one(), BigInt::from(trials));
            let out = (0..trials)
                .map(|_| Ok((w.clone(), (0..n).map(|_| draw(&mut r, p)).collect::<Result<Vec<_>>>()?)))
                .collect::<Result<Vec<_>>>()?;
            (out, false)
        }
    };

    let outcomes = weighted
        .par_iter()
        .map(|(_, enc)| evaluate_encoder(channel, &slices, enc, params))
        .collect::<Result<Vec<_>>>()?;

    let mut expected_error = Rational::zero();
    let mut expected_direct = Rational::zero();
    let mut per_message_violations = 0;
    let mut indicator_decoders = 0;
    for ((w, _), o) in weighted.iter().zip(&outcomes) {
        expected_error += w * &o.error;
        expected_direct += w * &o.direct;
        per_message_violations += o.violations;
        indicator_decoders += o.indicator as usize;
    }
    let nn = int(n as i64);
    let chain_middle =
        &params.s * (Rational::one() - &type_one_success) + &params.t * (&nn - Rational::one()) * &beta;
    let final_bound = &params.s * &params.eps_prime + &nn * &params.t * &beta;

    let mut holds = per_message_violations == 0
        && expected_error <= expected_direct
        && chain_middle <= final_bound
        && type_one_success >= Rational::one() - &params.eps_prime;
    if exhaustive {
        holds &= expected_direct == chain_middle && expected_error <= final_bound;
    }
    Ok(RandomCodingReport {
        n,
        params: params.clone(),
        exhaustive,
        type_one_success,
        beta,
        encoders: weighted.len(),
        indicator_decoders,
        per_message_violations,
        expected_error,
        expected_direct,
        chain_middle,
        final_bound,
        holds,
    })
}
