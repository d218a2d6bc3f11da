mod common;

use gptcap::capacity::{
    average_error, capacity_report, decoder_lp, multisets, optimal_decoder, random_coding_bound_check,
    theorem2_lower_bound, Code, EncoderSampling, SandwichOptions, Theorem2Grid, Theorem2Params,
};
use gptcap::gpt::{ClassicalToGPTChannel, ConeModel, State};
use gptcap::rational::{int, ratio};
use gptcap::sampling::{random_state, rng};
use gptcap::Rational;
use num_traits::{One, Zero};
use rand::Rng;

fn random_classical_channel(r: &mut impl Rng, seed: u64, letters: usize, outputs: usize) -> ClassicalToGPTChannel {
    let model = ConeModel::classical(outputs).into_shared();
    let mut sr = rng(seed ^ r.gen::<u64>());
    let states: Vec<State> = (0..letters).map(|_| random_state(&mut sr, &model)).collect();
    ClassicalToGPTChannel::from_states("random", (0..letters).map(|i| i.to_string()).collect(), states).unwrap()
}

#[test]
fn decoder_matches_deterministic_brute_force() {
    let mut r = rng(5);
    for case in 0..40 {
        let letters = r.gen_range(2..=3);
        let outputs = r.gen_range(2..=3);
        let channel = random_classical_channel(&mut r, case, letters, outputs);
        for n in 1..=3 {
            for enc in multisets(letters, n) {
                let (meas, err) = optimal_decoder(&channel, &enc).unwrap();
                assert_eq!(Rational::one() - &err, common::brute_force_success(&channel, &enc));
                let code = Code::new(&channel, enc.clone(), meas).unwrap();
                assert_eq!(average_error(&code, &channel), err);
                assert_eq!(common::direct_error(&code, &channel), err);
                let (_, lp_total) = decoder_lp(&channel, &enc).unwrap();
                assert_eq!(lp_total / int(n as i64), Rational::one() - &err);
            }
        }
    }
}

#[test]
fn gbit_decoders_are_measurements() {
    for channel in common::channel_suite().into_iter().skip(3) {
        for n in 1..=3 {
            for enc in multisets(channel.letters(), n) {
                let (meas, err) = optimal_decoder(&channel, &enc).unwrap();
                assert!(common::is_measurement(&meas));
                let code = Code::new(&channel, enc, meas).unwrap();
                assert_eq!(common::direct_error(&code, &channel), err);
            }
        }
    }
}

#[test]
fn sandwich_and_converse_witness_on_suite() {
    for channel in common::channel_suite() {
        for eps in [ratio(1, 10), ratio(3, 10), ratio(1, 2)] {
            let rep = capacity_report(&channel, &eps, &SandwichOptions::new(8)).unwrap();
            assert!(!rep.exact.truncated, "{} at {eps}", channel.name());
            assert!(rep.sandwich_holds(), "{} at {eps}", channel.name());
            let errs = &rep.exact.best_errors;
            assert!(errs.windows(2).all(|w| w[0] <= w[1]));
            assert!(rep.converse.holds);
            assert_eq!(rep.converse.type_two, ratio(1, rep.exact.n_star as i64));
            assert!(rep.converse.type_one_success >= Rational::one() - &eps);
            assert!(rep.lower_bound_bits() <= rep.exact_bits() + 1e-12);
            assert!(rep.exact_bits() <= rep.upper_bound_bits() + 1e-12);
        }
    }
}

#[test]
fn known_capacities() {
    let suite = common::channel_suite();
    let n_star = |c: &ClassicalToGPTChannel, eps: Rational| {
        capacity_report(c, &eps, &SandwichOptions::new(8)).unwrap().exact.n_star
    };
    // identity bit: N messages succeed with probability 2/N
    assert_eq!(n_star(&suite[0], ratio(1, 10)), 2);
    assert_eq!(n_star(&suite[0], ratio(1, 2)), 4);
    // constant channel: only the guess 1/N
    assert_eq!(n_star(&suite[2], ratio(1, 10)), 1);
    assert_eq!(n_star(&suite[2], ratio(1, 2)), 2);
    // antipodal gbit states are perfectly distinguishable, like the bit
    assert_eq!(n_star(&suite[3], ratio(3, 10)), n_star(&suite[0], ratio(3, 10)));
}

#[test]
fn random_coding_on_identity_bit() {
    let channel = ClassicalToGPTChannel::identity_classical(2);
    let p = vec![ratio(1, 2), ratio(1, 2)];
    let params = Theorem2Params::new(ratio(1, 10), int(2), int(3));
    let rep = random_coding_bound_check(&channel, &p, 2, &params, EncoderSampling::Exhaustive).unwrap();
    assert_eq!(rep.encoders, 4);
    assert_eq!(rep.beta, ratio(9, 20));
    assert_eq!(rep.final_bound, ratio(29, 10));
    assert_eq!(rep.expected_direct, rep.chain_middle);
    assert_eq!(rep.per_message_violations, 0);
    assert!(rep.holds);

    let grid = [
        (ratio(1, 10), ratio(3, 2), int(2)),
        (ratio(1, 20), int(2), int(3)),
        (ratio(1, 5), ratio(11, 10), ratio(6, 5)),
        (ratio(1, 10), int(3), int(9)),
        (ratio(1, 4), ratio(3, 2), int(3)),
        (ratio(1, 100), int(2), int(4)),
    ];
    for (e, s, t) in grid {
        let params = Theorem2Params::new(e, s, t);
        for n in [2, 4] {
            let rep = random_coding_bound_check(&channel, &p, n, &params, EncoderSampling::Exhaustive).unwrap();
            assert_eq!(rep.encoders, 1 << n);
            assert!(rep.holds);
            assert!(rep.expected_error <= rep.final_bound);
        }
    }
}

#[test]
fn sampled_random_coding_is_reproducible() {
    let channel = &common::channel_suite()[4];
    let p = vec![ratio(1, 3); 3];
    let params = Theorem2Params::new(ratio(1, 10), ratio(3, 2), int(3));
    let sampling = EncoderSampling::Sampled { trials: 25, seed: 99 };
    let a = random_coding_bound_check(channel, &p, 3, &params, sampling).unwrap();
    let b = random_coding_bound_check(channel, &p, 3, &params, sampling).unwrap();
    assert_eq!(a.expected_error, b.expected_error);
    assert_eq!(a.per_message_violations, 0);
    assert_eq!(a.encoders, 25);
}

#[test]
fn theorem2_identity_bit_value() {
    let channel = ClassicalToGPTChannel::identity_classical(2);
    let grid = Theorem2Grid {
        distributions: vec![vec![ratio(1, 2), ratio(1, 2)]],
        params: vec![Theorem2Params::new(ratio(1, 10), int(2), int(3))],
    };
    let b = theorem2_lower_bound(&channel, &ratio(3, 10), &grid).unwrap();
    assert_eq!(b.best.beta, ratio(9, 20));
    // (3/10 - 2/10) / (3 * 9/20)
    assert_eq!(b.best.ratio, ratio(2, 27));
    assert_eq!(b.best.bits, 0.0);
    let empty = theorem2_lower_bound(&channel, &Rational::zero(), &Theorem2Grid::default_for(&channel, &Rational::zero(), 2));
    assert!(matches!(empty, Err(gptcap::Error::EmptyGrid(_))));
}
