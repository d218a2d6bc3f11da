mod common;

use gptcap::asymptotic::{
    gbit_pr_box, message_count_bound, min_max_gap_probe, outputs_are_states, product_channel, product_evaluation_consistent,
    product_model, rate_sweep, SweepOptions,
};
use gptcap::cone::{cone_membership, satisfies_all};
use gptcap::gpt::{ClassicalToGPTChannel, ConeModel};
use gptcap::rational::ratio;
use num_traits::{Signed, Zero};

#[test]
fn identity_bit_rate_is_one() {
    let channel = ClassicalToGPTChannel::identity_classical(2);
    let rep = rate_sweep(&channel, &gptcap::Rational::zero(), 3, &SweepOptions::default()).unwrap();
    assert_eq!(rep.rows.len(), 3);
    for row in &rep.rows {
        assert_eq!(row.n_star, 1 << row.m);
        assert_eq!(row.per_use(row.exact_bits), 1.0);
        assert!(row.sandwich_holds());
    }
    assert!(!rep.rows[0].witness_row && !rep.rows[1].witness_row);
    assert!(rep.rows[2].witness_row);
    assert_eq!(rep.rows[2].n_upper, Some(8));
}

#[test]
fn constant_channel_rate_is_zero() {
    let channel = &common::channel_suite()[2];
    let rep = rate_sweep(channel, &gptcap::Rational::zero(), 3, &SweepOptions::default()).unwrap();
    for row in &rep.rows {
        assert_eq!(row.n_star, 1);
        assert_eq!(row.exact_bits, 0.0);
        assert!(row.sandwich_holds());
    }
}

#[test]
fn count_bound_caps_exact_value() {
    for channel in common::channel_suite() {
        for eps in [ratio(1, 10), ratio(1, 2)] {
            let bound = message_count_bound(&channel, &eps).unwrap();
            let exact = gptcap::capacity::exact_one_shot_capacity(&channel, &eps, 8).unwrap();
            if let Some(b) = bound {
                assert!(exact.n_star <= b, "{}", channel.name());
            }
        }
    }
}

#[test]
fn gbit_pair_has_a_tensor_gap() {
    let g = ConeModel::gbit().into_shared();
    let rep = min_max_gap_probe(&g, 2, 300, 4).unwrap();
    assert!(rep.consistent());
    assert!(rep.gap > 0);
    assert_eq!(rep.min_outside_max, 0);
    let (v, w) = rep.first_gap.clone().unwrap();
    let pm = product_model(&g, 2).unwrap();
    assert!(pm.primal_rays().iter().all(|r| !w.dot(r).is_negative()));
    assert!(w.dot(&v) < gptcap::Rational::zero());

    let pr = gbit_pr_box();
    assert!(satisfies_all(&pr, pm.dual_rays()));
    assert!(!cone_membership(&pr, pm.primal_rays()).unwrap().is_member());
}

#[test]
fn classical_pair_has_no_gap() {
    let c = ConeModel::classical(2).into_shared();
    let rep = min_max_gap_probe(&c, 2, 300, 4).unwrap();
    assert_eq!(rep.gap, 0);
    assert!(rep.consistent());
}

#[test]
fn products_are_consistent() {
    for m in [ConeModel::classical(2), ConeModel::gbit(), ConeModel::polygon(5)] {
        assert!(product_evaluation_consistent(&m.into_shared(), 50, 8));
    }
    for channel in common::channel_suite() {
        let pc = product_channel(&channel, 2).unwrap();
        assert!(outputs_are_states(&pc));
        assert_eq!(pc.channel.letters(), channel.letters().pow(2));
    }
    let g = ConeModel::gbit().into_shared();
    assert!(matches!(product_model(&g, 4), Err(gptcap::Error::ScaleExceeded(_))));
}
