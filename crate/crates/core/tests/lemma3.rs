use gptcap::capacity::{lemma3_construct, lemma3_verify, ConstructionMethod, LemmaThreeInput};
use gptcap::gpt::ConeModel;
use gptcap::rational::{int, ratio, Rational};
use gptcap::sampling::{random_effect, rng};
use rand::Rng;

fn params(r: &mut impl Rng) -> (Rational, Rational) {
    let s = [ratio(11, 10), ratio(3, 2), int(2), int(3)][r.gen_range(0..4)].clone();
    let t = [&s + ratio(1, 10), &s * int(2), &s * int(3)][r.gen_range(0..3)].clone();
    (s, t)
}

#[test]
fn at_most_one_nonnegative_and_verified() {
    let models = [ConeModel::classical(3), ConeModel::gbit(), ConeModel::polygon(5)].map(ConeModel::into_shared);
    let mut r = rng(2024);
    let mut indicator = 0;
    for i in 0..200 {
        let model = &models[i % 3];
        let k = r.gen_range(2..=4);
        let effects = (0..k).map(|_| random_effect(&mut r, model)).collect();
        let (s, t) = params(&mut r);
        let input = LemmaThreeInput::new(effects, s, t).unwrap();
        let built = lemma3_construct(&input).unwrap();
        assert!(built.nonnegative.len() <= 1);
        assert!(lemma3_verify(&input, &built.measurement).unwrap().holds);
        indicator += (built.method == ConstructionMethod::Indicator) as usize;
    }
    assert!(indicator > 0);
}
