//! Independent oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls the simplex solver.
#![allow(dead_code)]

use std::sync::Arc;

use gptcap::capacity::Code;
use gptcap::gpt::{ClassicalToGPTChannel, ConeModel, Measurement, State};
use gptcap::rational::{int, ratio};
use gptcap::{Rational, Vector};
use num_traits::{One, Signed, Zero};

/// Solves the square system `rows x = rhs`, or `None` when singular.
pub fn solve_square(rows: &[Vector], rhs: &[Rational]) -> Option<Vector> {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.0.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=n {
                    let d = &f * &a[col][j];
                    a[i][j] -= d;
                }
            }
        }
    }
    Some(Vector(a.into_iter().map(|r| r[n].clone()).collect()))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Vertices of `{x : rows[i] . x >= rhs[i]}` by brute force over all
/// `dim`-subsets of tight constraints.
pub fn vertices(rows: &[Vector], rhs: &[Rational], dim: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for s in subsets(rows.len(), dim) {
        let sys: Vec<Vector> = s.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<Rational> = s.iter().map(|&i| rhs[i].clone()).collect();
        if let Some(x) = solve_square(&sys, &b) {
            let feasible = rows.iter().zip(rhs).all(|(r, b)| r.dot(&x) >= *b);
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// The test polytope `{q : 0 <= q <= u on K, <q, rho> >= 1 - eps}`.
pub fn test_polytope(rho: &State, eps: &Rational) -> (Vec<Vector>, Vec<Rational>) {
    let model = rho.model();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for g in model.primal_rays() {
        rows.push(g.clone());
        rhs.push(Rational::zero());
        rows.push(g.neg());
        rhs.push(-model.unit().dot(g));
    }
    rows.push(rho.coords().clone());
    rhs.push(Rational::one() - eps);
    (rows, rhs)
}

/// Minimum of `<q, sigma>` over the test polytope with its vertex count.
pub fn beta_by_vertices(rho: &State, sigma: &State, eps: &Rational) -> (Rational, usize) {
    let (rows, rhs) = test_polytope(rho, eps);
    let vs = vertices(&rows, &rhs, rho.model().dim());
    let best = vs.iter().map(|v| v.dot(sigma.coords())).min().expect("polytope contains u");
    (best, vs.len())
}

/// Best success of an encoder over a classical channel by trying every
/// deterministic decoder.
pub fn brute_force_success(channel: &ClassicalToGPTChannel, encoder: &[usize]) -> Rational {
    let outputs = channel.model().dim();
    let n = encoder.len();
    let total = (n as u64).pow(outputs as u32);
    let mut best = Rational::zero();
    for code in 0..total {
        let mut c = code;
        let mut success = Rational::zero();
        for y in 0..outputs {
            let j = (c % n as u64) as usize;
            c /= n as u64;
            success += &channel.output(encoder[j]).coords()[y];
        }
        best = best.max(success);
    }
    best / int(n as i64)
}

/// Average error of `code`, computed directly from effect and state vectors.
pub fn direct_error(code: &Code, channel: &ClassicalToGPTChannel) -> Rational {
    let n = code.n();
    let mut success = Rational::zero();
    for (j, &x) in code.encoder().iter().enumerate() {
        success += code.decoder().effects()[j].coords().dot(channel.output(x).coords());
    }
    Rational::one() - success / int(n as i64)
}

pub fn classical_state(model: &Arc<ConeModel>, p: &[(i64, i64)]) -> State {
    State::new(model, Vector(p.iter().map(|&(a, b)| ratio(a, b)).collect())).unwrap()
}

pub fn is_measurement(m: &Measurement) -> bool {
    let model = m.model();
    let mut sum = Vector::zeros(model.dim());
    for e in m.effects() {
        sum = sum.add(e.coords());
        if model.primal_rays().iter().any(|g| e.coords().dot(g).is_negative()) {
            return false;
        }
    }
    sum == *model.unit()
}

/// The five channels of the capacity suite.
pub fn channel_suite() -> Vec<ClassicalToGPTChannel> {
    let c2 = ConeModel::classical(2).into_shared();
    let g = ConeModel::gbit().into_shared();
    let st = |m: &Arc<ConeModel>, xs: &[(i64, i64)]| classical_state(m, xs);
    let letters = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    vec![
        ClassicalToGPTChannel::identity_classical(2),
        ClassicalToGPTChannel::from_states(
            "bsc",
            letters(2),
            vec![st(&c2, &[(3, 4), (1, 4)]), st(&c2, &[(1, 4), (3, 4)])],
        )
        .unwrap(),
        ClassicalToGPTChannel::constant(2, &st(&c2, &[(1, 2), (1, 2)])),
        ClassicalToGPTChannel::from_states(
            "gbit_antipodal",
            letters(2),
            vec![st(&g, &[(1, 1), (1, 1), (1, 1)]), st(&g, &[(1, 1), (-1, 1), (-1, 1)])],
        )
        .unwrap(),
        ClassicalToGPTChannel::from_states(
            "gbit3",
            letters(3),
            vec![
                st(&g, &[(1, 1), (1, 1), (1, 1)]),
                st(&g, &[(1, 1), (-1, 1), (1, 1)]),
                st(&g, &[(1, 1), (0, 1), (-1, 1)]),
            ],
        )
        .unwrap(),
    ]
}
