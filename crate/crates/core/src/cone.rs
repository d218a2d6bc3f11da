//! Conic membership with exact certificates, and the primal/dual
//! consistency sampler for cone models.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gpt::ConeModel;
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::rational::{Rational, Vector};
use crate::sampling::{self, SeededRng};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `v = sum_i coefficients[i] * rays[i]` with nonnegative coefficients.
    Member { coefficients: Vec<Rational> },
    /// `<separator, ray> >= 0` for every ray and `<separator, v> < 0`.
    Outside { separator: Vector },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn verify(&self, v: &Vector, rays: &[Vector]) -> bool {
        match self {
            Membership::Member { coefficients } => {
                coefficients.len() == rays.len()
                    && coefficients.iter().all(|c| !c.is_negative())
                    && {
                        let mut acc = Vector::zeros(v.len());
                        for (c, r) in coefficients.iter().zip(rays) {
                            acc.add_scaled(c, r);
                        }
                        acc == *v
                    }
            }
            Membership::Outside { separator } => {
                rays.iter().all(|r| !separator.dot(r).is_negative()) && separator.dot(v).is_negative()
            }
        }
    }
}

/// Decides `v in cone(rays)` exactly.
pub fn cone_membership(v: &Vector, rays: &[Vector]) -> Result<Membership> {
    let d = v.len();
    if let Some(bad) = rays.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    if rays.is_empty() || d == 0 {
        return Ok(if v.is_zero() {
            Membership::Member {
                coefficients: vec![Rational::zero(); rays.len()],
            }
        } else {
            Membership::Outside { separator: v.neg() }
        });
    }
    // variables: one weight per ray; rows: coordinates.
    let mut lp = LinearProgram::minimize(Vector::zeros(rays.len()));
    for i in 0..d {
        let row: Vector = rays.iter().map(|r| r[i].clone()).collect();
        lp = lp.eq(row, v[i].clone());
    }
    let lp = lp.nonnegative();
    match solve_lp(&lp)? {
        LpOutcome::Optimal { point, .. } => Ok(Membership::Member {
            coefficients: point.0,
        }),
        LpOutcome::Infeasible { certificate } => {
            // The first d multipliers belong to the coordinate equalities; the
            // rest are nonnegative weights on the `lambda >= 0` rows, so
            // <-y, ray> = z_r >= 0 and <-y, v> = -1.
            let y: Vector = certificate[..d].iter().cloned().collect();
            Ok(Membership::Outside { separator: y.neg() })
        }
        LpOutcome::Unbounded { .. } => Err(Error::Solver("membership LP has zero objective".into())),
    }
}

/// `<h, v> >= 0` for every `h` in `normals`.
pub fn satisfies_all(v: &Vector, normals: &[Vector]) -> bool {
    normals.iter().all(|h| !h.dot(v).is_negative())
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarCheckReport {
    pub model: String,
    pub trials: usize,
    pub seed: u64,
    pub members: usize,
    pub passed: bool,
    /// First vector on which the two descriptions disagree.
    pub counterexample: Option<Vector>,
    /// Whether the counterexample lies in cone(primal rays).
    pub counterexample_in_primal: Option<bool>,
}

/// Samples `trials` rational vectors and checks that membership in
/// `cone(primal_rays)` agrees with nonnegativity against every dual ray.
pub fn polar_consistency_check(model: &ConeModel, trials: usize, seed: u64) -> Result<PolarCheckReport> {
    let mut rng = sampling::rng(seed);
    let mut members = 0;
    let mut counterexample = None;
    let mut in_primal = None;
    for _ in 0..trials {
        let v = probe_vector(&mut rng, model);
        let primal = cone_membership(&v, model.primal_rays())?.is_member();
        let dual = satisfies_all(&v, model.dual_rays());
        members += usize::from(primal);
        if primal != dual && counterexample.is_none() {
            counterexample = Some(v);
            in_primal = Some(primal);
        }
    }
    Ok(PolarCheckReport {
        model: model.name().to_string(),
        trials,
        seed,
        members,
        passed: counterexample.is_none(),
        counterexample,
        counterexample_in_primal: in_primal,
    })
}

/// Half the probes are uniform small rationals, half are random states
/// pushed by a small perturbation, so both sides of each facet get hit.
fn probe_vector(rng: &mut SeededRng, model: &ConeModel) -> Vector {
    if rng.gen_bool(0.5) {
        sampling::small_rational_vector(rng, model.dim())
    } else {
        let state = sampling::random_state_coords(rng, model);
        let noise = sampling::small_rational_vector(rng, model.dim());
        let k = sampling::small_rational(rng).abs() / Rational::from_integer(10.into());
        let mut v = state;
        v.add_scaled(&k, &noise);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn ray_is_member_with_unit_coefficient() {
        let rays = ConeModel::gbit().primal_rays().to_vec();
        let m = cone_membership(&rays[2], &rays).unwrap();
        assert!(m.verify(&rays[2], &rays));
        let Membership::Member { coefficients } = m else { panic!() };
        // Rays of the square are not linearly independent, so check the
        // combination rather than the exact coefficients.
        assert!(coefficients.iter().all(|c| !c.is_negative()));
    }

    #[test]
    fn listed_ray_of_simplicial_cone() {
        let model = ConeModel::classical(3);
        let rays = model.primal_rays();
        let m = cone_membership(&rays[1], rays).unwrap();
        assert_eq!(
            m,
            Membership::Member {
                coefficients: vec![int(0), int(1), int(0)]
            }
        );
    }

    #[test]
    fn zero_vector_is_member() {
        let model = ConeModel::gbit();
        let m = cone_membership(&Vector::zeros(3), model.primal_rays()).unwrap();
        assert_eq!(
            m,
            Membership::Member {
                coefficients: vec![int(0); 4]
            }
        );
    }

    #[test]
    fn gbit_outside_vector_gets_separator() {
        let model = ConeModel::gbit();
        let v = Vector::from_ints(&[1, 2, 0]);
        let m = cone_membership(&v, model.primal_rays()).unwrap();
        assert!(!m.is_member());
        assert!(m.verify(&v, model.primal_rays()));
        // and the listed facet (1,-1,0) is violated too
        assert!(Vector::from_ints(&[1, -1, 0]).dot(&v).is_negative());
    }

    #[test]
    fn dimension_mismatch() {
        let rays = vec![Vector::from_ints(&[1, 0])];
        assert!(matches!(
            cone_membership(&Vector::from_ints(&[1]), &rays),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn polar_check_passes_on_library_models() {
        for model in [ConeModel::classical(2), ConeModel::gbit(), ConeModel::polygon(5)] {
            let report = polar_consistency_check(&model, 100, 7).unwrap();
            assert!(report.passed, "{}: {:?}", model.name(), report.counterexample);
        }
    }

    #[test]
    fn polar_check_catches_deleted_facet() {
        let gbit = ConeModel::gbit();
        let mut duals = gbit.dual_rays().to_vec();
        duals.remove(0);
        let broken = ConeModel::new_unchecked("gbit-minus-facet", 3, gbit.primal_rays().to_vec(), duals, gbit.unit().clone());
        let report = polar_consistency_check(&broken, 100, 7).unwrap();
        assert!(!report.passed);
        let v = report.counterexample.unwrap();
        // It satisfies the remaining facets but violates the deleted one.
        assert!(satisfies_all(&v, broken.dual_rays()));
        assert!(gbit.dual_rays()[0].dot(&v).is_negative());
        assert_eq!(report.counterexample_in_primal, Some(false));
    }
}
