use std::f64::consts::PI;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cone::{cone_membership, polar_consistency_check, PolarCheckReport};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::rational::{int, rank, ratio, Rational, Vector};

/// A polyhedral GPT system: the extreme rays of the state cone `K`, the
/// extreme rays of the effect cone `K*` (facet normals of `K`) and the unit
/// effect `u`.
///
/// Both ray lists are supplied explicitly and cross-checked by
/// [`validate_model`] rather than derived from one another.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeModel {
    name: String,
    dim: usize,
    primal_rays: Vec<Vector>,
    dual_rays: Vec<Vector>,
    unit: Vector,
}

impl ConeModel {
    /// Checks shapes only; see [`validate_model`] for the cone invariants.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        primal_rays: Vec<Vector>,
        dual_rays: Vec<Vector>,
        unit: Vector,
    ) -> Result<Self> {
        for v in primal_rays.iter().chain(&dual_rays).chain(std::iter::once(&unit)) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        Ok(Self::new_unchecked(name, dim, primal_rays, dual_rays, unit))
    }

    /// Skips every check, including shapes.
    pub fn new_unchecked(
        name: impl Into<String>,
        dim: usize,
        primal_rays: Vec<Vector>,
        dual_rays: Vec<Vector>,
        unit: Vector,
    ) -> Self {
        ConeModel {
            name: name.into(),
            dim,
            primal_rays,
            dual_rays,
            unit,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primal_rays(&self) -> &[Vector] {
        &self.primal_rays
    }

    pub fn dual_rays(&self) -> &[Vector] {
        &self.dual_rays
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn is_classical(&self) -> bool {
        let n = self.dim;
        let orthant = |rays: &[Vector]| {
            rays.len() == n
                && rays.iter().all(|r| {
                    r.iter().filter(|x| !x.is_zero()).count() == 1 && r.iter().all(|x| !x.is_negative())
                })
        };
        orthant(&self.primal_rays) && orthant(&self.dual_rays)
    }

    /// Probability simplex on `n` letters: `K = K* = R^n_+`, `u = (1, ..., 1)`.
    pub fn classical(n: usize) -> Self {
        let rays: Vec<Vector> = (0..n).map(|i| Vector::basis(n, i)).collect();
        ConeModel::new_unchecked(format!("classical{n}"), n, rays.clone(), rays, Vector::ones(n))
    }

    /// The square state space: states `(1, x, y)` with `|x|, |y| <= 1`.
    pub fn gbit() -> Self {
        let primal = [[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]]
            .iter()
            .map(|r| Vector::from_ints(r))
            .collect();
        let dual = [[1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1]]
            .iter()
            .map(|r| Vector::from_ints(r))
            .collect();
        ConeModel::new_unchecked("gbit", 3, primal, dual, Vector::from_ints(&[1, 0, 0]))
    }

    /// An `n`-gon state space with rational vertices `(1, x, y)` on the unit
    /// circle, close to the regular polygon. Vertex `k` sits near angle
    /// `pi/2 + 2 pi k / n`, snapped to a rational point of the circle.
    pub fn polygon(n: usize) -> Self {
        assert!(n >= 3, "polygon needs at least 3 vertices");
        let mut pts: Vec<(f64, Rational, Rational)> = (0..n)
            .map(|k| {
                let theta = PI / 2.0 + 2.0 * PI * k as f64 / n as f64;
                let (x, y) = rational_circle_point(theta);
                let angle = crate::rational::to_f64(&y).atan2(crate::rational::to_f64(&x));
                (angle, x, y)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let primal: Vec<Vector> = pts
            .iter()
            .map(|(_, x, y)| Vector(vec![int(1), x.clone(), y.clone()]))
            .collect();
        let dual = (0..n)
            .map(|k| {
                let a = &primal[k];
                let b = &primal[(k + 1) % n];
                let h = Vector(vec![
                    &a[1] * &b[2] - &a[2] * &b[1],
                    &a[2] * &b[0] - &a[0] * &b[2],
                    &a[0] * &b[1] - &a[1] * &b[0],
                ]);
                // Counter-clockwise order puts the origin on the positive side.
                let scale = h[0].clone();
                h.scale(&(int(1) / scale))
            })
            .collect();
        ConeModel::new_unchecked(format!("polygon{n}"), 3, primal, dual, Vector::from_ints(&[1, 0, 0]))
    }

    /// Library lookup: `classicalN`, `gbit`, `polygonN`, `pentagon`.
    pub fn builtin(name: &str) -> Option<Self> {
        if name == "gbit" || name == "square" {
            return Some(Self::gbit());
        }
        if name == "pentagon" {
            return Some(Self::polygon(5));
        }
        if let Some(n) = name.strip_prefix("classical").and_then(|s| s.parse::<usize>().ok()) {
            return (1..=64).contains(&n).then(|| Self::classical(n));
        }
        if let Some(n) = name.strip_prefix("polygon").and_then(|s| s.parse::<usize>().ok()) {
            return (3..=64).contains(&n).then(|| Self::polygon(n));
        }
        None
    }

    pub fn into_shared(self) -> Arc<ConeModel> {
        Arc::new(self)
    }
}

/// Stereographic parametrisation `((1 - t^2)/(1 + t^2), 2t/(1 + t^2))` with
/// `t = tan(theta/2)` rounded to a multiple of 1/100.
fn rational_circle_point(theta: f64) -> (Rational, Rational) {
    let mut th = theta.rem_euclid(2.0 * PI);
    if th > PI {
        th -= 2.0 * PI;
    }
    if (th.abs() - PI).abs() < 1e-9 {
        return (int(-1), int(0));
    }
    let t = ratio(((th / 2.0).tan() * 100.0).round() as i64, 100);
    let t2 = &t * &t;
    let den = int(1) + &t2;
    ((int(1) - &t2) / &den, (int(2) * &t) / den)
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    pub trials: usize,
    pub seed: u64,
    /// Sample-based completeness check of the dual ray list.
    pub check_polar: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            trials: 100,
            seed: 0,
            check_polar: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub dim: usize,
    pub primal_rays: usize,
    pub dual_rays: usize,
    /// Names of the checks that ran, in order; all passed.
    pub checks: Vec<&'static str>,
    pub polar: Option<PolarCheckReport>,
}

/// Checks every cone-model invariant exactly. Fails with `InvalidModel`
/// naming the first violated invariant.
pub fn validate_model(model: &ConeModel, opts: &ValidationOptions) -> Result<ValidationReport> {
    let invalid = |what: String| Err(Error::InvalidModel(what));
    let mut checks = Vec::new();
    let d = model.dim();

    if d == 0 {
        return invalid("dimension must be positive".into());
    }
    if model.primal_rays.is_empty() || model.dual_rays.is_empty() {
        return invalid("ray lists must be non-empty".into());
    }
    for (kind, rays) in [("primal", &model.primal_rays), ("dual", &model.dual_rays)] {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != d {
                return invalid(format!("{kind} ray {i} has length {} (dim {d})", r.len()));
            }
            if r.is_zero() {
                return invalid(format!("{kind} ray {i} is zero"));
            }
        }
    }
    if model.unit.len() != d {
        return invalid(format!("unit has length {} (dim {d})", model.unit.len()));
    }
    checks.push("shapes");

    for (i, h) in model.dual_rays.iter().enumerate() {
        for (j, g) in model.primal_rays.iter().enumerate() {
            if h.dot(g).is_negative() {
                return invalid(format!("dual ray {i} is negative on primal ray {j}"));
            }
        }
    }
    checks.push("dual rays nonnegative on primal rays");

    for (j, g) in model.primal_rays.iter().enumerate() {
        if !model.unit.dot(g).is_positive() {
            return invalid(format!("unit not interior: <u, primal ray {j}> is not positive"));
        }
    }
    checks.push("unit strictly positive on primal rays");

    if !cone_membership(&model.unit, &model.dual_rays)?.is_member() {
        return invalid("unit not interior: u is not in cone(dual rays)".into());
    }
    checks.push("unit in dual cone");

    if rank(&model.primal_rays) != d {
        return invalid("cone has empty interior: primal rays do not span V".into());
    }
    checks.push("full dimensional");

    if !is_pointed(&model.primal_rays)? {
        return invalid("cone is not pointed: K contains a line".into());
    }
    checks.push("pointed");

    let polar = if opts.check_polar {
        let report = polar_consistency_check(model, opts.trials, opts.seed)?;
        if !report.passed {
            let v = report.counterexample.as_ref().map(ToString::to_string).unwrap_or_default();
            return invalid(format!("dual rays do not describe the dual cone: disagreement at {v}"));
        }
        checks.push("primal/dual consistency");
        Some(report)
    } else {
        None
    };

    Ok(ValidationReport {
        model: model.name.clone(),
        dim: d,
        primal_rays: model.primal_rays.len(),
        dual_rays: model.dual_rays.len(),
        checks,
        polar,
    })
}

/// A cone generated by nonzero rays contains a line iff some nontrivial
/// nonnegative combination of the rays vanishes.
fn is_pointed(rays: &[Vector]) -> Result<bool> {
    let d = rays[0].len();
    let mut lp = LinearProgram::minimize(Vector::zeros(rays.len()));
    for i in 0..d {
        lp = lp.eq(rays.iter().map(|r| r[i].clone()).collect(), Rational::zero());
    }
    let lp = lp.eq(Vector::ones(rays.len()), int(1)).nonnegative();
    Ok(matches!(solve_lp(&lp)?, LpOutcome::Infeasible { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ValidationOptions {
        ValidationOptions {
            trials: 50,
            seed: 1,
            check_polar: true,
        }
    }

    #[test]
    fn library_models_validate() {
        for m in [
            ConeModel::classical(1),
            ConeModel::classical(2),
            ConeModel::classical(3),
            ConeModel::gbit(),
            ConeModel::polygon(3),
            ConeModel::polygon(5),
            ConeModel::polygon(6),
            ConeModel::polygon(8),
        ] {
            let report = validate_model(&m, &quick()).unwrap_or_else(|e| panic!("{}: {e}", m.name()));
            assert_eq!(report.dim, m.dim());
        }
    }

    #[test]
    fn polygon_vertices_lie_on_circle() {
        let p = ConeModel::polygon(7);
        for r in p.primal_rays() {
            assert_eq!(&r[1] * &r[1] + &r[2] * &r[2], int(1));
        }
        assert_eq!(p.dual_rays().len(), 7);
    }

    #[test]
    fn orthogonal_unit_is_rejected() {
        let rays = vec![Vector::from_ints(&[1, 0]), Vector::from_ints(&[0, 1])];
        let m = ConeModel::new("bad", 2, rays.clone(), rays, Vector::from_ints(&[1, 0])).unwrap();
        let err = validate_model(&m, &quick()).unwrap_err();
        assert!(err.to_string().contains("unit not interior"), "{err}");
    }

    #[test]
    fn non_pointed_cone_is_rejected() {
        let primal = vec![
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[-1, 0]),
            Vector::from_ints(&[0, 1]),
        ];
        let dual = vec![Vector::from_ints(&[0, 1])];
        let m = ConeModel::new("line", 2, primal, dual, Vector::from_ints(&[0, 1])).unwrap();
        // u vanishes on the line, so the unit check fires before pointedness.
        assert!(validate_model(&m, &quick()).is_err());
        assert!(!is_pointed(m.primal_rays()).unwrap());
    }

    #[test]
    fn wrong_facet_sign_is_named() {
        let g = ConeModel::gbit();
        let mut dual = g.dual_rays().to_vec();
        dual[0] = Vector::from_ints(&[1, 2, 0]);
        let m = ConeModel::new("bent", 3, g.primal_rays().to_vec(), dual, g.unit().clone()).unwrap();
        let err = validate_model(&m, &quick()).unwrap_err();
        assert!(err.to_string().contains("dual ray 0 is negative"), "{err}");
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            ConeModel::new("x", 2, vec![Vector::from_ints(&[1])], vec![], Vector::ones(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn builtin_names() {
        assert_eq!(ConeModel::builtin("gbit"), Some(ConeModel::gbit()));
        assert_eq!(ConeModel::builtin("classical3"), Some(ConeModel::classical(3)));
        assert_eq!(ConeModel::builtin("pentagon"), Some(ConeModel::polygon(5)));
        assert_eq!(ConeModel::builtin("nonsense"), None);
        assert!(ConeModel::classical(3).is_classical());
        assert!(!ConeModel::gbit().is_classical());
    }
}
