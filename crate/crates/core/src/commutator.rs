//! Difference-quotient kernels (b(x) - b(y)) (x - y)^{-1} and their
//! behavior near the diagonal: exactness for affine coefficients,
//! direction-dependent diagonal extensions, convergence rates along
//! shrinking sequences, and a concrete noncommutativity witness showing
//! why the side of the multiplication matters for n >= 2.

use crate::algebra::{embed_vector, vector_inverse, AlgebraError, Multivector, VectorRn};
use crate::jets::LinearMap;
use crate::rng;
use crate::Side;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommutatorError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("quotient is singular on the diagonal: x == y")]
    DiagonalPoint,
    #[error("coefficient `{0}` has no attached differential family; no diagonal extension is defined")]
    NoDifferentialFamily(String),
    #[error("{0}")]
    Bad(String),
}

/// Clifford-valued coefficient fields b(x) with closed-form evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CoefficientField {
    /// b(x) = c
    Constant { value: Multivector },
    /// b(x) = alpha + beta ⊗ x̂ (beta multiplied on the left of the point)
    AffineLeft { alpha: Multivector, beta: Multivector },
    /// b(x) = alpha + x̂ ⊗ beta
    AffineRight { alpha: Multivector, beta: Multivector },
    /// b(x) = x_axis (scalar)
    CoordinateScalar { axis: usize },
    /// b(x) = |x|^2 (scalar)
    RadiusSquaredScalar,
    /// b(x) = x_axis · x̂ (vector-valued, genuinely nonlinear)
    CoordTimesVector { axis: usize },
}

impl CoefficientField {
    pub fn name(&self) -> String {
        match self {
            CoefficientField::Constant { .. } => "constant".into(),
            CoefficientField::AffineLeft { .. } => "affine-left".into(),
            CoefficientField::AffineRight { .. } => "affine-right".into(),
            CoefficientField::CoordinateScalar { axis } => format!("coordinate-{}", axis + 1),
            CoefficientField::RadiusSquaredScalar => "radius-squared".into(),
            CoefficientField::CoordTimesVector { axis } => {
                format!("coordinate-{}-times-position", axis + 1)
            }
        }
    }

    pub fn value(&self, n: usize, x: &VectorRn) -> Multivector {
        match self {
            CoefficientField::Constant { value } => value.clone(),
            CoefficientField::AffineLeft { alpha, beta } => {
                let mut out = alpha.clone();
                out.mul_add_assign(beta, &embed_vector(x), 1.0);
                out
            }
            CoefficientField::AffineRight { alpha, beta } => {
                let mut out = alpha.clone();
                out.mul_add_assign(&embed_vector(x), beta, 1.0);
                out
            }
            CoefficientField::CoordinateScalar { axis } => Multivector::scalar(n, x[*axis]),
            CoefficientField::RadiusSquaredScalar => Multivector::scalar(n, x.norm_sq()),
            CoefficientField::CoordTimesVector { axis } => embed_vector(x).scale(x[*axis]),
        }
    }

    /// The first-order family B(x) the difference quotient converges to
    /// along the approach direction attached to the coefficient, when
    /// one exists.
    ///
    /// For affine b with left multiplication the quotient equals beta
    /// everywhere, so B is constant. For b(x) = x_axis x̂, approaching
    /// along e_axis gives B(x) = x_axis · 1 - x̂ ⊗ ê_axis.
    pub fn diagonal_extension(
        &self,
        n: usize,
        x: &VectorRn,
    ) -> Result<Multivector, CommutatorError> {
        match self {
            CoefficientField::Constant { value } => {
                let _ = value;
                Ok(Multivector::zero(n))
            }
            CoefficientField::AffineLeft { beta, .. } => Ok(beta.clone()),
            CoefficientField::CoordTimesVector { axis } => {
                let mut out = Multivector::scalar(n, x[*axis]);
                let e_axis = Multivector::basis_vector(n, *axis);
                out.mul_add_assign(&embed_vector(x), &e_axis, -1.0);
                Ok(out)
            }
            _ => Err(CommutatorError::NoDifferentialFamily(self.name())),
        }
    }

    /// Direction along which `diagonal_extension` is the limit of the
    /// quotient. `None` means every direction works.
    pub fn approach_direction(&self, n: usize) -> Option<VectorRn> {
        match self {
            CoefficientField::CoordTimesVector { axis } => Some(VectorRn::new(
                (0..n).map(|j| if j == *axis { 1.0 } else { 0.0 }).collect(),
            )),
            _ => None,
        }
    }
}

/// (b(x) - b(y)) ⊗ (x - y)^{-1}
pub fn left_quotient(
    b: &CoefficientField,
    n: usize,
    x: &VectorRn,
    y: &VectorRn,
) -> Result<Multivector, CommutatorError> {
    let d = x.sub(y);
    if d.norm() == 0.0 {
        return Err(CommutatorError::DiagonalPoint);
    }
    let inv = vector_inverse(&d)?;
    let diff = &b.value(n, x) - &b.value(n, y);
    let mut out = Multivector::zero(n);
    out.mul_add_assign(&diff, &inv, 1.0);
    Ok(out)
}

/// (x - y)^{-1} ⊗ (b(x) - b(y))
pub fn right_quotient(
    b: &CoefficientField,
    n: usize,
    x: &VectorRn,
    y: &VectorRn,
) -> Result<Multivector, CommutatorError> {
    let d = x.sub(y);
    if d.norm() == 0.0 {
        return Err(CommutatorError::DiagonalPoint);
    }
    let inv = vector_inverse(&d)?;
    let diff = &b.value(n, x) - &b.value(n, y);
    let mut out = Multivector::zero(n);
    out.mul_add_assign(&inv, &diff, 1.0);
    Ok(out)
}

pub fn quotient(
    b: &CoefficientField,
    n: usize,
    x: &VectorRn,
    y: &VectorRn,
    side: Side,
) -> Result<Multivector, CommutatorError> {
    match side {
        Side::Left => left_quotient(b, n, x, y),
        Side::Right => right_quotient(b, n, x, y),
    }
}

/// One step of a diagonal-convergence experiment: the deviation of the
/// quotient from the attached extension at separation t.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub t: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub steps: Vec<ConvergenceStep>,
    /// Log2-regressed decay rate of the deviation as t halves.
    pub estimated_rate: f64,
    /// Max ratio deviation(t/2)/deviation(t); <= ~0.5 for first-order
    /// coefficients.
    pub max_halving_ratio: f64,
}

/// Approaches the diagonal at x along the coefficient's attached
/// direction with separations t0 / 2^k and compares the quotient to the
/// diagonal extension.
pub fn diagonal_convergence(
    b: &CoefficientField,
    n: usize,
    x: &VectorRn,
    t0: f64,
    halvings: usize,
) -> Result<ConvergenceReport, CommutatorError> {
    if !(t0 > 0.0) || halvings < 2 {
        return Err(CommutatorError::Bad(format!(
            "need t0 > 0 and at least 2 halvings, got t0={t0}, halvings={halvings}"
        )));
    }
    let extension = b.diagonal_extension(n, x)?;
    let dir = b
        .approach_direction(n)
        .unwrap_or_else(|| VectorRn::new((0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect()));
    let mut steps = Vec::with_capacity(halvings + 1);
    for k in 0..=halvings {
        let t = t0 * 0.5f64.powi(k as i32);
        let y = x.sub(&dir.scale(t));
        let q = left_quotient(b, n, x, &y)?;
        steps.push(ConvergenceStep { t, deviation: (&q - &extension).norm_inf() });
    }
    // least-squares slope of log2(deviation) against k, over steps with
    // deviation above noise
    let usable: Vec<(f64, f64)> = steps
        .iter()
        .enumerate()
        .filter(|(_, s)| s.deviation > 1e-14)
        .map(|(k, s)| (k as f64, s.deviation.log2()))
        .collect();
    let estimated_rate = if usable.len() >= 2 {
        let m = usable.len() as f64;
        let sx: f64 = usable.iter().map(|(k, _)| k).sum();
        let sy: f64 = usable.iter().map(|(_, v)| v).sum();
        let sxx: f64 = usable.iter().map(|(k, _)| k * k).sum();
        let sxy: f64 = usable.iter().map(|(k, v)| k * v).sum();
        -(m * sxy - sx * sy) / (m * sxx - sx * sx)
    } else {
        f64::NAN
    };
    let mut max_ratio = 0.0f64;
    for w in steps.windows(2) {
        if w[0].deviation > 1e-14 {
            max_ratio = max_ratio.max(w[1].deviation / w[0].deviation);
        }
    }
    Ok(ConvergenceReport { steps, estimated_rate, max_halving_ratio: max_ratio })
}

/// Concrete demonstration that the Clifford product's noncommutativity
/// is visible in the quotient kernel: for b(x) = alpha + x̂ beta the
/// LEFT quotient is (x̂ - ŷ) beta (x - y)^{-1}, which is not the
/// constant beta unless beta commutes with all vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub x: VectorRn,
    pub y: VectorRn,
    pub quotient: Multivector,
    pub expected_if_commutative: Multivector,
    pub deviation: f64,
}

/// Searches seeded random pairs for a witness. Returns `None` when no
/// pair deviates (e.g. n = 1, or beta scalar), which is itself the
/// expected outcome in the commutative cases.
pub fn noncommutativity_witness(
    alpha: &Multivector,
    beta: &Multivector,
    trials: usize,
    seed: u64,
) -> Result<Option<Witness>, CommutatorError> {
    let n = alpha.dim();
    if beta.dim() != n {
        return Err(CommutatorError::Algebra(AlgebraError::DimensionMismatch(n, beta.dim())));
    }
    let b = CoefficientField::AffineRight { alpha: alpha.clone(), beta: beta.clone() };
    let mut best: Option<Witness> = None;
    for i in 0..trials {
        let mut r = rng::stream(seed, i as u64);
        let x = rng::uniform_point(&mut r, n, -1.0, 1.0);
        let y = rng::uniform_point(&mut r, n, -1.0, 1.0);
        if x.sub(&y).norm() < 1e-6 {
            continue;
        }
        let q = left_quotient(&b, n, &x, &y)?;
        let deviation = (&q - beta).norm_inf();
        if deviation > 1e-6 && best.as_ref().map_or(true, |w| deviation > w.deviation) {
            best = Some(Witness {
                x: x.clone(),
                y: y.clone(),
                quotient: q,
                expected_if_commutative: beta.clone(),
                deviation,
            });
        }
    }
    Ok(best)
}

/// Compatibility defect of the quotient against a candidate family of
/// linear maps x ↦ B_x: max over sampled pairs of
/// |quotient(x, y) - B_x| at given separation.
pub fn family_defect_at(
    b: &CoefficientField,
    family: &dyn Fn(&VectorRn) -> LinearMap,
    n: usize,
    x: &VectorRn,
    separation: f64,
) -> Result<f64, CommutatorError> {
    let dir = b
        .approach_direction(n)
        .unwrap_or_else(|| VectorRn::new((0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect()));
    let y = x.sub(&dir.scale(separation));
    let q = left_quotient(b, n, x, &y)?;
    let bx = family(x).apply(&dir);
    Ok((&q - &bx).norm_inf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_left_quotient_is_exactly_beta() {
        let mut r = rng::stream(31, 0);
        for n in 1..=4usize {
            for _ in 0..200 {
                let alpha = rng::uniform_multivector(&mut r, n);
                let beta = rng::uniform_multivector(&mut r, n);
                let b = CoefficientField::AffineLeft { alpha, beta: beta.clone() };
                let x = rng::uniform_point(&mut r, n, -1.0, 1.0);
                let mut y = rng::uniform_point(&mut r, n, -1.0, 1.0);
                if x.sub(&y).norm() < 1e-3 {
                    y = y.add(&VectorRn::new(vec![0.5; n]));
                }
                let q = left_quotient(&b, n, &x, &y).unwrap();
                // beta (x̂ - ŷ) (x - y)^{-1} = beta exactly up to rounding;
                // the scale carries the cancellation conditioning of
                // b(x) - b(y) at small separations
                let sep = x.sub(&y).norm();
                let scale = beta.norm_l1() * (1.0 + (x.norm() + y.norm()) / sep);
                assert!(
                    (&q - &beta).norm_inf() <= 8.0 * f64::EPSILON * scale,
                    "affine quotient deviates at n={n}: {}",
                    (&q - &beta).norm_inf()
                );
            }
        }
    }

    #[test]
    fn scalar_coefficient_left_right_agree() {
        let mut r = rng::stream(32, 0);
        for n in 1..=3usize {
            for b in [
                CoefficientField::CoordinateScalar { axis: 0 },
                CoefficientField::RadiusSquaredScalar,
            ] {
                for _ in 0..100 {
                    let x = rng::uniform_point(&mut r, n, -1.0, 1.0);
                    let y = rng::uniform_point(&mut r, n, -1.0, 1.0);
                    if x.sub(&y).norm() < 1e-3 {
                        continue;
                    }
                    let l = left_quotient(&b, n, &x, &y).unwrap();
                    let rq = right_quotient(&b, n, &x, &y).unwrap();
                    // scalars commute with everything
                    assert!(
                        (&l - &rq).norm_inf() <= 8.0 * f64::EPSILON * l.norm_inf().max(1.0),
                        "scalar coefficient sides disagree at n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn diagonal_is_rejected() {
        let b = CoefficientField::CoordinateScalar { axis: 0 };
        let x = VectorRn::new(vec![0.3, 0.4]);
        assert!(matches!(
            left_quotient(&b, 2, &x, &x),
            Err(CommutatorError::DiagonalPoint)
        ));
    }

    #[test]
    fn coord_times_vector_slope_is_one() {
        // hand check: for b(x) = x_1 x̂ and y = x - t e_1,
        // quotient - B(x) has norm exactly t (B(x) = x_1 - x̂ ê_1).
        let b = CoefficientField::CoordTimesVector { axis: 0 };
        let n = 2;
        let x = VectorRn::new(vec![0.7, -0.3]);
        let ext = b.diagonal_extension(n, &x).unwrap();
        for &t in &[0.4, 0.2, 0.05, 0.0125] {
            let y = x.sub(&VectorRn::new(vec![t, 0.0]));
            let q = left_quotient(&b, n, &x, &y).unwrap();
            let dev = (&q - &ext).norm_inf();
            assert!(
                (dev - t).abs() <= 1e-12,
                "deviation {dev} is not ~t={t}"
            );
        }
    }

    #[test]
    fn diagonal_convergence_rate_one() {
        let b = CoefficientField::CoordTimesVector { axis: 1 };
        let x = VectorRn::new(vec![0.2, 0.5, -0.1]);
        let rep = diagonal_convergence(&b, 3, &x, 0.25, 10).unwrap();
        assert!(
            (rep.estimated_rate - 1.0).abs() < 0.05,
            "rate {} != 1",
            rep.estimated_rate
        );
        assert!(rep.max_halving_ratio <= 0.5 + 1e-9);
    }

    #[test]
    fn affine_convergence_is_instantaneous() {
        let alpha = Multivector::basis_vector(2, 0);
        let beta = Multivector::basis_vector(2, 1).scale(3.0);
        let b = CoefficientField::AffineLeft { alpha, beta };
        let x = VectorRn::new(vec![0.1, 0.9]);
        let rep = diagonal_convergence(&b, 2, &x, 0.5, 6).unwrap();
        for s in &rep.steps {
            assert!(s.deviation <= 64.0 * f64::EPSILON, "affine deviation {}", s.deviation);
        }
    }

    #[test]
    fn no_extension_for_unmarked_coefficients() {
        let b = CoefficientField::RadiusSquaredScalar;
        assert!(matches!(
            b.diagonal_extension(2, &VectorRn::new(vec![0.0, 0.0])),
            Err(CommutatorError::NoDifferentialFamily(_))
        ));
    }

    #[test]
    fn witness_found_for_n2_bivector_beta() {
        let alpha = Multivector::zero(2);
        let beta = Multivector::basis_vector(2, 0);
        let w = noncommutativity_witness(&alpha, &beta, 200, 17).unwrap();
        let w = w.expect("vector beta in n=2 must produce a witness");
        assert!(w.deviation > 1e-3);
        // independently recheck the reported pair
        let b = CoefficientField::AffineRight { alpha, beta: beta.clone() };
        let q = left_quotient(&b, 2, &w.x, &w.y).unwrap();
        assert_eq!(q, w.quotient);
    }

    #[test]
    fn no_witness_in_commutative_cases() {
        // n = 1: the algebra is commutative (it is C)
        let w = noncommutativity_witness(
            &Multivector::scalar(1, 0.3),
            &Multivector::basis_vector(1, 0),
            200,
            5,
        )
        .unwrap();
        assert!(w.is_none(), "n=1 should give no witness");
        // scalar beta commutes in every dimension
        let w = noncommutativity_witness(
            &Multivector::basis_vector(3, 2),
            &Multivector::scalar(3, 2.0),
            200,
            5,
        )
        .unwrap();
        assert!(w.is_none(), "scalar beta should give no witness");
    }
}
