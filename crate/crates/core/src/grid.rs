//! Discrete Dirac operators D_L, D_R and the Laplacian on uniformly
//! gridded C(n)-valued functions.
//!
//! Stencils are second-order central differences at interior nodes and
//! second-order one-sided stencils at the boundary, so everything is
//! exact on polynomials of degree <= 2 per axis up to rounding. Max-norm
//! reductions exclude a 2-cell margin at the boundary.

use crate::algebra::{AlgebraError, Multivector, VectorRn, MAX_DIM};
use crate::Side;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

/// Default cap on total node count (memory guard for n = 3 runs).
pub const DEFAULT_NODE_BUDGET: usize = 1 << 22;

const GRID_MAGIC: &[u8; 4] = b"CLGF";

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),
    #[error("grid of {nodes} nodes exceeds budget {budget}")]
    BudgetExceeded { nodes: usize, budget: usize },
    #[error("axis {0} out of range for dimension {1}")]
    AxisOutOfRange(usize, usize),
    #[error("axis has {0} nodes, need at least 3 for derivative stencils")]
    TooFewNodes(usize),
    #[error("grid specs do not match")]
    GridMismatch,
    #[error("malformed grid file: {0}")]
    MalformedFile(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniform axis-aligned grid in R^n with the same node count on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(
        n: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        points_per_axis: usize,
    ) -> Result<Self, GridError> {
        Self::with_budget(n, lo, hi, points_per_axis, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(
        n: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        points_per_axis: usize,
        budget: usize,
    ) -> Result<Self, GridError> {
        if n == 0 || n > MAX_DIM {
            return Err(GridError::InvalidSpec(format!("dimension {n} out of range")));
        }
        if lo.len() != n || hi.len() != n {
            return Err(GridError::InvalidSpec("lo/hi length != n".into()));
        }
        if points_per_axis < 5 {
            return Err(GridError::InvalidSpec(format!(
                "points_per_axis {points_per_axis} < 5"
            )));
        }
        for j in 0..n {
            if !(hi[j] > lo[j]) || !lo[j].is_finite() || !hi[j].is_finite() {
                return Err(GridError::InvalidSpec(format!(
                    "axis {j}: need finite hi > lo, got [{}, {}]",
                    lo[j], hi[j]
                )));
            }
        }
        let mut nodes: usize = 1;
        for _ in 0..n {
            nodes = nodes
                .checked_mul(points_per_axis)
                .ok_or(GridError::BudgetExceeded { nodes: usize::MAX, budget })?;
        }
        if nodes > budget {
            return Err(GridError::BudgetExceeded { nodes, budget });
        }
        Ok(GridSpec { n, lo, hi, points_per_axis })
    }

    /// Spacing on an axis: (hi - lo) / (points_per_axis - 1).
    pub fn h(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.points_per_axis - 1) as f64
    }

    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    /// Row-major stride of an axis (axis 0 slowest).
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.n - 1 - axis) as u32)
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        let mut rem = idx;
        let mut mi = vec![0; self.n];
        for axis in (0..self.n).rev() {
            mi[axis] = rem % self.points_per_axis;
            rem /= self.points_per_axis;
        }
        mi
    }

    pub fn flat_index(&self, mi: &[usize]) -> usize {
        let mut idx = 0;
        for axis in 0..self.n {
            idx = idx * self.points_per_axis + mi[axis];
        }
        idx
    }

    pub fn coords(&self, idx: usize) -> VectorRn {
        let mi = self.multi_index(idx);
        VectorRn::new(
            (0..self.n)
                .map(|axis| self.lo[axis] + mi[axis] as f64 * self.h(axis))
                .collect(),
        )
    }

    /// True when every component of the multi-index is at least `margin`
    /// cells away from both ends of its axis.
    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        let m = self.points_per_axis - 1;
        self.multi_index(idx)
            .iter()
            .all(|&i| i >= margin && i + margin <= m)
    }
}

/// Region excluded from max-norm reductions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Exclusion {
    None,
    Ball { center: Vec<f64>, radius: f64 },
}

impl Exclusion {
    pub fn contains(&self, x: &VectorRn) -> bool {
        match self {
            Exclusion::None => false,
            Exclusion::Ball { center, radius } => {
                x.sub(&VectorRn::new(center.clone())).norm() < *radius
            }
        }
    }
}

/// C(n)-valued samples on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<Multivector>,
}

impl GridFunction {
    pub fn sample<F: Fn(&VectorRn) -> Multivector>(spec: &GridSpec, f: F) -> GridFunction {
        let values = (0..spec.node_count()).map(|i| f(&spec.coords(i))).collect();
        GridFunction { spec: spec.clone(), values }
    }

    pub fn zero(spec: &GridSpec) -> GridFunction {
        GridFunction {
            spec: spec.clone(),
            values: vec![Multivector::zero(spec.n); spec.node_count()],
        }
    }

    /// Second-order finite-difference partial derivative along `axis`.
    pub fn partial_derivative(&self, axis: usize) -> Result<GridFunction, GridError> {
        let spec = &self.spec;
        if axis >= spec.n {
            return Err(GridError::AxisOutOfRange(axis, spec.n));
        }
        if spec.points_per_axis < 3 {
            return Err(GridError::TooFewNodes(spec.points_per_axis));
        }
        let stride = spec.stride(axis);
        let m = spec.points_per_axis - 1;
        let inv2h = 1.0 / (2.0 * spec.h(axis));
        let mut out = Vec::with_capacity(self.values.len());
        for idx in 0..self.values.len() {
            let i = spec.multi_index(idx)[axis];
            let v = if i == 0 {
                // (-3 f0 + 4 f1 - f2) / 2h
                let mut v = self.values[idx].scale(-3.0);
                v = &v + &self.values[idx + stride].scale(4.0);
                v = &v - &self.values[idx + 2 * stride];
                v.scale(inv2h)
            } else if i == m {
                let mut v = self.values[idx].scale(3.0);
                v = &v - &self.values[idx - stride].scale(4.0);
                v = &v + &self.values[idx - 2 * stride];
                v.scale(inv2h)
            } else {
                (&self.values[idx + stride] - &self.values[idx - stride]).scale(inv2h)
            };
            out.push(v);
        }
        Ok(GridFunction { spec: spec.clone(), values: out })
    }

    /// Nodewise sum of e_j ⊗ ∂f/∂x_j (left) or ∂f/∂x_j ⊗ e_j (right).
    pub fn dirac(&self, side: Side) -> Result<GridFunction, GridError> {
        let spec = &self.spec;
        let mut acc = GridFunction::zero(spec);
        for axis in 0..spec.n {
            let d = self.partial_derivative(axis)?;
            let ej = Multivector::basis_vector(spec.n, axis);
            for (a, dv) in acc.values.iter_mut().zip(&d.values) {
                match side {
                    Side::Left => a.mul_add_assign(&ej, dv, 1.0),
                    Side::Right => a.mul_add_assign(dv, &ej, 1.0),
                }
            }
        }
        Ok(acc)
    }

    pub fn dirac_left(&self) -> Result<GridFunction, GridError> {
        self.dirac(Side::Left)
    }

    pub fn dirac_right(&self) -> Result<GridFunction, GridError> {
        self.dirac(Side::Right)
    }

    /// Sum over axes of the 3-point second difference.
    pub fn laplacian(&self) -> Result<GridFunction, GridError> {
        let spec = &self.spec;
        if spec.points_per_axis < 4 {
            return Err(GridError::TooFewNodes(spec.points_per_axis));
        }
        let mut acc = GridFunction::zero(spec);
        for axis in 0..spec.n {
            let stride = spec.stride(axis);
            let m = spec.points_per_axis - 1;
            let invh2 = 1.0 / (spec.h(axis) * spec.h(axis));
            for idx in 0..self.values.len() {
                let i = spec.multi_index(idx)[axis];
                let v = if i == 0 {
                    // (2 f0 - 5 f1 + 4 f2 - f3) / h^2
                    let mut v = self.values[idx].scale(2.0);
                    v = &v - &self.values[idx + stride].scale(5.0);
                    v = &v + &self.values[idx + 2 * stride].scale(4.0);
                    v = &v - &self.values[idx + 3 * stride];
                    v.scale(invh2)
                } else if i == m {
                    let mut v = self.values[idx].scale(2.0);
                    v = &v - &self.values[idx - stride].scale(5.0);
                    v = &v + &self.values[idx - 2 * stride].scale(4.0);
                    v = &v - &self.values[idx - 3 * stride];
                    v.scale(invh2)
                } else {
                    let mut v = &self.values[idx + stride] + &self.values[idx - stride];
                    v = &v - &self.values[idx].scale(2.0);
                    v.scale(invh2)
                };
                acc.values[idx] = &acc.values[idx] + &v;
            }
        }
        Ok(acc)
    }

    /// Max coefficient magnitude over interior nodes (2-cell margin) not
    /// covered by the exclusion region.
    pub fn max_norm_interior(&self, exclusion: &Exclusion) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..self.values.len() {
            if !self.spec.is_interior(idx, 2) {
                continue;
            }
            if exclusion.contains(&self.spec.coords(idx)) {
                continue;
            }
            m = m.max(self.values[idx].norm_inf());
        }
        m
    }
}

/// Residuals of the Laplacian factorization D_L^2 f = D_R^2 f = -Δf,
/// measured in max norm over interior nodes (2-cell margin).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationResidual {
    pub left: f64,
    pub right: f64,
    /// Largest field magnitude entering the residual, for ulp scaling.
    pub scale: f64,
}

pub fn factorization_residual(f: &GridFunction) -> Result<FactorizationResidual, GridError> {
    let lap = f.laplacian()?;
    let dll = f.dirac_left()?.dirac_left()?;
    let drr = f.dirac_right()?.dirac_right()?;
    let mut left = 0.0f64;
    let mut right = 0.0f64;
    let mut scale = 0.0f64;
    for idx in 0..f.values.len() {
        if !f.spec.is_interior(idx, 2) {
            continue;
        }
        left = left.max((&dll.values[idx] + &lap.values[idx]).norm_inf());
        right = right.max((&drr.values[idx] + &lap.values[idx]).norm_inf());
        scale = scale
            .max(lap.values[idx].norm_inf())
            .max(dll.values[idx].norm_inf())
            .max(drr.values[idx].norm_inf());
    }
    Ok(FactorizationResidual { left, right, scale })
}

/// Residual of the product-rule identity (Eq. of D_L(f1 f2), or its
/// right-sided mirror), with both sides built from the same discrete
/// per-axis derivatives so the identity is algebraic, not asymptotic.
///
/// Returns (max residual, field scale) over all nodes.
pub fn product_rule_residual(
    f1: &GridFunction,
    f2: &GridFunction,
    side: Side,
) -> Result<(f64, f64), GridError> {
    if f1.spec != f2.spec {
        return Err(GridError::GridMismatch);
    }
    let spec = &f1.spec;
    let n = spec.n;
    let d1: Vec<GridFunction> = (0..n)
        .map(|j| f1.partial_derivative(j))
        .collect::<Result<_, _>>()?;
    let d2: Vec<GridFunction> = (0..n)
        .map(|j| f2.partial_derivative(j))
        .collect::<Result<_, _>>()?;
    let basis: Vec<Multivector> = (0..n).map(|j| Multivector::basis_vector(n, j)).collect();

    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for idx in 0..f1.values.len() {
        let a = &f1.values[idx];
        let b = &f2.values[idx];
        let mut lhs = Multivector::zero(n);
        let mut rhs = Multivector::zero(n);
        match side {
            Side::Left => {
                // lhs: sum_j e_j (d_j f1 · f2 + f1 · d_j f2)
                // rhs: (D_L f1) f2 + sum_j e_j f1 d_j f2
                let mut dlf1 = Multivector::zero(n);
                for j in 0..n {
                    let prod = &(&d1[j].values[idx] * b) + &(a * &d2[j].values[idx]);
                    lhs.mul_add_assign(&basis[j], &prod, 1.0);
                    dlf1.mul_add_assign(&basis[j], &d1[j].values[idx], 1.0);
                    let f1d2 = a * &d2[j].values[idx];
                    rhs.mul_add_assign(&basis[j], &f1d2, 1.0);
                }
                rhs.mul_add_assign(&dlf1, b, 1.0);
            }
            Side::Right => {
                // lhs: sum_j (d_j f1 · f2 + f1 · d_j f2) e_j
                // rhs: sum_j d_j f1 · f2 · e_j + f1 (D_R f2)
                let mut drf2 = Multivector::zero(n);
                for j in 0..n {
                    let prod = &(&d1[j].values[idx] * b) + &(a * &d2[j].values[idx]);
                    lhs.mul_add_assign(&prod, &basis[j], 1.0);
                    drf2.mul_add_assign(&d2[j].values[idx], &basis[j], 1.0);
                    let d1f2 = &d1[j].values[idx] * b;
                    rhs.mul_add_assign(&d1f2, &basis[j], 1.0);
                }
                rhs.mul_add_assign(a, &drf2, 1.0);
            }
        }
        residual = residual.max((&lhs - &rhs).norm_inf());
        scale = scale.max(rhs.norm_inf()).max(lhs.norm_inf());
    }
    Ok((residual, scale))
}

/// Max Dirac magnitude over non-excluded interior nodes.
pub fn monogenicity_defect(
    f: &GridFunction,
    side: Side,
    exclusion: &Exclusion,
) -> Result<f64, GridError> {
    Ok(f.dirac(side)?.max_norm_interior(exclusion))
}

impl GridFunction {
    /// Write the binary container (header + little-endian doubles) and a
    /// JSON sidecar `<path>.json` describing the spec.
    pub fn save(&self, path: &Path) -> Result<(), GridError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(GRID_MAGIC)?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.spec.n as u32).to_le_bytes())?;
        w.write_all(&(self.spec.points_per_axis as u32).to_le_bytes())?;
        for j in 0..self.spec.n {
            w.write_all(&self.spec.lo[j].to_le_bytes())?;
        }
        for j in 0..self.spec.n {
            w.write_all(&self.spec.hi[j].to_le_bytes())?;
        }
        for v in &self.values {
            for &c in v.coeffs() {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        w.into_inner().map_err(|e| GridError::Io(e.into_error()))?;
        let sidecar = serde_json::json!({
            "format": "cliffordlab-grid",
            "version": 1,
            "spec": self.spec,
            "node_count": self.spec.node_count(),
            "coeffs_per_node": 1usize << self.spec.n,
        });
        std::fs::write(
            path.with_extension(extension_plus(path, "json")),
            serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
        )?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GridFunction, GridError> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != GRID_MAGIC {
            return Err(GridError::MalformedFile("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != 1 {
            return Err(GridError::MalformedFile(format!("unknown version {version}")));
        }
        let n = read_u32(&mut r)? as usize;
        let ppa = read_u32(&mut r)? as usize;
        let lo: Vec<f64> = (0..n).map(|_| read_f64(&mut r)).collect::<Result<_, _>>()?;
        let hi: Vec<f64> = (0..n).map(|_| read_f64(&mut r)).collect::<Result<_, _>>()?;
        let spec = GridSpec::new(n, lo, hi, ppa)?;
        let coeffs_per_node = 1usize << n;
        let mut values = Vec::with_capacity(spec.node_count());
        for _ in 0..spec.node_count() {
            let coeffs: Vec<f64> = (0..coeffs_per_node)
                .map(|_| read_f64(&mut r))
                .collect::<Result<_, _>>()?;
            values.push(Multivector::from_coeffs(n, coeffs)?);
        }
        Ok(GridFunction { spec, values })
    }
}

fn extension_plus(path: &Path, ext: &str) -> String {
    match path.extension().and_then(|e| e.to_str()) {
        Some(old) => format!("{old}.{ext}"),
        None => ext.to_string(),
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, std::io::Error> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, std::io::Error> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2(points: usize) -> GridSpec {
        GridSpec::new(2, vec![-1.0, -1.0], vec![1.0, 1.0], points).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(2, vec![0.0, 0.0], vec![1.0, 1.0], 4).is_err());
        assert!(GridSpec::new(2, vec![0.0, 0.0], vec![0.0, 1.0], 9).is_err());
        assert!(matches!(
            GridSpec::with_budget(3, vec![0.0; 3], vec![1.0; 3], 257, 1 << 22),
            Err(GridError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn derivative_exact_on_linear() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |x| Multivector::scalar(2, x[0]));
        let d = f.partial_derivative(0).unwrap();
        for v in &d.values {
            assert!((v.coeff(crate::BladeIndex::SCALAR) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |_| Multivector::scalar(2, 4.25));
        let d = f.partial_derivative(1).unwrap();
        for v in &d.values {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn axis_out_of_range() {
        let spec = spec2(9);
        let f = GridFunction::zero(&spec);
        assert!(matches!(
            f.partial_derivative(2),
            Err(GridError::AxisOutOfRange(2, 2))
        ));
    }

    #[test]
    fn cubic_derivative_converges_second_order() {
        // f(x) = x_1^3 on [-1,1], error vs 3 x_1^2 is O(h^2)
        let err_at = |points: usize| {
            let spec = GridSpec::new(1, vec![-1.0], vec![1.0], points).unwrap();
            let f = GridFunction::sample(&spec, |x| Multivector::scalar(1, x[0].powi(3)));
            let d = f.partial_derivative(0).unwrap();
            let mut e = 0.0f64;
            for idx in 0..d.values.len() {
                let x = spec.coords(idx);
                e = e.max((d.values[idx].coeff(crate::BladeIndex::SCALAR) - 3.0 * x[0] * x[0]).abs());
            }
            e
        };
        let e1 = err_at(65);
        let e2 = err_at(129);
        let ratio = e1 / e2;
        assert!(
            (3.6..=4.4).contains(&ratio),
            "doubling ratio {ratio} outside [3.6, 4.4]"
        );
    }

    #[test]
    fn dirac_sides_agree_for_real_valued() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |x| Multivector::scalar(2, x[0] * x[1] + x[1]));
        let dl = f.dirac_left().unwrap();
        let dr = f.dirac_right().unwrap();
        assert_eq!(dl.values, dr.values);
    }

    #[test]
    fn dirac_of_x1_e1_is_minus_one() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |x| Multivector::basis_vector(2, 0).scale(x[0]));
        let dl = f.dirac_left().unwrap();
        for v in &dl.values {
            assert!((v.coeff(crate::BladeIndex::SCALAR) + 1.0).abs() < 1e-13);
            assert!((&v.scale(1.0) - &Multivector::scalar(2, v.coeff(crate::BladeIndex::SCALAR))).norm_inf() < 1e-13);
        }
    }

    #[test]
    fn laplacian_of_radius_squared() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |x| Multivector::scalar(2, x.norm_sq()));
        let lap = f.laplacian().unwrap();
        for v in &lap.values {
            assert!((v.coeff(crate::BladeIndex::SCALAR) - 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_of_linear_is_zero() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |x| Multivector::scalar(2, 2.0 * x[0] - x[1]));
        let lap = f.laplacian().unwrap();
        for v in &lap.values {
            assert!(v.norm_inf() < 1e-12);
        }
    }

    #[test]
    fn factorization_exact_on_quadratics() {
        let spec = spec2(17);
        let f = GridFunction::sample(&spec, |x| {
            let mut m = Multivector::scalar(2, x[0] * x[0] - 3.0 * x[0] * x[1]);
            m.set_coeff(crate::BladeIndex(0b10), x[1] * x[1] + x[0]);
            m
        });
        let res = factorization_residual(&f).unwrap();
        let tol = 1e3 * f64::EPSILON * res.scale.max(1.0);
        assert!(res.left <= tol, "left residual {} > {tol}", res.left);
        assert!(res.right <= tol, "right residual {} > {tol}", res.right);
    }

    #[test]
    fn product_rule_trivial_cases() {
        let spec = spec2(9);
        let c1 = GridFunction::sample(&spec, |_| Multivector::scalar(2, 2.0));
        let c2 = GridFunction::sample(&spec, |_| Multivector::basis_vector(2, 1).scale(-1.5));
        let (res, _) = product_rule_residual(&c1, &c2, Side::Left).unwrap();
        assert_eq!(res, 0.0);
        let (res, _) = product_rule_residual(&c1, &c2, Side::Right).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn product_rule_on_coordinate_fields() {
        let spec = spec2(9);
        let f1 = GridFunction::sample(&spec, |x| Multivector::basis_vector(2, 0).scale(x[0]));
        let f2 = GridFunction::sample(&spec, |x| Multivector::basis_vector(2, 1).scale(x[1]));
        for side in [Side::Left, Side::Right] {
            let (res, scale) = product_rule_residual(&f1, &f2, side).unwrap();
            assert!(res <= 1e3 * f64::EPSILON * scale.max(1.0));
        }
    }

    #[test]
    fn product_rule_grid_mismatch() {
        let f1 = GridFunction::zero(&spec2(9));
        let f2 = GridFunction::zero(&spec2(17));
        assert!(matches!(
            product_rule_residual(&f1, &f2, Side::Left),
            Err(GridError::GridMismatch)
        ));
    }

    #[test]
    fn monogenicity_of_constant() {
        let spec = spec2(9);
        let f = GridFunction::sample(&spec, |_| Multivector::scalar(2, 7.0));
        let d = monogenicity_defect(&f, Side::Left, &Exclusion::None).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn dirac_of_harmonic_gradient_is_small() {
        // h = x1^2 - x2^2 harmonic; D_L h is discretely monogenic to rounding
        // because all stencils are exact on quadratics.
        let spec = spec2(17);
        let f = GridFunction::sample(&spec, |x| Multivector::scalar(2, x[0] * x[0] - x[1] * x[1]));
        let g = f.dirac_left().unwrap();
        let d = monogenicity_defect(&g, Side::Left, &Exclusion::None).unwrap();
        assert!(d < 1e-11, "defect {d}");
    }

    #[test]
    fn right_constant_preserves_monogenicity() {
        let spec = spec2(17);
        let f = GridFunction::sample(&spec, |x| Multivector::scalar(2, x[0] * x[0] - x[1] * x[1]));
        let g = f.dirac_left().unwrap();
        let eps = monogenicity_defect(&g, Side::Left, &Exclusion::None).unwrap();
        let mut a = Multivector::scalar(2, 0.5);
        a.set_coeff(crate::BladeIndex(0b11), -2.0);
        let ga = GridFunction {
            spec: g.spec.clone(),
            values: g.values.iter().map(|v| v * &a).collect(),
        };
        let eps_a = monogenicity_defect(&ga, Side::Left, &Exclusion::None).unwrap();
        // ||a||_op bounded by l1 norm of coefficients
        assert!(eps_a <= eps * a.norm_l1() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.grid");
        let spec = spec2(5);
        let f = GridFunction::sample(&spec, |x| {
            let mut m = Multivector::scalar(2, x[0]);
            m.set_coeff(crate::BladeIndex(0b11), x[1] - 0.25);
            m
        });
        f.save(&path).unwrap();
        let g = GridFunction::load(&path).unwrap();
        assert_eq!(f, g);
        assert!(path.with_extension("grid.json").exists());
    }
}
