//! Exact arithmetic in the real Clifford algebra C(n).
//!
//! C(n) is the associative real algebra generated by e_1, ..., e_n with
//! e_j^2 = -1 and e_j e_l = -e_l e_j for j != l. Elements are stored
//! densely as 2^n coefficients indexed by basis blades; a blade is a
//! bitmask with bit j set when generator e_{j+1} is present.
//!
//! All operations are pure functions on immutable values. Integer
//! coefficients multiply and add exactly, which the test suite exploits
//! for exact-law checks.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Index, Mul, Neg, Sub};
use thiserror::Error;

/// Build-time cap on the algebra dimension; 2^6 = 64 coefficients.
pub const MAX_DIM: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("dimension {0} out of range 1..={MAX_DIM}")]
    DimensionOutOfRange(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("blade mask {mask:#b} out of range for dimension {n}")]
    BladeOutOfRange { mask: u32, n: usize },
    #[error("the zero vector is not invertible")]
    ZeroVector,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("unknown blade name `{0}`")]
    BadBladeName(String),
}

/// Basis blade of C(n), as a bitmask of generators.
///
/// Bit j set means generator e_{j+1} is present; the empty mask is the
/// scalar unit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BladeIndex(pub u32);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    pub fn validate(self, n: usize) -> Result<(), AlgebraError> {
        if n == 0 || n > MAX_DIM {
            return Err(AlgebraError::DimensionOutOfRange(n));
        }
        if self.0 >= (1u32 << n) {
            return Err(AlgebraError::BladeOutOfRange { mask: self.0, n });
        }
        Ok(())
    }

    /// Number of generators in the blade.
    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    /// Display name: "1" for the scalar, otherwise "e" followed by the
    /// generator indices in ascending order, e.g. "e12".
    pub fn name(self) -> String {
        if self.0 == 0 {
            return "1".to_string();
        }
        let mut s = String::from("e");
        for j in 0..32 {
            if self.0 & (1 << j) != 0 {
                s.push_str(&(j + 1).to_string());
            }
        }
        s
    }

    /// Inverse of [`BladeIndex::name`].
    pub fn parse(name: &str) -> Result<BladeIndex, AlgebraError> {
        if name == "1" {
            return Ok(BladeIndex(0));
        }
        let digits = name
            .strip_prefix('e')
            .ok_or_else(|| AlgebraError::BadBladeName(name.to_string()))?;
        let mut mask = 0u32;
        let mut prev = 0u32;
        for c in digits.chars() {
            let d = c
                .to_digit(10)
                .filter(|&d| (1..=MAX_DIM as u32).contains(&d))
                .ok_or_else(|| AlgebraError::BadBladeName(name.to_string()))?;
            if d <= prev {
                return Err(AlgebraError::BadBladeName(name.to_string()));
            }
            prev = d;
            mask |= 1 << (d - 1);
        }
        if mask == 0 {
            return Err(AlgebraError::BadBladeName(name.to_string()));
        }
        Ok(BladeIndex(mask))
    }
}

/// Product of two basis blades: sign and resulting blade.
///
/// The blade is the XOR of the masks. The sign counts the transpositions
/// needed to interleave the generators of `b` past those of `a`
/// (bit-parallel), plus one factor of -1 for each common generator
/// (e_j^2 = -1).
pub fn blade_product(
    a: BladeIndex,
    b: BladeIndex,
    n: usize,
) -> Result<(f64, BladeIndex), AlgebraError> {
    a.validate(n)?;
    b.validate(n)?;
    Ok(blade_product_unchecked(a.0, b.0))
}

#[inline]
pub(crate) fn blade_product_unchecked(a: u32, b: u32) -> (f64, BladeIndex) {
    let mut swaps = 0u32;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    let squares = (a & b).count_ones();
    let sign = if (swaps + squares) % 2 == 0 { 1.0 } else { -1.0 };
    (sign, BladeIndex(a ^ b))
}

/// Element of C(n): 2^n real coefficients, position k holding the
/// coefficient of the blade with mask k.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    n: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} out of range");
        Multivector {
            n,
            coeffs: vec![0.0; 1 << n],
        }
    }

    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = s;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// Basis blade with coefficient 1.
    pub fn basis_blade(n: usize, blade: BladeIndex) -> Result<Self, AlgebraError> {
        blade.validate(n)?;
        let mut m = Self::zero(n);
        m.coeffs[blade.0 as usize] = 1.0;
        Ok(m)
    }

    /// Generator e_{axis+1} (axis is 0-based).
    pub fn basis_vector(n: usize, axis: usize) -> Self {
        assert!(axis < n, "axis {axis} out of range for dimension {n}");
        let mut m = Self::zero(n);
        m.coeffs[1 << axis] = 1.0;
        m
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self, AlgebraError> {
        if n == 0 || n > MAX_DIM {
            return Err(AlgebraError::DimensionOutOfRange(n));
        }
        if coeffs.len() != 1 << n {
            return Err(AlgebraError::BladeOutOfRange {
                mask: coeffs.len() as u32,
                n,
            });
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(AlgebraError::NonFinite);
        }
        Ok(Multivector { n, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: BladeIndex) -> f64 {
        self.coeffs[blade.0 as usize]
    }

    pub fn set_coeff(&mut self, blade: BladeIndex, value: f64) {
        self.coeffs[blade.0 as usize] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Sum of coefficient magnitudes.
    pub fn norm_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Coefficient-wise dot product.
    pub fn dot(&self, other: &Multivector) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, s: f64) -> Multivector {
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn checked_add(&self, other: &Multivector) -> Result<Multivector, AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch(self.n, other.n));
        }
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Multivector) -> Result<Multivector, AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch(self.n, other.n));
        }
        Ok(self * other)
    }

    /// Accumulate `scale * (a ⊗ b)` into `self` without allocating.
    ///
    /// Hot path for quadrature sums.
    pub fn mul_add_assign(&mut self, a: &Multivector, b: &Multivector, scale: f64) {
        debug_assert_eq!(self.n, a.n);
        debug_assert_eq!(self.n, b.n);
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                if bj == 0.0 {
                    continue;
                }
                let (sign, blade) = blade_product_unchecked(i as u32, j as u32);
                self.coeffs[blade.0 as usize] += sign * ai * bj * scale;
            }
        }
    }

    /// Accumulate `scale * other` into `self` without allocating.
    pub fn add_scaled_assign(&mut self, other: &Multivector, scale: f64) {
        debug_assert_eq!(self.n, other.n);
        for (c, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o * scale;
        }
    }

    /// JSON form: blade names mapped to nonzero coefficients, with the
    /// dimension recorded alongside.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                map.insert(BladeIndex(k as u32).name(), serde_json::json!(c));
            }
        }
        serde_json::json!({ "dim": self.n, "coeffs": map })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, AlgebraError> {
        let n = value
            .get("dim")
            .and_then(|v| v.as_u64())
            .ok_or(AlgebraError::DimensionOutOfRange(0))? as usize;
        if n == 0 || n > MAX_DIM {
            return Err(AlgebraError::DimensionOutOfRange(n));
        }
        let mut m = Multivector::zero(n);
        if let Some(map) = value.get("coeffs").and_then(|v| v.as_object()) {
            for (name, v) in map {
                let blade = BladeIndex::parse(name)?;
                blade.validate(n)?;
                let c = v.as_f64().ok_or(AlgebraError::NonFinite)?;
                if !c.is_finite() {
                    return Err(AlgebraError::NonFinite);
                }
                m.coeffs[blade.0 as usize] = c;
            }
        }
        Ok(m)
    }
}

impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        Multivector::from_json(&value).map_err(D::Error::custom)
    }
}

impl std::fmt::Display for Multivector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·{}", BladeIndex(k as u32).name())?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Multivector {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Multivector {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Geometric product: bilinear extension of [`blade_product`].
impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = Multivector::zero(self.n);
        out.mul_add_assign(self, rhs, 1.0);
        out
    }
}

/// Point of R^n, identified with x_1 e_1 + ... + x_n e_n when embedded
/// into C(n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorRn(pub Vec<f64>);

impl VectorRn {
    pub fn new(components: Vec<f64>) -> Self {
        VectorRn(components)
    }

    pub fn zeros(n: usize) -> Self {
        VectorRn(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &VectorRn) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn sub(&self, other: &VectorRn) -> VectorRn {
        VectorRn(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &VectorRn) -> VectorRn {
        VectorRn(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> VectorRn {
        VectorRn(self.0.iter().map(|x| x * s).collect())
    }

    pub fn dist(&self, other: &VectorRn) -> f64 {
        self.sub(other).norm()
    }
}

impl Index<usize> for VectorRn {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for VectorRn {
    fn from(v: Vec<f64>) -> Self {
        VectorRn(v)
    }
}

/// Grade-1 embedding of x in C(n): coefficient x_j on blade e_j.
pub fn embed_vector(x: &VectorRn) -> Multivector {
    let n = x.dim();
    let mut m = Multivector::zero(n);
    for j in 0..n {
        m.coeffs[1 << j] = x[j];
    }
    m
}

/// Clifford inverse of a nonzero vector: -x / |x|^2, so that the
/// geometric product with the embedding of x is 1 in either order.
pub fn vector_inverse(x: &VectorRn) -> Result<Multivector, AlgebraError> {
    let nsq = x.norm_sq();
    if nsq == 0.0 {
        return Err(AlgebraError::ZeroVector);
    }
    if !nsq.is_finite() {
        return Err(AlgebraError::NonFinite);
    }
    Ok(embed_vector(&x.scale(-1.0 / nsq)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, mask: u32) -> Multivector {
        Multivector::basis_blade(n, BladeIndex(mask)).unwrap()
    }

    #[test]
    fn generator_squares_to_minus_one() {
        let (sign, blade) = blade_product(BladeIndex(1), BladeIndex(1), 2).unwrap();
        assert_eq!((sign, blade), (-1.0, BladeIndex::SCALAR));
    }

    #[test]
    fn scalar_is_identity() {
        let (sign, blade) = blade_product(BladeIndex::SCALAR, BladeIndex(0b10), 2).unwrap();
        assert_eq!((sign, blade), (1.0, BladeIndex(0b10)));
    }

    #[test]
    fn bivector_squares_to_minus_one() {
        // e1e2 e1e2 = -1, by adjacent-transposition counting over e1 e2 e1 e2.
        let (sign, blade) = blade_product(BladeIndex(0b11), BladeIndex(0b11), 2).unwrap();
        assert_eq!((sign, blade), (-1.0, BladeIndex::SCALAR));
    }

    #[test]
    fn blade_out_of_range_rejected() {
        assert!(matches!(
            blade_product(BladeIndex(0b100), BladeIndex(0), 2),
            Err(AlgebraError::BladeOutOfRange { .. })
        ));
    }

    #[test]
    fn anticommutation_of_generators() {
        let n = 3;
        for j in 0..n {
            for l in 0..n {
                if j == l {
                    continue;
                }
                let ej = Multivector::basis_vector(n, j);
                let el = Multivector::basis_vector(n, l);
                let sum = &(&ej * &el) + &(&el * &ej);
                assert!(sum.is_zero(), "e{j} e{l} + e{l} e{j} != 0");
            }
        }
    }

    #[test]
    fn unit_law() {
        let n = 3;
        let m = &(&e(n, 0b101).scale(2.5) + &e(n, 0b011)) + &Multivector::scalar(n, -1.0);
        assert_eq!(&Multivector::one(n) * &m, m);
        assert_eq!(&m * &Multivector::one(n), m);
    }

    #[test]
    fn vector_squares_to_minus_norm() {
        // (3e1 + 4e2)^2 = -25
        let x = VectorRn::new(vec![3.0, 4.0]);
        let xe = embed_vector(&x);
        let sq = &xe * &xe;
        assert_eq!(sq, Multivector::scalar(2, -25.0));
    }

    #[test]
    fn embed_examples() {
        assert_eq!(
            embed_vector(&VectorRn::new(vec![1.0, 0.0])),
            Multivector::basis_vector(2, 0)
        );
        assert!(embed_vector(&VectorRn::new(vec![0.0, 0.0, 0.0])).is_zero());
    }

    #[test]
    fn vector_inverse_examples() {
        let inv = vector_inverse(&VectorRn::new(vec![1.0, 0.0])).unwrap();
        assert_eq!(inv, Multivector::basis_vector(2, 0).scale(-1.0));

        let x = VectorRn::new(vec![3.0, 4.0]);
        let inv = vector_inverse(&x).unwrap();
        let expect = embed_vector(&x).scale(-1.0 / 25.0);
        assert_eq!(inv, expect);

        // two-sided inverse within 4 ulps
        let prod = &embed_vector(&x) * &inv;
        assert!((prod.coeff(BladeIndex::SCALAR) - 1.0).abs() <= 4.0 * f64::EPSILON);
        let prod2 = &inv * &embed_vector(&x);
        assert!((prod2.coeff(BladeIndex::SCALAR) - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn zero_vector_not_invertible() {
        assert_eq!(
            vector_inverse(&VectorRn::new(vec![0.0, 0.0])),
            Err(AlgebraError::ZeroVector)
        );
    }

    #[test]
    fn add_scale_examples() {
        let n = 2;
        let e1 = Multivector::basis_vector(n, 0);
        let e2 = Multivector::basis_vector(n, 1);
        assert_eq!(&e1 + &e1, e1.scale(2.0));
        assert!(e1.scale(0.0).is_zero());
        assert_eq!(&(&e1 + &e2) + &(&e1 - &e2), e1.scale(2.0));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = Multivector::one(2);
        let b = Multivector::one(3);
        assert!(matches!(
            a.checked_mul(&b),
            Err(AlgebraError::DimensionMismatch(2, 3))
        ));
        assert!(matches!(
            a.checked_add(&b),
            Err(AlgebraError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn geometric_product_examples() {
        let n = 2;
        let e1 = Multivector::basis_vector(n, 0);
        let e2 = Multivector::basis_vector(n, 1);
        assert_eq!(&e1 * &e2, e(n, 0b11));
        assert_eq!(&e2 * &e1, e(n, 0b11).scale(-1.0));
    }

    #[test]
    fn blade_names_round_trip() {
        for mask in 0..(1u32 << 4) {
            let blade = BladeIndex(mask);
            assert_eq!(BladeIndex::parse(&blade.name()).unwrap(), blade);
        }
        assert!(BladeIndex::parse("e21").is_err());
        assert!(BladeIndex::parse("x").is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut m = Multivector::zero(3);
        m.set_coeff(BladeIndex(0), 1.5);
        m.set_coeff(BladeIndex(0b101), -2.0);
        let back = Multivector::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        // zero coefficients omitted
        let json = m.to_json();
        assert_eq!(json["coeffs"].as_object().unwrap().len(), 2);
    }
}
