//! Fundamental solution E(x) = x / |x|^n, the Cauchy-type reproducing
//! formula, estimation of the reproduction constant c_n, and uniform
//! approximation by monogenic functions on measure-zero compacta.
//!
//! Quadrature is the midpoint rule with the cell containing the
//! singularity excised; |E| ~ |x|^{1-n} is absolutely integrable, so the
//! excision error vanishes with the cell size. c_n is always estimated
//! from probes, never hard-coded.

use crate::algebra::{blade_product_unchecked, embed_vector, AlgebraError, BladeIndex, Multivector, VectorRn};
use crate::fractal::SampledSet;
use crate::grid::{monogenicity_defect, Exclusion, GridError, GridFunction, GridSpec};
use crate::rng;
use crate::Side;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CauchyError {
    #[error("evaluation point is outside the quadrature domain")]
    OutsideDomain,
    #[error("quadrature domain does not cover the support of the test function")]
    SupportNotCovered,
    #[error("need at least 3 probes, got {0}")]
    TooFewProbes(usize),
    #[error("probe {0} is ill-conditioned: |f(x)| too small to solve for c")]
    IllConditionedProbe(usize),
    #[error(
        "set `{0}` is flagged positive-measure: the reproducing-formula argument fails for \
         positive Lebesgue measure and finite perimeter (distributional derivatives of the \
         characteristic function obstruct it); only measure-zero sets are accepted"
    )]
    PositiveMeasureSet(String),
    #[error("evaluation point coincides with a quadrature node")]
    SingularPoint,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("value count {0} does not match point count {1}")]
    ValueCountMismatch(usize, usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// E(x) = (Σ x_j e_j) / |x|^n, grade-1, monogenic on both sides off 0.
pub fn fundamental_solution(x: &VectorRn) -> Result<Multivector, CauchyError> {
    let r2 = x.norm_sq();
    if r2 == 0.0 {
        return Err(CauchyError::Algebra(AlgebraError::ZeroVector));
    }
    let n = x.dim();
    // |x|^n from the squared norm: even n needs no square root at all,
    // odd n rounds once more, keeping the coefficients within a couple
    // of ulps so the kernel's scaling symmetry survives in floating point
    let rn = if n % 2 == 0 {
        r2.powi((n / 2) as i32)
    } else {
        r2.powi((n / 2) as i32) * r2.sqrt()
    };
    Ok(embed_vector(&x.scale(1.0 / rn)))
}

/// Exact D_L h for the Laplace potential h: |x| (n = 1), log |x| (n = 2),
/// |x|^{2-n} (n >= 3), as a grade-1 multivector.
pub fn potential_gradient(x: &VectorRn) -> Result<Multivector, CauchyError> {
    let r = x.norm();
    if r == 0.0 {
        return Err(CauchyError::Algebra(AlgebraError::ZeroVector));
    }
    let n = x.dim();
    let factor = match n {
        1 => 1.0 / r,
        2 => 1.0 / (r * r),
        _ => (2.0 - n as f64) * r.powi(-(n as i32)),
    };
    Ok(embed_vector(&x.scale(factor)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialCheck {
    /// Least-squares proportionality constant at the first sample point.
    pub constant: f64,
    /// Max deviation of the per-point constant from `constant`.
    pub max_deviation: f64,
    /// Max relative norm of the component of E orthogonal to D_L h.
    pub max_angle_defect: f64,
}

/// Checks that E is a point-independent real multiple of D_L h over the
/// sample.
pub fn gradient_of_potential_check(points: &[VectorRn]) -> Result<PotentialCheck, CauchyError> {
    if points.is_empty() {
        return Err(CauchyError::BadParameter("empty sample".into()));
    }
    let mut constant = 0.0;
    let mut max_dev = 0.0f64;
    let mut max_angle = 0.0f64;
    for (i, x) in points.iter().enumerate() {
        let e = fundamental_solution(x)?;
        let g = potential_gradient(x)?;
        let ratio = e.dot(&g) / g.dot(&g);
        let residual = (&e - &g.scale(ratio)).norm() / e.norm();
        max_angle = max_angle.max(residual);
        if i == 0 {
            constant = ratio;
        } else {
            max_dev = max_dev.max((ratio - constant).abs());
        }
    }
    Ok(PotentialCheck { constant, max_deviation: max_dev, max_angle_defect: max_angle })
}

/// Closed-form C^1 compactly supported test function: a multivector
/// coefficient times the bump (1 - |x-c|^2/R^2)^3 inside radius R.
///
/// Value and gradient are evaluated symbolically at any point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: VectorRn,
    pub radius: f64,
    pub coeff: Multivector,
}

impl TestFunction {
    pub fn new(center: VectorRn, radius: f64, coeff: Multivector) -> Result<Self, CauchyError> {
        if !(radius > 0.0) {
            return Err(CauchyError::BadParameter(format!("radius {radius} <= 0")));
        }
        if center.dim() != coeff.dim() {
            return Err(CauchyError::Algebra(AlgebraError::DimensionMismatch(
                center.dim(),
                coeff.dim(),
            )));
        }
        Ok(TestFunction { center, radius, coeff })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    fn bump_arg(&self, x: &VectorRn) -> f64 {
        x.sub(&self.center).norm_sq() / (self.radius * self.radius)
    }

    pub fn value(&self, x: &VectorRn) -> Multivector {
        let u = self.bump_arg(x);
        if u >= 1.0 {
            return Multivector::zero(self.dim());
        }
        self.coeff.scale((1.0 - u).powi(3))
    }

    /// Exact partial derivative along `axis`.
    pub fn partial(&self, x: &VectorRn, axis: usize) -> Multivector {
        let u = self.bump_arg(x);
        if u >= 1.0 {
            return Multivector::zero(self.dim());
        }
        let du = 2.0 * (x[axis] - self.center[axis]) / (self.radius * self.radius);
        self.coeff.scale(-3.0 * (1.0 - u).powi(2) * du)
    }

    /// Dirac from the exact gradient.
    pub fn dirac(&self, x: &VectorRn, side: Side) -> Multivector {
        let n = self.dim();
        let mut acc = Multivector::zero(n);
        for j in 0..n {
            let d = self.partial(x, j);
            let ej = Multivector::basis_vector(n, j);
            match side {
                Side::Left => acc.mul_add_assign(&ej, &d, 1.0),
                Side::Right => acc.mul_add_assign(&d, &ej, 1.0),
            }
        }
        acc
    }
}

/// Deterministic pairwise tree reduction fixed by item index.
pub fn pairwise_sum(mut items: Vec<Multivector>, n: usize) -> Multivector {
    if items.is_empty() {
        return Multivector::zero(n);
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.chunks(2);
        while let Some(chunk) = it.next() {
            next.push(if chunk.len() == 2 { &chunk[0] + &chunk[1] } else { chunk[0].clone() });
        }
        items = next;
    }
    items.pop().unwrap()
}

fn quad_cells(quad: &GridSpec) -> usize {
    quad.points_per_axis - 1
}

fn cell_midpoint(quad: &GridSpec, cell: &[usize]) -> VectorRn {
    VectorRn::new(
        (0..quad.n)
            .map(|j| quad.lo[j] + (cell[j] as f64 + 0.5) * quad.h(j))
            .collect(),
    )
}

fn cell_of(quad: &GridSpec, x: &VectorRn) -> Vec<usize> {
    let cells = quad_cells(quad);
    (0..quad.n)
        .map(|j| {
            let c = ((x[j] - quad.lo[j]) / quad.h(j)).floor() as isize;
            c.clamp(0, cells as isize - 1) as usize
        })
        .collect()
}

fn for_each_cell<F: FnMut(&[usize])>(quad: &GridSpec, mut f: F) {
    let cells = quad_cells(quad);
    let mut idx = vec![0usize; quad.n];
    loop {
        f(&idx);
        let mut axis = quad.n;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < cells {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Midpoint-rule evaluation of ∫ E(x-y) ⊗ D_L f(y) dy (left) or
/// ∫ D_R f(y) ⊗ E(x-y) dy (right), skipping the cell that contains x.
pub fn cauchy_reproduce(
    f: &TestFunction,
    x: &VectorRn,
    side: Side,
    quad: &GridSpec,
) -> Result<Multivector, CauchyError> {
    let n = quad.n;
    if f.dim() != n || x.dim() != n {
        return Err(CauchyError::Algebra(AlgebraError::DimensionMismatch(f.dim(), n)));
    }
    for j in 0..n {
        if f.center[j] - f.radius < quad.lo[j] || f.center[j] + f.radius > quad.hi[j] {
            return Err(CauchyError::SupportNotCovered);
        }
        if x[j] < quad.lo[j] || x[j] > quad.hi[j] {
            return Err(CauchyError::OutsideDomain);
        }
    }
    let singular = cell_of(quad, x);
    let weight: f64 = (0..n).map(|j| quad.h(j)).product();
    let mut terms: Vec<Multivector> = Vec::new();
    for_each_cell(quad, |cell| {
        if cell == singular.as_slice() {
            return;
        }
        let y = cell_midpoint(quad, cell);
        if y.sub(&f.center).norm() >= f.radius {
            return;
        }
        let kernel = fundamental_solution(&x.sub(&y)).expect("y != x outside singular cell");
        let df = f.dirac(&y, side);
        let mut term = Multivector::zero(n);
        match side {
            Side::Left => term.mul_add_assign(&kernel, &df, weight),
            Side::Right => term.mul_add_assign(&df, &kernel, weight),
        }
        terms.push(term);
    });
    Ok(pairwise_sum(terms, n))
}

/// Estimated reproduction constant: value, probe spread, and the
/// resolution it was measured at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CnEstimate {
    pub n: usize,
    pub value: f64,
    /// Max pairwise deviation of per-probe constants; never hidden.
    pub spread: f64,
    pub cells_per_axis: usize,
}

/// Per probe, solve f(x) = c · ∫ E(x-y) D_L f(y) dy for the scalar c by
/// least squares over the 2^n coefficients; c_n is the mean.
pub fn estimate_cn(
    n: usize,
    probes: &[(TestFunction, VectorRn)],
    quad: &GridSpec,
) -> Result<CnEstimate, CauchyError> {
    if probes.len() < 3 {
        return Err(CauchyError::TooFewProbes(probes.len()));
    }
    let mut constants = Vec::with_capacity(probes.len());
    for (i, (f, x)) in probes.iter().enumerate() {
        let fx = f.value(x);
        if fx.norm() < 1e-9 * f.coeff.norm().max(1e-300) {
            return Err(CauchyError::IllConditionedProbe(i));
        }
        let integral = cauchy_reproduce(f, x, Side::Left, quad)?;
        let denom = integral.dot(&integral);
        if denom == 0.0 {
            return Err(CauchyError::IllConditionedProbe(i));
        }
        constants.push(integral.dot(&fx) / denom);
    }
    let value = constants.iter().sum::<f64>() / constants.len() as f64;
    let max = constants.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CnEstimate { n, value, spread: max - min, cells_per_axis: quad_cells(quad) })
}

/// Standard probe family for c_n estimation: bumps with seeded centers,
/// radii, and coefficients, evaluated at their own centers.
pub fn standard_probes(n: usize, count: usize, seed: u64) -> Vec<(TestFunction, VectorRn)> {
    (0..count)
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let center = rng::uniform_point(&mut r, n, -0.3, 0.3);
            let radius = r.gen_range(0.4..0.7);
            let mut coeff = rng::uniform_multivector(&mut r, n);
            // keep the probe well conditioned at its center
            coeff.set_coeff(crate::BladeIndex::SCALAR, r.gen_range(0.5..1.5));
            let f = TestFunction::new(center.clone(), radius, coeff).expect("valid probe");
            (f, center)
        })
        .collect()
}

/// Domain that covers every probe's support with one cell of margin.
pub fn probe_domain(probes: &[(TestFunction, VectorRn)], n: usize, cells: usize) -> GridSpec {
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for (f, _) in probes {
        for j in 0..n {
            lo[j] = lo[j].min(f.center[j] - f.radius - 0.05);
            hi[j] = hi[j].max(f.center[j] + f.radius + 0.05);
        }
    }
    GridSpec::new(n, lo, hi, cells + 1).expect("valid probe domain")
}

/// C^1 compactly supported extension of values on a point cloud:
/// a bump-weighted Shepard blend cut off by a smooth ramp in the total
/// weight, so the extension vanishes where the cloud has no influence.
#[derive(Debug, Clone)]
pub struct MollifiedExtension {
    points: Vec<VectorRn>,
    values: Vec<Multivector>,
    delta: f64,
    n: usize,
    /// Uniform buckets of side delta so weight sums only touch points
    /// that can actually be within reach.
    buckets: std::collections::HashMap<Vec<i64>, Vec<usize>>,
}

fn bucket_key(y: &VectorRn, delta: f64) -> Vec<i64> {
    (0..y.dim()).map(|j| (y[j] / delta).floor() as i64).collect()
}

// Ramp thresholds in total bump weight; below T0 the extension is zero.
const RAMP_T0: f64 = 0.05;
const RAMP_T1: f64 = 0.5;

impl MollifiedExtension {
    pub fn new(
        set: &SampledSet,
        values: &[Multivector],
        delta: f64,
    ) -> Result<MollifiedExtension, CauchyError> {
        if values.len() != set.points.len() {
            return Err(CauchyError::ValueCountMismatch(values.len(), set.points.len()));
        }
        if !(delta > 0.0) {
            return Err(CauchyError::BadParameter(format!("delta {delta} <= 0")));
        }
        let mut buckets: std::collections::HashMap<Vec<i64>, Vec<usize>> =
            std::collections::HashMap::new();
        for (i, p) in set.points.iter().enumerate() {
            buckets.entry(bucket_key(p, delta)).or_default().push(i);
        }
        Ok(MollifiedExtension {
            points: set.points.clone(),
            values: values.to_vec(),
            delta,
            n: set.n,
            buckets,
        })
    }

    /// Indices of all points within delta of y (possibly with extras
    /// just outside, which the bump weight zeroes anyway).  Buckets are
    /// visited in a fixed scan order and hold ascending indices, so the
    /// result order is a deterministic function of y's bucket.
    fn nearby(&self, y: &VectorRn) -> Vec<usize> {
        let key = bucket_key(y, self.delta);
        let mut out = Vec::new();
        let mut offset = vec![-1i64; self.n];
        loop {
            let cell: Vec<i64> = key.iter().zip(&offset).map(|(k, o)| k + o).collect();
            if let Some(ids) = self.buckets.get(&cell) {
                out.extend_from_slice(ids);
            }
            let mut axis = self.n;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
            }
        }
    }

    /// Whether any sampled point lies within `r` of `y`.  Only valid for
    /// `r <= delta`: the bucket scan covers one bucket of side delta in
    /// every direction.
    pub fn any_point_within(&self, y: &VectorRn, r: f64) -> bool {
        debug_assert!(r <= self.delta);
        let r2 = r * r;
        self.nearby(y).iter().any(|&i| {
            let p = &self.points[i];
            let mut d2 = 0.0;
            for j in 0..self.n {
                let d = y[j] - p[j];
                d2 += d * d;
            }
            d2 <= r2
        })
    }

    /// Distance from `y` to the nearest sampled point, if one lies within
    /// `r`.  Only valid for `r <= delta` (bucket reach).
    pub fn dist_within(&self, y: &VectorRn, r: f64) -> Option<f64> {
        debug_assert!(r <= self.delta);
        let mut best = f64::INFINITY;
        for &i in &self.nearby(y) {
            let p = &self.points[i];
            let mut d2 = 0.0;
            for j in 0..self.n {
                let d = y[j] - p[j];
                d2 += d * d;
            }
            best = best.min(d2);
        }
        let d = best.sqrt();
        (d <= r).then_some(d)
    }

    fn weights_at(&self, y: &VectorRn) -> (f64, Multivector, Vec<f64>, Vec<Multivector>) {
        self.weights_from(y, &self.nearby(y))
    }

    fn weights_from(
        &self,
        y: &VectorRn,
        ids: &[usize],
    ) -> (f64, Multivector, Vec<f64>, Vec<Multivector>) {
        let n = self.n;
        let d2 = self.delta * self.delta;
        let mut w_total = 0.0;
        let mut v_total = Multivector::zero(n);
        let mut dw = vec![0.0; n];
        let mut dv = vec![Multivector::zero(n); n];
        for &i in ids {
            let (p, val) = (&self.points[i], &self.values[i]);
            let mut dist2 = 0.0;
            for j in 0..n {
                let d = y[j] - p[j];
                dist2 += d * d;
            }
            let u = dist2 / d2;
            if u >= 1.0 {
                continue;
            }
            let w = (1.0 - u).powi(3);
            let wp = -3.0 * (1.0 - u).powi(2);
            w_total += w;
            v_total.add_scaled_assign(val, w);
            for j in 0..n {
                let du_j = 2.0 * (y[j] - p[j]) / d2;
                dw[j] += wp * du_j;
                dv[j].add_scaled_assign(val, wp * du_j);
            }
        }
        (w_total, v_total, dw, dv)
    }

    pub fn value(&self, y: &VectorRn) -> Multivector {
        let (w, v, _, _) = self.weights_at(y);
        if w <= RAMP_T0 {
            return Multivector::zero(self.n);
        }
        v.scale(ramp(w) / w)
    }

    /// Exact gradient (quotient + chain rule through the ramp).
    pub fn gradient(&self, y: &VectorRn) -> Vec<Multivector> {
        self.gradient_from(y, &self.nearby(y))
    }

    fn gradient_from(&self, y: &VectorRn, ids: &[usize]) -> Vec<Multivector> {
        let n = self.n;
        let (w, v, dw, dv) = self.weights_from(y, ids);
        if w <= RAMP_T0 {
            return vec![Multivector::zero(n); n];
        }
        let g0 = v.scale(1.0 / w);
        let s = ramp(w);
        let sp = ramp_deriv(w);
        (0..n)
            .map(|j| {
                let dg0 = (&dv[j] - &g0.scale(dw[j])).scale(1.0 / w);
                &dg0.scale(s) + &g0.scale(sp * dw[j])
            })
            .collect()
    }

    pub fn dirac(&self, y: &VectorRn, side: Side) -> Multivector {
        self.dirac_from(y, &self.nearby(y), side)
    }

    /// Dirac of the extension at `y` when no sampled point lies within
    /// `rho`, sharing one candidate scan between the excision test and
    /// the weight sums.  Only valid for `rho <= delta` (bucket reach).
    pub fn dirac_outside(&self, y: &VectorRn, side: Side, rho: f64) -> Option<Multivector> {
        debug_assert!(rho <= self.delta);
        let ids = self.nearby(y);
        let r2 = rho * rho;
        for &i in &ids {
            let p = &self.points[i];
            let mut d2 = 0.0;
            for j in 0..self.n {
                let d = y[j] - p[j];
                d2 += d * d;
            }
            if d2 <= r2 {
                return None;
            }
        }
        Some(self.dirac_from(y, &ids, side))
    }

    fn dirac_from(&self, y: &VectorRn, ids: &[usize], side: Side) -> Multivector {
        let n = self.n;
        let grad = self.gradient_from(y, ids);
        let mut acc = Multivector::zero(n);
        for (j, d) in grad.iter().enumerate() {
            let ej = Multivector::basis_vector(n, j);
            match side {
                Side::Left => acc.mul_add_assign(&ej, d, 1.0),
                Side::Right => acc.mul_add_assign(d, &ej, 1.0),
            }
        }
        acc
    }
}

fn ramp(w: f64) -> f64 {
    let u = ((w - RAMP_T0) / (RAMP_T1 - RAMP_T0)).clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

fn ramp_deriv(w: f64) -> f64 {
    let u = (w - RAMP_T0) / (RAMP_T1 - RAMP_T0);
    if !(0.0..1.0).contains(&u) {
        return 0.0;
    }
    (6.0 * u - 6.0 * u * u) / (RAMP_T1 - RAMP_T0)
}

/// Discretized Cauchy integral: a finite sum of kernels E(·-y_c), each
/// exactly monogenic away from its node, so the approximant is monogenic
/// wherever the quadrature nodes are excised.
#[derive(Debug, Clone)]
pub struct CauchyApproximant {
    pub n: usize,
    pub cn: f64,
    pub side: Side,
    /// Node positions, flattened with stride n, and the matching weights
    /// (cell volume × Dirac of the extension there), flattened with
    /// stride 2^n.  Flat storage keeps the evaluation loop streaming
    /// instead of chasing per-node heap allocations.
    node_pos: Vec<f64>,
    node_val: Vec<f64>,
    count: usize,
}

impl CauchyApproximant {
    pub fn new(n: usize, cn: f64, side: Side, nodes: Vec<(VectorRn, Multivector)>) -> Self {
        let width = 1usize << n;
        let mut node_pos = Vec::with_capacity(nodes.len() * n);
        let mut node_val = Vec::with_capacity(nodes.len() * width);
        for (y, v) in &nodes {
            for j in 0..n {
                node_pos.push(y[j]);
            }
            node_val.extend_from_slice(v.coeffs());
        }
        CauchyApproximant { n, cn, side, node_pos, node_val, count: nodes.len() }
    }

    pub fn node_count(&self) -> usize {
        self.count
    }

    pub fn evaluate(&self, x: &VectorRn) -> Result<Multivector, CauchyError> {
        let n = self.n;
        let width = 1usize << n;
        // The kernel E(x-y) = (x-y)/|x-y|^n is grade 1, so each term only
        // needs the products e_j * blade (or blade * e_j); tabulate their
        // signs and targets once.  This sum runs once per evaluation point
        // over every quadrature node, so the inner loop must not allocate
        // or recompute blade signs.
        let mut sign = vec![0.0f64; n * width];
        let mut targ = vec![0usize; n * width];
        for j in 0..n {
            for b in 0..width {
                let (s, t) = match self.side {
                    Side::Left => blade_product_unchecked(1 << j, b as u32),
                    Side::Right => blade_product_unchecked(b as u32, 1 << j),
                };
                sign[j * width + b] = s;
                targ[j * width + b] = t.0 as usize;
            }
        }
        // Unrolled planar case: registers for the four components, one
        // reciprocal per node, no indexed sign lookups.
        if n == 2 {
            let (mut a0, mut a1, mut a2, mut a3) = (0.0f64, 0.0, 0.0, 0.0);
            let (x0, x1) = (x[0], x[1]);
            for (yc, vc) in self.node_pos.chunks_exact(2).zip(self.node_val.chunks_exact(4)) {
                let d0 = x0 - yc[0];
                let d1 = x1 - yc[1];
                let r2 = d0 * d0 + d1 * d1;
                if r2 == 0.0 {
                    return Err(CauchyError::SingularPoint);
                }
                let inv = 1.0 / r2;
                let k0 = d0 * inv;
                let k1 = d1 * inv;
                a0 += -k0 * vc[1] - k1 * vc[2];
                match self.side {
                    Side::Left => {
                        a1 += k0 * vc[0] + k1 * vc[3];
                        a2 += -k0 * vc[3] + k1 * vc[0];
                        a3 += k0 * vc[2] - k1 * vc[1];
                    }
                    Side::Right => {
                        a1 += k0 * vc[0] - k1 * vc[3];
                        a2 += k0 * vc[3] + k1 * vc[0];
                        a3 += -k0 * vc[2] + k1 * vc[1];
                    }
                }
            }
            let mut out = Multivector::zero(2);
            for (b, c) in [a0, a1, a2, a3].into_iter().enumerate() {
                out.set_coeff(BladeIndex(b as u32), c * self.cn);
            }
            return Ok(out);
        }
        let half_n = (n / 2) as i32;
        let even = n % 2 == 0;
        let mut acc = vec![0.0f64; width];
        for (yc, vc) in self
            .node_pos
            .chunks_exact(n)
            .zip(self.node_val.chunks_exact(width))
        {
            let mut r2 = 0.0;
            for j in 0..n {
                let d = x[j] - yc[j];
                r2 += d * d;
            }
            if r2 == 0.0 {
                return Err(CauchyError::SingularPoint);
            }
            // 1/|x-y|^n without a square root when n is even.
            let inv_rn = if even {
                1.0 / r2.powi(half_n)
            } else {
                1.0 / (r2.powi(half_n) * r2.sqrt())
            };
            for j in 0..n {
                let kj = (x[j] - yc[j]) * inv_rn;
                let row = j * width;
                for b in 0..width {
                    acc[targ[row + b]] += sign[row + b] * kj * vc[b];
                }
            }
        }
        let mut out = Multivector::zero(n);
        for (b, &c) in acc.iter().enumerate() {
            out.set_coeff(BladeIndex(b as u32), c * self.cn);
        }
        Ok(out)
    }

    /// Discrete Dirac defect of the approximant on a small patch grid
    /// centered at `at`, with the max field magnitude on the patch.
    pub fn monogenicity_defect_near(
        &self,
        at: &VectorRn,
        patch_points: usize,
        patch_spacing: f64,
    ) -> Result<(f64, f64), CauchyError> {
        let half = patch_spacing * (patch_points - 1) as f64 / 2.0;
        let lo = (0..self.n).map(|j| at[j] - half).collect();
        let hi = (0..self.n).map(|j| at[j] + half).collect();
        let spec = GridSpec::new(self.n, lo, hi, patch_points)?;
        let mut field_max = 0.0f64;
        let mut values = Vec::with_capacity(spec.node_count());
        for idx in 0..spec.node_count() {
            let v = self.evaluate(&spec.coords(idx))?;
            field_max = field_max.max(v.norm_inf());
            values.push(v);
        }
        let f = GridFunction { spec, values };
        let defect = monogenicity_defect(&f, self.side, &Exclusion::None)?;
        Ok((defect, field_max))
    }
}

/// Two-stage uniform approximation of values on a measure-zero compact
/// set by a function monogenic near the set.
#[derive(Debug, Clone)]
pub struct NullSetApproximation {
    pub approximant: CauchyApproximant,
    pub sup_error: f64,
    pub monogenicity_defect: f64,
    pub field_magnitude: f64,
    pub delta: f64,
    pub rho: f64,
}

/// Per-cell quadrature rule for the stage-2 integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    Midpoint,
    /// Tensor 2-point Gauss-Legendre: 2^n nodes per cell.  Far cheaper
    /// than midpoint refinement for the same accuracy, which matters
    /// because the integrand steepens near the excised tube.
    GaussTwo,
}

impl QuadRule {
    /// Per-axis node offsets as fractions of the cell width, measured
    /// from the cell midpoint.
    fn offsets(self) -> &'static [f64] {
        const G: f64 = 0.28867513459481287; // 1/(2*sqrt(3))
        match self {
            QuadRule::Midpoint => &[0.0],
            QuadRule::GaussTwo => &[-G, G],
        }
    }
}

/// Stage 1 mollifies the values into a C^1 compactly supported extension;
/// stage 2 integrates E(x-y) ⊗ D g(y) over quadrature nodes at distance
/// > rho from the sampled set (the depth-limited proxy for the true set).
///
/// Refuses sets flagged positive-measure.
pub fn approximate_on_null_set(
    set: &SampledSet,
    values: &[Multivector],
    delta: f64,
    rho: f64,
    quad: &GridSpec,
    cn: &CnEstimate,
    side: Side,
    rule: QuadRule,
) -> Result<NullSetApproximation, CauchyError> {
    if !set.meta.measure_zero {
        return Err(CauchyError::PositiveMeasureSet(set.meta.generator.clone()));
    }
    if !(rho > 0.0) {
        return Err(CauchyError::BadParameter(format!("rho {rho} <= 0")));
    }
    if quad.n != set.n {
        return Err(CauchyError::Algebra(AlgebraError::DimensionMismatch(quad.n, set.n)));
    }
    let extension = MollifiedExtension::new(set, values, delta)?;
    let offsets = rule.offsets();
    let per_axis = offsets.len();
    let weight: f64 =
        (0..quad.n).map(|j| quad.h(j) / per_axis as f64).product();
    let mut nodes: Vec<(VectorRn, Multivector)> = Vec::new();
    // The extension's buckets answer distance queries much faster than a
    // scan of the whole sample, but only reach out to delta.
    let fast_excision = rho <= delta;
    for_each_cell(quad, |cell| {
        let mid = cell_midpoint(quad, cell);
        // Enumerate the rule's tensor nodes within this cell.
        for node in 0..per_axis.pow(quad.n as u32) {
            let mut rem = node;
            let mut y = mid.clone();
            for j in 0..quad.n {
                y.0[j] += offsets[rem % per_axis] * quad.h(j);
                rem /= per_axis;
            }
            let dg = if fast_excision {
                match extension.dirac_outside(&y, side, rho) {
                    Some(dg) => dg,
                    None => continue,
                }
            } else {
                if set.dist_to(&y) <= rho {
                    continue;
                }
                extension.dirac(&y, side)
            };
            if dg.is_zero() {
                continue;
            }
            nodes.push((y, dg.scale(weight)));
        }
    });
    let approximant = CauchyApproximant::new(set.n, cn.value, side, nodes);

    let mut sup_error = 0.0f64;
    for (p, fp) in set.points.iter().zip(values) {
        let fv = approximant.evaluate(p)?;
        sup_error = sup_error.max((&fv - fp).norm_inf());
    }

    // Defect probe at the set point nearest the centroid, on a patch much
    // smaller than rho so no quadrature node is approached.
    let centroid = {
        let mut c = vec![0.0; set.n];
        for p in &set.points {
            for j in 0..set.n {
                c[j] += p[j];
            }
        }
        VectorRn::new(c.into_iter().map(|v| v / set.points.len() as f64).collect())
    };
    let at = set
        .points
        .iter()
        .min_by(|a, b| {
            a.dist(&centroid)
                .partial_cmp(&b.dist(&centroid))
                .expect("finite distances")
        })
        .expect("nonempty set")
        .clone();
    let (defect, magnitude) = approximant.monogenicity_defect_near(&at, 9, rho / 400.0)?;

    Ok(NullSetApproximation {
        approximant,
        sup_error,
        monogenicity_defect: defect,
        field_magnitude: magnitude,
        delta,
        rho,
    })
}
