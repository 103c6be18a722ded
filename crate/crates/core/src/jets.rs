//! First-order Whitney-type jets on sampled sets: prescribed
//! differentials, compatibility defects, monogenic extension of linear
//! data from hyperplanes, geometric rigidity of the constraint
//! "differential lies in a fixed subspace", and integration of
//! prescribed differentials along chains of sample points.

use crate::algebra::{embed_vector, AlgebraError, Multivector, VectorRn};
use crate::fractal::{dijkstra, SampledSet};
use crate::Side;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JetError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("expected {0} images for a linear map on R^{0}, got {1}")]
    WrongImageCount(usize, usize),
    #[error("no point pairs within radius {0}; compatibility defect undefined")]
    NoPairs(f64),
    #[error("point counts differ: {0} vs {1}")]
    CountMismatch(usize, usize),
    #[error("chain step {0} leaves the sampled set")]
    BadChainIndex(usize),
    #[error("point {0} is unreachable within the linking radius")]
    Unreachable(usize),
    #[error("{0}")]
    Bad(String),
}

/// Clifford-valued linear map on R^n, stored as the images of the
/// standard basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    pub n: usize,
    pub images: Vec<Multivector>,
}

impl LinearMap {
    pub fn new(n: usize, images: Vec<Multivector>) -> Result<Self, JetError> {
        if images.len() != n {
            return Err(JetError::WrongImageCount(n, images.len()));
        }
        for im in &images {
            if im.dim() != n {
                return Err(JetError::Algebra(AlgebraError::DimensionMismatch(im.dim(), n)));
            }
        }
        Ok(LinearMap { n, images })
    }

    pub fn zero(n: usize) -> Self {
        LinearMap { n, images: vec![Multivector::zero(n); n] }
    }

    pub fn apply(&self, v: &VectorRn) -> Multivector {
        let mut acc = Multivector::zero(self.n);
        for (j, im) in self.images.iter().enumerate() {
            acc = &acc + &im.scale(v[j]);
        }
        acc
    }

    /// D applied to the linear field x ↦ L(x): Σ_j e_j ⊗ L(e_j) (left)
    /// or Σ_j L(e_j) ⊗ e_j (right). Constant in x.
    pub fn dirac(&self, side: Side) -> Multivector {
        let mut acc = Multivector::zero(self.n);
        for (j, im) in self.images.iter().enumerate() {
            let ej = Multivector::basis_vector(self.n, j);
            match side {
                Side::Left => acc.mul_add_assign(&ej, im, 1.0),
                Side::Right => acc.mul_add_assign(im, &ej, 1.0),
            }
        }
        acc
    }

    pub fn norm_inf(&self) -> f64 {
        self.images.iter().map(Multivector::norm_inf).fold(0.0, f64::max)
    }
}

/// Hyperplane through the origin with unit normal and an orthonormal
/// tangent basis, built by a Householder reflection of the standard
/// basis (better floating-point orthonormality than Gram-Schmidt).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: VectorRn,
    pub tangents: Vec<VectorRn>,
}

impl Hyperplane {
    pub fn new(normal: &VectorRn) -> Result<Self, JetError> {
        let n = normal.dim();
        let norm = normal.norm();
        if norm == 0.0 {
            return Err(JetError::Algebra(AlgebraError::ZeroVector));
        }
        let nu = normal.scale(1.0 / norm);
        // Householder H = I - 2 w w^T with H e_a = ±nu; the remaining
        // columns of H form an orthonormal basis of the hyperplane.
        let a = (0..n)
            .max_by(|&i, &j| nu[i].abs().partial_cmp(&nu[j].abs()).unwrap())
            .unwrap();
        let sign = if nu[a] >= 0.0 { 1.0 } else { -1.0 };
        let mut w: Vec<f64> = (0..n).map(|j| nu[j]).collect();
        w[a] += sign;
        let wn = VectorRn::new(w);
        let wsq = wn.norm_sq();
        let mut tangents = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == a {
                continue;
            }
            let mut col: Vec<f64> = (0..n).map(|i| -2.0 * wn[i] * wn[j] / wsq).collect();
            col[j] += 1.0;
            tangents.push(VectorRn::new(col));
        }
        Ok(Hyperplane { normal: nu, tangents })
    }
}

/// Extends linear data on a hyperplane to the unique monogenic linear
/// map on R^n.
///
/// `lambda` maps each tangent basis vector `plane.tangents[k]` to a
/// multivector; the extension agrees with that data on the hyperplane
/// and satisfies D(extension) = 0 on the requested side.
pub fn extend_from_hyperplane(
    plane: &Hyperplane,
    lambda: &[Multivector],
    side: Side,
) -> Result<LinearMap, JetError> {
    let n = plane.normal.dim();
    if lambda.len() != n - 1 {
        return Err(JetError::WrongImageCount(n - 1, lambda.len()));
    }
    let nu = embed_vector(&plane.normal);
    // S = Σ_k û_k λ_k (left) or λ_k û_k (right); then the normal image
    // ν̂ S (left) / S ν̂ (right) makes the Dirac cancel because ν̂² = -1.
    let mut s = Multivector::zero(n);
    for (u, lam) in plane.tangents.iter().zip(lambda) {
        let uhat = embed_vector(u);
        match side {
            Side::Left => s.mul_add_assign(&uhat, lam, 1.0),
            Side::Right => s.mul_add_assign(lam, &uhat, 1.0),
        }
    }
    let mut normal_image = Multivector::zero(n);
    match side {
        Side::Left => normal_image.mul_add_assign(&nu, &s, 1.0),
        Side::Right => normal_image.mul_add_assign(&s, &nu, 1.0),
    }
    // Express in the standard basis: e_j = ν_j ν̂ + Σ_k (u_k)_j u_k.
    let mut images = Vec::with_capacity(n);
    for j in 0..n {
        let mut im = normal_image.scale(plane.normal[j]);
        for (u, lam) in plane.tangents.iter().zip(lambda) {
            im = &im + &lam.scale(u[j]);
        }
        images.push(im);
    }
    LinearMap::new(n, images)
}

/// Outcome of probing uniqueness of the monogenic extension: the defect
/// of D(extension) relative to the data scale, and the data scale used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub dirac_defect: f64,
    pub restriction_defect: f64,
    pub scale: f64,
}

/// Verifies that the extension is monogenic and restricts to the data.
pub fn check_extension(
    plane: &Hyperplane,
    lambda: &[Multivector],
    extension: &LinearMap,
    side: Side,
) -> ExtensionCheck {
    let dirac_defect = extension.dirac(side).norm_inf();
    let mut restriction_defect = 0.0f64;
    let mut scale = 0.0f64;
    for (u, lam) in plane.tangents.iter().zip(lambda) {
        restriction_defect = restriction_defect.max((&extension.apply(u) - lam).norm_inf());
        scale = scale.max(lam.norm_inf());
    }
    ExtensionCheck { dirac_defect, restriction_defect, scale: scale.max(1.0) }
}

/// First-order jet on a sampled set: a value and a prescribed linear
/// differential at every point.
#[derive(Debug, Clone)]
pub struct Jet1Field {
    pub n: usize,
    pub values: Vec<Multivector>,
    pub differentials: Vec<LinearMap>,
}

impl Jet1Field {
    pub fn new(
        n: usize,
        values: Vec<Multivector>,
        differentials: Vec<LinearMap>,
    ) -> Result<Self, JetError> {
        if values.len() != differentials.len() {
            return Err(JetError::CountMismatch(values.len(), differentials.len()));
        }
        Ok(Jet1Field { n, values, differentials })
    }
}

/// Max over point pairs within `radius` of
/// |f(q) - f(p) - df_p(q - p)| / |q - p|, the first-order Whitney
/// compatibility defect. Errors if no pair is within the radius.
pub fn whitney_compatibility_defect(
    set: &SampledSet,
    jet: &Jet1Field,
    radius: f64,
) -> Result<f64, JetError> {
    if jet.values.len() != set.points.len() {
        return Err(JetError::CountMismatch(jet.values.len(), set.points.len()));
    }
    let mut defect = 0.0f64;
    let mut pairs = 0usize;
    for (i, p) in set.points.iter().enumerate() {
        for (j, q) in set.points.iter().enumerate().skip(i + 1) {
            let dp = q.sub(p);
            let dist = dp.norm();
            if dist == 0.0 || dist > radius {
                continue;
            }
            pairs += 1;
            let predicted = &jet.values[i] + &jet.differentials[i].apply(&dp);
            defect = defect.max((&jet.values[j] - &predicted).norm_inf() / dist);
        }
    }
    if pairs == 0 {
        return Err(JetError::NoPairs(radius));
    }
    Ok(defect)
}

/// Rigidity of one point: the rank of its chord directions at scale r
/// decides how much of a differential the function values can pin down
/// there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRigidity {
    pub rank: usize,
    /// Chords span all of R^n: a compatible differential is unique.
    pub determined: bool,
    pub neighbor_count: usize,
    pub singular_values: Vec<f64>,
    /// Orthonormal directions the data does not constrain (left
    /// singular vectors past the rank).
    pub free_directions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    pub n: usize,
    pub radius: f64,
    /// Singular values below rel_threshold × the largest do not count
    /// toward the rank. The flat/not-flat cutoff is numeric by
    /// necessity; it is configurable and always echoed here.
    pub rel_threshold: f64,
    pub points: Vec<PointRigidity>,
    pub determined_fraction: f64,
}

/// Per-point SVD of the unit chord directions to neighbors within
/// `radius`. Points with no neighbors get rank 0 and all directions
/// free.
pub fn rigidity_report(set: &SampledSet, radius: f64, rel_threshold: f64) -> RigidityReport {
    let n = set.n;
    let mut points = Vec::with_capacity(set.points.len());
    let mut determined = 0usize;
    for (i, p) in set.points.iter().enumerate() {
        let mut chords: Vec<f64> = Vec::new();
        let mut neighbor_count = 0usize;
        for (j, q) in set.points.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = q.sub(p);
            let dist = d.norm();
            if dist == 0.0 || dist > radius {
                continue;
            }
            neighbor_count += 1;
            for k in 0..n {
                chords.push(d[k] / dist);
            }
        }
        let rig = if neighbor_count == 0 {
            PointRigidity {
                rank: 0,
                determined: false,
                neighbor_count: 0,
                singular_values: vec![],
                free_directions: (0..n)
                    .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            }
        } else {
            let m = DMatrix::from_iterator(n, neighbor_count, chords.iter().cloned());
            let svd = m.svd(true, false);
            let singular: Vec<f64> = svd.singular_values.iter().cloned().collect();
            let smax = singular.iter().cloned().fold(0.0, f64::max);
            let rank = singular.iter().filter(|&&s| s >= rel_threshold * smax).count();
            let u = svd.u.expect("requested U");
            let mut order: Vec<usize> = (0..singular.len()).collect();
            order.sort_by(|&a, &b| singular[b].partial_cmp(&singular[a]).unwrap());
            let mut sorted_singular: Vec<f64> = order.iter().map(|&k| singular[k]).collect();
            sorted_singular.resize(n, 0.0);
            // columns of U past the rank span the undetermined directions;
            // if the SVD is thin (fewer chords than n), complete with the
            // kernel of the chord matrix via the unused coordinates
            let mut spanned: Vec<Vec<f64>> =
                order.iter().map(|&c| u.column(c).iter().cloned().collect()).collect();
            let mut free: Vec<Vec<f64>> = spanned.split_off(rank.min(order.len()));
            // thin SVD (fewer chords than n): complete the missing null
            // directions by Gram-Schmidt over the standard basis
            for j in 0..n {
                if spanned.len() + free.len() >= n {
                    break;
                }
                let mut cand: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
                for b in spanned.iter().chain(free.iter()) {
                    let dot: f64 = cand.iter().zip(b).map(|(a, c)| a * c).sum();
                    for (ci, bi) in cand.iter_mut().zip(b) {
                        *ci -= dot * bi;
                    }
                }
                let norm: f64 = cand.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    for c in &mut cand {
                        *c /= norm;
                    }
                    free.push(cand);
                }
            }
            PointRigidity {
                rank,
                determined: rank == n,
                neighbor_count,
                singular_values: sorted_singular,
                free_directions: free,
            }
        };
        if rig.determined {
            determined += 1;
        }
        points.push(rig);
    }
    let determined_fraction = if points.is_empty() {
        0.0
    } else {
        determined as f64 / points.len() as f64
    };
    RigidityReport { n, radius, rel_threshold, points, determined_fraction }
}

/// Integrates a field of prescribed differentials along a chain of
/// sample-point indices by left-endpoint sums:
/// f(p_{k+1}) = f(p_k) + df_{p_k}(p_{k+1} - p_k).
pub fn integrate_prescribed_differentials(
    set: &SampledSet,
    differentials: &[LinearMap],
    chain: &[usize],
    start_value: &Multivector,
) -> Result<Vec<Multivector>, JetError> {
    if differentials.len() != set.points.len() {
        return Err(JetError::CountMismatch(differentials.len(), set.points.len()));
    }
    let mut out = Vec::with_capacity(chain.len());
    let mut current = start_value.clone();
    for (k, &idx) in chain.iter().enumerate() {
        if idx >= set.points.len() {
            return Err(JetError::BadChainIndex(k));
        }
        out.push(current.clone());
        if k + 1 < chain.len() {
            let next = chain[k + 1];
            if next >= set.points.len() {
                return Err(JetError::BadChainIndex(k + 1));
            }
            let step = set.points[next].sub(&set.points[idx]);
            current = &current + &differentials[idx].apply(&step);
        }
    }
    Ok(out)
}

/// Per-connected-component analysis of a jet with vanishing
/// differentials: oscillation of the values on each component, with the
/// path-length bound rate × (shortest chain length) it must satisfy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentOscillation {
    pub component: usize,
    pub size: usize,
    pub oscillation: f64,
    pub max_path_length: f64,
}

/// For a jet whose differentials vanish (or are small of size `rate`),
/// the values must be constant on each r-connected component up to
/// rate × path length. Components are single-linkage clusters at
/// radius r.
pub fn vanishing_differential_consequence(
    set: &SampledSet,
    values: &[Multivector],
    radius: f64,
    rate: f64,
) -> Result<Vec<ComponentOscillation>, JetError> {
    if values.len() != set.points.len() {
        return Err(JetError::CountMismatch(values.len(), set.points.len()));
    }
    let m = set.points.len();
    let mut component = vec![usize::MAX; m];
    let mut reports = Vec::new();
    let mut comp_id = 0usize;
    for start in 0..m {
        if component[start] != usize::MAX {
            continue;
        }
        let dists = dijkstra(set, start, radius);
        let mut members = Vec::new();
        let mut max_path = 0.0f64;
        for (i, (d, _)) in dists.iter().enumerate() {
            if d.is_finite() {
                component[i] = comp_id;
                members.push(i);
                max_path = max_path.max(*d);
            }
        }
        let mut osc = 0.0f64;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                osc = osc.max((&values[i] - &values[j]).norm_inf());
            }
        }
        reports.push(ComponentOscillation {
            component: comp_id,
            size: members.len(),
            oscillation: osc,
            max_path_length: rate * 2.0 * max_path,
        });
        comp_id += 1;
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn ulp_tol(k: f64, scale: f64) -> f64 {
        k * f64::EPSILON * scale
    }

    #[test]
    fn householder_tangent_basis_is_orthonormal() {
        let mut r = rng::stream(21, 0);
        for n in 2..=6usize {
            for _ in 0..50 {
                let normal = rng::nonzero_point(&mut r, n, -1.0, 1.0, 0.1);
                let plane = Hyperplane::new(&normal).unwrap();
                for (k, u) in plane.tangents.iter().enumerate() {
                    assert!((u.norm() - 1.0).abs() < 4.0 * f64::EPSILON);
                    assert!(u.dot(&plane.normal).abs() < 8.0 * f64::EPSILON);
                    for v in &plane.tangents[k + 1..] {
                        assert!(u.dot(v).abs() < 8.0 * f64::EPSILON);
                    }
                }
            }
        }
    }

    #[test]
    fn worked_extension_example() {
        // n = 2, hyperplane x2 = 0 (normal e2, tangent e1), data e1 -> 1:
        // the monogenic extension must send e2 to -e12.
        let plane = Hyperplane::new(&VectorRn::new(vec![0.0, 1.0])).unwrap();
        // tangent from the Householder construction is ±e1
        let t = &plane.tangents[0];
        assert!((t[0].abs() - 1.0).abs() < 1e-15 && t[1].abs() < 1e-15);
        let lambda = vec![Multivector::scalar(2, t[0].signum())];
        let ext = extend_from_hyperplane(&plane, &lambda, Side::Left).unwrap();
        let e1_image = ext.apply(&VectorRn::new(vec![1.0, 0.0]));
        let e2_image = ext.apply(&VectorRn::new(vec![0.0, 1.0]));
        assert_eq!(e1_image, Multivector::one(2));
        assert_eq!(e2_image, Multivector::basis_blade(2, crate::BladeIndex(0b11)).unwrap().scale(-1.0));
        assert!(ext.dirac(Side::Left).is_zero());
    }

    #[test]
    fn extension_is_monogenic_and_restricts_for_random_data() {
        let mut r = rng::stream(22, 0);
        for n in 2..=4usize {
            for side in [Side::Left, Side::Right] {
                for _ in 0..100 {
                    let normal = rng::nonzero_point(&mut r, n, -1.0, 1.0, 0.1);
                    let plane = Hyperplane::new(&normal).unwrap();
                    let lambda: Vec<Multivector> =
                        (0..n - 1).map(|_| rng::uniform_multivector(&mut r, n)).collect();
                    let ext = extend_from_hyperplane(&plane, &lambda, side).unwrap();
                    let check = check_extension(&plane, &lambda, &ext, side);
                    assert!(
                        check.dirac_defect <= ulp_tol(8.0, check.scale * n as f64),
                        "dirac defect {} at n={n} side={side}",
                        check.dirac_defect
                    );
                    assert!(
                        check.restriction_defect <= ulp_tol(8.0, check.scale * n as f64),
                        "restriction defect {} at n={n}",
                        check.restriction_defect
                    );
                }
            }
        }
    }

    #[test]
    fn extension_basis_invariance() {
        // Σ_m v_m ⊗ Λ(v_m) over any orthonormal basis equals the same sum
        // over the standard basis (it is the left Dirac of the linear
        // field, a basis-free object). Rebuild via a rotated frame.
        let n = 3;
        let mut r = rng::stream(23, 1);
        let normal = rng::nonzero_point(&mut r, n, -1.0, 1.0, 0.3);
        let plane = Hyperplane::new(&normal).unwrap();
        let lambda: Vec<Multivector> =
            (0..n - 1).map(|_| rng::uniform_multivector(&mut r, n)).collect();
        let ext = extend_from_hyperplane(&plane, &lambda, Side::Left).unwrap();
        // frame: the plane's own (normal, tangents) orthonormal system
        let mut frame = vec![plane.normal.clone()];
        frame.extend(plane.tangents.iter().cloned());
        let mut sum_frame = Multivector::zero(n);
        for v in &frame {
            let vhat = embed_vector(v);
            sum_frame.mul_add_assign(&vhat, &ext.apply(v), 1.0);
        }
        let sum_std = ext.dirac(Side::Left);
        assert!((&sum_frame - &sum_std).norm_inf() <= ulp_tol(16.0, ext.norm_inf() * n as f64));
    }

    #[test]
    fn affine_jet_has_zero_compatibility_defect() {
        let set = crate::fractal::FractalPreset::Gasket.generate(4).unwrap();
        let b = LinearMap::new(
            2,
            vec![Multivector::basis_vector(2, 0), Multivector::scalar(2, 2.0)],
        )
        .unwrap();
        let c = Multivector::one(2);
        let values: Vec<Multivector> =
            set.points.iter().map(|p| &c + &b.apply(&VectorRn::new(p.0.clone()))).collect();
        let jet = Jet1Field::new(2, values, vec![b; set.points.len()]).unwrap();
        let defect = whitney_compatibility_defect(&set, &jet, 0.2).unwrap();
        assert!(defect <= 64.0 * f64::EPSILON, "affine defect {defect}");
    }

    #[test]
    fn compatibility_defect_errors_without_pairs() {
        let set = crate::fractal::FractalPreset::Cantor1d.generate(2).unwrap();
        let m = set.points.len();
        let jet =
            Jet1Field::new(1, vec![Multivector::zero(1); m], vec![LinearMap::zero(1); m]).unwrap();
        assert!(matches!(
            whitney_compatibility_defect(&set, &jet, 1e-9),
            Err(JetError::NoPairs(_))
        ));
    }

    #[test]
    fn rigidity_line_rank_one() {
        // points along e1 in R^2
        let points: Vec<VectorRn> =
            (0..40).map(|i| VectorRn::new(vec![i as f64 * 0.01, 0.0])).collect();
        let set = SampledSet {
            n: 2,
            points,
            meta: crate::fractal::SetMeta {
                generator: "line".into(),
                depth: 0,
                measure_zero: true,
                totally_disconnected: false,
                rectifiably_connected: true,
                seed: Some(0),
            },
        };
        let rep = rigidity_report(&set, 0.05, 0.1);
        assert_eq!(rep.determined_fraction, 0.0);
        for p in &rep.points {
            assert_eq!(p.rank, 1);
            assert!(!p.determined);
            assert_eq!(p.free_directions.len(), 1);
            // free direction is ±e2
            assert!(p.free_directions[0][0].abs() < 1e-10);
            assert!((p.free_directions[0][1].abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rigidity_gasket_rank_two() {
        let set = crate::fractal::FractalPreset::Gasket.generate(6).unwrap();
        let rep = rigidity_report(&set, 3.0 * 0.5f64.powi(6), 0.1);
        assert_eq!(rep.determined_fraction, 1.0, "some gasket point is not rank 2");
    }

    #[test]
    fn rigidity_isolated_points() {
        let set = crate::fractal::FractalPreset::Cantor2d.generate(3).unwrap();
        let rep = rigidity_report(&set, 1e-6, 0.1);
        assert_eq!(rep.determined_fraction, 0.0);
        for p in &rep.points {
            assert_eq!(p.rank, 0);
            assert_eq!(p.neighbor_count, 0);
            assert_eq!(p.free_directions.len(), 2);
        }
    }

    #[test]
    fn integration_exact_for_constant_differential() {
        let curve = crate::fractal::lipschitz_graph_curve(
            &crate::fractal::LipschitzProfile::Sine { amplitude: 0.3, frequency: 2.0 },
            0.0,
            1.0,
            200,
        )
        .unwrap();
        let set = SampledSet {
            n: 2,
            points: curve.points.clone(),
            meta: crate::fractal::SetMeta {
                generator: "curve".into(),
                depth: 0,
                measure_zero: true,
                totally_disconnected: false,
                rectifiably_connected: true,
                seed: Some(0),
            },
        };
        let b = LinearMap::new(
            2,
            vec![Multivector::basis_vector(2, 1), Multivector::scalar(2, -1.0)],
        )
        .unwrap();
        let chain: Vec<usize> = (0..set.points.len()).collect();
        let start = Multivector::scalar(2, 0.5);
        let out = integrate_prescribed_differentials(
            &set,
            &vec![b.clone(); set.points.len()],
            &chain,
            &start,
        )
        .unwrap();
        // telescoping: value at k is exactly start + B(p_k - p_0)
        for (k, &idx) in chain.iter().enumerate().step_by(37) {
            let expect = &start + &b.apply(&set.points[idx].sub(&set.points[0]));
            assert!(
                (&out[k] - &expect).norm_inf() <= 32.0 * f64::EPSILON * (1.0 + expect.norm_inf()),
                "drift at step {k}"
            );
        }
    }

    #[test]
    fn vanishing_differentials_force_local_constancy() {
        let set = crate::fractal::FractalPreset::Cantor1d.generate(3).unwrap();
        // assign the left-half points 1 and the right-half points 2
        let values: Vec<Multivector> = set
            .points
            .iter()
            .map(|p| Multivector::scalar(1, if p[0] < 0.5 { 1.0 } else { 2.0 }))
            .collect();
        // radius below the top-level gap: components never mix halves
        let reports = vanishing_differential_consequence(&set, &values, 0.2, 0.0).unwrap();
        for rep in &reports {
            assert_eq!(rep.oscillation, 0.0, "component {} mixes values", rep.component);
        }
        assert!(reports.len() >= 2);
    }
}
