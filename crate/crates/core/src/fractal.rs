//! Generators for the example sets: Cantor sets (classical and fat),
//! Sierpinski gasket and carpet, Menger sponge, Koch curve, and
//! chord-arc Lipschitz graphs.
//!
//! Fractals are represented as depth-d point clouds (images of a seed
//! under all length-d compositions of the IFS maps), enumerated
//! lexicographically by composition word. Depth and generator id are
//! recorded so downstream tolerances can be scaled; connectivity flags
//! are preset metadata, not computed claims.

use crate::algebra::{Multivector, VectorRn};
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use thiserror::Error;

/// Default cap on generated point count.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 22;

#[derive(Debug, Error)]
pub enum FractalError {
    #[error("invalid IFS: {0}")]
    InvalidSystem(String),
    #[error("{points} points exceed budget {budget}")]
    BudgetExceeded { points: usize, budget: usize },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("removal ratio {0} outside (0, 1): rounds must leave positive measure")]
    BadRemovalRatio(f64),
    #[error("profile produced a non-finite value at t = {0}")]
    NonFiniteProfile(f64),
    #[error("duplicate points at indices {0} and {1} (zero chord)")]
    DuplicatePoints(usize, usize),
    #[error("point index {0} out of range ({1} points)")]
    PointOutOfRange(usize, usize),
    #[error("need at least {0} points")]
    TooFewPoints(usize),
    #[error("set is not flagged totally disconnected; pass an explicit override to cluster anyway")]
    NotTotallyDisconnected,
    #[error("value count {0} does not match point count {1}")]
    ValueCountMismatch(usize, usize),
}

/// Contracting similarity map x ↦ scale·R·x + offset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Similitude {
    pub scale: f64,
    /// Optional rotation matrix, row-major n×n. Identity when absent.
    pub rotation: Option<Vec<Vec<f64>>>,
    pub offset: Vec<f64>,
}

impl Similitude {
    pub fn apply(&self, x: &VectorRn) -> VectorRn {
        let n = x.dim();
        let rotated = match &self.rotation {
            None => x.clone(),
            Some(rows) => VectorRn::new(
                (0..n)
                    .map(|i| (0..n).map(|j| rows[i][j] * x[j]).sum())
                    .collect(),
            ),
        };
        VectorRn::new((0..n).map(|i| self.scale * rotated[i] + self.offset[i]).collect())
    }
}

/// Iterated function system with a seed point set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IfsSystem {
    pub n: usize,
    pub maps: Vec<Similitude>,
    pub seed: Vec<VectorRn>,
}

impl IfsSystem {
    pub fn validate(&self) -> Result<(), FractalError> {
        if self.maps.len() < 2 {
            return Err(FractalError::InvalidSystem("need at least 2 maps".into()));
        }
        for (i, m) in self.maps.iter().enumerate() {
            if !(m.scale > 0.0 && m.scale < 1.0) {
                return Err(FractalError::InvalidSystem(format!(
                    "map {i} scale {} not in (0, 1)",
                    m.scale
                )));
            }
            if m.offset.len() != self.n {
                return Err(FractalError::InvalidSystem(format!("map {i} offset length")));
            }
        }
        if self.seed.is_empty() {
            return Err(FractalError::InvalidSystem("empty seed set".into()));
        }
        Ok(())
    }
}

/// Provenance and topology metadata attached to a generated point cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetMeta {
    pub generator: String,
    pub depth: usize,
    pub measure_zero: bool,
    pub totally_disconnected: bool,
    pub rectifiably_connected: bool,
    pub seed: Option<u64>,
}

/// Finite point cloud in R^n with provenance metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledSet {
    pub n: usize,
    pub points: Vec<VectorRn>,
    pub meta: SetMeta,
}

impl SampledSet {
    /// Smallest pairwise distance. O(k^2).
    pub fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                g = g.min(self.points[i].dist(&self.points[j]));
            }
        }
        g
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                d = d.max(self.points[i].dist(&self.points[j]));
            }
        }
        d
    }

    /// Distance from an arbitrary point to the sampled set.
    pub fn dist_to(&self, x: &VectorRn) -> f64 {
        self.points
            .iter()
            .map(|p| p.dist(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point cloud CSV: one point per row, coordinates only.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let row: Vec<String> = p.0.iter().map(|c| format!("{c}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(n: usize, csv: &str, meta: SetMeta) -> Result<SampledSet, FractalError> {
        let mut points = Vec::new();
        for (lineno, line) in csv.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let coords: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| FractalError::InvalidSystem(format!("csv line {}: {e}", lineno + 1)))?;
            if coords.len() != n {
                return Err(FractalError::InvalidSystem(format!(
                    "csv line {}: {} coordinates, expected {n}",
                    lineno + 1,
                    coords.len()
                )));
            }
            points.push(VectorRn::new(coords));
        }
        Ok(SampledSet { n, points, meta })
    }
}

/// Images of the seed under all length-`depth` compositions, ordered
/// lexicographically by composition word (outermost map first).
pub fn generate_ifs(
    system: &IfsSystem,
    depth: usize,
    meta: SetMeta,
    budget: usize,
) -> Result<SampledSet, FractalError> {
    system.validate()?;
    let m = system.maps.len();
    let mut count = system.seed.len();
    for _ in 0..depth {
        count = count
            .checked_mul(m)
            .ok_or(FractalError::BudgetExceeded { points: usize::MAX, budget })?;
        if count > budget {
            return Err(FractalError::BudgetExceeded { points: count, budget });
        }
    }
    let mut points = system.seed.clone();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(points.len() * m);
        for map in &system.maps {
            for p in &points {
                next.push(map.apply(p));
            }
        }
        points = next;
    }
    Ok(SampledSet { n: system.n, points, meta })
}

/// Built-in IFS presets from the example-set menagerie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FractalPreset {
    Cantor1d,
    Cantor2d,
    Gasket,
    Carpet,
    Menger,
    Koch,
}

impl std::str::FromStr for FractalPreset {
    type Err = FractalError;
    fn from_str(s: &str) -> Result<Self, FractalError> {
        match s {
            "cantor1d" => Ok(FractalPreset::Cantor1d),
            "cantor2d" => Ok(FractalPreset::Cantor2d),
            "gasket" => Ok(FractalPreset::Gasket),
            "carpet" => Ok(FractalPreset::Carpet),
            "menger" => Ok(FractalPreset::Menger),
            "koch" => Ok(FractalPreset::Koch),
            other => Err(FractalError::UnknownPreset(other.to_string())),
        }
    }
}

impl FractalPreset {
    pub fn name(self) -> &'static str {
        match self {
            FractalPreset::Cantor1d => "cantor1d",
            FractalPreset::Cantor2d => "cantor2d",
            FractalPreset::Gasket => "gasket",
            FractalPreset::Carpet => "carpet",
            FractalPreset::Menger => "menger",
            FractalPreset::Koch => "koch",
        }
    }

    pub fn ambient_dim(self) -> usize {
        match self {
            FractalPreset::Cantor1d => 1,
            FractalPreset::Menger => 3,
            _ => 2,
        }
    }

    pub fn map_count(self) -> usize {
        match self {
            FractalPreset::Cantor1d => 2,
            FractalPreset::Cantor2d => 4,
            FractalPreset::Gasket => 3,
            FractalPreset::Carpet => 8,
            FractalPreset::Menger => 20,
            FractalPreset::Koch => 4,
        }
    }

    pub fn system(self) -> IfsSystem {
        match self {
            FractalPreset::Cantor1d => IfsSystem {
                n: 1,
                maps: vec![
                    Similitude { scale: 1.0 / 3.0, rotation: None, offset: vec![0.0] },
                    Similitude { scale: 1.0 / 3.0, rotation: None, offset: vec![2.0 / 3.0] },
                ],
                seed: vec![VectorRn::new(vec![0.0])],
            },
            FractalPreset::Cantor2d => {
                let mut maps = Vec::new();
                for &ox in &[0.0, 2.0 / 3.0] {
                    for &oy in &[0.0, 2.0 / 3.0] {
                        maps.push(Similitude {
                            scale: 1.0 / 3.0,
                            rotation: None,
                            offset: vec![ox, oy],
                        });
                    }
                }
                IfsSystem { n: 2, maps, seed: vec![VectorRn::new(vec![0.0, 0.0])] }
            }
            FractalPreset::Gasket => {
                let vertices = [
                    vec![0.0, 0.0],
                    vec![1.0, 0.0],
                    vec![0.5, 3f64.sqrt() / 2.0],
                ];
                IfsSystem {
                    n: 2,
                    maps: vertices
                        .iter()
                        .map(|v| Similitude {
                            scale: 0.5,
                            rotation: None,
                            offset: v.iter().map(|c| c / 2.0).collect(),
                        })
                        .collect(),
                    seed: vec![VectorRn::new(vec![0.0, 0.0])],
                }
            }
            FractalPreset::Carpet => {
                let mut maps = Vec::new();
                for i in 0..3 {
                    for j in 0..3 {
                        if i == 1 && j == 1 {
                            continue;
                        }
                        maps.push(Similitude {
                            scale: 1.0 / 3.0,
                            rotation: None,
                            offset: vec![i as f64 / 3.0, j as f64 / 3.0],
                        });
                    }
                }
                IfsSystem { n: 2, maps, seed: vec![VectorRn::new(vec![0.0, 0.0])] }
            }
            FractalPreset::Menger => {
                let mut maps = Vec::new();
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            let middles = [i, j, k].iter().filter(|&&c| c == 1).count();
                            if middles >= 2 {
                                continue;
                            }
                            maps.push(Similitude {
                                scale: 1.0 / 3.0,
                                rotation: None,
                                offset: vec![i as f64 / 3.0, j as f64 / 3.0, k as f64 / 3.0],
                            });
                        }
                    }
                }
                IfsSystem { n: 3, maps, seed: vec![VectorRn::new(vec![0.0, 0.0, 0.0])] }
            }
            FractalPreset::Koch => {
                let c = 60f64.to_radians().cos();
                let s = 60f64.to_radians().sin();
                let rot = |sgn: f64| Some(vec![vec![c, -sgn * s], vec![sgn * s, c]]);
                IfsSystem {
                    n: 2,
                    maps: vec![
                        Similitude { scale: 1.0 / 3.0, rotation: None, offset: vec![0.0, 0.0] },
                        Similitude {
                            scale: 1.0 / 3.0,
                            rotation: rot(1.0),
                            offset: vec![1.0 / 3.0, 0.0],
                        },
                        Similitude {
                            scale: 1.0 / 3.0,
                            rotation: rot(-1.0),
                            offset: vec![0.5, 3f64.sqrt() / 6.0],
                        },
                        Similitude { scale: 1.0 / 3.0, rotation: None, offset: vec![2.0 / 3.0, 0.0] },
                    ],
                    seed: vec![VectorRn::new(vec![0.0, 0.0])],
                }
            }
        }
    }

    pub fn meta(self, depth: usize) -> SetMeta {
        let (mz, td, rc) = match self {
            FractalPreset::Cantor1d | FractalPreset::Cantor2d => (true, true, false),
            FractalPreset::Gasket | FractalPreset::Carpet | FractalPreset::Menger => {
                (true, false, true)
            }
            // The Koch curve is connected but not rectifiably so.
            FractalPreset::Koch => (true, false, false),
        };
        SetMeta {
            generator: self.name().to_string(),
            depth,
            measure_zero: mz,
            totally_disconnected: td,
            rectifiably_connected: rc,
            seed: None,
        }
    }

    pub fn generate(self, depth: usize) -> Result<SampledSet, FractalError> {
        generate_ifs(&self.system(), depth, self.meta(depth), DEFAULT_POINT_BUDGET)
    }
}

/// Fat (or classical) Cantor set on [0, 1].
///
/// `removal_ratios[k]` is the fraction of each current interval removed
/// as a middle piece at round k+1. Returns the interval endpoints after
/// all rounds and the exact remaining length.
pub fn generate_fat_cantor(
    removal_ratios: &[f64],
    depth: usize,
) -> Result<(SampledSet, f64), FractalError> {
    let rounds = depth.min(removal_ratios.len());
    if depth > removal_ratios.len() {
        return Err(FractalError::InvalidSystem(format!(
            "depth {depth} exceeds {} supplied removal ratios",
            removal_ratios.len()
        )));
    }
    for &r in &removal_ratios[..rounds] {
        if !(r > 0.0 && r < 1.0) {
            return Err(FractalError::BadRemovalRatio(r));
        }
    }
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for &r in &removal_ratios[..rounds] {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for &(a, b) in &intervals {
            let len = b - a;
            let keep = len * (1.0 - r) / 2.0;
            next.push((a, a + keep));
            next.push((b - keep, b));
        }
        intervals = next;
    }
    let remaining: f64 = intervals.iter().map(|&(a, b)| b - a).sum();
    let mut points = Vec::with_capacity(intervals.len() * 2);
    for &(a, b) in &intervals {
        points.push(VectorRn::new(vec![a]));
        points.push(VectorRn::new(vec![b]));
    }
    let set = SampledSet {
        n: 1,
        points,
        meta: SetMeta {
            generator: "fat-cantor".to_string(),
            depth,
            measure_zero: false,
            totally_disconnected: true,
            rectifiably_connected: false,
            seed: None,
        },
    };
    Ok((set, remaining))
}

/// Ratios for the classical middle-thirds Cantor construction.
pub fn classical_cantor_ratios(depth: usize) -> Vec<f64> {
    vec![1.0 / 3.0; depth]
}

/// Ratios chosen so that round k removes total length 2^{k-1} 4^{-k};
/// the limit set keeps measure 1/2.
pub fn fat_cantor_quarter_ratios(depth: usize) -> Vec<f64> {
    let mut ratios = Vec::with_capacity(depth);
    let mut remaining = 1.0f64;
    for k in 1..=depth {
        let removed = 0.5 * 0.5f64.powi(k as i32);
        ratios.push(removed / remaining);
        remaining -= removed;
    }
    ratios
}

/// Ordered curve samples with cumulative arc lengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSample {
    pub n: usize,
    pub points: Vec<VectorRn>,
    pub arc_lengths: Vec<f64>,
    pub chord_arc_constant: f64,
}

impl CurveSample {
    /// Build from ordered points; arc length by polyline accumulation.
    pub fn from_points(points: Vec<VectorRn>) -> Result<CurveSample, FractalError> {
        if points.len() < 2 {
            return Err(FractalError::TooFewPoints(2));
        }
        let n = points[0].dim();
        let mut arc_lengths = Vec::with_capacity(points.len());
        arc_lengths.push(0.0);
        for i in 1..points.len() {
            let seg = points[i].dist(&points[i - 1]);
            if seg == 0.0 {
                return Err(FractalError::DuplicatePoints(i - 1, i));
            }
            arc_lengths.push(arc_lengths[i - 1] + seg);
        }
        let mut curve = CurveSample { n, points, arc_lengths, chord_arc_constant: 1.0 };
        curve.chord_arc_constant = chord_arc_check(&curve)?;
        Ok(curve)
    }

    pub fn spacing(&self) -> f64 {
        let mut s = 0.0f64;
        for i in 1..self.points.len() {
            s = s.max(self.points[i].dist(&self.points[i - 1]));
        }
        s
    }
}

/// Named Lipschitz profiles for graph curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LipschitzProfile {
    Zero,
    /// Triangle wave with the given slope magnitude and period.
    Sawtooth { slope: f64, period: f64 },
    /// amplitude·sin(frequency·t); Lipschitz constant amplitude·frequency.
    Sine { amplitude: f64, frequency: f64 },
}

impl LipschitzProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LipschitzProfile::Zero => 0.0,
            LipschitzProfile::Sawtooth { slope, period } => {
                let phase = (t / period).rem_euclid(1.0);
                let tri = if phase < 0.5 { phase } else { 1.0 - phase };
                slope * period * tri
            }
            LipschitzProfile::Sine { amplitude, frequency } => amplitude * (frequency * t).sin(),
        }
    }

    pub fn lipschitz_constant(&self) -> f64 {
        match self {
            LipschitzProfile::Zero => 0.0,
            LipschitzProfile::Sawtooth { slope, .. } => slope.abs(),
            LipschitzProfile::Sine { amplitude, frequency } => (amplitude * frequency).abs(),
        }
    }
}

/// Graph of a Lipschitz profile over [t0, t1], sampled at k points.
pub fn lipschitz_graph_curve(
    profile: &LipschitzProfile,
    t0: f64,
    t1: f64,
    k: usize,
) -> Result<CurveSample, FractalError> {
    if k < 2 {
        return Err(FractalError::TooFewPoints(2));
    }
    let mut points = Vec::with_capacity(k);
    for i in 0..k {
        let t = t0 + (t1 - t0) * i as f64 / (k - 1) as f64;
        let y = profile.eval(t);
        if !y.is_finite() {
            return Err(FractalError::NonFiniteProfile(t));
        }
        points.push(VectorRn::new(vec![t, y]));
    }
    CurveSample::from_points(points)
}

/// Chord-arc constant: max over sampled pairs of arc length / chord length.
pub fn chord_arc_check(curve: &CurveSample) -> Result<f64, FractalError> {
    let k = curve.points.len();
    if k < 2 {
        return Err(FractalError::TooFewPoints(2));
    }
    let mut c = 1.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            let chord = curve.points[i].dist(&curve.points[j]);
            if chord == 0.0 {
                return Err(FractalError::DuplicatePoints(i, j));
            }
            c = c.max((curve.arc_lengths[j] - curve.arc_lengths[i]) / chord);
        }
    }
    Ok(c)
}

/// Shortest path between two set points in the r-neighbor graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathResult {
    pub indices: Vec<usize>,
    pub length: f64,
}

/// Dijkstra on the graph with edges between points at distance <= radius.
/// Returns `None` when p and q are disconnected at this scale.
pub fn rectifiable_path(
    set: &SampledSet,
    p: usize,
    q: usize,
    radius: f64,
) -> Result<Option<PathResult>, FractalError> {
    let k = set.points.len();
    if p >= k {
        return Err(FractalError::PointOutOfRange(p, k));
    }
    if q >= k {
        return Err(FractalError::PointOutOfRange(q, k));
    }
    let dist = dijkstra(set, p, radius);
    if !dist[q].0.is_finite() {
        return Ok(None);
    }
    let mut indices = vec![q];
    let mut cur = q;
    while cur != p {
        cur = dist[cur].1;
        indices.push(cur);
    }
    indices.reverse();
    Ok(Some(PathResult { indices, length: dist[q].0 }))
}

/// Shortest-path distances (and predecessors) from `source` in the
/// r-neighbor graph. Unreachable points get infinity.
pub fn dijkstra(set: &SampledSet, source: usize, radius: f64) -> Vec<(f64, usize)> {
    let k = set.points.len();
    let mut dist: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); k];
    dist[source] = (0.0, source);
    // min-heap via Reverse on a totally ordered f64 wrapper
    let mut heap: BinaryHeap<(std::cmp::Reverse<OrdF64>, usize)> = BinaryHeap::new();
    heap.push((std::cmp::Reverse(OrdF64(0.0)), source));
    while let Some((std::cmp::Reverse(d), u)) = heap.pop() {
        let d = d.0;
        if d > dist[u].0 {
            continue;
        }
        for v in 0..k {
            if v == u {
                continue;
            }
            let w = set.points[u].dist(&set.points[v]);
            if w > radius {
                continue;
            }
            let nd = d + w;
            if nd < dist[v].0 {
                dist[v] = (nd, u);
                heap.push((std::cmp::Reverse(OrdF64(nd)), v));
            }
        }
    }
    dist
}

#[derive(PartialEq, PartialOrd)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).expect("finite distances")
    }
}

/// Piecewise-constant approximation of values on a totally disconnected set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocallyConstantApprox {
    /// Cluster id per point.
    pub cluster_ids: Vec<usize>,
    pub cluster_values: Vec<Multivector>,
    pub cluster_count: usize,
    pub sup_error: f64,
    pub largest_cluster_diameter: f64,
}

/// Single-linkage clustering at gap scale `delta`; each cluster is
/// assigned the componentwise midpoint of its values.
pub fn approximate_locally_constant(
    set: &SampledSet,
    values: &[Multivector],
    delta: f64,
    override_connected: bool,
) -> Result<LocallyConstantApprox, FractalError> {
    if !set.meta.totally_disconnected && !override_connected {
        return Err(FractalError::NotTotallyDisconnected);
    }
    let k = set.points.len();
    if values.len() != k {
        return Err(FractalError::ValueCountMismatch(values.len(), k));
    }
    let mut uf: Vec<usize> = (0..k).collect();
    fn find(uf: &mut Vec<usize>, i: usize) -> usize {
        if uf[i] != i {
            let r = find(uf, uf[i]);
            uf[i] = r;
        }
        uf[i]
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if set.points[i].dist(&set.points[j]) <= delta {
                let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
                if ri != rj {
                    uf[ri] = rj;
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut cluster_ids = vec![0usize; k];
    for i in 0..k {
        let r = find(&mut uf, i);
        let id = match roots.iter().position(|&x| x == r) {
            Some(id) => id,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        cluster_ids[i] = id;
    }
    let dim = values[0].dim();
    let ncoef = 1usize << dim;
    let mut mins = vec![vec![f64::INFINITY; ncoef]; roots.len()];
    let mut maxs = vec![vec![f64::NEG_INFINITY; ncoef]; roots.len()];
    for i in 0..k {
        let id = cluster_ids[i];
        for (c, &v) in values[i].coeffs().iter().enumerate() {
            mins[id][c] = mins[id][c].min(v);
            maxs[id][c] = maxs[id][c].max(v);
        }
    }
    let cluster_values: Vec<Multivector> = (0..roots.len())
        .map(|id| {
            let coeffs = (0..ncoef).map(|c| (mins[id][c] + maxs[id][c]) / 2.0).collect();
            Multivector::from_coeffs(dim, coeffs).expect("finite midpoints")
        })
        .collect();
    let mut sup_error = 0.0f64;
    for i in 0..k {
        sup_error = sup_error.max((&values[i] - &cluster_values[cluster_ids[i]]).norm_inf());
    }
    let mut largest = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            if cluster_ids[i] == cluster_ids[j] {
                largest = largest.max(set.points[i].dist(&set.points[j]));
            }
        }
    }
    Ok(LocallyConstantApprox {
        cluster_ids,
        cluster_values,
        cluster_count: roots.len(),
        sup_error,
        largest_cluster_diameter: largest,
    })
}
