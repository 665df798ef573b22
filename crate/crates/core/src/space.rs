//! Concrete presentations of subcartesian spaces: a constraint set inside
//! `R^N`, expression charts, membership tests and sampling.

use rand::Rng;
use serde::Serialize;

use crate::document::{ChartDoc, CoverDoc, PieceDoc, SamplesDoc, SpaceDocument};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprVec, SmoothExpr};
use crate::linalg::distance;
use crate::rng;

pub const DEFAULT_TOL_EQ: f64 = 1e-9;
pub const DEFAULT_TOL_INEQ: f64 = 1e-9;
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Samples closer than this are treated as the same point.
pub const DEDUPE_EPS: f64 = 1e-10;
const MAX_CHARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub tol_eq: f64,
    pub tol_ineq: f64,
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_eq: DEFAULT_TOL_EQ,
            tol_ineq: DEFAULT_TOL_INEQ,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Region {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() {
            return Err(Error::Format(
                "working region bounds must be nonempty and of equal length".into(),
            ));
        }
        if min.iter().zip(&max).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Format(
                "working region must have positive volume".into(),
            ));
        }
        Ok(Region { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// Largest Euclidean norm of a point of the box.
    pub fn max_norm(&self) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// An open set cut out of `S` by strict inequalities `d_k(x) > 0`.
/// An empty condition list is the whole space.
#[derive(Debug, Clone)]
pub struct Domain {
    pub conditions: Vec<SmoothExpr>,
}

impl Domain {
    pub fn whole() -> Self {
        Domain {
            conditions: Vec::new(),
        }
    }

    pub fn parse(texts: &[String], dim: usize) -> Result<Self> {
        Ok(Domain {
            conditions: texts
                .iter()
                .map(|t| parse_expr(t, dim))
                .collect::<Result<_>>()?,
        })
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        for c in &self.conditions {
            if c.eval(x)? <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub domain: Domain,
    pub map: ExprVec,
    pub target_dim: usize,
    pub inverse: Option<ExprVec>,
}

impl Chart {
    fn from_doc(doc: &ChartDoc, index: usize, dim: usize) -> Result<Self> {
        if doc.map.len() != doc.target_dim {
            return Err(Error::Format(format!(
                "chart {index}: map has {} components but target_dim is {}",
                doc.map.len(),
                doc.target_dim
            )));
        }
        if doc.target_dim == 0 || doc.target_dim > dim {
            return Err(Error::Format(format!(
                "chart {index}: target_dim {} must lie in 1..={dim}",
                doc.target_dim
            )));
        }
        let inverse = match &doc.inverse {
            None => None,
            Some(inv) => {
                if inv.len() != dim {
                    return Err(Error::Format(format!(
                        "chart {index}: inverse has {} components, ambient dimension is {dim}",
                        inv.len()
                    )));
                }
                Some(ExprVec::parse(inv, doc.target_dim)?)
            }
        };
        Ok(Chart {
            domain: Domain::parse(&doc.domain, dim)?,
            map: ExprVec::parse(&doc.map, dim)?,
            target_dim: doc.target_dim,
            inverse,
        })
    }
}

/// Radii for greedy ball covers: `radius` scales the three nested balls by `ratios`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverParams {
    pub radius: f64,
    pub ratios: [f64; 3],
    pub min_radius: f64,
}

impl CoverParams {
    pub fn new(radius: f64, ratios: [f64; 3]) -> Self {
        CoverParams {
            radius,
            ratios,
            min_radius: radius / 64.0,
        }
    }

    fn from_doc(doc: &CoverDoc) -> Result<Self> {
        let [a, b, c] = doc.ratios;
        if !(doc.radius > 0.0 && 0.0 < a && a < b && b < c) {
            return Err(Error::Format(
                "cover radius must be positive and ratios strictly increasing".into(),
            ));
        }
        let mut p = CoverParams::new(doc.radius, doc.ratios);
        if let Some(m) = doc.min_radius {
            p.min_radius = m;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone)]
pub enum PieceSource {
    Chart(usize),
    Map(ExprVec),
}

#[derive(Debug, Clone)]
pub struct ParametricPiece {
    pub source: PieceSource,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub counts: Vec<usize>,
    pub endpoint: bool,
}

#[derive(Debug, Clone)]
pub enum SampleConfig {
    /// Regular grid over the working region, filtered by membership.
    Grid {
        step: Option<f64>,
        counts: Option<Vec<usize>>,
        min_count: usize,
    },
    Explicit { points: Vec<Vec<f64>> },
    /// Parameter grids pushed through chart inverses or explicit maps.
    Parametric {
        pieces: Vec<ParametricPiece>,
        min_count: usize,
    },
    /// Uniform draws in the working region, kept when they pass membership.
    Random { count: usize, max_draws: usize },
}

impl SampleConfig {
    /// Same sampler with its density replaced by `n` points (per axis for grids,
    /// per piece for parametric samplers). Explicit sample lists are unchanged.
    pub fn with_count(&self, n: usize) -> SampleConfig {
        match self {
            SampleConfig::Grid { min_count, .. } => SampleConfig::Grid {
                step: None,
                counts: Some(vec![n]),
                min_count: (*min_count).min(n),
            },
            SampleConfig::Explicit { .. } => self.clone(),
            SampleConfig::Parametric { pieces, min_count } => SampleConfig::Parametric {
                pieces: pieces
                    .iter()
                    .map(|p| ParametricPiece {
                        counts: vec![n; p.counts.len()],
                        ..p.clone()
                    })
                    .collect(),
                min_count: (*min_count).min(n),
            },
            SampleConfig::Random { max_draws, .. } => SampleConfig::Random {
                count: n,
                max_draws: (*max_draws).max(100 * n),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpacePresentation {
    pub name: String,
    pub ambient_dim: usize,
    pub structural_dim: usize,
    pub manifold: bool,
    pub equalities: Vec<SmoothExpr>,
    pub inequalities: Vec<SmoothExpr>,
    pub charts: Vec<Chart>,
    pub region: Region,
    pub tolerances: Tolerances,
    pub sampler: SampleConfig,
    pub base_point: Vec<f64>,
    pub cover_params: CoverParams,
}

/// Parse and cross-validate a space document.
pub fn load_presentation(doc: &SpaceDocument) -> Result<SpacePresentation> {
    let n = doc.ambient_dim;
    if n == 0 {
        return Err(Error::Format("ambient_dim must be positive".into()));
    }
    if doc.charts.is_empty() {
        return Err(Error::Format(
            "presentation declares no charts; chart coverage is required".into(),
        ));
    }
    if doc.charts.len() > MAX_CHARTS {
        return Err(Error::Format(format!("at most {MAX_CHARTS} charts supported")));
    }
    let region = Region::new(doc.working_region.min.clone(), doc.working_region.max.clone())?;
    if region.dim() != n {
        return Err(Error::Format(format!(
            "working region has dimension {}, ambient_dim is {n}",
            region.dim()
        )));
    }
    let parse_all = |texts: &[String]| -> Result<Vec<SmoothExpr>> {
        texts.iter().map(|t| parse_expr(t, n)).collect()
    };
    let charts = doc
        .charts
        .iter()
        .enumerate()
        .map(|(i, c)| Chart::from_doc(c, i, n))
        .collect::<Result<Vec<_>>>()?;

    let mut tolerances = Tolerances::default();
    if let Some(t) = &doc.tolerances {
        tolerances.tol_eq = t.tol_eq.unwrap_or(tolerances.tol_eq);
        tolerances.tol_ineq = t.tol_ineq.unwrap_or(tolerances.tol_ineq);
        tolerances.rank_tol = t.rank_tol.unwrap_or(tolerances.rank_tol);
    }
    let base_point = doc.base_point.clone().unwrap_or_else(|| vec![0.0; n]);
    if base_point.len() != n {
        return Err(Error::Format("base_point has the wrong dimension".into()));
    }
    let cover_params = match &doc.cover {
        Some(c) => CoverParams::from_doc(c)?,
        None => {
            let extent = region
                .min
                .iter()
                .zip(&region.max)
                .map(|(a, b)| b - a)
                .fold(0.0, f64::max);
            CoverParams::new(extent / 8.0, [1.0, 1.2, 1.5])
        }
    };
    let sampler = sampler_from_doc(&doc.samples, n, &charts)?;

    Ok(SpacePresentation {
        name: doc.name.clone(),
        ambient_dim: n,
        structural_dim: doc.structural_dim,
        manifold: doc.manifold,
        equalities: parse_all(&doc.constraints.equalities)?,
        inequalities: parse_all(&doc.constraints.inequalities)?,
        charts,
        region,
        tolerances,
        sampler,
        base_point,
        cover_params,
    })
}

fn sampler_from_doc(doc: &SamplesDoc, n: usize, charts: &[Chart]) -> Result<SampleConfig> {
    Ok(match doc {
        SamplesDoc::Grid {
            step,
            counts,
            min_count,
        } => {
            if step.is_none() && counts.is_none() {
                return Err(Error::Format("grid sampler needs `step` or `counts`".into()));
            }
            if step.is_some_and(|s| !(s > 0.0)) {
                return Err(Error::Format("grid step must be positive".into()));
            }
            if let Some(c) = counts {
                if c.len() != 1 && c.len() != n {
                    return Err(Error::Format("grid counts must have 1 or N entries".into()));
                }
            }
            SampleConfig::Grid {
                step: *step,
                counts: counts.clone(),
                min_count: min_count.unwrap_or(1),
            }
        }
        SamplesDoc::Explicit { points } => {
            if points.iter().any(|p| p.len() != n) {
                return Err(Error::Format("explicit sample of wrong dimension".into()));
            }
            SampleConfig::Explicit {
                points: points.clone(),
            }
        }
        SamplesDoc::Parametric { pieces, min_count } => SampleConfig::Parametric {
            pieces: pieces
                .iter()
                .map(|p| piece_from_doc(p, n, charts))
                .collect::<Result<_>>()?,
            min_count: min_count.unwrap_or(1),
        },
        SamplesDoc::Random { count, max_draws } => SampleConfig::Random {
            count: *count,
            max_draws: max_draws.unwrap_or(1000 * count.max(&1)),
        },
    })
}

fn piece_from_doc(doc: &PieceDoc, n: usize, charts: &[Chart]) -> Result<ParametricPiece> {
    let k = doc.min.len();
    if k == 0 || doc.max.len() != k || doc.counts.len() != k {
        return Err(Error::Format(
            "parametric piece needs min, max and counts of equal nonzero length".into(),
        ));
    }
    let source = match (&doc.chart, &doc.map) {
        (Some(c), None) => {
            let chart = charts
                .get(*c)
                .ok_or_else(|| Error::Format(format!("parametric piece refers to missing chart {c}")))?;
            if chart.inverse.is_none() || chart.target_dim != k {
                return Err(Error::Format(format!(
                    "parametric piece on chart {c} needs an inverse with {k} parameters"
                )));
            }
            PieceSource::Chart(*c)
        }
        (None, Some(map)) => {
            if map.len() != n {
                return Err(Error::Format("parametric map must have N components".into()));
            }
            PieceSource::Map(ExprVec::parse(map, k)?)
        }
        _ => {
            return Err(Error::Format(
                "parametric piece needs exactly one of `chart` or `map`".into(),
            ))
        }
    };
    Ok(ParametricPiece {
        source,
        min: doc.min.clone(),
        max: doc.max.clone(),
        counts: doc.counts.clone(),
        endpoint: doc.endpoint,
    })
}

impl SpacePresentation {
    pub fn from_json(text: &str) -> Result<Self> {
        load_presentation(&SpaceDocument::from_json(text)?)
    }

    /// `|g_i(x)| ≤ tol_eq` for every equality and `h_j(x) ≥ −tol_ineq` for every inequality.
    pub fn membership(&self, x: &[f64]) -> Result<bool> {
        self.membership_with(x, self.tolerances.tol_eq, self.tolerances.tol_ineq)
    }

    pub fn membership_with(&self, x: &[f64], tol_eq: f64, tol_ineq: f64) -> Result<bool> {
        for g in &self.equalities {
            if g.eval(x)?.abs() > tol_eq {
                return Ok(false);
            }
        }
        for h in &self.inequalities {
            if h.eval(x)? < -tol_ineq {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Jacobian of the equality constraints at `x` (rows = constraints).
    pub fn constraint_jacobian(&self, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        let mut jac = nalgebra::DMatrix::zeros(self.equalities.len(), self.ambient_dim);
        for (r, g) in self.equalities.iter().enumerate() {
            let (_, grad) = g.gradient(x)?;
            for (c, v) in grad.into_iter().enumerate() {
                jac[(r, c)] = v;
            }
        }
        Ok(jac)
    }

    /// Bitmask of the charts whose domain contains `x`.
    pub fn chart_mask(&self, x: &[f64]) -> Result<u64> {
        let mut mask = 0u64;
        for (i, c) in self.charts.iter().enumerate() {
            if c.domain.contains(x)? {
                mask |= 1 << i;
            }
        }
        Ok(mask)
    }

    /// Whether every chart has one target dimension and a smooth inverse.
    pub fn charts_are_manifold_like(&self) -> bool {
        let d = self.charts[0].target_dim;
        self.charts
            .iter()
            .all(|c| c.target_dim == d && c.inverse.is_some())
    }
}

/// A finite, deduplicated set of points of `S`.
#[derive(Debug, Clone)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    chart_masks: Vec<u64>,
    min_spacing: f64,
}

impl SampleSet {
    /// Validate, deduplicate and index `points` against `p`.
    pub fn new(p: &SpacePresentation, points: Vec<Vec<f64>>) -> Result<Self> {
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        for (i, x) in points.into_iter().enumerate() {
            if x.len() != p.ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "sample {i} has {} coordinates, ambient dimension is {}",
                    x.len(),
                    p.ambient_dim
                )));
            }
            if !p.membership(&x)? {
                return Err(Error::Format(format!("sample {i} fails membership")));
            }
            if kept.iter().all(|k| distance(k, &x) > DEDUPE_EPS) {
                kept.push(x);
            }
        }
        let chart_masks = kept
            .iter()
            .map(|x| p.chart_mask(x))
            .collect::<Result<Vec<_>>>()?;
        let mut min_spacing = f64::INFINITY;
        for i in 0..kept.len() {
            for j in i + 1..kept.len() {
                min_spacing = min_spacing.min(distance(&kept[i], &kept[j]));
            }
        }
        Ok(SampleSet {
            points: kept,
            chart_masks,
            min_spacing,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn chart_mask(&self, i: usize) -> u64 {
        self.chart_masks[i]
    }

    pub fn in_chart(&self, i: usize, chart: usize) -> bool {
        self.chart_masks[i] & (1 << chart) != 0
    }

    /// Smallest distance between two distinct samples (infinite for < 2 samples).
    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }
}

fn grid_axis(lo: f64, hi: f64, count: usize, endpoint: bool) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        c => {
            let div = if endpoint { (c - 1) as f64 } else { c as f64 };
            (0..c).map(|j| lo + (hi - lo) * j as f64 / div).collect()
        }
    }
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for v in axis {
                let mut p = prefix.clone();
                p.push(*v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Draw a deterministic sample set from `config`.
pub fn sample(p: &SpacePresentation, config: &SampleConfig, seed: u64) -> Result<SampleSet> {
    let n = p.ambient_dim;
    let (candidates, min_count) = match config {
        SampleConfig::Grid {
            step,
            counts,
            min_count,
        } => {
            let axes: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let (lo, hi) = (p.region.min[i], p.region.max[i]);
                    match (counts, step) {
                        (Some(c), _) => grid_axis(lo, hi, c[if c.len() == 1 { 0 } else { i }], true),
                        (None, Some(s)) => {
                            let count = ((hi - lo) / s + 1e-9).floor() as usize + 1;
                            (0..count).map(|j| lo + j as f64 * s).collect()
                        }
                        (None, None) => unreachable!("validated at load"),
                    }
                })
                .collect();
            let mut kept = Vec::new();
            for x in cartesian(&axes) {
                if p.membership(&x)? {
                    kept.push(x);
                }
            }
            (kept, *min_count)
        }
        SampleConfig::Explicit { points } => (points.clone(), 1),
        SampleConfig::Parametric { pieces, min_count } => {
            let mut kept = Vec::new();
            for piece in pieces {
                let axes: Vec<Vec<f64>> = (0..piece.min.len())
                    .map(|i| grid_axis(piece.min[i], piece.max[i], piece.counts[i], piece.endpoint))
                    .collect();
                let map = match &piece.source {
                    PieceSource::Chart(c) => p.charts[*c]
                        .inverse
                        .as_ref()
                        .expect("validated at load"),
                    PieceSource::Map(m) => m,
                };
                for t in cartesian(&axes) {
                    let x = map.eval(&t)?;
                    if p.membership(&x)? {
                        kept.push(x);
                    }
                }
            }
            (kept, *min_count)
        }
        SampleConfig::Random { count, max_draws } => {
            let mut r = rng::stream(seed, rng::SAMPLING, 0);
            let mut kept = Vec::with_capacity(*count);
            let mut draws = 0;
            while kept.len() < *count && draws < *max_draws {
                draws += 1;
                let x: Vec<f64> = (0..n)
                    .map(|i| r.random_range(p.region.min[i]..=p.region.max[i]))
                    .collect();
                if p.membership(&x)? {
                    kept.push(x);
                }
            }
            (kept, *count)
        }
    };
    let set = SampleSet::new(p, candidates)?;
    if set.len() < min_count.max(1) {
        return Err(Error::TooFewSamples {
            found: set.len(),
            required: min_count.max(1),
        });
    }
    Ok(set)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartDiagnostics {
    pub chart: usize,
    pub samples_in_domain: usize,
    /// Smallest image distance between two distinct samples in the domain.
    pub injectivity_margin: Option<f64>,
    /// Largest `‖inverse(map(x)) − x‖` over samples in the domain.
    pub round_trip_error: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartReport {
    pub charts: Vec<ChartDiagnostics>,
    /// Fraction of samples lying in at least one chart domain.
    pub coverage: f64,
    pub uncovered_samples: Vec<usize>,
    pub passed: bool,
}

pub const INJECTIVITY_FLOOR: f64 = 1e-12;
pub const ROUND_TRIP_TOL: f64 = 1e-8;

/// Per-chart injectivity, inverse round-trip and coverage diagnostics.
pub fn validate_charts(p: &SpacePresentation, samples: &SampleSet) -> Result<ChartReport> {
    let mut charts = Vec::with_capacity(p.charts.len());
    for (ci, chart) in p.charts.iter().enumerate() {
        let idx: Vec<usize> = (0..samples.len()).filter(|&i| samples.in_chart(i, ci)).collect();
        let images = idx
            .iter()
            .map(|&i| chart.map.eval(samples.point(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut margin: Option<f64> = None;
        for a in 0..images.len() {
            for b in a + 1..images.len() {
                let d = distance(&images[a], &images[b]);
                margin = Some(margin.map_or(d, |m| m.min(d)));
            }
        }
        let round_trip_error = match &chart.inverse {
            None => None,
            Some(inv) => {
                let mut worst = 0.0f64;
                for (k, &i) in idx.iter().enumerate() {
                    let back = inv.eval(&images[k])?;
                    worst = worst.max(distance(&back, samples.point(i)));
                }
                Some(worst)
            }
        };
        let flagged = margin.is_some_and(|m| m <= INJECTIVITY_FLOOR)
            || round_trip_error.is_some_and(|e| e > ROUND_TRIP_TOL);
        charts.push(ChartDiagnostics {
            chart: ci,
            samples_in_domain: idx.len(),
            injectivity_margin: margin,
            round_trip_error,
            flagged,
        });
    }
    let uncovered_samples: Vec<usize> = (0..samples.len())
        .filter(|&i| samples.chart_mask(i) == 0)
        .collect();
    let coverage = if samples.is_empty() {
        0.0
    } else {
        1.0 - uncovered_samples.len() as f64 / samples.len() as f64
    };
    let passed = uncovered_samples.is_empty() && !samples.is_empty() && charts.iter().all(|c| !c.flagged);
    Ok(ChartReport {
        charts,
        coverage,
        uncovered_samples,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn circle_fixture_loads() {
        let p = fixtures::circle();
        assert_eq!(p.ambient_dim, 2);
        assert_eq!(p.structural_dim, 1);
        assert_eq!(p.charts.len(), 2);
    }

    #[test]
    fn cross_fixture_declares_dimension_two() {
        let p = fixtures::cross();
        assert_eq!((p.ambient_dim, p.structural_dim), (2, 2));
    }

    #[test]
    fn wrong_chart_arity_is_rejected() {
        let mut doc = fixtures::document("circle");
        doc.charts[0].map.push("x1".into());
        assert!(matches!(load_presentation(&doc), Err(Error::Format(_))));
        let mut doc = fixtures::document("circle");
        doc.charts.clear();
        assert!(matches!(load_presentation(&doc), Err(Error::Format(_))));
        let mut doc = fixtures::document("circle");
        doc.constraints.equalities[0] = "x3".into();
        assert!(matches!(
            load_presentation(&doc),
            Err(Error::VariableOutOfRange { index: 3, dim: 2 })
        ));
    }

    #[test]
    fn circle_membership() {
        let p = fixtures::circle();
        assert!(p.membership(&[1.0, 0.0]).unwrap());
        assert!(!p.membership(&[2.0, 0.0]).unwrap());
    }

    #[test]
    fn half_line_tolerance_semantics() {
        let p = fixtures::half_line();
        assert!(p.membership(&[-1e-12]).unwrap());
        assert!(!p.membership(&[-1e-6]).unwrap());
    }

    #[test]
    fn half_line_grid_count() {
        let p = fixtures::half_line();
        let config = SampleConfig::Grid {
            step: Some(0.1),
            counts: None,
            min_count: 1,
        };
        let s = sample(&p, &config, 0).unwrap();
        assert_eq!(s.len(), 201);
    }

    #[test]
    fn circle_parametric_samples_satisfy_constraint() {
        let p = fixtures::circle();
        let s = sample(&p, &p.sampler, 0).unwrap();
        assert_eq!(s.len(), 360);
        for x in s.points() {
            assert!((x[0] * x[0] + x[1] * x[1] - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn cross_samples_lie_exactly_on_axes() {
        let p = fixtures::cross();
        let s = sample(&p, &p.sampler, 0).unwrap();
        assert!(s.len() >= 1000);
        for x in s.points() {
            assert_eq!(x[0] * x[1], 0.0);
        }
    }

    #[test]
    fn random_sampling_is_reproducible() {
        let p = fixtures::half_line();
        let config = SampleConfig::Random {
            count: 50,
            max_draws: 10_000,
        };
        let a = sample(&p, &config, 11).unwrap();
        let b = sample(&p, &config, 11).unwrap();
        let c = sample(&p, &config, 12).unwrap();
        assert_eq!(a.points(), b.points());
        assert_ne!(a.points(), c.points());
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let p = fixtures::circle();
        // an ambient grid essentially never lands on the circle
        let config = SampleConfig::Grid {
            step: None,
            counts: Some(vec![7]),
            min_count: 10,
        };
        assert!(matches!(
            sample(&p, &config, 0),
            Err(Error::TooFewSamples { required: 10, .. })
        ));
    }

    #[test]
    fn circle_charts_validate() {
        let p = fixtures::circle();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let r = validate_charts(&p, &s).unwrap();
        assert_eq!(r.coverage, 1.0);
        assert!(r.passed);
        for c in &r.charts {
            assert!(c.round_trip_error.unwrap() < 1e-8);
            assert!(c.injectivity_margin.unwrap() > 0.0);
        }
    }

    #[test]
    fn duplicated_components_are_flagged() {
        let mut doc = fixtures::document("cross");
        doc.charts[0].map = vec!["x1".into(), "x1".into()];
        doc.charts[0].inverse = None;
        let p = load_presentation(&doc).unwrap();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let r = validate_charts(&p, &s).unwrap();
        assert_eq!(r.charts[0].injectivity_margin, Some(0.0));
        assert!(r.charts[0].flagged);
        assert!(!r.passed);
    }

    #[test]
    fn uncovered_sample_is_flagged() {
        let mut doc = fixtures::document("circle");
        doc.charts.truncate(1);
        let p = load_presentation(&doc).unwrap();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let r = validate_charts(&p, &s).unwrap();
        assert!(r.coverage < 1.0);
        assert!(!r.passed);
    }
}
