//! Ball covers of a sampled space: nested compact exhaustions, triple covers
//! subordinate to charts, refinement into boundedly many disjoint families,
//! finite atlases and cover order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{make_bump, SmoothExpr};
use crate::linalg::{distance, norm};
use crate::space::{CoverParams, Region, SampleSet, SpacePresentation};

/// Radii of a nested triple `U ⊂ V ⊂ W` of concentric balls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triple {
    pub r_u: f64,
    pub r_v: f64,
    pub r_w: f64,
}

/// A ball trace `{x ∈ S : ‖x − c‖ < outer}`. Its indicator bump is 1 on the
/// closed inner ball and vanishes outside the outer one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverElement {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
    pub chart_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<Triple>,
}

impl CoverElement {
    pub fn new(center: Vec<f64>, inner: f64, outer: f64, chart_index: usize) -> Self {
        assert!(0.0 <= inner && inner < outer, "need 0 ≤ inner < outer");
        CoverElement {
            center,
            inner,
            outer,
            chart_index,
            triple: None,
        }
    }

    pub fn indicator(&self) -> Result<SmoothExpr> {
        make_bump(self.center.len(), &self.center, self.inner, self.outer)
    }

    /// Inside the closed plateau ball.
    pub fn covers(&self, x: &[f64]) -> bool {
        distance(&self.center, x) <= self.inner
    }

    /// Inside the open element.
    pub fn contains(&self, x: &[f64]) -> bool {
        distance(&self.center, x) < self.outer
    }

    /// Gap between the closed outer balls of two elements (positive iff disjoint).
    pub fn separation(&self, other: &CoverElement) -> f64 {
        distance(&self.center, &other.center) - self.outer - other.outer
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cover {
    pub elements: Vec<CoverElement>,
    pub region: Region,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Samples not inside any plateau ball.
    pub fn uncovered(&self, samples: &SampleSet) -> Vec<usize> {
        (0..samples.len())
            .filter(|&i| !self.elements.iter().any(|e| e.covers(samples.point(i))))
            .collect()
    }
}

/// `G_j = {x ∈ S : ‖x‖ < r_j}` for strictly increasing radii.
#[derive(Debug, Clone, Serialize)]
pub struct Exhaustion {
    pub radii: Vec<f64>,
}

impl Exhaustion {
    /// Membership in `G_j`, `j` counted from 1.
    pub fn contains(&self, j: usize, x: &[f64]) -> bool {
        norm(x) < self.radii[j - 1]
    }

    /// Whether every sample in `cl(G_j)` lies in `G_{j+1}`, for all `j`.
    pub fn nesting_holds(&self, samples: &SampleSet) -> bool {
        self.radii.windows(2).all(|w| {
            samples
                .points()
                .iter()
                .all(|x| norm(x) > w[0] || norm(x) < w[1])
        })
    }
}

/// Nested exhaustion with radii `j·step`. The default step makes `G_J` contain
/// the whole working region.
pub fn compact_exhaustion(
    p: &SpacePresentation,
    horizon: usize,
    step: Option<f64>,
) -> Result<Exhaustion> {
    if horizon == 0 {
        return Err(Error::Format("exhaustion horizon must be at least 1".into()));
    }
    let step = match step {
        Some(s) if s > 0.0 => s,
        Some(_) => return Err(Error::Format("exhaustion step must be positive".into())),
        None => p.region.max_norm() * (1.0 + 1e-9) / horizon as f64 + f64::MIN_POSITIVE,
    };
    Ok(Exhaustion {
        radii: (1..=horizon).map(|j| j as f64 * step).collect(),
    })
}

/// Per-sample bitmask of the open domains containing it.
pub fn domain_masks(
    domains: &[crate::space::Domain],
    samples: &SampleSet,
) -> Result<Vec<u64>> {
    samples
        .points()
        .iter()
        .map(|x| {
            let mut m = 0u64;
            for (i, d) in domains.iter().enumerate() {
                if d.contains(x)? {
                    m |= 1 << i;
                }
            }
            Ok(m)
        })
        .collect()
}

/// Greedy triple cover whose `W` balls each lie in one chart domain.
pub fn triple_cover(
    p: &SpacePresentation,
    samples: &SampleSet,
    params: &CoverParams,
) -> Result<Cover> {
    let masks: Vec<u64> = (0..samples.len()).map(|i| samples.chart_mask(i)).collect();
    triple_cover_with_masks(p, samples, params, &masks)
}

/// Triple cover subordinate to the domains encoded in `masks` (bit `i` set
/// when the sample lies in domain `i`). The element's `chart_index` is the
/// lowest such domain containing its closed `W` ball on samples.
pub fn triple_cover_with_masks(
    p: &SpacePresentation,
    samples: &SampleSet,
    params: &CoverParams,
    masks: &[u64],
) -> Result<Cover> {
    let pts = samples.points();
    let mut covered = vec![false; pts.len()];
    let mut elements = Vec::new();
    let [ku, kv, kw] = params.ratios;

    while let Some(s) = covered.iter().position(|c| !c) {
        let mut radius = params.radius;
        let found = loop {
            let (r_u, r_w) = (ku * radius, kw * radius);
            let mut best: Option<(usize, usize, usize)> = None; // (score, center, chart)
            for c in (0..pts.len()).filter(|&c| distance(&pts[c], &pts[s]) <= r_u) {
                let mut bits = u64::MAX;
                for (x, m) in pts.iter().zip(masks) {
                    if distance(x, &pts[c]) <= r_w {
                        bits &= m;
                    }
                }
                if bits == 0 {
                    continue;
                }
                let score = pts
                    .iter()
                    .zip(&covered)
                    .filter(|(x, done)| !**done && distance(x, &pts[c]) <= r_u)
                    .count();
                if best.is_none_or(|(b, _, _)| score > b) {
                    best = Some((score, c, bits.trailing_zeros() as usize));
                }
            }
            if let Some((_, c, chart)) = best {
                break Some((c, chart, radius));
            }
            radius /= 2.0;
            if radius < params.min_radius {
                break None;
            }
        };
        let Some((c, chart, radius)) = found else {
            return Err(Error::NoChartFits {
                sample: s,
                radius_floor: params.min_radius,
            });
        };
        let triple = Triple {
            r_u: ku * radius,
            r_v: kv * radius,
            r_w: kw * radius,
        };
        for (x, done) in pts.iter().zip(covered.iter_mut()) {
            if distance(x, &pts[c]) <= triple.r_u {
                *done = true;
            }
        }
        elements.push(CoverElement {
            center: pts[c].clone(),
            inner: triple.r_u,
            outer: triple.r_v,
            chart_index: chart,
            triple: Some(triple),
        });
    }
    // index grows with distance from the base point
    let base = &p.base_point;
    elements.sort_by(|a, b| distance(&a.center, base).total_cmp(&distance(&b.center, base)));
    Ok(Cover {
        elements,
        region: p.region.clone(),
    })
}

/// Families of pairwise disjoint cover elements that jointly cover the samples.
#[derive(Debug, Clone, Serialize)]
pub struct DisjointFamilies {
    pub elements: Vec<CoverElement>,
    pub families: Vec<Vec<usize>>,
    /// Smallest gap between closed outer balls within each family
    /// (infinite for singleton families).
    pub margins: Vec<f64>,
    /// Round that produced the families; 0 means the input cover was colored as is.
    pub round: usize,
}

impl DisjointFamilies {
    pub fn family_of(&self, element: usize) -> usize {
        self.families
            .iter()
            .position(|f| f.contains(&element))
            .expect("every element belongs to a family")
    }
}

fn intersect(a: &CoverElement, b: &CoverElement) -> bool {
    a.separation(b) <= 0.0
}

/// Greedy coloring in index order; returns the colors.
fn greedy_colors(elements: &[CoverElement]) -> Vec<usize> {
    let mut colors: Vec<usize> = Vec::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        let used: Vec<usize> = (0..i)
            .filter(|&j| intersect(e, &elements[j]))
            .map(|j| colors[j])
            .collect();
        colors.push((0..).find(|c| !used.contains(c)).expect("unbounded"));
    }
    colors
}

fn families_from_colors(elements: Vec<CoverElement>, colors: &[usize], round: usize) -> DisjointFamilies {
    let count = colors.iter().max().map_or(0, |m| m + 1);
    let families: Vec<Vec<usize>> = (0..count)
        .map(|c| (0..colors.len()).filter(|&i| colors[i] == c).collect())
        .collect();
    let margins = families
        .iter()
        .map(|f| {
            let mut m = f64::INFINITY;
            for (a, &i) in f.iter().enumerate() {
                for &j in &f[a + 1..] {
                    m = m.min(elements[i].separation(&elements[j]));
                }
            }
            m
        })
        .collect();
    DisjointFamilies {
        elements,
        families,
        margins,
        round,
    }
}

/// Largest plateau ratio used for the packing construction.
const PACK_INNER: f64 = 0.8;

/// Rebuild `n + 1` families directly: a packing of disjoint balls, then balls
/// over the leftover gaps. Every new ball must lie (on samples) inside one of
/// the domains the cover is subordinate to.
fn pack_families(
    families: usize,
    samples: &SampleSet,
    masks: &[u64],
    radius: f64,
) -> Option<(Vec<CoverElement>, Vec<usize>)> {
    let pts = samples.points();
    let host = |c: &[f64], r: f64| -> Option<usize> {
        let bits = pts
            .iter()
            .zip(masks)
            .filter(|(x, _)| distance(x, c) <= r)
            .fold(u64::MAX, |acc, (_, m)| acc & m);
        (bits != 0).then(|| bits.trailing_zeros() as usize)
    };
    let mut elements: Vec<CoverElement> = Vec::new();
    let mut colors: Vec<usize> = Vec::new();
    let mut covered = vec![false; pts.len()];
    let mark = |e: &CoverElement, covered: &mut [bool]| {
        for (x, c) in pts.iter().zip(covered.iter_mut()) {
            if e.covers(x) {
                *c = true;
            }
        }
    };

    // family 0: greedy packing of equal balls
    for s in 0..pts.len() {
        if covered[s] {
            continue;
        }
        let cand = CoverElement::new(pts[s].clone(), PACK_INNER * radius, radius, 0);
        if elements.iter().any(|e| intersect(e, &cand)) {
            continue;
        }
        if let Some(chart) = host(&pts[s], radius) {
            let e = CoverElement {
                chart_index: chart,
                ..cand
            };
            mark(&e, &mut covered);
            elements.push(e);
            colors.push(0);
        }
    }

    // remaining families: one ball per connected gap
    let link = 0.25 * radius;
    for color in 1..families {
        let mut tried = vec![false; pts.len()];
        while let Some(s) = (0..pts.len()).find(|&i| !covered[i] && !tried[i]) {
            // gap component around s, bounded to a ball of radius `radius`
            let mut cluster = vec![s];
            let mut in_cluster = vec![false; pts.len()];
            in_cluster[s] = true;
            let mut k = 0;
            while k < cluster.len() {
                let a = cluster[k];
                for b in 0..pts.len() {
                    if !covered[b]
                        && !in_cluster[b]
                        && distance(&pts[a], &pts[b]) <= link
                        && distance(&pts[s], &pts[b]) <= radius
                    {
                        in_cluster[b] = true;
                        cluster.push(b);
                    }
                }
                k += 1;
            }
            for &i in &cluster {
                tried[i] = true;
            }
            let (center, reach) = cluster
                .iter()
                .map(|&c| {
                    let r = cluster
                        .iter()
                        .map(|&o| distance(&pts[c], &pts[o]))
                        .fold(0.0, f64::max);
                    (c, r)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("cluster is nonempty");
            let inner = reach.max(0.05 * radius) * (1.0 + 1e-9);
            let cand = CoverElement::new(pts[center].clone(), inner, inner / PACK_INNER, 0);
            let clash = elements
                .iter()
                .zip(&colors)
                .any(|(e, &c)| c == color && intersect(e, &cand));
            if clash {
                continue;
            }
            if let Some(chart) = host(&cand.center, cand.outer) {
                let e = CoverElement {
                    chart_index: chart,
                    ..cand
                };
                mark(&e, &mut covered);
                elements.push(e);
                colors.push(color);
            }
        }
    }
    covered.iter().all(|c| *c).then_some((elements, colors))
}

/// Refinement rounds tried by default before giving up.
pub const DEFAULT_REFINE_ROUNDS: usize = 8;

/// Refine `cover` into at most `n + 1` families of pairwise disjoint balls.
///
/// Round 0 colors the intersection graph of the cover itself. Later rounds
/// first pull outer radii toward the plateau radii and recolor, then rebuild
/// the families by packing with shrinking ball sizes.
pub fn refine_bounded_order(
    cover: &Cover,
    n: usize,
    samples: &SampleSet,
    max_rounds: usize,
) -> Result<DisjointFamilies> {
    let masks: Vec<u64> = (0..samples.len()).map(|i| samples.chart_mask(i)).collect();
    refine_bounded_order_with_masks(cover, n, samples, &masks, max_rounds)
}

/// As [`refine_bounded_order`], with rebuilt balls subordinate to the domains
/// encoded in `masks` rather than to the charts.
pub fn refine_bounded_order_with_masks(
    cover: &Cover,
    n: usize,
    samples: &SampleSet,
    masks: &[u64],
    max_rounds: usize,
) -> Result<DisjointFamilies> {
    let allowed = n + 1;
    let covers_all = |els: &[CoverElement]| {
        samples
            .points()
            .iter()
            .all(|x| els.iter().any(|e| e.covers(x)))
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut record = |colors: &[usize], els: &[CoverElement]| {
        let needed = colors.iter().max().map_or(0, |m| m + 1);
        if best.as_ref().is_none_or(|(b, _)| needed < *b) {
            let worst = colors.iter().position(|&c| c + 1 == needed).unwrap_or(0);
            let mut pattern: Vec<usize> = (0..els.len())
                .filter(|&j| j == worst || intersect(&els[worst], &els[j]))
                .collect();
            pattern.sort_unstable();
            best = Some((needed, pattern));
        }
    };

    let shrink_rounds = max_rounds.min(3);
    for round in 0..=shrink_rounds {
        let factor = 0.5f64.powi(round as i32);
        let els: Vec<CoverElement> = cover
            .elements
            .iter()
            .map(|e| CoverElement {
                outer: e.inner + (e.outer - e.inner) * factor,
                ..e.clone()
            })
            .collect();
        if !covers_all(&els) {
            break;
        }
        let colors = greedy_colors(&els);
        if colors.iter().all(|&c| c < allowed) {
            return Ok(families_from_colors(els, &colors, round));
        }
        record(&colors, &els);
    }

    let base = cover
        .elements
        .iter()
        .map(|e| e.inner)
        .fold(0.0, f64::max);
    for round in shrink_rounds + 1..=max_rounds {
        let radius = base * 0.75f64.powi((round - shrink_rounds - 1) as i32);
        if let Some((els, colors)) = pack_families(allowed, samples, masks, radius) {
            let fam = families_from_colors(els, &colors, round);
            debug_assert!(fam.margins.iter().all(|m| *m > 0.0));
            return Ok(fam);
        }
    }
    let (needed, pattern) = best.unwrap_or((allowed + 1, Vec::new()));
    Err(Error::ExceededFamilies {
        needed,
        allowed,
        pattern,
    })
}

/// Maximum number of elements containing a sample.
pub fn cover_order(elements: &[CoverElement], samples: &SampleSet) -> usize {
    samples
        .points()
        .iter()
        .map(|x| elements.iter().filter(|e| e.contains(x)).count())
        .max()
        .unwrap_or(0)
}

/// One ball of a generalized chart: chart map, padded and shifted along the first axis.
#[derive(Debug, Clone, Serialize)]
pub struct AtlasPiece {
    pub element: usize,
    pub chart: usize,
    pub offset: f64,
    /// Range of the first image coordinate over the piece's samples, after the shift.
    pub span: (f64, f64),
}

/// `(V_i, υ_i)`: a disjoint union of balls with a piecewise chart map.
#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedChart {
    pub family: usize,
    pub target_dim: usize,
    pub pieces: Vec<AtlasPiece>,
    /// Smallest distance between images of distinct samples in `V_i`.
    pub injectivity_margin: Option<f64>,
    /// Smallest gap between first-coordinate spans of distinct pieces.
    pub piece_separation: f64,
}

impl GeneralizedChart {
    /// `υ_i(x)`, or `None` when `x` is outside every piece.
    pub fn eval(
        &self,
        p: &SpacePresentation,
        families: &DisjointFamilies,
        x: &[f64],
    ) -> Result<Option<Vec<f64>>> {
        for piece in &self.pieces {
            if families.elements[piece.element].contains(x) {
                let mut y = p.charts[piece.chart].map.eval(x)?;
                y.resize(self.target_dim, 0.0);
                y[0] += piece.offset;
                return Ok(Some(y));
            }
        }
        Ok(None)
    }
}

/// Minimum gap left between the first-coordinate spans of neighbouring pieces.
pub const PIECE_GAP: f64 = 1.0;

/// One generalized chart per family.
pub fn finite_atlas(
    p: &SpacePresentation,
    families: &DisjointFamilies,
    samples: &SampleSet,
) -> Result<Vec<GeneralizedChart>> {
    let target_dim = p
        .charts
        .iter()
        .map(|c| c.target_dim)
        .fold(p.structural_dim.max(1), usize::max);
    let mut atlas = Vec::with_capacity(families.families.len());
    for (fi, family) in families.families.iter().enumerate() {
        let mut cursor = 0.0;
        let mut pieces = Vec::with_capacity(family.len());
        for &ei in family {
            let e = &families.elements[ei];
            let chart = &p.charts[e.chart_index];
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for x in samples.points().iter().filter(|x| e.contains(x)) {
                let y0 = chart.map.eval(x)?[0];
                lo = lo.min(y0);
                hi = hi.max(y0);
            }
            if lo > hi {
                // no samples in this piece: its span is just the image of the center
                let y0 = chart.map.eval(&e.center)?[0];
                lo = y0;
                hi = y0;
            }
            let mut offset = cursor - lo;
            // keep the gap exact despite rounding in `lo + offset`
            while lo + offset < cursor {
                offset = offset.next_up();
            }
            pieces.push(AtlasPiece {
                element: ei,
                chart: e.chart_index,
                offset,
                span: (lo + offset, hi + offset),
            });
            let end = hi + offset;
            cursor = end + PIECE_GAP;
            while cursor - end < PIECE_GAP {
                cursor = cursor.next_up();
            }
        }
        let piece_separation = pieces
            .windows(2)
            .map(|w| w[1].span.0 - w[0].span.1)
            .fold(f64::INFINITY, f64::min);
        let mut chart = GeneralizedChart {
            family: fi,
            target_dim,
            pieces,
            injectivity_margin: None,
            piece_separation,
        };
        let images = samples
            .points()
            .iter()
            .map(|x| chart.eval(p, families, x))
            .collect::<Result<Vec<_>>>()?;
        let images: Vec<Vec<f64>> = images.into_iter().flatten().collect();
        let mut margin: Option<f64> = None;
        for a in 0..images.len() {
            for b in a + 1..images.len() {
                let d = distance(&images[a], &images[b]);
                margin = Some(margin.map_or(d, |m: f64| m.min(d)));
            }
        }
        chart.injectivity_margin = margin;
        atlas.push(chart);
    }
    Ok(atlas)
}
