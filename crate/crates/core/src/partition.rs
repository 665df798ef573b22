//! Partitions of unity built from cover bumps, and the exhaustion function
//! `u = Σ j·ρ_j`.

use rand::Rng;
use serde::Serialize;

use crate::cover::CoverElement;
use crate::error::{Error, Result};
use crate::expr::{ExprVec, SmoothExpr};
use crate::linalg::distance;
use crate::rng;
use crate::space::{Region, SampleSet};

/// Smallest admissible value of `Σ b_j` at a sample.
pub const NORMALIZER_FLOOR: f64 = 1e-12;

/// `ρ_i = b_i / Σ_j b_j` for the bumps `b_i` of a family of cover elements.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub elements: Vec<CoverElement>,
    pub bumps: Vec<SmoothExpr>,
    pub normalizer: SmoothExpr,
    terms: ExprVec,
}

impl PartitionOfUnity {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn term(&self, i: usize) -> &SmoothExpr {
        self.terms.component(i)
    }

    pub fn terms(&self) -> &ExprVec {
        &self.terms
    }

    /// All `ρ_i(x)` at once.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.terms.eval(x)
    }
}

/// Normalized bumps of `elements`; every sample must see a positive normalizer.
pub fn partition_of_unity(elements: &[CoverElement], samples: &SampleSet) -> Result<PartitionOfUnity> {
    let dim = samples
        .points()
        .first()
        .map(|x| x.len())
        .or_else(|| elements.first().map(|e| e.center.len()))
        .ok_or_else(|| Error::Format("partition of unity needs samples".into()))?;
    let bumps = elements
        .iter()
        .map(|e| e.indicator())
        .collect::<Result<Vec<_>>>()?;
    let normalizer = SmoothExpr::sum(dim, &bumps);
    for (i, x) in samples.points().iter().enumerate() {
        let v = normalizer.eval(x)?;
        if v <= NORMALIZER_FLOOR {
            return Err(Error::NormalizerVanishes { sample: i, value: v });
        }
    }
    let terms = ExprVec::new(dim, bumps.iter().map(|b| b / &normalizer).collect())?;
    Ok(PartitionOfUnity {
        elements: elements.to_vec(),
        bumps,
        normalizer,
        terms,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub terms: usize,
    /// `max |Σρ − 1|` over samples.
    pub max_sum_error: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// Number of off-support probe points evaluated per term.
    pub probes_per_term: Vec<usize>,
    /// Largest `|ρ_i|` seen at a probe outside element `i`; exactly zero when subordinate.
    pub max_off_support: f64,
    pub passed: bool,
}

pub const SUM_TOL: f64 = 1e-9;
pub const PROBES: usize = 50;

/// Check normalization and range at every sample, and subordination at
/// `PROBES` seeded points outside each element.
///
/// Probes are drawn uniformly from the working region, keeping points outside
/// the element where the normalizer is positive; if too few such points turn
/// up, samples outside the element fill the quota.
pub fn check_partition(
    pou: &PartitionOfUnity,
    samples: &SampleSet,
    region: &Region,
    seed: u64,
) -> Result<PartitionReport> {
    let mut max_sum_error = 0.0f64;
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;
    for x in samples.points() {
        let rho = pou.eval(x)?;
        max_sum_error = max_sum_error.max((rho.iter().sum::<f64>() - 1.0).abs());
        for v in rho {
            min_value = min_value.min(v);
            max_value = max_value.max(v);
        }
    }
    let mut probes_per_term = Vec::with_capacity(pou.len());
    let mut max_off_support = 0.0f64;
    for (i, e) in pou.elements.iter().enumerate() {
        let mut r = rng::stream(seed, rng::CHECKS, i as u64);
        let mut found = 0;
        let mut draws = 0;
        while found < PROBES && draws < 200 * PROBES {
            draws += 1;
            let x: Vec<f64> = region
                .min
                .iter()
                .zip(&region.max)
                .map(|(lo, hi)| r.random_range(*lo..=*hi))
                .collect();
            if e.contains(&x) || distance(&x, &e.center) <= e.outer {
                continue;
            }
            if pou.normalizer.eval(&x)? <= NORMALIZER_FLOOR {
                continue;
            }
            max_off_support = max_off_support.max(pou.term(i).eval(&x)?.abs());
            found += 1;
        }
        let outside: Vec<usize> = (0..samples.len())
            .filter(|&k| distance(samples.point(k), &e.center) > e.outer)
            .collect();
        while found < PROBES && !outside.is_empty() {
            let k = outside[r.random_range(0..outside.len())];
            max_off_support = max_off_support.max(pou.term(i).eval(samples.point(k))?.abs());
            found += 1;
        }
        probes_per_term.push(found);
    }
    let passed = max_sum_error <= SUM_TOL
        && min_value >= 0.0
        && max_value <= 1.0
        && max_off_support == 0.0;
    Ok(PartitionReport {
        terms: pou.len(),
        max_sum_error,
        min_value,
        max_value,
        probes_per_term,
        max_off_support,
        passed,
    })
}

/// `u = Σ_j j·ρ_j`, where `j` ranks the elements by center distance from the base point.
#[derive(Debug, Clone)]
pub struct ExhaustionFunction {
    pub u: SmoothExpr,
    /// `rank[i]` is the weight `j ≥ 1` given to term `i`.
    pub rank: Vec<usize>,
}

pub fn exhaustion_function(pou: &PartitionOfUnity, base_point: &[f64]) -> ExhaustionFunction {
    let mut order: Vec<usize> = (0..pou.len()).collect();
    order.sort_by(|&a, &b| {
        distance(&pou.elements[a].center, base_point)
            .total_cmp(&distance(&pou.elements[b].center, base_point))
    });
    let mut rank = vec![0; pou.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }
    let dim = base_point.len();
    let weighted: Vec<SmoothExpr> = (0..pou.len())
        .map(|i| pou.term(i) * rank[i] as f64)
        .collect();
    ExhaustionFunction {
        u: SmoothExpr::sum(dim, &weighted),
        rank,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SublevelCheck {
    pub level: f64,
    pub samples_below: usize,
    /// Samples with `u ≤ a` outside `∪_{j ≤ ⌈a⌉} supp ρ_j`.
    pub violations: usize,
    /// Radius about the base point of the ball holding those supports.
    pub support_radius: f64,
    /// Largest distance from the base point of a sample with `u ≤ a`.
    pub sublevel_radius: f64,
}

/// Sublevel containment `{u ≤ a} ⊆ ∪_{j ≤ ⌈a⌉} supp ρ_j` for each level.
pub fn sublevel_containment(
    ex: &ExhaustionFunction,
    pou: &PartitionOfUnity,
    samples: &SampleSet,
    base_point: &[f64],
    levels: &[f64],
) -> Result<Vec<SublevelCheck>> {
    let values = samples
        .points()
        .iter()
        .map(|x| ex.u.eval(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(levels
        .iter()
        .map(|&a| {
            let top = a.ceil().max(0.0) as usize;
            let active: Vec<&CoverElement> = (0..pou.len())
                .filter(|&i| ex.rank[i] <= top)
                .map(|i| &pou.elements[i])
                .collect();
            let support_radius = active
                .iter()
                .map(|e| distance(&e.center, base_point) + e.outer)
                .fold(0.0, f64::max);
            let mut samples_below = 0;
            let mut violations = 0;
            let mut sublevel_radius = 0.0f64;
            for (x, &v) in samples.points().iter().zip(&values) {
                if v <= a {
                    samples_below += 1;
                    sublevel_radius = sublevel_radius.max(distance(x, base_point));
                    if !active.iter().any(|e| distance(x, &e.center) <= e.outer) {
                        violations += 1;
                    }
                }
            }
            SublevelCheck {
                level: a,
                samples_below,
                violations,
                support_radius,
                sublevel_radius,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::triple_cover;
    use crate::fixtures;
    use crate::space::sample;

    #[test]
    fn symmetric_intervals_split_evenly() {
        let p = fixtures::interval();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let els = vec![
            CoverElement::new(vec![0.3], 0.25, 0.35, 0),
            CoverElement::new(vec![0.7], 0.25, 0.35, 0),
        ];
        let pou = partition_of_unity(&els, &s).unwrap();
        let rho = pou.eval(&[0.5]).unwrap();
        assert!((rho[0] - 0.5).abs() < 1e-15 && (rho[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn thin_cover_is_rejected() {
        let p = fixtures::interval();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let els = vec![CoverElement::new(vec![0.2], 0.1, 0.2, 0)];
        assert!(matches!(
            partition_of_unity(&els, &s),
            Err(Error::NormalizerVanishes { .. })
        ));
    }

    #[test]
    fn circle_partition_checks() {
        let p = fixtures::circle();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let c = triple_cover(&p, &s, &p.cover_params).unwrap();
        let pou = partition_of_unity(&c.elements, &s).unwrap();
        let r = check_partition(&pou, &s, &p.region, 3).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.probes_per_term.iter().all(|&n| n == PROBES));
    }

    #[test]
    fn single_active_term_gives_its_rank() {
        let p = fixtures::half_line();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let els = vec![
            CoverElement::new(vec![1.0], 2.0, 3.0, 0),
            CoverElement::new(vec![8.0], 4.5, 6.0, 0),
            CoverElement::new(vec![16.0], 4.5, 6.0, 0),
        ];
        let pou = partition_of_unity(&els, &s).unwrap();
        let ex = exhaustion_function(&pou, &p.base_point);
        assert_eq!(ex.rank, vec![1, 2, 3]);
        assert_eq!(ex.u.eval(&[20.0]).unwrap(), 3.0);
        for x in s.points() {
            assert!(ex.u.eval(x).unwrap() <= 3.0 + 1e-12);
        }
    }

    #[test]
    fn half_line_sublevels_are_contained() {
        let p = fixtures::half_line();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let c = triple_cover(&p, &s, &p.cover_params).unwrap();
        let pou = partition_of_unity(&c.elements, &s).unwrap();
        let ex = exhaustion_function(&pou, &p.base_point);
        let levels: Vec<f64> = (1..=c.len()).map(|a| a as f64).collect();
        for chk in sublevel_containment(&ex, &pou, &s, &p.base_point, &levels).unwrap() {
            assert_eq!(chk.violations, 0);
            assert!(chk.sublevel_radius <= chk.support_radius);
        }
    }
}
