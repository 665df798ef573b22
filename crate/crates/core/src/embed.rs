//! The Whitney pipeline: start from `Φ = (u, 0, …, 0)`, perturb chart by chart
//! into an immersion, perturb by the partition of unity into an injective
//! map, and certify the result at the samples.

use nalgebra::{DMatrix, DVector};
use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::cover::{triple_cover, Cover, CoverElement};
use crate::error::{Error, Result};
use crate::expr::{ExprVec, SmoothExpr};
use crate::linalg::{distance, kernel_basis, min_singular_value, norm};
use crate::partition::{exhaustion_function, partition_of_unity, PartitionOfUnity};
use crate::rng;
use crate::space::{SampleSet, SpacePresentation};

/// Orthonormal basis (columns) of the numerical tangent space at `x`: the
/// kernel of the equality-constraint Jacobian.
pub fn tangent_space(p: &SpacePresentation, x: &[f64], rank_tol: f64) -> Result<DMatrix<f64>> {
    Ok(kernel_basis(&p.constraint_jacobian(x)?, rank_tol))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmbedParams {
    /// Target dimension; defaults to `2n + 1`.
    pub m: Option<usize>,
    pub delta: f64,
    pub sigma_floor: f64,
    /// Required `‖Ψ(p) − Ψ(q)‖ / ‖p − q‖` for every sample pair.
    pub separation_ratio_floor: f64,
    pub max_retries: usize,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            m: None,
            delta: 1.0,
            sigma_floor: 1e-6,
            separation_ratio_floor: 1e-6,
            max_retries: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    ImmersionMatrix,
    InjectivityVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationRecord {
    pub stage: usize,
    pub kind: PerturbationKind,
    /// Index of the cover element (and partition term) driving the stage.
    pub element: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<usize>,
    /// `A_k` row by row (immersion stages).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Chart value at the element center; stage maps use `φ − φ(c)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart_center: Option<Vec<f64>>,
    /// `y_j` (injectivity stages).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    /// Entry bound `ε_k` or ball radius for `y_j` used for the draw.
    pub magnitude_bound: f64,
    /// Declared bound on `sup ‖Ψ_k − Ψ_{k−1}‖` for the stage.
    pub deviation_bound: f64,
    /// Rejected draws before acceptance.
    pub retries: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingDiagnostics {
    pub samples: usize,
    pub max_deviation: f64,
    pub min_separation_ratio: f64,
    pub min_tangent_singular_value: f64,
    /// `(a, r)`: every sample with `Ψ₁ ≤ a` lies within `r` of the base point.
    pub properness_profile: Vec<(f64, f64)>,
    /// `max |Ψ₁ − u|` over samples.
    pub first_coordinate_gap: f64,
    /// `Σ_k ‖A_k‖_F·sup‖φ̃_k‖ + Σ_j ‖y_j‖`, an upper bound for the deviation.
    pub deviation_budget: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub map: ExprVec,
    pub m: usize,
    pub base: ExprVec,
    pub exhaustion: SmoothExpr,
    pub records: Vec<PerturbationRecord>,
    pub cover: Cover,
    pub pou: PartitionOfUnity,
    pub params: EmbedParams,
    pub diagnostics: EmbeddingDiagnostics,
    /// Stage-wise `sup ‖φ̃_k‖` over samples, as used for the entry bounds.
    pub chart_sup: Vec<f64>,
}

/// Per-sample state carried through the stages.
struct Cache {
    value: Vec<Vec<f64>>,
    jac: Vec<DMatrix<f64>>,
    tangent: Vec<DMatrix<f64>>,
}

impl Cache {
    fn sigma(&self, s: usize, jac: &DMatrix<f64>) -> f64 {
        min_singular_value(&(jac * &self.tangent[s]))
    }
}

fn open_unit<R: Rng>(r: &mut R) -> f64 {
    r.sample::<f64, _>(Open01)
}

/// Proper embedding of the sampled space into `R^m`.
pub fn proper_embedding(
    p: &SpacePresentation,
    samples: &SampleSet,
    params: &EmbedParams,
    seed: u64,
) -> Result<EmbeddingResult> {
    let n = p.structural_dim;
    let m = params.m.unwrap_or(2 * n + 1);
    if m < 2 * n + 1 {
        return Err(Error::EmbeddingDimension {
            m,
            required: 2 * n + 1,
        });
    }
    let big_n = p.ambient_dim;
    let delta = params.delta;
    let pts = samples.points();

    let cover = triple_cover(p, samples, &p.cover_params)?;
    let pou = partition_of_unity(&cover.elements, samples)?;
    let u = exhaustion_function(&pou, &p.base_point).u;

    let mut cache = Cache {
        value: Vec::with_capacity(pts.len()),
        jac: Vec::with_capacity(pts.len()),
        tangent: Vec::with_capacity(pts.len()),
    };
    for x in pts {
        let (uv, ug) = u.gradient(x)?;
        let mut val = vec![0.0; m];
        val[0] = uv;
        let mut jac = DMatrix::zeros(m, big_n);
        for (c, g) in ug.into_iter().enumerate() {
            jac[(0, c)] = g;
        }
        cache.value.push(val);
        cache.jac.push(jac);
        cache.tangent.push(tangent_space(p, x, p.tolerances.rank_tol)?);
    }

    let mut records = Vec::new();
    let mut chart_sup = Vec::new();
    let mut certified = vec![false; pts.len()];
    let mut sigma = vec![f64::INFINITY; pts.len()];

    // immersion stages
    for (k, e) in cover.elements.iter().enumerate() {
        let stage = k + 1;
        let chart = &p.charts[e.chart_index];
        let nk = chart.target_dim;
        let rho = e.indicator()?;
        let c_val = chart.map.eval(&e.center)?;
        let active: Vec<usize> = (0..pts.len()).filter(|&s| e.contains(&pts[s])).collect();
        let mut local = Vec::with_capacity(active.len());
        let mut sup = 0.0f64;
        for &s in &active {
            let (rv, rg) = rho.gradient(&pts[s])?;
            let (fv, fj) = chart.map.eval_with_jacobian(&pts[s])?;
            let centered: Vec<f64> = fv.iter().zip(&c_val).map(|(a, b)| a - b).collect();
            sup = sup.max(norm(&centered));
            local.push((rv, DVector::from_vec(rg), DVector::from_vec(centered), fj));
        }
        let sup = if sup > 0.0 { sup } else { 1.0 };
        let deviation_bound = delta / 2f64.powi(stage as i32 + 2);
        let eps = deviation_bound / (2.0 * ((m * nk) as f64).sqrt() * sup);
        for &s in &active {
            if e.covers(&pts[s]) {
                certified[s] = true;
            }
        }

        let mut accepted = None;
        for attempt in 0..=params.max_retries {
            let mut r = rng::stream(seed, rng::IMMERSION, ((stage as u64) << 16) | attempt as u64);
            let a = DMatrix::from_fn(m, nk, |_, _| eps * (2.0 * open_unit(&mut r) - 1.0));
            let mut new_jacs = Vec::with_capacity(active.len());
            let mut ok = true;
            for (&s, (rv, rg, centered, fj)) in active.iter().zip(&local) {
                let a_phi = &a * centered;
                let jac = &cache.jac[s] + (&a * fj) * *rv + &a_phi * rg.transpose();
                if certified[s] {
                    let sg = cache.sigma(s, &jac);
                    if !(sg >= params.sigma_floor) {
                        ok = false;
                        break;
                    }
                    new_jacs.push((jac, a_phi, sg));
                } else {
                    new_jacs.push((jac, a_phi, f64::INFINITY));
                }
            }
            if ok {
                accepted = Some((attempt, a, new_jacs));
                break;
            }
        }
        let Some((retries, a, new_jacs)) = accepted else {
            return Err(Error::MaxRetriesExceeded {
                stage,
                kind: "immersion",
                retries: params.max_retries,
            });
        };
        for ((&s, (rv, ..)), (jac, a_phi, sg)) in active.iter().zip(&local).zip(new_jacs) {
            for (v, d) in cache.value[s].iter_mut().zip(a_phi.iter()) {
                *v += rv * d;
            }
            cache.jac[s] = jac;
            sigma[s] = sg;
        }
        chart_sup.push(sup);
        records.push(PerturbationRecord {
            stage,
            kind: PerturbationKind::ImmersionMatrix,
            element: k,
            chart: Some(e.chart_index),
            matrix: Some(a.row_iter().map(|r| r.iter().copied().collect()).collect()),
            chart_center: Some(c_val),
            vector: None,
            magnitude_bound: eps,
            deviation_bound,
            retries,
        });
    }
    if let Some(s) = certified.iter().position(|c| !c) {
        return Err(Error::RankDeficient {
            sample: s,
            rank: 0,
            expected: n,
        });
    }
    for s in 0..pts.len() {
        sigma[s] = cache.sigma(s, &cache.jac[s]);
    }

    // injectivity stages
    let ratio_floor = params.separation_ratio_floor;
    for (j, e) in pou.elements.iter().enumerate() {
        let stage = j + 1;
        let term = pou.term(j);
        let active: Vec<usize> = (0..pts.len()).filter(|&s| e.contains(&pts[s])).collect();
        let mut rho = vec![0.0; pts.len()];
        let mut grads = Vec::with_capacity(active.len());
        let mut radius = delta / 2f64.powi(stage as i32 + 1);
        for &s in &active {
            let (rv, rg) = term.gradient(&pts[s])?;
            rho[s] = rv;
            let rg = DVector::from_vec(rg);
            let tg = cache.tangent[s].transpose() * &rg;
            if tg.norm() > 0.0 {
                radius = radius.min((sigma[s] - params.sigma_floor) / (2.0 * tg.norm()));
            }
            grads.push(rg);
        }
        let radius = radius.max(0.0);
        let mut accepted = None;
        for attempt in 0..=params.max_retries {
            let mut r = rng::stream(seed, rng::INJECTIVITY, ((stage as u64) << 16) | attempt as u64);
            let dir: Vec<f64> = (0..m).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
            let scale = radius * open_unit(&mut r).powf(1.0 / m as f64) / norm(&dir).max(f64::MIN_POSITIVE);
            let y = DVector::from_iterator(m, dir.iter().map(|d| d * scale));
            // pairs touched by this stage must stay separated
            let mut ok = true;
            'pairs: for &a in &active {
                for b in 0..pts.len() {
                    if b == a || (rho[b] != 0.0 && b < a) {
                        continue;
                    }
                    let dr = rho[a] - rho[b];
                    let gap: f64 = (0..m)
                        .map(|i| {
                            let d = cache.value[a][i] - cache.value[b][i] + dr * y[i];
                            d * d
                        })
                        .sum::<f64>()
                        .sqrt();
                    if !(gap >= ratio_floor * distance(&pts[a], &pts[b])) || gap == 0.0 {
                        ok = false;
                        break 'pairs;
                    }
                }
            }
            if !ok {
                continue;
            }
            let mut new_jacs = Vec::with_capacity(active.len());
            for (&s, rg) in active.iter().zip(&grads) {
                let jac = &cache.jac[s] + &y * rg.transpose();
                let sg = cache.sigma(s, &jac);
                if !(sg >= params.sigma_floor) {
                    ok = false;
                    break;
                }
                new_jacs.push((jac, sg));
            }
            if ok {
                accepted = Some((attempt, y, new_jacs));
                break;
            }
        }
        let Some((retries, y, new_jacs)) = accepted else {
            return Err(Error::MaxRetriesExceeded {
                stage,
                kind: "injectivity",
                retries: params.max_retries,
            });
        };
        for (&s, (jac, sg)) in active.iter().zip(new_jacs) {
            for (v, d) in cache.value[s].iter_mut().zip(y.iter()) {
                *v += rho[s] * d;
            }
            cache.jac[s] = jac;
            sigma[s] = sg;
        }
        records.push(PerturbationRecord {
            stage,
            kind: PerturbationKind::InjectivityVector,
            element: j,
            chart: None,
            matrix: None,
            chart_center: None,
            vector: Some(y.iter().copied().collect()),
            magnitude_bound: radius,
            deviation_bound: delta / 2f64.powi(stage as i32 + 1),
            retries,
        });
    }

    let base = base_map(&u, m)?;
    let map = assemble(p, &cover.elements, &pou, &base, &records, None)?;
    let mut result = EmbeddingResult {
        map,
        m,
        base,
        exhaustion: u,
        records,
        cover,
        pou,
        params: *params,
        diagnostics: EmbeddingDiagnostics {
            samples: 0,
            max_deviation: 0.0,
            min_separation_ratio: 0.0,
            min_tangent_singular_value: 0.0,
            properness_profile: Vec::new(),
            first_coordinate_gap: 0.0,
            deviation_budget: 0.0,
            passed: false,
        },
        chart_sup,
    };
    result.diagnostics = embedding_diagnostics(&result, p, samples)?;
    Ok(result)
}

fn base_map(u: &SmoothExpr, m: usize) -> Result<ExprVec> {
    let dim = u.ambient_dim();
    let mut comps = vec![u.clone()];
    comps.extend((1..m).map(|_| SmoothExpr::constant(dim, 0.0)));
    ExprVec::new(dim, comps)
}

/// Rebuild `Φ + Σ ρ_k A_k φ̃_k + Σ ρ_j y_j` from the records, keeping only
/// stages `≤ upto` when given.
fn assemble(
    p: &SpacePresentation,
    elements: &[CoverElement],
    pou: &PartitionOfUnity,
    base: &ExprVec,
    records: &[PerturbationRecord],
    upto: Option<usize>,
) -> Result<ExprVec> {
    let dim = p.ambient_dim;
    let m = base.target_dim();
    let mut comps: Vec<SmoothExpr> = base.components().to_vec();
    for rec in records.iter().filter(|r| upto.is_none_or(|u| r.stage <= u)) {
        match rec.kind {
            PerturbationKind::ImmersionMatrix => {
                let e = &elements[rec.element];
                let chart = &p.charts[rec.chart.expect("immersion records carry a chart")];
                let center = rec.chart_center.as_ref().expect("immersion records carry φ(c)");
                let a = rec.matrix.as_ref().expect("immersion records carry A");
                let centered: Vec<SmoothExpr> = chart
                    .map
                    .components()
                    .iter()
                    .zip(center)
                    .map(|(f, c)| f - *c)
                    .collect();
                let rho = e.indicator()?;
                for (i, comp) in comps.iter_mut().enumerate() {
                    let row: Vec<SmoothExpr> = a[i]
                        .iter()
                        .zip(&centered)
                        .map(|(aij, f)| f * *aij)
                        .collect();
                    *comp = &*comp + &rho.gated(&SmoothExpr::sum(dim, &row));
                }
            }
            PerturbationKind::InjectivityVector => {
                let y = rec.vector.as_ref().expect("injectivity records carry y");
                let term = pou.term(rec.element);
                for (comp, yi) in comps.iter_mut().zip(y) {
                    *comp = &*comp + &(term * *yi);
                }
            }
        }
    }
    debug_assert_eq!(comps.len(), m);
    ExprVec::new(dim, comps)
}

impl EmbeddingResult {
    /// The map after stages `≤ upto` of both kinds.
    pub fn partial_map(&self, p: &SpacePresentation, upto: usize) -> Result<ExprVec> {
        assemble(p, &self.cover.elements, &self.pou, &self.base, &self.records, Some(upto))
    }
}

/// Certificates of the embedding, recomputed from the assembled map `Ψ`
/// (independently of the per-stage caches).
pub fn embedding_diagnostics(
    result: &EmbeddingResult,
    p: &SpacePresentation,
    samples: &SampleSet,
) -> Result<EmbeddingDiagnostics> {
    let pts = samples.points();
    let mut values = Vec::with_capacity(pts.len());
    let mut max_deviation = 0.0f64;
    let mut first_coordinate_gap = 0.0f64;
    let mut min_sigma = f64::INFINITY;
    for x in pts {
        let (psi, jac) = result.map.eval_with_jacobian(x)?;
        let phi = result.base.eval(x)?;
        max_deviation = max_deviation.max(distance(&psi, &phi));
        first_coordinate_gap = first_coordinate_gap.max((psi[0] - result.exhaustion.eval(x)?).abs());
        let t = tangent_space(p, x, p.tolerances.rank_tol)?;
        min_sigma = min_sigma.min(min_singular_value(&(jac * t)));
        values.push(psi);
    }
    let mut min_ratio = f64::INFINITY;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            min_ratio = min_ratio.min(distance(&values[a], &values[b]) / distance(&pts[a], &pts[b]));
        }
    }
    let top = result.pou.len().max(1);
    let properness_profile = (1..=top)
        .map(|a| {
            let a = a as f64;
            let r = pts
                .iter()
                .zip(&values)
                .filter(|(_, v)| v[0] <= a)
                .map(|(x, _)| distance(x, &p.base_point))
                .fold(0.0, f64::max);
            (a, r)
        })
        .collect();
    let deviation_budget = result
        .records
        .iter()
        .map(|r| match r.kind {
            PerturbationKind::ImmersionMatrix => {
                let fro = r
                    .matrix
                    .as_ref()
                    .map_or(0.0, |a| a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt());
                fro * result.chart_sup[r.stage - 1]
            }
            PerturbationKind::InjectivityVector => r.vector.as_ref().map_or(0.0, |y| norm(y)),
        })
        .sum();
    let params = &result.params;
    let passed = max_deviation < params.delta
        && min_ratio > params.separation_ratio_floor
        && min_sigma > params.sigma_floor
        && first_coordinate_gap < params.delta;
    Ok(EmbeddingDiagnostics {
        samples: pts.len(),
        max_deviation,
        min_separation_ratio: min_ratio,
        min_tangent_singular_value: min_sigma,
        properness_profile,
        first_coordinate_gap,
        deviation_budget,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalityCheck {
    pub stage: usize,
    /// Samples whose neighbourhood meets no `W_j` with `j > stage`.
    pub samples_checked: usize,
    pub max_difference: f64,
}

/// Compare `Ψ` with the stage-`upto` map at samples beyond the reach of later stages.
pub fn locality_check(
    result: &EmbeddingResult,
    p: &SpacePresentation,
    samples: &SampleSet,
    upto: usize,
) -> Result<LocalityCheck> {
    let partial = result.partial_map(p, upto)?;
    let later = &result.cover.elements[upto.min(result.cover.len())..];
    let mut checked = 0;
    let mut max_difference = 0.0f64;
    for x in samples.points() {
        let clear = later.iter().all(|e| {
            let r_w = e.triple.map_or(e.outer, |t| t.r_w);
            distance(x, &e.center) > r_w
        });
        if clear {
            checked += 1;
            max_difference = max_difference.max(distance(&result.map.eval(x)?, &partial.eval(x)?));
        }
    }
    Ok(LocalityCheck {
        stage: upto,
        samples_checked: checked,
        max_difference,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WhitneyReport {
    pub n: usize,
    pub m: usize,
    pub diagnostics: EmbeddingDiagnostics,
    pub passed: bool,
}

/// Embedding of a manifold-flagged presentation into `R^(2n+1)` with its certificates.
pub fn whitney_check(
    p: &SpacePresentation,
    samples: &SampleSet,
    params: &EmbedParams,
    seed: u64,
) -> Result<(WhitneyReport, EmbeddingResult)> {
    if !p.manifold {
        return Err(Error::NotManifold(format!(
            "presentation `{}` is not flagged as a manifold",
            p.name
        )));
    }
    if !p.charts_are_manifold_like() {
        return Err(Error::NotManifold(format!(
            "presentation `{}` has charts of unequal dimension or without inverses",
            p.name
        )));
    }
    let params = EmbedParams {
        m: Some(2 * p.structural_dim + 1),
        ..*params
    };
    let result = proper_embedding(p, samples, &params, seed)?;
    let report = WhitneyReport {
        n: p.structural_dim,
        m: result.m,
        diagnostics: result.diagnostics.clone(),
        passed: result.diagnostics.passed,
    };
    Ok((report, result))
}

/// Rows `(x, Ψ(x))` for a point-cloud export.
pub fn point_cloud(result: &EmbeddingResult, samples: &SampleSet) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    samples
        .points()
        .iter()
        .map(|x| Ok((x.clone(), result.map.eval(x)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::sample;

    #[test]
    fn tangent_spaces() {
        let c = fixtures::circle();
        let t = tangent_space(&c, &[1.0, 0.0], 1e-9).unwrap();
        assert_eq!(t.ncols(), 1);
        assert!(t[(0, 0)].abs() < 1e-15 && (t[(1, 0)].abs() - 1.0).abs() < 1e-15);
        let x = fixtures::cross();
        assert_eq!(tangent_space(&x, &[0.0, 0.0], 1e-9).unwrap().ncols(), 2);
        let t = tangent_space(&x, &[1.0, 0.0], 1e-9).unwrap();
        assert_eq!(t.ncols(), 1);
        assert!((t[(0, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_target_dimension_is_rejected() {
        let p = fixtures::circle();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let params = EmbedParams {
            m: Some(2),
            ..EmbedParams::default()
        };
        assert!(matches!(
            proper_embedding(&p, &s, &params, 1),
            Err(Error::EmbeddingDimension { m: 2, required: 3 })
        ));
    }

    #[test]
    fn circle_embeds_in_three_space() {
        let p = fixtures::circle();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let r = proper_embedding(&p, &s, &EmbedParams::default(), 7).unwrap();
        assert_eq!(r.m, 3);
        let d = &r.diagnostics;
        assert!(d.passed, "{d:?}");
        assert!(d.max_deviation < 1.0);
        assert!(d.max_deviation <= d.deviation_budget + 1e-12);
        assert!(d.properness_profile.windows(2).all(|w| w[0].1 <= w[1].1));
        for rec in &r.records {
            assert!(rec.retries <= 32);
            if let Some(a) = &rec.matrix {
                assert!(a.iter().flatten().all(|v| v.abs() < rec.magnitude_bound));
            }
            if let Some(y) = &rec.vector {
                assert!(norm(y) < rec.deviation_bound);
            }
        }
    }

    #[test]
    fn embedding_is_deterministic() {
        let p = fixtures::interval();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let a = proper_embedding(&p, &s, &EmbedParams::default(), 5).unwrap();
        let b = proper_embedding(&p, &s, &EmbedParams::default(), 5).unwrap();
        assert_eq!(a.records, b.records);
        for x in s.points() {
            assert_eq!(a.map.eval(x).unwrap(), b.map.eval(x).unwrap());
        }
        let c = proper_embedding(&p, &s, &EmbedParams::default(), 6).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn locality_holds_on_half_line() {
        let p = fixtures::half_line();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let r = proper_embedding(&p, &s, &EmbedParams::default(), 2).unwrap();
        assert!(r.diagnostics.passed, "{:?}", r.diagnostics);
        let upto = r.cover.len() / 2;
        let chk = locality_check(&r, &p, &s, upto).unwrap();
        assert!(chk.samples_checked > 0);
        assert!(chk.max_difference <= 1e-12);
    }

    #[test]
    fn whitney_rejects_the_cross() {
        let p = fixtures::cross();
        let s = sample(&p, &p.sampler, 0).unwrap();
        assert!(matches!(
            whitney_check(&p, &s, &EmbedParams::default(), 1),
            Err(Error::NotManifold(_))
        ));
    }

    #[test]
    fn one_dimensional_chart_on_zero_map() {
        // Φ ≡ 0 on a 1-dimensional chart: any A with a nonzero column immerses
        let a = DMatrix::from_column_slice(3, 1, &[0.3, -0.1, 0.2]);
        let sv = min_singular_value(&a);
        let hand = (0.09f64 + 0.01 + 0.04).sqrt();
        assert!((sv - hand).abs() < 1e-15);
    }
}
