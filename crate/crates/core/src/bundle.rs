//! Vector bundles given by cocycles over open domains: cocycle validation,
//! finite coordinate representations, metrics, global generators, injective
//! trivializations and generators of generalized subbundles.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cover::{
    domain_masks, refine_bounded_order_with_masks, triple_cover_with_masks, Cover, CoverElement,
};
use crate::document::SpaceDocument;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprVec, SmoothExpr};
use crate::linalg::{projection_residual, range_basis, rank, singular_values};
use crate::partition::{partition_of_unity, PartitionOfUnity};
use crate::space::{load_presentation, Domain, SampleSet, SpacePresentation};

pub const COCYCLE_TOL: f64 = 1e-8;
pub const MEMBERSHIP_TOL: f64 = 1e-8;
pub const RCOND_FLOOR: f64 = 1e-12;
const MAX_DOMAINS: usize = 64;

/// A rank-`k` bundle over `base`: trivializations over open domains and
/// transition matrices with `rep_α = g_αβ · rep_β` on overlaps.
#[derive(Debug, Clone)]
pub struct BundlePresentation {
    pub base: SpacePresentation,
    pub fiber_dim: usize,
    pub trivializations: Vec<Domain>,
    transitions: HashMap<(usize, usize), Vec<Vec<SmoothExpr>>>,
}

impl BundlePresentation {
    pub fn from_document(doc: &SpaceDocument) -> Result<Self> {
        let base = load_presentation(doc)?;
        let n = base.ambient_dim;
        let k = doc
            .fiber_dim
            .ok_or_else(|| Error::Format("bundle document needs `fiber_dim`".into()))?;
        if k == 0 {
            return Err(Error::Format("fiber_dim must be positive".into()));
        }
        let trivs = doc
            .trivializations
            .as_ref()
            .ok_or_else(|| Error::Format("bundle document needs `trivializations`".into()))?;
        if trivs.is_empty() || trivs.len() > MAX_DOMAINS {
            return Err(Error::Format(format!(
                "a bundle needs between 1 and {MAX_DOMAINS} trivializations"
            )));
        }
        let trivializations = trivs
            .iter()
            .map(|t| Domain::parse(&t.domain, n))
            .collect::<Result<Vec<_>>>()?;
        let mut transitions = HashMap::new();
        for t in doc.cocycle.iter().flatten() {
            if t.from >= trivs.len() || t.to >= trivs.len() {
                return Err(Error::Format(format!(
                    "transition ({}, {}) refers to a missing trivialization",
                    t.from, t.to
                )));
            }
            if t.matrix.len() != k || t.matrix.iter().any(|row| row.len() != k) {
                return Err(Error::Format(format!(
                    "transition ({}, {}) must be a {k}×{k} matrix",
                    t.from, t.to
                )));
            }
            let m = t
                .matrix
                .iter()
                .map(|row| row.iter().map(|e| parse_expr(e, n)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            if transitions.insert((t.from, t.to), m).is_some() {
                return Err(Error::Format(format!(
                    "transition ({}, {}) listed twice",
                    t.from, t.to
                )));
            }
        }
        Ok(BundlePresentation {
            base,
            fiber_dim: k,
            trivializations,
            transitions,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&SpaceDocument::from_json(text)?)
    }

    /// The trivial bundle `base × R^k` with one global trivialization.
    pub fn trivial(base: SpacePresentation, k: usize) -> Self {
        BundlePresentation {
            base,
            fiber_dim: k,
            trivializations: vec![Domain::whole()],
            transitions: HashMap::new(),
        }
    }

    fn listed(&self, a: usize, b: usize, x: &[f64]) -> Result<Option<DMatrix<f64>>> {
        let Some(m) = self.transitions.get(&(a, b)) else {
            return Ok(None);
        };
        let k = self.fiber_dim;
        let mut out = DMatrix::zeros(k, k);
        for (i, row) in m.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out[(i, j)] = e.eval(x)?;
            }
        }
        Ok(Some(out))
    }

    /// `g_αβ(x)`: the identity for `α = β`, a listed matrix, or the inverse of
    /// the listed reverse transition.
    pub fn transition(&self, a: usize, b: usize, x: &[f64]) -> Result<DMatrix<f64>> {
        if let Some(m) = self.listed(a, b, x)? {
            return Ok(m);
        }
        if a == b {
            return Ok(DMatrix::identity(self.fiber_dim, self.fiber_dim));
        }
        match self.listed(b, a, x)? {
            Some(m) => m.try_inverse().ok_or(Error::Guard {
                op: "transition inverse",
                value: 0.0,
            }),
            None => Err(Error::Format(format!("no transition between trivializations {a} and {b}"))),
        }
    }

    pub fn domain_masks(&self, samples: &SampleSet) -> Result<Vec<u64>> {
        domain_masks(&self.trivializations, samples)
    }

    /// Lowest-index trivialization containing `x`.
    pub fn home(&self, x: &[f64]) -> Result<Option<usize>> {
        for (i, d) in self.trivializations.iter().enumerate() {
            if d.contains(x)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport {
    pub identity_residual: f64,
    pub inverse_residual: f64,
    pub triple_residual: f64,
    pub overlap_samples: usize,
    pub triple_overlap_samples: usize,
    pub uncovered_samples: Vec<usize>,
    pub passed: bool,
}

fn cocycle_report(
    count: usize,
    samples: &SampleSet,
    inside: impl Fn(usize, &[f64]) -> Result<bool>,
    g: impl Fn(usize, usize, &[f64]) -> Result<DMatrix<f64>>,
    k: usize,
) -> Result<CocycleReport> {
    let eye = DMatrix::<f64>::identity(k, k);
    let (mut id_res, mut inv_res, mut tri_res) = (0.0f64, 0.0f64, 0.0f64);
    let (mut overlaps, mut triples) = (0, 0);
    let mut uncovered = Vec::new();
    for (s, x) in samples.points().iter().enumerate() {
        let mut act = Vec::new();
        for a in 0..count {
            if inside(a, x)? {
                act.push(a);
            }
        }
        if act.is_empty() {
            uncovered.push(s);
        }
        if act.len() >= 2 {
            overlaps += 1;
        }
        if act.len() >= 3 {
            triples += 1;
        }
        for &a in &act {
            id_res = id_res.max(max_abs(&(g(a, a, x)? - &eye)));
            for &b in &act {
                if a == b {
                    continue;
                }
                let gab = g(a, b, x)?;
                inv_res = inv_res.max(max_abs(&(&gab * g(b, a, x)? - &eye)));
                for &c in &act {
                    if c != a && c != b {
                        tri_res = tri_res.max(max_abs(&(&gab * g(b, c, x)? - g(a, c, x)?)));
                    }
                }
            }
        }
    }
    Ok(CocycleReport {
        identity_residual: id_res,
        inverse_residual: inv_res,
        triple_residual: tri_res,
        overlap_samples: overlaps,
        triple_overlap_samples: triples,
        passed: uncovered.is_empty()
            && id_res < COCYCLE_TOL
            && inv_res < COCYCLE_TOL
            && tri_res < COCYCLE_TOL,
        uncovered_samples: uncovered,
    })
}

/// Identity, inverse and triple-product residuals over (multiple) overlaps.
pub fn validate_cocycle(bundle: &BundlePresentation, samples: &SampleSet) -> Result<CocycleReport> {
    cocycle_report(
        bundle.trivializations.len(),
        samples,
        |a, x| bundle.trivializations[a].contains(x),
        |a, b, x| bundle.transition(a, b, x),
        bundle.fiber_dim,
    )
}

/// Balls each inside one trivialization domain (on samples), covering all samples.
pub fn trivialization_cover(bundle: &BundlePresentation, samples: &SampleSet) -> Result<Cover> {
    let masks = bundle.domain_masks(samples)?;
    triple_cover_with_masks(&bundle.base, samples, &bundle.base.cover_params, &masks)
}

/// At most `n + 1` trivializations. When the bundle already has that few,
/// they are kept; otherwise each new trivialization is a disjoint union of
/// balls, each ball inheriting the trivialization of an original domain.
#[derive(Debug, Clone, Serialize)]
pub struct CoordinateRepresentation {
    pub count: usize,
    /// Balls carrying the partition of unity; `chart_index` is the source trivialization.
    pub elements: Vec<CoverElement>,
    /// New trivialization of each ball.
    pub group: Vec<usize>,
    pub refined: bool,
}

impl CoordinateRepresentation {
    /// Original trivialization that new trivialization `i` uses at `x`.
    pub fn source(&self, bundle: &BundlePresentation, i: usize, x: &[f64]) -> Result<Option<usize>> {
        if !self.refined {
            return Ok(bundle.trivializations[i].contains(x)?.then_some(i));
        }
        Ok(self
            .elements
            .iter()
            .zip(&self.group)
            .find(|(e, g)| **g == i && e.contains(x))
            .map(|(e, _)| e.chart_index))
    }

    /// Transition between new trivializations `i` and `l` at `x`.
    pub fn transition(
        &self,
        bundle: &BundlePresentation,
        i: usize,
        l: usize,
        x: &[f64],
    ) -> Result<DMatrix<f64>> {
        match (self.source(bundle, i, x)?, self.source(bundle, l, x)?) {
            (Some(a), Some(b)) => bundle.transition(a, b, x),
            _ => Err(Error::Format(format!("{x:?} is not in trivializations {i} and {l}"))),
        }
    }

    pub fn validate(&self, bundle: &BundlePresentation, samples: &SampleSet) -> Result<CocycleReport> {
        cocycle_report(
            self.count,
            samples,
            |i, x| Ok(self.source(bundle, i, x)?.is_some()),
            |i, l, x| self.transition(bundle, i, l, x),
            bundle.fiber_dim,
        )
    }
}

pub fn finite_coordinate_representation(
    bundle: &BundlePresentation,
    cover: &Cover,
    samples: &SampleSet,
    max_rounds: usize,
) -> Result<CoordinateRepresentation> {
    let allowed = bundle.base.structural_dim + 1;
    if bundle.trivializations.len() <= allowed {
        return Ok(CoordinateRepresentation {
            count: bundle.trivializations.len(),
            group: cover.elements.iter().map(|e| e.chart_index).collect(),
            elements: cover.elements.clone(),
            refined: false,
        });
    }
    let masks = bundle.domain_masks(samples)?;
    let fam = refine_bounded_order_with_masks(
        cover,
        bundle.base.structural_dim,
        samples,
        &masks,
        max_rounds,
    )?;
    let group = (0..fam.elements.len()).map(|e| fam.family_of(e)).collect();
    Ok(CoordinateRepresentation {
        count: fam.families.len(),
        elements: fam.elements,
        group,
        refined: true,
    })
}

/// One summand `w · local` of a global section, expressed in trivialization `source`.
#[derive(Debug, Clone)]
pub struct SectionPiece {
    pub ball: CoverElement,
    pub weight: SmoothExpr,
    pub source: usize,
    pub local: Vec<SmoothExpr>,
}

/// A global section as a finite sum of locally supported pieces.
#[derive(Debug, Clone)]
pub struct GlobalSection {
    pub pieces: Vec<SectionPiece>,
}

impl GlobalSection {
    /// Representative in trivialization `beta` at `x` (which must lie in its domain).
    pub fn value_in(&self, bundle: &BundlePresentation, beta: usize, x: &[f64]) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(bundle.fiber_dim);
        for piece in &self.pieces {
            if !piece.ball.contains(x) {
                continue;
            }
            let w = piece.weight.eval(x)?;
            if w == 0.0 {
                continue;
            }
            let local = DVector::from_iterator(
                bundle.fiber_dim,
                piece.local.iter().map(|e| e.eval(x)).collect::<Result<Vec<_>>>()?,
            );
            out += bundle.transition(beta, piece.source, x)? * local * w;
        }
        Ok(out)
    }

    /// The section as one ambient expression, for bundles whose pieces all
    /// live in a single trivialization (e.g. trivial bundles).
    pub fn ambient_field(&self, dim: usize, k: usize) -> Result<ExprVec> {
        let comps = (0..k)
            .map(|i| {
                let terms: Vec<SmoothExpr> =
                    self.pieces.iter().map(|p| p.weight.gated(&p.local[i])).collect();
                SmoothExpr::sum(dim, &terms)
            })
            .collect();
        ExprVec::new(dim, comps)
    }
}

/// `σ_ij = Σ_{l ∈ I_i} ρ_l e_j`: `count · k` sections.
pub fn global_bundle_generators(
    bundle: &BundlePresentation,
    rep: &CoordinateRepresentation,
    pou: &PartitionOfUnity,
) -> Vec<GlobalSection> {
    let dim = bundle.base.ambient_dim;
    let k = bundle.fiber_dim;
    let mut out = Vec::with_capacity(rep.count * k);
    for i in 0..rep.count {
        for j in 0..k {
            let pieces = (0..rep.elements.len())
                .filter(|&l| rep.group[l] == i)
                .map(|l| SectionPiece {
                    ball: rep.elements[l].clone(),
                    weight: pou.term(l).clone(),
                    source: rep.elements[l].chart_index,
                    local: (0..k)
                        .map(|r| SmoothExpr::constant(dim, if r == j { 1.0 } else { 0.0 }))
                        .collect(),
                })
                .collect();
            out.push(GlobalSection { pieces });
        }
    }
    out
}

/// Matrix whose columns are the sections' representatives in trivialization `beta`.
pub fn section_matrix(
    bundle: &BundlePresentation,
    sections: &[GlobalSection],
    beta: usize,
    x: &[f64],
) -> Result<DMatrix<f64>> {
    let cols = sections
        .iter()
        .map(|s| s.value_in(bundle, beta, x))
        .collect::<Result<Vec<_>>>()?;
    if cols.is_empty() {
        return Ok(DMatrix::zeros(bundle.fiber_dim, 0));
    }
    Ok(DMatrix::from_columns(&cols))
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorReport {
    pub count: usize,
    pub fiber_dim: usize,
    pub min_rank: usize,
    /// Samples where ranks computed in two trivializations disagree.
    pub rank_disagreements: usize,
    /// For each generator, a sample where it vanishes (if any).
    pub zero_of_generator: Vec<Option<usize>>,
    pub passed: bool,
}

/// Rank of the generators at each sample, in every trivialization containing it.
pub fn check_bundle_generators(
    bundle: &BundlePresentation,
    generators: &[GlobalSection],
    samples: &SampleSet,
) -> Result<GeneratorReport> {
    let k = bundle.fiber_dim;
    let tol = bundle.base.tolerances.rank_tol;
    let mut min_rank = usize::MAX;
    let mut disagreements = 0;
    let mut zero_of_generator = vec![None; generators.len()];
    for (s, x) in samples.points().iter().enumerate() {
        let mut ranks = Vec::new();
        for beta in 0..bundle.trivializations.len() {
            if !bundle.trivializations[beta].contains(x)? {
                continue;
            }
            let m = section_matrix(bundle, generators, beta, x)?;
            ranks.push(rank(&m, tol));
            for (g, col) in m.column_iter().enumerate() {
                if zero_of_generator[g].is_none() && col.norm() <= tol {
                    zero_of_generator[g] = Some(s);
                }
            }
        }
        if ranks.windows(2).any(|w| w[0] != w[1]) {
            disagreements += 1;
        }
        min_rank = min_rank.min(ranks.into_iter().min().unwrap_or(0));
    }
    Ok(GeneratorReport {
        count: generators.len(),
        fiber_dim: k,
        min_rank,
        rank_disagreements: disagreements,
        zero_of_generator,
        passed: min_rank == k && disagreements == 0,
    })
}

/// `G_α(x) = Σ_l ρ_l(x) g_{α(l) α}(x)ᵀ g_{α(l) α}(x)`, evaluated pointwise.
#[derive(Debug, Clone)]
pub struct BundleMetric {
    pub balls: Vec<CoverElement>,
    pub weights: ExprVec,
}

pub fn riemannian_metric(rep: &CoordinateRepresentation, pou: &PartitionOfUnity) -> BundleMetric {
    BundleMetric {
        balls: rep.elements.clone(),
        weights: pou.terms().clone(),
    }
}

impl BundleMetric {
    /// Gram matrix in trivialization `alpha` at `x`; exactly symmetric.
    pub fn gram(&self, bundle: &BundlePresentation, alpha: usize, x: &[f64]) -> Result<DMatrix<f64>> {
        let k = bundle.fiber_dim;
        let mut g = DMatrix::zeros(k, k);
        let mut rho: Option<Vec<f64>> = None;
        for (l, ball) in self.balls.iter().enumerate() {
            if !ball.contains(x) {
                continue;
            }
            let weights = match &rho {
                Some(w) => w,
                None => rho.insert(self.weights.eval(x)?),
            };
            let t = bundle.transition(ball.chart_index, alpha, x)?;
            let tt = t.transpose() * &t;
            g += tt * weights[l];
        }
        for i in 0..k {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub min_eigenvalue: f64,
    pub symmetric: bool,
    /// `max ‖G_β − g_αβᵀ G_α g_αβ‖` over overlap samples.
    pub transform_residual: f64,
    pub passed: bool,
}

pub fn check_metric(
    bundle: &BundlePresentation,
    metric: &BundleMetric,
    samples: &SampleSet,
) -> Result<MetricReport> {
    let mut min_eig = f64::INFINITY;
    let mut symmetric = true;
    let mut transform = 0.0f64;
    for x in samples.points() {
        let mut grams = Vec::new();
        for a in 0..bundle.trivializations.len() {
            if bundle.trivializations[a].contains(x)? {
                let g = metric.gram(bundle, a, x)?;
                symmetric &= g == g.transpose();
                min_eig = min_eig.min(g.clone().symmetric_eigen().eigenvalues.min());
                grams.push((a, g));
            }
        }
        for (a, ga) in &grams {
            for (b, gb) in &grams {
                if a != b {
                    let t = bundle.transition(*a, *b, x)?;
                    transform = transform.max(max_abs(&(gb - t.transpose() * ga * &t)));
                }
            }
        }
    }
    Ok(MetricReport {
        min_eigenvalue: min_eig,
        symmetric,
        transform_residual: transform,
        passed: min_eig > 0.0 && symmetric && transform < COCYCLE_TOL,
    })
}

/// `φ = Ψᵀ G (Ψ Ψᵀ G)⁻¹`, the right inverse of `Ψ` built from its adjoint
/// for the fiber metric `G` and the Euclidean metric on the generator space.
pub fn adjoint_right_inverse(psi: &DMatrix<f64>, g: &DMatrix<f64>, sample: usize) -> Result<DMatrix<f64>> {
    let adj = psi.transpose() * g;
    let gram = psi * &adj;
    let s = singular_values(&gram);
    let rcond = match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    };
    if rcond < RCOND_FLOOR {
        return Err(Error::SingularGram { sample, rcond });
    }
    let inv = gram.try_inverse().ok_or(Error::SingularGram { sample, rcond })?;
    Ok(adj * inv)
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectiveTrivializationReport {
    pub generators: usize,
    /// `max ‖ψ(φ(e)) − e‖` over samples and fiber basis vectors.
    pub max_residual: f64,
    pub min_rank: usize,
    pub passed: bool,
}

/// Check the bundle map `φ_x = ψ_x^*(ψ_x ψ_x^*)⁻¹` at every sample.
pub fn injective_trivialization(
    bundle: &BundlePresentation,
    generators: &[GlobalSection],
    metric: &BundleMetric,
    samples: &SampleSet,
) -> Result<InjectiveTrivializationReport> {
    let k = bundle.fiber_dim;
    let eye = DMatrix::<f64>::identity(k, k);
    let mut max_residual = 0.0f64;
    let mut min_rank = usize::MAX;
    for (s, x) in samples.points().iter().enumerate() {
        let Some(alpha) = bundle.home(x)? else {
            continue;
        };
        let psi = section_matrix(bundle, generators, alpha, x)?;
        let g = metric.gram(bundle, alpha, x)?;
        let phi = adjoint_right_inverse(&psi, &g, s)?;
        let res = &psi * &phi - &eye;
        for col in res.column_iter() {
            max_residual = max_residual.max(col.norm());
        }
        min_rank = min_rank.min(rank(&phi, bundle.base.tolerances.rank_tol));
    }
    Ok(InjectiveTrivializationReport {
        generators: generators.len(),
        max_residual,
        min_rank,
        passed: max_residual <= COCYCLE_TOL && min_rank == k,
    })
}

/// Local generating sections of a subbundle over one open domain, written in
/// one trivialization.
#[derive(Debug, Clone)]
pub struct LocalGenerators {
    pub domain: Domain,
    pub trivialization: usize,
    pub sections: Vec<ExprVec>,
}

#[derive(Debug, Clone)]
pub struct SubbundlePresentation {
    pub bundle: BundlePresentation,
    pub local: Vec<LocalGenerators>,
}

impl SubbundlePresentation {
    pub fn from_document(doc: &SpaceDocument) -> Result<Self> {
        let bundle = BundlePresentation::from_document(doc)?;
        let sub = doc
            .subbundle
            .as_ref()
            .ok_or_else(|| Error::Format("bundle document has no `subbundle` section".into()))?;
        let n = bundle.base.ambient_dim;
        let k = bundle.fiber_dim;
        if sub.generators.len() > MAX_DOMAINS {
            return Err(Error::Format(format!("at most {MAX_DOMAINS} generator domains")));
        }
        let local = sub
            .generators
            .iter()
            .map(|g| {
                if g.trivialization >= bundle.trivializations.len() {
                    return Err(Error::Format(format!(
                        "local generators refer to missing trivialization {}",
                        g.trivialization
                    )));
                }
                let sections = g
                    .sections
                    .iter()
                    .map(|s| {
                        if s.len() != k {
                            return Err(Error::Format(format!(
                                "local section has {} components, fiber dimension is {k}",
                                s.len()
                            )));
                        }
                        ExprVec::parse(s, n)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(LocalGenerators {
                    domain: Domain::parse(&g.domain, n)?,
                    trivialization: g.trivialization,
                    sections,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubbundlePresentation { bundle, local })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&SpaceDocument::from_json(text)?)
    }

    /// Whether `x` lies in generator domain `f` and in the domain of its trivialization.
    fn active(&self, f: usize, x: &[f64]) -> Result<bool> {
        let g = &self.local[f];
        Ok(g.domain.contains(x)? && self.bundle.trivializations[g.trivialization].contains(x)?)
    }

    /// Values of all local generators active at `x`, in trivialization `beta`.
    pub fn local_values(&self, beta: usize, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut cols = Vec::new();
        for (f, g) in self.local.iter().enumerate() {
            if !self.active(f, x)? {
                continue;
            }
            let t = self.bundle.transition(beta, g.trivialization, x)?;
            for s in &g.sections {
                cols.push(&t * DVector::from_vec(s.eval(x)?));
            }
        }
        if cols.is_empty() {
            return Ok(DMatrix::zeros(self.bundle.fiber_dim, 0));
        }
        Ok(DMatrix::from_columns(&cols))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRank {
    pub sample: usize,
    pub input_rank: usize,
    pub output_rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    pub generators: usize,
    pub ranks: Vec<SampleRank>,
    pub rank_mismatches: Vec<usize>,
    pub max_membership_residual: f64,
    pub passed: bool,
}

/// Compare output ranks with input ranks and measure how far outputs leave
/// the span of the inputs; `values(x)` gives `(inputs, outputs)` as columns.
pub(crate) fn span_report(
    samples: &SampleSet,
    generators: usize,
    rank_tol: f64,
    mut values: impl FnMut(&[f64]) -> Result<Option<(DMatrix<f64>, DMatrix<f64>)>>,
) -> Result<SpanReport> {
    let mut ranks = Vec::with_capacity(samples.len());
    let mut mismatches = Vec::new();
    let mut max_res = 0.0f64;
    for (s, x) in samples.points().iter().enumerate() {
        let Some((input, output)) = values(x)? else {
            continue;
        };
        let input_rank = rank(&input, rank_tol);
        let output_rank = rank(&output, rank_tol);
        let basis = range_basis(&input, rank_tol);
        for col in output.column_iter() {
            max_res = max_res.max(projection_residual(&basis, &col.into_owned()));
        }
        if input_rank != output_rank {
            mismatches.push(s);
        }
        ranks.push(SampleRank {
            sample: s,
            input_rank,
            output_rank,
        });
    }
    Ok(SpanReport {
        generators,
        passed: mismatches.is_empty() && max_res <= MEMBERSHIP_TOL,
        ranks,
        rank_mismatches: mismatches,
        max_membership_residual: max_res,
    })
}

/// Global generators `σ_{f,s} = (Σ_{l ∈ I_f} ρ_l) ξ_{f,s}` for a subbundle,
/// with the partition of unity over balls inside the generator domains.
pub fn subbundle_global_generators(
    sub: &SubbundlePresentation,
    samples: &SampleSet,
) -> Result<Vec<GlobalSection>> {
    if sub.local.is_empty() {
        return Ok(Vec::new());
    }
    let p = &sub.bundle.base;
    // samples where some generator family is defined
    let mut kept = Vec::new();
    let mut masks = Vec::new();
    for x in samples.points() {
        let mut m = 0u64;
        for f in 0..sub.local.len() {
            if sub.active(f, x)? {
                m |= 1 << f;
            }
        }
        if m != 0 {
            kept.push(x.clone());
            masks.push(m);
        }
    }
    if kept.is_empty() {
        return Ok(Vec::new());
    }
    let support = SampleSet::new(p, kept)?;
    let cover = triple_cover_with_masks(p, &support, &p.cover_params, &masks)?;
    let pou = partition_of_unity(&cover.elements, &support)?;
    let mut out = Vec::new();
    for (f, g) in sub.local.iter().enumerate() {
        let balls: Vec<usize> = (0..cover.len())
            .filter(|&l| cover.elements[l].chart_index == f)
            .collect();
        if balls.is_empty() {
            continue;
        }
        for section in &g.sections {
            let pieces = balls
                .iter()
                .map(|&l| SectionPiece {
                    ball: cover.elements[l].clone(),
                    weight: pou.term(l).clone(),
                    source: g.trivialization,
                    local: section.components().to_vec(),
                })
                .collect();
            out.push(GlobalSection { pieces });
        }
    }
    Ok(out)
}

/// Pointwise rank and membership certificate for subbundle generators.
pub fn check_subbundle_generators(
    sub: &SubbundlePresentation,
    generators: &[GlobalSection],
    samples: &SampleSet,
) -> Result<SpanReport> {
    let bundle = &sub.bundle;
    span_report(samples, generators.len(), bundle.base.tolerances.rank_tol, |x| {
        let Some(beta) = bundle.home(x)? else {
            return Ok(None);
        };
        Ok(Some((
            sub.local_values(beta, x)?,
            section_matrix(bundle, generators, beta, x)?,
        )))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::sample;

    fn setup(name: &str) -> (BundlePresentation, SampleSet) {
        let b = BundlePresentation::from_json(fixtures::source(name)).unwrap();
        let s = sample(&b.base, &b.base.sampler, 0).unwrap();
        (b, s)
    }

    fn identity_cocycle(count: usize) -> Option<Vec<crate::document::TransitionDoc>> {
        let mut out = Vec::new();
        for from in 0..count {
            for to in (from + 1)..count {
                out.push(crate::document::TransitionDoc { from, to, matrix: vec![vec!["1".into()]] });
            }
        }
        Some(out)
    }

    #[test]
    fn trivial_bundle_cocycle_is_exact() {
        let (b, s) = setup("trivial");
        let r = validate_cocycle(&b, &s).unwrap();
        assert_eq!((r.identity_residual, r.inverse_residual, r.triple_residual), (0.0, 0.0, 0.0));
        assert!(r.passed);
        let cover = trivialization_cover(&b, &s).unwrap();
        let rep = finite_coordinate_representation(&b, &cover, &s, 8).unwrap();
        assert_eq!(rep.count, 1);
    }

    #[test]
    fn mobius_cocycle_and_corruption() {
        let (b, s) = setup("mobius");
        let r = validate_cocycle(&b, &s).unwrap();
        assert!(r.passed && r.inverse_residual < 1e-12, "{r:?}");
        assert!(r.overlap_samples > 0);
        let mut doc = fixtures::document("mobius");
        doc.cocycle.as_mut().unwrap()[0].matrix[0][0] = "2 * (x2 / sqrt(1 - x1^2))".into();
        let bad = BundlePresentation::from_document(&doc).unwrap();
        let r = validate_cocycle(&bad, &s).unwrap();
        assert!(!r.passed);
        assert!(r.inverse_residual > 0.5);
    }

    #[test]
    fn mobius_has_two_generators_each_with_a_zero() {
        let (b, s) = setup("mobius");
        let cover = trivialization_cover(&b, &s).unwrap();
        let rep = finite_coordinate_representation(&b, &cover, &s, 8).unwrap();
        assert!(rep.count <= 2);
        assert!(rep.validate(&b, &s).unwrap().passed);
        let pou = partition_of_unity(&rep.elements, &s).unwrap();
        let gens = global_bundle_generators(&b, &rep, &pou);
        assert_eq!(gens.len(), rep.count * b.fiber_dim);
        let r = check_bundle_generators(&b, &gens, &s).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.zero_of_generator.iter().all(|z| z.is_some()));
        let metric = riemannian_metric(&rep, &pou);
        let m = check_metric(&b, &metric, &s).unwrap();
        assert!(m.passed, "{m:?}");
        let inj = injective_trivialization(&b, &gens, &metric, &s).unwrap();
        assert!(inj.passed && inj.max_residual <= 1e-8, "{inj:?}");
    }

    #[test]
    fn refinement_kicks_in_for_many_trivializations() {
        // three arcs over the circle: more than n + 1 = 2 trivializations
        let mut doc = fixtures::document("trivial");
        doc.trivializations = Some(vec![
            crate::document::DomainDoc { domain: vec!["x1 + 0.6".into()] },
            crate::document::DomainDoc { domain: vec!["0.6 - x1".into(), "x2 + 0.3".into()] },
            crate::document::DomainDoc { domain: vec!["0.6 - x1".into(), "0.3 - x2".into()] },
        ]);
        doc.cocycle = identity_cocycle(3);
        let b = BundlePresentation::from_document(&doc).unwrap();
        let s = sample(&b.base, &b.base.sampler, 0).unwrap();
        let cover = trivialization_cover(&b, &s).unwrap();
        let rep = finite_coordinate_representation(&b, &cover, &s, 8).unwrap();
        assert!(rep.refined);
        assert!(rep.count <= 2);
        assert!(rep.validate(&b, &s).unwrap().passed);
        let pou = partition_of_unity(&rep.elements, &s).unwrap();
        let gens = global_bundle_generators(&b, &rep, &pou);
        assert!(check_bundle_generators(&b, &gens, &s).unwrap().passed);
    }

    #[test]
    fn trivial_line_bundle_with_two_trivializations() {
        // σ_11 + σ_21 = ρ_1 + ρ_2 = 1
        let mut doc = fixtures::document("trivial");
        doc.trivializations = Some(vec![
            crate::document::DomainDoc { domain: vec!["x1 + 0.5".into()] },
            crate::document::DomainDoc { domain: vec!["0.5 - x1".into()] },
        ]);
        doc.cocycle = identity_cocycle(2);
        let b = BundlePresentation::from_document(&doc).unwrap();
        let s = sample(&b.base, &b.base.sampler, 0).unwrap();
        let cover = trivialization_cover(&b, &s).unwrap();
        let rep = finite_coordinate_representation(&b, &cover, &s, 8).unwrap();
        let pou = partition_of_unity(&rep.elements, &s).unwrap();
        let gens = global_bundle_generators(&b, &rep, &pou);
        assert_eq!(gens.len(), 2);
        for x in s.points() {
            let alpha = b.home(x).unwrap().unwrap();
            let total = gens[0].value_in(&b, alpha, x).unwrap()[0] + gens[1].value_in(&b, alpha, x).unwrap()[0];
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_active_piece_reproduces_local_frame() {
        let (b, s) = setup("mobius");
        let cover = trivialization_cover(&b, &s).unwrap();
        let rep = finite_coordinate_representation(&b, &cover, &s, 8).unwrap();
        let pou = partition_of_unity(&rep.elements, &s).unwrap();
        let gens = global_bundle_generators(&b, &rep, &pou);
        let mut hits = 0;
        for x in s.points() {
            let rho = pou.eval(x).unwrap();
            let Some(l) = rho.iter().position(|&r| r == 1.0) else { continue };
            let i = rep.group[l];
            let alpha = rep.elements[l].chart_index;
            assert_eq!(gens[i].value_in(&b, alpha, x).unwrap()[0], 1.0);
            hits += 1;
        }
        assert!(hits > 0);
    }

    #[test]
    fn hand_pseudoinverse() {
        let psi = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let phi = adjoint_right_inverse(&psi, &DMatrix::identity(1, 1), 0).unwrap();
        assert!((phi[(0, 0)] - 0.5).abs() <= 1e-12 && (phi[(1, 0)] - 0.5).abs() <= 1e-12);
        let id = adjoint_right_inverse(&DMatrix::identity(2, 2), &DMatrix::identity(2, 2), 0).unwrap();
        assert_eq!(id, DMatrix::identity(2, 2));
        assert!(matches!(
            adjoint_right_inverse(&DMatrix::zeros(1, 2), &DMatrix::identity(1, 1), 4),
            Err(Error::SingularGram { sample: 4, .. })
        ));
    }

    #[test]
    fn mobius_subbundle_generators() {
        let sub = SubbundlePresentation::from_json(fixtures::source("mobius_sub")).unwrap();
        let s = sample(&sub.bundle.base, &sub.bundle.base.sampler, 0).unwrap();
        let gens = subbundle_global_generators(&sub, &s).unwrap();
        assert_eq!(gens.len(), 2);
        let r = check_subbundle_generators(&sub, &gens, &s).unwrap();
        assert!(r.passed, "{:?}", (r.rank_mismatches.len(), r.max_membership_residual));
        assert!(r.ranks.iter().all(|x| x.output_rank == 1));
    }

    #[test]
    fn sussmann_line_rank_jump() {
        let sub = SubbundlePresentation::from_json(fixtures::source("sussmann_line")).unwrap();
        let s = sample(&sub.bundle.base, &sub.bundle.base.sampler, 0).unwrap();
        let gens = subbundle_global_generators(&sub, &s).unwrap();
        assert_eq!(gens.len(), 1);
        let r = check_subbundle_generators(&sub, &gens, &s).unwrap();
        assert!(r.passed);
        for row in &r.ranks {
            let x = s.point(row.sample)[0];
            assert_eq!(row.output_rank, usize::from(x > 0.0), "x = {x}");
        }
    }

    #[test]
    fn zero_subbundle_has_no_generators() {
        let mut doc = fixtures::document("mobius_sub");
        doc.subbundle.as_mut().unwrap().generators.clear();
        let sub = SubbundlePresentation::from_document(&doc).unwrap();
        let s = sample(&sub.bundle.base, &sub.bundle.base.sampler, 0).unwrap();
        assert!(subbundle_global_generators(&sub, &s).unwrap().is_empty());
    }
}
