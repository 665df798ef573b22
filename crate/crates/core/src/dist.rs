//! Generalized distributions spanned by local vector fields: tangency,
//! pointwise rank and finitely many global generating derivations.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bundle::{
    span_report, subbundle_global_generators, BundlePresentation, LocalGenerators, SpanReport,
    SubbundlePresentation,
};
use crate::document::SpaceDocument;
use crate::embed::tangent_space;
use crate::error::{Error, Result};
use crate::expr::ExprVec;
use crate::linalg::rank;
use crate::space::{load_presentation, Domain, SampleSet, SpacePresentation};

pub const DEFAULT_TANGENCY_TOL: f64 = 1e-8;

/// Local vector fields sharing one open domain.
#[derive(Debug, Clone)]
pub struct FieldGroup {
    pub domain: Domain,
    pub fields: Vec<ExprVec>,
}

#[derive(Debug, Clone)]
pub struct DistributionPresentation {
    pub base: SpacePresentation,
    pub groups: Vec<FieldGroup>,
    pub tangency_tol: f64,
}

impl DistributionPresentation {
    /// Fields listed with identical domain conditions are grouped together.
    pub fn from_document(doc: &SpaceDocument) -> Result<Self> {
        let base = load_presentation(doc)?;
        let n = base.ambient_dim;
        let fields = doc
            .fields
            .as_ref()
            .ok_or_else(|| Error::Format("distribution document needs `fields`".into()))?;
        let mut keys: Vec<&Vec<String>> = Vec::new();
        let mut groups: Vec<FieldGroup> = Vec::new();
        for f in fields {
            if f.components.len() != n {
                return Err(Error::Format(format!(
                    "vector field has {} components in R^{n}",
                    f.components.len()
                )));
            }
            let field = ExprVec::parse(&f.components, n)?;
            match keys.iter().position(|k| **k == f.domain) {
                Some(i) => groups[i].fields.push(field),
                None => {
                    keys.push(&f.domain);
                    groups.push(FieldGroup {
                        domain: Domain::parse(&f.domain, n)?,
                        fields: vec![field],
                    });
                }
            }
        }
        Ok(DistributionPresentation {
            base,
            groups,
            tangency_tol: doc.tangency_tol.unwrap_or(DEFAULT_TANGENCY_TOL),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&SpaceDocument::from_json(text)?)
    }

    /// Values of the fields defined at `x`, as columns.
    pub fn local_values(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut cols = Vec::new();
        for g in &self.groups {
            if g.domain.contains(x)? {
                for f in &g.fields {
                    cols.push(DVector::from_vec(f.eval(x)?));
                }
            }
        }
        if cols.is_empty() {
            return Ok(DMatrix::zeros(self.base.ambient_dim, 0));
        }
        Ok(DMatrix::from_columns(&cols))
    }

    /// The distribution as a generalized subbundle of the trivial bundle `S × R^N`.
    pub fn as_subbundle(&self) -> SubbundlePresentation {
        let n = self.base.ambient_dim;
        SubbundlePresentation {
            bundle: BundlePresentation::trivial(self.base.clone(), n),
            local: self
                .groups
                .iter()
                .map(|g| LocalGenerators {
                    domain: g.domain.clone(),
                    trivialization: 0,
                    sections: g.fields.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TangencyReport {
    /// `max ‖DF(x)·X(x)‖` over samples in the field's domain.
    pub max_residual: f64,
    pub worst_sample: Option<usize>,
    pub passed: bool,
}

/// Tangency of one field to the equality constraints, on samples in `domain`.
pub fn verify_tangency(
    p: &SpacePresentation,
    field: &ExprVec,
    domain: &Domain,
    samples: &SampleSet,
    tol: f64,
) -> Result<TangencyReport> {
    let mut max_residual = 0.0f64;
    let mut worst_sample = None;
    for (s, x) in samples.points().iter().enumerate() {
        if !domain.contains(x)? {
            continue;
        }
        let v = DVector::from_vec(field.eval(x)?);
        let r = (p.constraint_jacobian(x)? * v).norm();
        if r > max_residual || worst_sample.is_none() {
            max_residual = max_residual.max(r);
            worst_sample = Some(s);
        }
    }
    Ok(TangencyReport {
        max_residual,
        worst_sample,
        passed: max_residual <= tol,
    })
}

/// Tangency of every field of the distribution.
pub fn verify_distribution_tangency(
    dist: &DistributionPresentation,
    samples: &SampleSet,
) -> Result<TangencyReport> {
    let mut out = TangencyReport {
        max_residual: 0.0,
        worst_sample: None,
        passed: true,
    };
    for g in &dist.groups {
        for f in &g.fields {
            let r = verify_tangency(&dist.base, f, &g.domain, samples, dist.tangency_tol)?;
            if r.max_residual >= out.max_residual && r.worst_sample.is_some() {
                out.max_residual = r.max_residual;
                out.worst_sample = r.worst_sample;
            }
            out.passed &= r.passed;
        }
    }
    Ok(out)
}

/// Dimension of `D_x`, the span of the fields defined at `x`.
pub fn distribution_rank(dist: &DistributionPresentation, x: &[f64]) -> Result<usize> {
    Ok(rank(&dist.local_values(x)?, dist.base.tolerances.rank_tol))
}

/// A global vector field `X = Σ_l ρ_l Y_{f(l)}` on the ambient space.
#[derive(Debug, Clone)]
pub struct GlobalDerivation {
    pub field: ExprVec,
}

/// Finitely many global derivations spanning the distribution at every sample.
pub fn global_distribution_generators(
    dist: &DistributionPresentation,
    samples: &SampleSet,
) -> Result<Vec<GlobalDerivation>> {
    let n = dist.base.ambient_dim;
    subbundle_global_generators(&dist.as_subbundle(), samples)?
        .iter()
        .map(|s| Ok(GlobalDerivation { field: s.ambient_field(n, n)? }))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DistributionReport {
    pub span: SpanReport,
    pub tangency: TangencyReport,
    pub passed: bool,
}

/// At each sample: generators projected to the tangent space span a space of
/// the same dimension as the distribution, and lie in the span of the local fields.
pub fn span_check(
    generators: &[GlobalDerivation],
    dist: &DistributionPresentation,
    samples: &SampleSet,
) -> Result<DistributionReport> {
    let p = &dist.base;
    let tol = p.tolerances.rank_tol;
    let span = span_report(samples, generators.len(), tol, |x| {
        let input = dist.local_values(x)?;
        let t = tangent_space(p, x, tol)?;
        let cols = generators
            .iter()
            .map(|g| Ok(DVector::from_vec(g.field.eval(x)?)))
            .collect::<Result<Vec<_>>>()?;
        let output = if cols.is_empty() {
            DMatrix::zeros(p.ambient_dim, 0)
        } else {
            let raw = DMatrix::from_columns(&cols);
            &t * (t.transpose() * raw)
        };
        Ok(Some((input, output)))
    })?;
    let mut tangency = TangencyReport {
        max_residual: 0.0,
        worst_sample: None,
        passed: true,
    };
    let whole = Domain::whole();
    for g in generators {
        let r = verify_tangency(p, &g.field, &whole, samples, dist.tangency_tol)?;
        if r.max_residual >= tangency.max_residual {
            tangency.max_residual = r.max_residual;
            tangency.worst_sample = r.worst_sample;
        }
        tangency.passed &= r.passed;
    }
    Ok(DistributionReport {
        passed: span.passed && tangency.passed,
        span,
        tangency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::sample;

    fn setup(name: &str) -> (DistributionPresentation, SampleSet) {
        let d = DistributionPresentation::from_json(fixtures::source(name)).unwrap();
        let s = sample(&d.base, &d.base.sampler, 0).unwrap();
        (d, s)
    }

    #[test]
    fn rotation_field_is_tangent_and_constant_field_is_not() {
        let (d, s) = setup("circle_tangent");
        assert!(verify_distribution_tangency(&d, &s).unwrap().passed);
        let c = ExprVec::parse(&["1", "0"], 2).unwrap();
        let r = verify_tangency(&d.base, &c, &Domain::whole(), &s, 1e-8).unwrap();
        assert!(!r.passed);
        assert!((r.max_residual - 2.0).abs() < 1e-12);
        assert_eq!(s.point(r.worst_sample.unwrap())[0].abs(), 1.0);
    }

    #[test]
    fn sussmann_ranks() {
        let (d, _) = setup("sussmann");
        assert_eq!(d.groups.len(), 1);
        assert_eq!(distribution_rank(&d, &[-0.5]).unwrap(), 0);
        assert_eq!(distribution_rank(&d, &[0.0]).unwrap(), 0);
        assert_eq!(distribution_rank(&d, &[0.05]).unwrap(), 1);
    }

    #[test]
    fn sussmann_single_generator() {
        let (d, s) = setup("sussmann");
        let gens = global_distribution_generators(&d, &s).unwrap();
        assert_eq!(gens.len(), 1);
        let r = span_check(&gens, &d, &s).unwrap();
        assert!(r.passed, "{:?}", r.span.rank_mismatches);
        for row in &r.span.ranks {
            let x = s.point(row.sample)[0];
            assert_eq!(row.output_rank, usize::from(x > 0.0));
        }
    }

    #[test]
    fn circle_tangent_generators_and_dropped_one() {
        let (d, s) = setup("circle_tangent");
        assert_eq!(d.groups.len(), 2);
        let gens = global_distribution_generators(&d, &s).unwrap();
        assert_eq!(gens.len(), 2);
        let r = span_check(&gens, &d, &s).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.span.ranks.iter().all(|x| x.output_rank == 1));
        let r = span_check(&gens[..1], &d, &s).unwrap();
        assert!(!r.passed);
        assert!(!r.span.rank_mismatches.is_empty());
    }
}
