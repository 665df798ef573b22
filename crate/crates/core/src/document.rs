//! JSON documents describing spaces, bundles and distributions.
//!
//! A single document type covers all three: bundle documents add
//! `fiber_dim`, `trivializations` and `cocycle` (and optionally `subbundle`);
//! distribution documents add `fields`. Indices inside documents are zero-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub name: String,
    pub ambient_dim: usize,
    pub structural_dim: usize,
    #[serde(default)]
    pub manifold: bool,
    #[serde(default)]
    pub constraints: ConstraintsDoc,
    pub charts: Vec<ChartDoc>,
    pub working_region: RegionDoc,
    pub samples: SamplesDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverDoc>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivializations: Option<Vec<DomainDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<TransitionDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subbundle: Option<SubbundleDoc>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<FieldDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangency_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsDoc {
    #[serde(default)]
    pub equalities: Vec<String>,
    #[serde(default)]
    pub inequalities: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    #[serde(default)]
    pub domain: Vec<String>,
    pub map: Vec<String>,
    pub target_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDoc {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_eq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_ineq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub radius: f64,
    #[serde(default = "default_ratios")]
    pub ratios: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_radius: Option<f64>,
}

fn default_ratios() -> [f64; 3] {
    [1.0, 1.2, 1.5]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SamplesDoc {
    Grid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        counts: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_count: Option<usize>,
    },
    Explicit {
        points: Vec<Vec<f64>>,
    },
    Parametric {
        pieces: Vec<PieceDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_count: Option<usize>,
    },
    Random {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_draws: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<String>>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub counts: Vec<usize>,
    #[serde(default = "yes")]
    pub endpoint: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    #[serde(default)]
    pub domain: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: usize,
    pub to: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubbundleDoc {
    pub generators: Vec<LocalGeneratorDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalGeneratorDoc {
    #[serde(default)]
    pub domain: Vec<String>,
    #[serde(default)]
    pub trivialization: usize,
    pub sections: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    #[serde(default)]
    pub domain: Vec<String>,
    pub components: Vec<String>,
}

/// What a document describes, judged from the optional sections it carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Space,
    Bundle,
    Distribution,
}

impl SpaceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("malformed document: {e}")))
    }

    pub fn kind(&self) -> DocumentKind {
        if self.fiber_dim.is_some() || self.trivializations.is_some() {
            DocumentKind::Bundle
        } else if self.fields.is_some() {
            DocumentKind::Distribution
        } else {
            DocumentKind::Space
        }
    }
}
