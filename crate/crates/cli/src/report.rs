use serde::Serialize;
use serde_json::Value;
use subcart_core::Error;

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol_eq: Option<f64>,
    pub tol_ineq: Option<f64>,
    pub tol_rank: Option<f64>,
    pub m: Option<usize>,
    pub delta: f64,
    pub horizon: usize,
    pub refine_rounds: usize,
}

#[derive(Debug, Serialize)]
pub struct Stage {
    pub name: &'static str,
    /// Validation stages check the input; the others certify constructions.
    pub validation: bool,
    pub passed: bool,
    pub certificate: Value,
}

#[derive(Debug, Serialize)]
pub struct ErrorEcho {
    pub class: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub spec: String,
    pub document: Option<String>,
    pub kind: Option<String>,
    pub config: ConfigEcho,
    pub samples: Option<usize>,
    pub stages: Vec<Stage>,
    pub error: Option<ErrorEcho>,
    pub verdict: &'static str,
    pub exit_code: u8,
}

pub fn error_code(e: &Error) -> (u8, &'static str) {
    match e {
        _ if e.is_numerical() => (2, "numerical"),
        Error::NotManifold(_) | Error::EmbeddingDimension { .. } | Error::InvalidBump { .. } => {
            (1, "validation")
        }
        _ => (3, "input"),
    }
}

impl RunReport {
    pub fn stage(&mut self, name: &'static str, validation: bool, passed: bool, certificate: impl Serialize) {
        let certificate = serde_json::to_value(certificate).expect("certificates serialize");
        self.stages.push(Stage {
            name,
            validation,
            passed,
            certificate,
        });
    }

    /// Fix the verdict: errors first, then failed validation, then failed constructions.
    pub fn finish(&mut self, err: Option<Error>) -> u8 {
        let code = if let Some(e) = err {
            let (code, class) = error_code(&e);
            self.error = Some(ErrorEcho {
                class,
                message: e.to_string(),
            });
            code
        } else if self.stages.iter().any(|s| s.validation && !s.passed) {
            1
        } else if self.stages.iter().any(|s| !s.passed) {
            2
        } else {
            0
        };
        self.exit_code = code;
        self.verdict = if code == 0 { "pass" } else { "fail" };
        code
    }
}
