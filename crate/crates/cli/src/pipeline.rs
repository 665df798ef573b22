use std::fs;
use std::path::Path;

use serde::Serialize;
use subcart_core::bundle::{
    check_bundle_generators, check_metric, check_subbundle_generators, finite_coordinate_representation,
    global_bundle_generators, injective_trivialization, riemannian_metric, subbundle_global_generators,
    trivialization_cover, validate_cocycle, BundlePresentation, SubbundlePresentation,
};
use subcart_core::cover::{
    compact_exhaustion, cover_order, finite_atlas, refine_bounded_order, triple_cover, Cover,
    DEFAULT_REFINE_ROUNDS,
};
use subcart_core::dist::{
    global_distribution_generators, span_check, verify_distribution_tangency, DistributionPresentation,
};
use subcart_core::document::{DocumentKind, SpaceDocument};
use subcart_core::embed::{point_cloud, proper_embedding, EmbedParams};
use subcart_core::partition::{check_partition, exhaustion_function, partition_of_unity, sublevel_containment};
use subcart_core::space::{
    load_presentation, sample, validate_charts, SampleConfig, SampleSet, SpacePresentation,
};
use subcart_core::{Error, Result};

use crate::report::{ConfigEcho, RunReport};
use crate::{Kind, Opts};

/// Everything that can be built from one document, with overrides applied.
struct Loaded {
    base: SpacePresentation,
    bundle: Option<BundlePresentation>,
    sub: Option<SubbundlePresentation>,
    dist: Option<DistributionPresentation>,
}

fn apply_overrides(p: &mut SpacePresentation, opts: &Opts) {
    if let Some(t) = opts.tol_eq {
        p.tolerances.tol_eq = t;
    }
    if let Some(t) = opts.tol_rank {
        p.tolerances.rank_tol = t;
    }
    if let Some(n) = opts.samples {
        p.sampler = p.sampler.with_count(n);
    }
}

fn load(doc: &SpaceDocument, opts: &Opts) -> Result<Loaded> {
    let mut base = load_presentation(doc)?;
    apply_overrides(&mut base, opts);
    let mut loaded = Loaded {
        base,
        bundle: None,
        sub: None,
        dist: None,
    };
    match doc.kind() {
        DocumentKind::Space => {}
        DocumentKind::Bundle => {
            let mut b = BundlePresentation::from_document(doc)?;
            apply_overrides(&mut b.base, opts);
            if doc.subbundle.is_some() {
                let mut s = SubbundlePresentation::from_document(doc)?;
                apply_overrides(&mut s.bundle.base, opts);
                loaded.sub = Some(s);
            }
            loaded.bundle = Some(b);
        }
        DocumentKind::Distribution => {
            let mut d = DistributionPresentation::from_document(doc)?;
            apply_overrides(&mut d.base, opts);
            loaded.dist = Some(d);
        }
    }
    Ok(loaded)
}

fn needs_seed(kind: Kind, p: &SpacePresentation) -> bool {
    matches!(kind, Kind::Partition | Kind::Embed | Kind::Report)
        || matches!(p.sampler, SampleConfig::Random { .. })
}

pub fn run(kind: Kind, opts: &Opts) -> u8 {
    let text = match fs::read_to_string(&opts.spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", opts.spec.display());
            return 3;
        }
    };
    let stem = opts
        .spec
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into());
    let mut report = RunReport {
        tool: "subcart",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: kind.name(),
        spec: opts
            .spec
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        document: None,
        kind: None,
        config: ConfigEcho {
            seed: opts.seed,
            samples: opts.samples,
            tol_eq: None,
            tol_ineq: None,
            tol_rank: None,
            m: opts.m,
            delta: opts.delta,
            horizon: opts.horizon,
            refine_rounds: DEFAULT_REFINE_ROUNDS,
        },
        samples: None,
        stages: Vec::new(),
        error: None,
        verdict: "fail",
        exit_code: 3,
    };
    let result = execute(kind, opts, &text, &stem, &mut report);
    let code = report.finish(result.err());
    if let Err(e) = write_report(&report, &opts.out_dir, &stem, kind) {
        eprintln!("error: cannot write report: {e}");
        return 3;
    }
    println!("{} {}: {} (exit {code})", kind.name(), report.spec, report.verdict);
    if let Some(e) = &report.error {
        eprintln!("{} error: {}", e.class, e.message);
    }
    code
}

fn write_report(report: &RunReport, dir: &Path, stem: &str, kind: Kind) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    json.push('\n');
    fs::write(dir.join(format!("{stem}.{}.json", kind.name())), json)
}

fn execute(kind: Kind, opts: &Opts, text: &str, stem: &str, report: &mut RunReport) -> Result<()> {
    let doc = SpaceDocument::from_json(text)?;
    report.document = Some(doc.name.clone());
    report.kind = Some(format!("{:?}", doc.kind()).to_lowercase());
    let loaded = load(&doc, opts)?;
    let p = &loaded.base;
    report.config.tol_eq = Some(p.tolerances.tol_eq);
    report.config.tol_ineq = Some(p.tolerances.tol_ineq);
    report.config.tol_rank = Some(p.tolerances.rank_tol);
    if needs_seed(kind, p) && opts.seed.is_none() {
        return Err(Error::Format(format!("`{}` needs --seed", kind.name())));
    }
    let seed = opts.seed.unwrap_or(0);
    let samples = sample(p, &p.sampler, seed)?;
    report.samples = Some(samples.len());

    match kind {
        Kind::Validate => validate(&loaded, &samples, report),
        Kind::Cover => cover(p, &samples, opts, report).map(|_| ()),
        Kind::Partition => {
            let c = cover(p, &samples, opts, report)?;
            partition(p, &c, &samples, seed, report)
        }
        Kind::Embed => embed(p, &samples, opts, seed, stem, report),
        Kind::Generators => generators(&loaded, &samples, report),
        Kind::BundleGenerators => match &loaded.bundle {
            Some(b) => bundle_generators(b, &samples, report),
            None => Err(Error::Format("bundle-generators needs a bundle document".into())),
        },
        Kind::Report => {
            validate(&loaded, &samples, report)?;
            let c = cover(p, &samples, opts, report)?;
            partition(p, &c, &samples, seed, report)?;
            embed(p, &samples, opts, seed, stem, report)?;
            if loaded.sub.is_some() || loaded.dist.is_some() {
                generators(&loaded, &samples, report)?;
            }
            if let Some(b) = &loaded.bundle {
                bundle_generators(b, &samples, report)?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SampleCertificate {
    count: usize,
    min_spacing: f64,
}

fn validate(loaded: &Loaded, samples: &SampleSet, report: &mut RunReport) -> Result<()> {
    report.stage(
        "samples",
        true,
        true,
        SampleCertificate {
            count: samples.len(),
            min_spacing: samples.min_spacing(),
        },
    );
    let charts = validate_charts(&loaded.base, samples)?;
    report.stage("charts", true, charts.passed, &charts);
    if let Some(b) = &loaded.bundle {
        let r = validate_cocycle(b, samples)?;
        report.stage("cocycle", true, r.passed, &r);
    }
    if let Some(d) = &loaded.dist {
        let r = verify_distribution_tangency(d, samples)?;
        report.stage("tangency", true, r.passed, &r);
    }
    Ok(())
}

#[derive(Serialize)]
struct CoverCertificate<'a> {
    elements: usize,
    uncovered_samples: Vec<usize>,
    cover: &'a Cover,
}

#[derive(Serialize)]
struct RefinementCertificate {
    n: usize,
    families: usize,
    round: usize,
    margins: Vec<f64>,
    order: usize,
}

fn cover(p: &SpacePresentation, samples: &SampleSet, opts: &Opts, report: &mut RunReport) -> Result<Cover> {
    let ex = compact_exhaustion(p, opts.horizon, None)?;
    let nested = ex.nesting_holds(samples);
    report.stage("exhaustion", false, nested, &ex);
    let c = triple_cover(p, samples, &p.cover_params)?;
    let uncovered = c.uncovered(samples);
    report.stage(
        "cover",
        false,
        uncovered.is_empty(),
        CoverCertificate {
            elements: c.len(),
            uncovered_samples: uncovered.clone(),
            cover: &c,
        },
    );
    let n = p.structural_dim;
    let fam = refine_bounded_order(&c, n, samples, DEFAULT_REFINE_ROUNDS)?;
    let order = cover_order(&fam.elements, samples);
    report.stage(
        "refinement",
        false,
        fam.families.len() <= n + 1 && order <= n + 1,
        RefinementCertificate {
            n,
            families: fam.families.len(),
            round: fam.round,
            margins: fam.margins.clone(),
            order,
        },
    );
    let atlas = finite_atlas(p, &fam, samples)?;
    let ok = atlas.len() <= n + 1
        && atlas.iter().all(|g| {
            g.injectivity_margin.is_none_or(|m| m > 0.0) && g.piece_separation >= subcart_core::cover::PIECE_GAP
        });
    report.stage("atlas", false, ok, &atlas);
    Ok(c)
}

fn partition(p: &SpacePresentation, c: &Cover, samples: &SampleSet, seed: u64, report: &mut RunReport) -> Result<()> {
    let pou = partition_of_unity(&c.elements, samples)?;
    let r = check_partition(&pou, samples, &p.region, seed)?;
    report.stage("partition", false, r.passed, &r);
    let ex = exhaustion_function(&pou, &p.base_point);
    let levels: Vec<f64> = (1..=pou.len()).map(|a| a as f64).collect();
    let checks = sublevel_containment(&ex, &pou, samples, &p.base_point, &levels)?;
    let ok = checks.iter().all(|c| c.violations == 0);
    report.stage("sublevels", false, ok, &checks);
    Ok(())
}

fn embed(
    p: &SpacePresentation,
    samples: &SampleSet,
    opts: &Opts,
    seed: u64,
    stem: &str,
    report: &mut RunReport,
) -> Result<()> {
    let params = EmbedParams {
        m: opts.m,
        delta: opts.delta,
        ..EmbedParams::default()
    };
    let result = proper_embedding(p, samples, &params, seed)?;
    #[derive(Serialize)]
    struct EmbedCertificate<'a> {
        n: usize,
        m: usize,
        params: &'a EmbedParams,
        diagnostics: &'a subcart_core::embed::EmbeddingDiagnostics,
        chart_sup: &'a [f64],
        records: &'a [subcart_core::embed::PerturbationRecord],
    }
    report.stage(
        "embedding",
        false,
        result.diagnostics.passed,
        EmbedCertificate {
            n: p.structural_dim,
            m: result.m,
            params: &result.params,
            diagnostics: &result.diagnostics,
            chart_sup: &result.chart_sup,
            records: &result.records,
        },
    );
    let rows = point_cloud(&result, samples)?;
    write_cloud(&opts.out_dir, stem, p.ambient_dim, result.m, &rows)
        .map_err(|e| Error::Format(format!("cannot write point cloud: {e}")))
}

fn write_cloud(dir: &Path, stem: &str, n: usize, m: usize, rows: &[(Vec<f64>, Vec<f64>)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join(format!("{stem}.embed.csv")))?;
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=m).map(|i| format!("psi{i}")))
        .collect();
    w.write_record(&header)?;
    for (x, y) in rows {
        w.write_record(x.iter().chain(y).map(|v| v.to_string()))?;
    }
    w.flush()
}

#[derive(Serialize)]
struct GeneratorCertificate<T: Serialize> {
    generators: usize,
    check: T,
}

fn generators(loaded: &Loaded, samples: &SampleSet, report: &mut RunReport) -> Result<()> {
    if let Some(d) = &loaded.dist {
        let gens = global_distribution_generators(d, samples)?;
        let r = span_check(&gens, d, samples)?;
        report.stage(
            "generators",
            false,
            r.passed,
            GeneratorCertificate {
                generators: gens.len(),
                check: &r,
            },
        );
        return Ok(());
    }
    if let Some(s) = &loaded.sub {
        let gens = subbundle_global_generators(s, samples)?;
        let r = check_subbundle_generators(s, &gens, samples)?;
        report.stage(
            "generators",
            false,
            r.passed,
            GeneratorCertificate {
                generators: gens.len(),
                check: &r,
            },
        );
        return Ok(());
    }
    Err(Error::Format(
        "generators needs a distribution or a bundle with a subbundle section".into(),
    ))
}

#[derive(Serialize)]
struct RepresentationCertificate<T: Serialize> {
    trivializations: usize,
    refined: bool,
    pieces: usize,
    cocycle: T,
}

fn bundle_generators(b: &BundlePresentation, samples: &SampleSet, report: &mut RunReport) -> Result<()> {
    let cocycle = validate_cocycle(b, samples)?;
    report.stage("cocycle", true, cocycle.passed, &cocycle);
    let cover = trivialization_cover(b, samples)?;
    let rep = finite_coordinate_representation(b, &cover, samples, DEFAULT_REFINE_ROUNDS)?;
    let rc = rep.validate(b, samples)?;
    report.stage(
        "coordinate-representation",
        false,
        rc.passed && rep.count <= b.base.structural_dim + 1,
        RepresentationCertificate {
            trivializations: rep.count,
            refined: rep.refined,
            pieces: rep.elements.len(),
            cocycle: &rc,
        },
    );
    let pou = partition_of_unity(&rep.elements, samples)?;
    let gens = global_bundle_generators(b, &rep, &pou);
    let g = check_bundle_generators(b, &gens, samples)?;
    report.stage("bundle-generators", false, g.passed, &g);
    let metric = riemannian_metric(&rep, &pou);
    let m = check_metric(b, &metric, samples)?;
    report.stage("metric", false, m.passed, &m);
    let inj = injective_trivialization(b, &gens, &metric, samples)?;
    report.stage("injective-trivialization", false, inj.passed, &inj);
    Ok(())
}
