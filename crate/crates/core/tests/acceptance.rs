//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subcart_core::bundle::{
    adjoint_right_inverse, check_bundle_generators, check_subbundle_generators,
    finite_coordinate_representation, global_bundle_generators, injective_trivialization,
    riemannian_metric, subbundle_global_generators, trivialization_cover, validate_cocycle,
    BundlePresentation, SubbundlePresentation,
};
use subcart_core::cover::{
    cover_order, finite_atlas, refine_bounded_order, triple_cover, DEFAULT_REFINE_ROUNDS, PIECE_GAP,
};
use subcart_core::dist::{global_distribution_generators, span_check, DistributionPresentation};
use subcart_core::document::SpaceDocument;
use subcart_core::embed::{proper_embedding, EmbedParams};
use subcart_core::fixtures;
use subcart_core::partition::{
    check_partition, exhaustion_function, partition_of_unity, sublevel_containment, PROBES,
};
use subcart_core::space::{load_presentation, sample, Domain, SampleSet, SpacePresentation};
use subcart_core::{parse_expr, SmoothExpr};

type Outcome = Result<String, String>;
type Criterion = (usize, &'static str, fn() -> Outcome);

const SPACES: [&str; 4] = ["interval", "halfline", "circle", "cross"];
const BUNDLES: [&str; 4] = ["mobius", "trivial", "mobius_sub", "sussmann_line"];

fn default_samples(p: &SpacePresentation) -> SampleSet {
    sample(p, &p.sampler, 0).expect("fixture samples")
}

/// At least 10³ samples on every space fixture.
fn dense_samples(name: &str, p: &SpacePresentation) -> SampleSet {
    let count = match name {
        "cross" => 501,
        "halfline" => 1001,
        _ => 1000,
    };
    sample(p, &p.sampler.with_count(count), 0).expect("dense samples")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn central_difference(f: &SmoothExpr, x: &[f64], i: usize) -> Option<f64> {
    const H: f64 = 1e-5;
    let mut y = x.to_vec();
    y[i] = x[i] + H;
    let up = f.eval(&y).ok()?;
    y[i] = x[i] - H;
    let down = f.eval(&y).ok()?;
    Some((up - down) / (2.0 * H))
}

fn expressions(doc: &SpaceDocument) -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    for e in doc.constraints.equalities.iter().chain(&doc.constraints.inequalities) {
        out.push((e.clone(), vec![]));
    }
    for c in &doc.charts {
        out.extend(c.map.iter().map(|e| (e.clone(), c.domain.clone())));
    }
    let trivs = doc.trivializations.clone().unwrap_or_default();
    for t in doc.cocycle.iter().flatten() {
        let dom: Vec<String> = trivs[t.from].domain.iter().chain(&trivs[t.to].domain).cloned().collect();
        out.extend(t.matrix.iter().flatten().map(|e| (e.clone(), dom.clone())));
    }
    for g in doc.subbundle.iter().flat_map(|s| &s.generators) {
        out.extend(g.sections.iter().flatten().map(|e| (e.clone(), g.domain.clone())));
    }
    for f in doc.fields.iter().flatten() {
        out.extend(f.components.iter().map(|e| (e.clone(), f.domain.clone())));
    }
    out
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut exprs = 0;
    for (name, _, _) in fixtures::SOURCES {
        let doc = fixtures::document(name);
        let p = load_presentation(&doc).map_err(err)?;
        let s = default_samples(&p);
        let n = p.ambient_dim;
        for (k, (text, dom)) in expressions(&doc).into_iter().enumerate() {
            let f = parse_expr(&text, n).map_err(err)?;
            let dom = Domain::parse(&dom, n).map_err(err)?;
            let pool: Vec<&Vec<f64>> = s.points().iter().filter(|x| dom.contains(x).unwrap_or(false)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
            let mut points = 0;
            let mut attempts = 0;
            while points < 100 && attempts < 1000 {
                attempts += 1;
                let base = pool[rng.random_range(0..pool.len())];
                let x: Vec<f64> = base.iter().map(|v| v + rng.random_range(-0.01..0.01)).collect();
                let Ok((_, grad)) = f.gradient(&x) else { continue };
                let mut fds = Vec::with_capacity(n);
                for i in 0..n {
                    fds.push(central_difference(&f, &x, i));
                }
                if fds.iter().any(|d| d.is_none()) {
                    continue;
                }
                for (g, d) in grad.iter().zip(fds.into_iter().flatten()) {
                    worst = worst.max((g - d).abs() / g.abs().max(1.0));
                }
                points += 1;
            }
            if points < 100 {
                return Err(format!("{name}: only {points} admissible points for `{text}`"));
            }
            exprs += 1;
        }
    }
    check(worst < 1e-6, format!("{exprs} expressions × 100 points, max relative error {worst:.2e} (< 1e-6)"))
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in SPACES {
        let p = fixtures::space(name);
        let s = default_samples(&p);
        let c = triple_cover(&p, &s, &p.cover_params).map_err(err)?;
        let pou = partition_of_unity(&c.elements, &s).map_err(err)?;
        let r = check_partition(&pou, &s, &p.region, 11).map_err(err)?;
        let probes_ok = r.probes_per_term.iter().all(|&k| k == PROBES);
        ok &= r.passed && probes_ok;
        parts.push(format!(
            "{name}: |Σρ−1| ≤ {:.1e}, ρ ∈ [{:.1e}, {:.3}], off-support max {}",
            r.max_sum_error, r.min_value, r.max_value, r.max_off_support
        ));
    }
    check(ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in SPACES {
        let p = fixtures::space(name);
        let s = dense_samples(name, &p);
        let n = p.structural_dim;
        let c = triple_cover(&p, &s, &p.cover_params).map_err(err)?;
        let f = refine_bounded_order(&c, n, &s, DEFAULT_REFINE_ROUNDS).map_err(err)?;
        let order = cover_order(&f.elements, &s);
        ok &= s.len() >= 1000 && f.families.len() <= n + 1 && order <= n + 1;
        parts.push(format!("{name}: {} samples, {} families, order {order} (n={n})", s.len(), f.families.len()));
    }
    check(ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in SPACES {
        let p = fixtures::space(name);
        let s = dense_samples(name, &p);
        let n = p.structural_dim;
        let c = triple_cover(&p, &s, &p.cover_params).map_err(err)?;
        let f = refine_bounded_order(&c, n, &s, DEFAULT_REFINE_ROUNDS).map_err(err)?;
        let atlas = finite_atlas(&p, &f, &s).map_err(err)?;
        let margin = atlas
            .iter()
            .filter_map(|g| g.injectivity_margin)
            .fold(f64::INFINITY, f64::min);
        let sep = atlas.iter().map(|g| g.piece_separation).fold(f64::INFINITY, f64::min);
        ok &= atlas.len() <= n + 1 && margin > 0.0 && sep >= PIECE_GAP;
        parts.push(format!("{name}: {} charts, margin {margin:.2e}, piece gap {sep}", atlas.len()));
    }
    check(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let p = fixtures::half_line();
    let s = default_samples(&p);
    let c = triple_cover(&p, &s, &p.cover_params).map_err(err)?;
    let pou = partition_of_unity(&c.elements, &s).map_err(err)?;
    let ex = exhaustion_function(&pou, &p.base_point);
    let levels: Vec<f64> = (1..=pou.len()).map(|a| a as f64).collect();
    let checks = sublevel_containment(&ex, &pou, &s, &p.base_point, &levels).map_err(err)?;
    let violations: usize = checks.iter().map(|c| c.violations).sum();
    check(
        violations == 0,
        format!("half-line window, J = {}, {violations} samples outside the prescribed supports", levels.len()),
    )
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in SPACES {
        let p = fixtures::space(name);
        let s = default_samples(&p);
        let params = EmbedParams::default();
        let a = proper_embedding(&p, &s, &params, 7).map_err(err)?;
        let b = proper_embedding(&p, &s, &params, 7).map_err(err)?;
        let mut same = a.records == b.records;
        for x in s.points() {
            same &= a.map.eval(x).map_err(err)? == b.map.eval(x).map_err(err)?;
        }
        let d = &a.diagnostics;
        let retries = a.records.iter().map(|r| r.retries).max().unwrap_or(0);
        ok &= a.m == 2 * p.structural_dim + 1
            && d.max_deviation < 1.0
            && d.min_separation_ratio > 1e-6
            && d.min_tangent_singular_value > 1e-6
            && same
            && retries <= params.max_retries;
        parts.push(format!(
            "{name}: m={} dev {:.3} ratio {:.1e} σ {:.1e} retries ≤ {retries}{}",
            a.m,
            d.max_deviation,
            d.min_separation_ratio,
            d.min_tangent_singular_value,
            if same { "" } else { " NONDETERMINISTIC" }
        ));
    }
    check(ok, parts.join("; "))
}

fn bundle(name: &str) -> Result<(BundlePresentation, SampleSet), String> {
    let b = BundlePresentation::from_json(fixtures::source(name)).map_err(err)?;
    let s = default_samples(&b.base);
    Ok((b, s))
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["mobius", "trivial"] {
        let (b, s) = bundle(name)?;
        let cover = trivialization_cover(&b, &s).map_err(err)?;
        let rep = finite_coordinate_representation(&b, &cover, &s, DEFAULT_REFINE_ROUNDS).map_err(err)?;
        let pou = partition_of_unity(&rep.elements, &s).map_err(err)?;
        let gens = global_bundle_generators(&b, &rep, &pou);
        let r = check_bundle_generators(&b, &gens, &s).map_err(err)?;
        ok &= r.passed && gens.len() == rep.count * b.fiber_dim;
        if name == "mobius" {
            ok &= gens.len() == 2 && r.zero_of_generator.iter().all(|z| z.is_some());
        }
        parts.push(format!(
            "{name}: {} generators (m={}, k={}), min rank {}, generators with a zero {}",
            gens.len(),
            rep.count,
            b.fiber_dim,
            r.min_rank,
            r.zero_of_generator.iter().filter(|z| z.is_some()).count()
        ));
    }
    check(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["mobius", "trivial"] {
        let (b, s) = bundle(name)?;
        let cover = trivialization_cover(&b, &s).map_err(err)?;
        let rep = finite_coordinate_representation(&b, &cover, &s, DEFAULT_REFINE_ROUNDS).map_err(err)?;
        let pou = partition_of_unity(&rep.elements, &s).map_err(err)?;
        let gens = global_bundle_generators(&b, &rep, &pou);
        let metric = riemannian_metric(&rep, &pou);
        let r = injective_trivialization(&b, &gens, &metric, &s).map_err(err)?;
        ok &= r.max_residual <= 1e-8 && r.passed;
        parts.push(format!("{name}: max ‖ψφe − e‖ = {:.1e}", r.max_residual));
    }
    let psi = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let phi = adjoint_right_inverse(&psi, &DMatrix::identity(1, 1), 0).map_err(err)?;
    let hand = (phi[(0, 0)] - 0.5).abs().max((phi[(1, 0)] - 0.5).abs());
    ok &= hand <= 1e-12;
    parts.push(format!("ψ=[1 1] → φ off by {hand:.1e}"));
    check(ok, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut profile_ok = true;
    for name in ["mobius_sub", "sussmann_line"] {
        let sub = SubbundlePresentation::from_json(fixtures::source(name)).map_err(err)?;
        let s = default_samples(&sub.bundle.base);
        let gens = subbundle_global_generators(&sub, &s).map_err(err)?;
        let r = check_subbundle_generators(&sub, &gens, &s).map_err(err)?;
        ok &= r.passed;
        if name == "sussmann_line" {
            profile_ok &= r.ranks.iter().all(|row| row.output_rank == usize::from(s.point(row.sample)[0] > 0.0));
        }
        parts.push(format!(
            "{name}: {} generators, rank mismatches {}, membership {:.1e}",
            gens.len(),
            r.rank_mismatches.len(),
            r.max_membership_residual
        ));
    }
    for name in ["sussmann", "circle_tangent"] {
        let d = DistributionPresentation::from_json(fixtures::source(name)).map_err(err)?;
        let s = default_samples(&d.base);
        let gens = global_distribution_generators(&d, &s).map_err(err)?;
        let r = span_check(&gens, &d, &s).map_err(err)?;
        ok &= r.passed;
        if name == "sussmann" {
            profile_ok &= r.span.ranks.iter().all(|row| row.output_rank == usize::from(s.point(row.sample)[0] > 0.0));
        }
        parts.push(format!(
            "{name}: {} generators, rank mismatches {}, membership {:.1e}",
            gens.len(),
            r.span.rank_mismatches.len(),
            r.span.max_membership_residual
        ));
    }
    parts.push(format!("Sussmann rank profile {}", if profile_ok { "0 on x≤0, 1 on x>0" } else { "WRONG" }));
    check(ok && profile_ok, parts.join("; "))
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in BUNDLES {
        let (b, s) = bundle(name)?;
        let r = validate_cocycle(&b, &s).map_err(err)?;
        ok &= r.passed;
        parts.push(format!(
            "{name}: {:.1e}/{:.1e}/{:.1e}",
            r.identity_residual, r.inverse_residual, r.triple_residual
        ));
    }
    let mut doc = fixtures::document("mobius");
    let entry = &mut doc.cocycle.as_mut().expect("mobius cocycle")[0].matrix[0][0];
    *entry = format!("2 * ({entry})");
    let bad = BundlePresentation::from_document(&doc).map_err(err)?;
    let s = default_samples(&bad.base);
    let r = validate_cocycle(&bad, &s).map_err(err)?;
    ok &= !r.passed;
    parts.push(format!("corrupted mobius flagged: {} (inverse residual {:.2})", !r.passed, r.inverse_residual));
    check(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "gradient oracle", criterion_1),
        (2, "partition of unity", criterion_2),
        (3, "bounded-order refinement", criterion_3),
        (4, "finite atlas", criterion_4),
        (5, "exhaustion sublevels", criterion_5),
        (6, "proper embedding", criterion_6),
        (7, "bundle generators", criterion_7),
        (8, "injective trivialization", criterion_8),
        (9, "subbundle and distribution generators", criterion_9),
        (10, "cocycle validation", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (n, title, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {n} ({title}, {secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {n} ({title}, {secs:.2}s): {detail}");
            }
        }
    }
    println!(
        "acceptance: {}/10 passed in {:.1}s",
        10 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
