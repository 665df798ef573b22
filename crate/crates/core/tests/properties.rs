//! Property tests: membership tolerances, sampling reproducibility, bump shape,
//! partition normalization, and gradients against a finite-difference oracle.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subcart_core::cover::triple_cover;
use subcart_core::document::SpaceDocument;
use subcart_core::fixtures;
use subcart_core::partition::partition_of_unity;
use subcart_core::space::{load_presentation, sample, Domain, SampleConfig};
use subcart_core::{make_bump, parse_expr, SmoothExpr};

/// Central difference with step `h = 1e-5`.
fn fd_partial(f: &SmoothExpr, x: &[f64], i: usize) -> Option<f64> {
    let h = 1e-5;
    let at = |t: f64| {
        let mut y = x.to_vec();
        y[i] += t;
        f.eval(&y).ok()
    };
    Some((at(h)? - at(-h)?) / (2.0 * h))
}

/// Every expression a fixture declares, with the domain where it must be defined.
fn fixture_expressions(doc: &SpaceDocument) -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for e in doc.constraints.equalities.iter().chain(&doc.constraints.inequalities) {
        out.push((e.clone(), vec![]));
    }
    for c in &doc.charts {
        for e in &c.map {
            out.push((e.clone(), c.domain.clone()));
        }
        for e in &c.domain {
            out.push((e.clone(), vec![]));
        }
    }
    let trivs = doc.trivializations.clone().unwrap_or_default();
    for t in doc.cocycle.iter().flatten() {
        let mut dom = trivs[t.from].domain.clone();
        dom.extend(trivs[t.to].domain.clone());
        for e in t.matrix.iter().flatten() {
            out.push((e.clone(), dom.clone()));
        }
    }
    for g in doc.subbundle.iter().flat_map(|s| &s.generators) {
        for e in g.sections.iter().flatten() {
            out.push((e.clone(), g.domain.clone()));
        }
    }
    for f in doc.fields.iter().flatten() {
        for e in &f.components {
            out.push((e.clone(), f.domain.clone()));
        }
    }
    out
}

#[test]
fn gradients_match_finite_differences_on_fixtures() {
    let mut checked = 0;
    for (name, _, _) in fixtures::SOURCES {
        let doc = fixtures::document(name);
        let p = load_presentation(&doc).unwrap();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let n = p.ambient_dim;
        for (k, (text, dom)) in fixture_expressions(&doc).into_iter().enumerate() {
            let f = parse_expr(&text, n).unwrap();
            let dom = Domain::parse(&dom, n).unwrap();
            let pool: Vec<&Vec<f64>> =
                s.points().iter().filter(|x| dom.contains(x).unwrap()).collect();
            assert!(!pool.is_empty(), "{name}: no samples for {text}");
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            for _ in 0..100 {
                let base = pool[rng.random_range(0..pool.len())];
                let x: Vec<f64> = base.iter().map(|v| v + rng.random_range(-0.01..0.01)).collect();
                let Ok((_, grad)) = f.gradient(&x) else { continue };
                for i in 0..n {
                    let Some(fd) = fd_partial(&f, &x, i) else { continue };
                    let err = (grad[i] - fd).abs() / grad[i].abs().max(1.0);
                    assert!(err < 1e-6, "{name}: d/dx{} of {text} at {x:?}: {} vs {fd}", i + 1, grad[i]);
                    // the symbolic derivative agrees with forward mode
                    let sym = f.diff(i).eval(&x).unwrap();
                    assert!((sym - grad[i]).abs() <= 1e-12 * grad[i].abs().max(1.0));
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

proptest! {
    #[test]
    fn membership_is_monotone_in_tolerance(
        theta in -3.2f64..3.2,
        r in 0.9f64..1.1,
        t1 in 1e-12f64..1e-1,
        factor in 1.0f64..100.0,
    ) {
        let p = fixtures::circle();
        let x = [r * theta.cos(), r * theta.sin()];
        let t2 = t1 * factor;
        if p.membership_with(&x, t1, t1).unwrap() {
            prop_assert!(p.membership_with(&x, t2, t2).unwrap());
        }
    }

    #[test]
    fn random_sampling_is_reproducible(seed in any::<u64>(), count in 5usize..60) {
        let p = fixtures::half_line();
        let cfg = SampleConfig::Random { count, max_draws: 100 * count };
        let a = sample(&p, &cfg, seed).unwrap();
        let b = sample(&p, &cfg, seed).unwrap();
        prop_assert_eq!(a.points(), b.points());
        prop_assert!(a.points().iter().all(|x| p.membership(x).unwrap()));
    }

    #[test]
    fn bumps_are_radially_nonincreasing(
        cx in -2.0f64..2.0,
        cy in -2.0f64..2.0,
        r_in in 0.0f64..1.0,
        gap in 0.05f64..1.0,
        angle in 0.0f64..std::f64::consts::TAU,
        t in proptest::collection::vec(0.0f64..2.5, 2..12),
    ) {
        let r_out = r_in + gap;
        let b = make_bump(2, &[cx, cy], r_in, r_out).unwrap();
        let mut t = t;
        t.sort_by(f64::total_cmp);
        let vals: Vec<f64> = t
            .iter()
            .map(|s| b.eval(&[cx + s * angle.cos(), cy + s * angle.sin()]).unwrap())
            .collect();
        for (s, v) in t.iter().zip(&vals) {
            prop_assert!((0.0..=1.0).contains(v));
            if *s <= r_in * (1.0 - 1e-12) { prop_assert_eq!(*v, 1.0); }
            if *s >= r_out * (1.0 + 1e-12) { prop_assert_eq!(*v, 0.0); }
        }
        for w in vals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn partition_sums_to_one_near_the_circle(theta in -3.2f64..3.2, r in 0.99f64..1.01) {
        let p = fixtures::circle();
        let s = sample(&p, &p.sampler, 0).unwrap();
        let c = triple_cover(&p, &s, &p.cover_params).unwrap();
        let pou = partition_of_unity(&c.elements, &s).unwrap();
        let x = [r * theta.cos(), r * theta.sin()];
        let rho = pou.eval(&x).unwrap();
        prop_assert!((rho.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(rho.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
