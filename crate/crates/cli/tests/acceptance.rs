//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use sectorial_cli::config::RunConfig;
use sectorial_cli::verify::{
    axiom_suites, c_suites, combinatorics_suites, escape_suite, oracle_suites, psh_suite, regression_suite, run_all,
    truncation_suite, SuiteResult,
};
use sectorial_core::surface::{builtin, enumerate_decomposition, mirror_label};

struct Outcome {
    ok: bool,
    detail: String,
}

/// Runs the named suites of a group and requires each of them, and the
/// expected sample count, to pass.
fn suites(results: Vec<SuiteResult>, wanted: &[(&str, usize)]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, samples) in wanted {
        match results.iter().find(|s| s.name == *name) {
            Some(s) => {
                let good = s.passed && s.samples >= *samples;
                ok &= good;
                detail.push(format!("{}={:.3e}/{:.1e} n={}", s.name, s.worst, s.limit, s.samples));
            }
            None => {
                ok = false;
                detail.push(format!("{name} missing"));
            }
        }
    }
    Outcome { ok, detail: detail.join(" ") }
}

fn four_punctured_sphere() -> Outcome {
    let s = builtin("p1-minus-4pts").expect("builtin");
    let d = match enumerate_decomposition(&s) {
        Ok(d) => d,
        Err(e) => return Outcome { ok: false, detail: e.to_string() },
    };
    let models: Vec<Option<&str>> =
        ["U(m-,m-)", "U(m-,m+)", "U(m+,m+)"].iter().map(|k| d.completions.get(*k).and_then(|c| c.model.as_deref())).collect();
    let mirror = mirror_label(&s);
    let ok = d.counts() == (3, 2, 0)
        && models == [Some("(C*)^2"), Some("P x C*"), Some("C x C*")]
        && mirror.as_deref().is_some_and(|m| m.contains("xyz=0"));
    Outcome { ok, detail: format!("counts={:?} completions={models:?} mirror={mirror:?}", d.counts()) }
}

fn main() {
    let cfg = RunConfig::default();
    type Check = Box<dyn Fn(&RunConfig) -> Outcome>;
    let criteria: Vec<(u32, &str, Duration, Check)> = vec![
        (
            1,
            "decoupled flow regression",
            Duration::from_secs(10),
            Box::new(|c| suites(regression_suite(c), &[("flow_decoupled_regression", 1000)])),
        ),
        (2, "escape lemma", Duration::from_secs(30), Box::new(|c| suites(escape_suite(c), &[("escape_lemma", 100)]))),
        (
            3,
            "c-function bounds",
            Duration::from_secs(60),
            Box::new(|c| {
                suites(c_suites(c), &[("c_bounds", 101 * 101), ("c_evenness", 1), ("c_equals_abs_re", 1)])
            }),
        ),
        (
            4,
            "hypersurface characterization",
            Duration::from_secs(120),
            Box::new(|c| {
                suites(
                    oracle_suites(c),
                    &[
                        ("oracle_agreement", 10_000),
                        ("oracle_disagreements_in_band", 10_000),
                        ("hypersurface_disjointness", 101 * 101),
                    ],
                )
            }),
        ),
        (
            5,
            "sector axioms",
            Duration::from_secs(60),
            Box::new(|c| {
                suites(
                    axiom_suites(c),
                    &[
                        ("zi_scaling_minus", 100),
                        ("zi_scaling_plus", 100),
                        ("di_characteristic_minus", 100),
                        ("di_characteristic_plus", 100),
                        ("poisson_bracket", 100),
                    ],
                )
            }),
        ),
        (
            6,
            "truncation absorption",
            Duration::from_secs(30),
            Box::new(|c| suites(truncation_suite(c), &[("truncation_absorbing", 1000)])),
        ),
        (
            7,
            "combinatorial exactness",
            Duration::from_secs(1),
            Box::new(|c| {
                let a = suites(
                    combinatorics_suites(c),
                    &[("decomposition_counts", 1), ("corner_enumeration", 1), ("four_punctured_sphere", 1)],
                );
                let b = four_punctured_sphere();
                Outcome { ok: a.ok && b.ok, detail: format!("{} {}", a.detail, b.detail) }
            }),
        ),
        (
            8,
            "plurisubharmonicity",
            Duration::from_secs(5),
            Box::new(|c| suites(psh_suite(c), &[("d1_blend_plurisubharmonic", 401 * 401)])),
        ),
        (
            9,
            "determinism",
            Duration::from_secs(300),
            Box::new(|c| {
                let (a, b) = (run_all(c).to_json(), run_all(c).to_json());
                Outcome { ok: a == b, detail: format!("{} bytes, identical={}", a.len(), a == b) }
            }),
        ),
    ];
    let mut failed = 0;
    for (k, name, limit, check) in &criteria {
        let start = Instant::now();
        let out = check(&cfg);
        let took = start.elapsed();
        let ok = out.ok && took < *limit;
        failed += usize::from(!ok);
        println!(
            "{} criterion {k} {name}: {:.2}s (limit {}s) {}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
