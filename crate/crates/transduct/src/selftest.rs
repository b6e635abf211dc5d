//! Numeric self-checks behind `transduct selftest`. Each check pins one of
//! the library's quantitative contracts — the rejected-boxes reference
//! table, closed-form identities, accuracy of the special functions, and
//! the moment decomposition — and reports one pass/fail line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binomial::{
    beta_binomial_log_pmf, beta_binomial_moments, sequential_predict, PriorSample,
};
use crate::engine::{
    beta_shaped_log_weight, normal_grid_space, proportion_grid_space, ModelSpace, TabulatedFamily,
};
use crate::numerics::{ln_gamma, CompensatedSum, LogProb};
use crate::render::OutputFormat;
use crate::scenario::{parse_scenario, run_cotter_pin, run_scenario, CotterPinParams};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

impl Check {
    fn run(name: &'static str, f: impl FnOnce() -> Result<(), String>) -> Check {
        Check { name, outcome: f() }
    }
}

/// Run every check in a fixed order.
pub fn run_checks() -> Vec<Check> {
    vec![
        Check::run("rejected-boxes reference table", check_reference_table),
        Check::run(
            "one-step predictive equals the plug-in",
            check_one_step_identity,
        ),
        Check::run(
            "sequential chain equals the closed form",
            check_sequential_equivalence,
        ),
        Check::run(
            "closed-form moments match direct summation",
            check_moment_oracle,
        ),
        Check::run("law of total variance", check_total_variance_law),
        Check::run(
            "proportion grid matches the closed form",
            check_grid_agreement,
        ),
        Check::run(
            "variance floor at large future samples",
            check_variance_floor,
        ),
        Check::run("ln_gamma against exact factorials", check_ln_gamma_accuracy),
        Check::run(
            "normal grid identities and heavy tails",
            check_normal_family,
        ),
        Check::run("byte-identical rendering", check_render_determinism),
    ]
}

/// Render the check list as the deterministic selftest report; the flag is
/// true when everything passed.
pub fn report() -> (String, bool) {
    let checks = run_checks();
    let mut out = String::new();
    let mut passed = 0usize;
    for (i, check) in checks.iter().enumerate() {
        match &check.outcome {
            Ok(()) => {
                passed += 1;
                out.push_str(&format!("PASS {:>2} {}\n", i + 1, check.name));
            }
            Err(detail) => {
                out.push_str(&format!("FAIL {:>2} {}: {detail}\n", i + 1, check.name));
            }
        }
    }
    out.push_str(&format!(
        "selftest: {passed}/{} checks passed\n",
        checks.len()
    ));
    (out, passed == checks.len())
}

fn fail(detail: String) -> Result<(), String> {
    Err(detail)
}

fn standard_table() -> CotterPinParams {
    CotterPinParams {
        n0: vec![100, 1000, 10_000, 100_000],
        ratio: 0.06,
        n: 100,
        threshold: 10,
        pseudo_count: None,
    }
}

/// The frozen reference values, each compared at ±1 unit in its last
/// printed digit.
fn check_reference_table() -> Result<(), String> {
    struct Expected {
        n0: Option<u64>,
        sd_pct: f64,
        sd_tol: f64,
        rejected_pct: f64,
        rejected_tol: f64,
        additional_pct: f64,
        additional_tol: f64,
    }
    let expected = [
        Expected {
            n0: Some(100),
            sd_pct: 3.342,
            sd_tol: 1e-3,
            rejected_pct: 9.922,
            rejected_tol: 1e-3,
            additional_pct: 163.8,
            additional_tol: 0.1,
        },
        Expected {
            n0: Some(1000),
            sd_pct: 2.490,
            sd_tol: 1e-3,
            rejected_pct: 4.525,
            rejected_tol: 1e-3,
            additional_pct: 20.32,
            additional_tol: 1e-2,
        },
        Expected {
            n0: Some(10_000),
            sd_pct: 2.387,
            sd_tol: 1e-3,
            rejected_pct: 3.838,
            rejected_tol: 1e-3,
            additional_pct: 2.061,
            additional_tol: 1e-3,
        },
        Expected {
            n0: Some(100_000),
            sd_pct: 2.376,
            sd_tol: 1e-3,
            rejected_pct: 3.768,
            rejected_tol: 1e-3,
            additional_pct: 0.2063,
            additional_tol: 1e-4,
        },
        Expected {
            n0: None,
            sd_pct: 2.375,
            sd_tol: 1e-3,
            rejected_pct: 3.760,
            rejected_tol: 1e-3,
            additional_pct: 0.0,
            additional_tol: 0.0,
        },
    ];
    let rows = run_cotter_pin(&standard_table()).map_err(|e| e.to_string())?;
    if rows.len() != expected.len() {
        return fail(format!(
            "expected {} rows, got {}",
            expected.len(),
            rows.len()
        ));
    }
    for (row, exp) in rows.iter().zip(&expected) {
        let label = match exp.n0 {
            Some(n0) => format!("n0={n0}"),
            None => "baseline".to_string(),
        };
        if row.prior_sample_size != exp.n0 {
            return fail(format!("{label}: row order mismatch"));
        }
        if (row.mean * 100.0 - 6.0).abs() > 1e-3 {
            return fail(format!("{label}: mean {}%", row.mean * 100.0));
        }
        let sd = row.sd * 100.0;
        if (sd - exp.sd_pct).abs() > exp.sd_tol {
            return fail(format!("{label}: sd {}% vs {}%", sd, exp.sd_pct));
        }
        let rejected = row.rejected * 100.0;
        if (rejected - exp.rejected_pct).abs() > exp.rejected_tol {
            return fail(format!(
                "{label}: rejected {}% vs {}%",
                rejected, exp.rejected_pct
            ));
        }
        let additional = row
            .additional_rejected
            .ok_or_else(|| format!("{label}: overconfidence undefined"))?
            * 100.0;
        if (additional - exp.additional_pct).abs() > exp.additional_tol {
            return fail(format!(
                "{label}: additional {}% vs {}%",
                additional, exp.additional_pct
            ));
        }
    }
    Ok(())
}

fn random_prior(rng: &mut ChaCha8Rng, max_n0: u64) -> PriorSample {
    let n0 = rng.gen_range(2..=max_n0);
    let r0 = rng.gen_range(1..n0);
    PriorSample::new(r0, n0).expect("interior counts")
}

fn check_one_step_identity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let prior = random_prior(&mut rng, 100_000);
        let p1 = beta_binomial_log_pmf(1, 1, &prior)
            .map_err(|e| e.to_string())?
            .linear();
        let p0 = beta_binomial_log_pmf(0, 1, &prior)
            .map_err(|e| e.to_string())?
            .linear();
        let rate = prior.defect_rate();
        if (p1 - rate).abs() > 1e-12 || (p0 - (1.0 - rate)).abs() > 1e-12 {
            return fail(format!(
                "prior ({}, {}): one-step pmf ({p1}, {p0}) vs plug-in {rate}",
                prior.r0(),
                prior.n0()
            ));
        }
    }
    Ok(())
}

fn check_sequential_equivalence() -> Result<(), String> {
    let prior = PriorSample::new(6, 100).expect("valid");
    let exact = 1128.0 / 10100.0;
    let two_step = beta_binomial_log_pmf(1, 2, &prior)
        .map_err(|e| e.to_string())?
        .linear();
    if (two_step - exact).abs() > 1e-12 {
        return fail(format!("P(r=1 | n=2) {two_step} vs exact {exact}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..50 {
        let prior = random_prior(&mut rng, 10_000);
        let n = rng.gen_range(1..=20u64);
        let chain = sequential_predict(n, &prior).map_err(|e| e.to_string())?;
        for (r, lp) in chain.outcomes() {
            let closed = beta_binomial_log_pmf(*r, n, &prior)
                .map_err(|e| e.to_string())?
                .linear();
            if (lp.linear() - closed).abs() > 1e-10 {
                return fail(format!(
                    "prior ({}, {}), n={n}, r={r}: chain {} vs closed {closed}",
                    prior.r0(),
                    prior.n0(),
                    lp.linear()
                ));
            }
        }
    }
    Ok(())
}

fn check_moment_oracle() -> Result<(), String> {
    let priors = [(1u64, 2u64), (3, 7), (6, 100), (60, 1000)];
    let sizes = [1u64, 7, 100, 500];
    for (r0, n0) in priors {
        let prior = PriorSample::new(r0, n0).expect("valid");
        for n in sizes {
            let closed = beta_binomial_moments(n, &prior).map_err(|e| e.to_string())?;
            let pmf: Vec<f64> = (0..=n)
                .map(|r| beta_binomial_log_pmf(r, n, &prior).map(|lp| lp.linear()))
                .collect::<crate::error::Result<_>>()
                .map_err(|e| e.to_string())?;
            let mut mean = CompensatedSum::default();
            for (r, p) in pmf.iter().enumerate() {
                mean.add(p * r as f64 / n as f64);
            }
            let mean = mean.value();
            let mut var = CompensatedSum::default();
            for (r, p) in pmf.iter().enumerate() {
                let d = r as f64 / n as f64 - mean;
                var.add(p * d * d);
            }
            let var = var.value();
            if ((mean - closed.mean) / closed.mean).abs() > 1e-10 {
                return fail(format!(
                    "({r0},{n0}), n={n}: mean {mean} vs {}",
                    closed.mean
                ));
            }
            if ((var - closed.variance) / closed.variance).abs() > 1e-10 {
                return fail(format!(
                    "({r0},{n0}), n={n}: variance {var} vs {}",
                    closed.variance
                ));
            }
            let split = closed.within_model_variance + closed.between_model_variance;
            if ((split - closed.variance) / closed.variance).abs() > 1e-12 {
                return fail(format!(
                    "({r0},{n0}), n={n}: split {split} vs {}",
                    closed.variance
                ));
            }
        }
    }
    Ok(())
}

fn check_total_variance_law() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..100 {
        let n_outcomes = rng.gen_range(2..8usize);
        let n_models = rng.gen_range(1..6usize);
        let values: Vec<f64> = (0..n_outcomes).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let family = TabulatedFamily::new(values.clone());
        let models: Vec<(String, Vec<LogProb>, LogProb)> = (0..n_models)
            .map(|i| {
                let raw: Vec<f64> = (0..n_outcomes).map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let row = raw
                    .iter()
                    .map(|x| LogProb::from_linear(x / total).expect("positive"))
                    .collect();
                (
                    format!("m{i}"),
                    row,
                    LogProb::from_linear(rng.gen_range(0.05..1.0)).expect("positive"),
                )
            })
            .collect();
        let space = ModelSpace::new(family, models).map_err(|e| e.to_string())?;
        let engine = space.predictive_moments(&[]).map_err(|e| e.to_string())?;
        let outcomes = space.family().outcome_indices();
        let mixture = space
            .prior_predictive(&outcomes)
            .map_err(|e| e.to_string())?;
        let (_, brute_force) = mixture.mean_variance_by(|&i| values[i]);
        if ((engine.variance - brute_force) / brute_force).abs() > 1e-10 {
            return fail(format!(
                "space {round}: engine {} vs brute force {brute_force}",
                engine.variance
            ));
        }
    }
    Ok(())
}

fn check_grid_agreement() -> Result<(), String> {
    let prior = PriorSample::new(6, 100).expect("valid");
    let space = proportion_grid_space(100, 10_000, beta_shaped_log_weight(&prior))
        .map_err(|e| e.to_string())?;
    let outcomes = space.family().outcome_counts();
    let grid = space
        .prior_predictive(&outcomes)
        .map_err(|e| e.to_string())?;
    let mut grid_tail = CompensatedSum::default();
    let mut closed_tail = CompensatedSum::default();
    for (r, lp) in grid.outcomes() {
        let closed = beta_binomial_log_pmf(*r, 100, &prior)
            .map_err(|e| e.to_string())?
            .linear();
        if (lp.linear() - closed).abs() > 1e-4 {
            return fail(format!("r={r}: grid {} vs closed {closed}", lp.linear()));
        }
        if *r > 10 {
            grid_tail.add(lp.linear());
            closed_tail.add(closed);
        }
    }
    let diff = (grid_tail.value() - closed_tail.value()).abs();
    if diff > 1e-4 {
        return fail(format!(
            "tail {} vs {} (diff {diff})",
            grid_tail.value(),
            closed_tail.value()
        ));
    }
    Ok(())
}

fn check_variance_floor() -> Result<(), String> {
    let prior = PriorSample::new(6, 100).expect("valid");
    let m = beta_binomial_moments(1_000_000, &prior).map_err(|e| e.to_string())?;
    let floor = 0.06 * 0.94 / 101.0; // posterior variance of the proportion
    if m.variance <= floor {
        return fail(format!("variance {} under the floor {floor}", m.variance));
    }
    if ((m.variance - floor) / floor).abs() > 0.01 {
        return fail(format!("variance {} not within 1% of {floor}", m.variance));
    }
    Ok(())
}

fn check_ln_gamma_accuracy() -> Result<(), String> {
    for k in [5u64, 20, 170, 1_000, 100_000] {
        // reference ln k! by compensated summation of ln i — an
        // independent route from the asymptotic-series evaluation
        let mut reference = CompensatedSum::default();
        for i in 2..=k {
            reference.add((i as f64).ln());
        }
        let reference = reference.value();
        let got = ln_gamma(k as f64 + 1.0).map_err(|e| e.to_string())?;
        if ((got - reference) / reference).abs() > 1e-12 {
            return fail(format!("k={k}: ln_gamma {got} vs reference {reference}"));
        }
    }
    Ok(())
}

fn check_normal_family() -> Result<(), String> {
    let space =
        normal_grid_space((-2.0, 8.0), (0.5, 6.0), 25, 25, |_| 0.0).map_err(|e| e.to_string())?;
    let data = [4.9, 5.3, 5.1, 4.7, 5.6];
    let post = space.posterior(&data).map_err(|e| e.to_string())?;
    let m = post.predictive_moments(&[]).map_err(|e| e.to_string())?;

    let mut e_mean = CompensatedSum::default();
    let mut e_var = CompensatedSum::default();
    for model in post.models() {
        let w = model.log_weight().linear();
        e_mean.add(w * model.params.mean());
        e_var.add(w * model.params.variance());
    }
    let mut v_mean = CompensatedSum::default();
    for model in post.models() {
        let w = model.log_weight().linear();
        v_mean.add(w * (model.params.mean() - e_mean.value()).powi(2));
    }
    if (m.mean - e_mean.value()).abs() > 1e-10 {
        return fail(format!(
            "mean {} vs posterior mean {}",
            m.mean,
            e_mean.value()
        ));
    }
    if (m.variance - (e_var.value() + v_mean.value())).abs() > 1e-10 {
        return fail(format!(
            "variance {} vs split {}",
            m.variance,
            e_var.value() + v_mean.value()
        ));
    }
    let kurt = post.mixture_excess_kurtosis();
    if kurt <= 0.0 {
        return fail(format!("excess kurtosis {kurt} not positive"));
    }
    Ok(())
}

fn check_render_determinism() -> Result<(), String> {
    let doc = r#"{
        "name": "pins",
        "kind": "cotter-pin",
        "parameters": {"n0": [100, 1000, 10000, 100000], "ratio": 0.06, "n": 100, "threshold": 10}
    }"#;
    let spec = parse_scenario(doc).map_err(|e| e.to_string())?;
    for format in [
        OutputFormat::Csv,
        OutputFormat::Markdown,
        OutputFormat::Json,
    ] {
        let mut spec = spec.clone();
        spec.output.format = format;
        let first = run_scenario(&spec).map_err(|e| e.to_string())?;
        let second = run_scenario(&spec).map_err(|e| e.to_string())?;
        if first != second {
            return fail(format!("{format} output differs between runs"));
        }
        if !first.ends_with('\n') || first.ends_with("\n\n") {
            return fail(format!("{format} output must end with one newline"));
        }
    }
    Ok(())
}
