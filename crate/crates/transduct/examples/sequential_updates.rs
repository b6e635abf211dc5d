//! One step at a time, or all at once — same answer.
//!
//! Predicting the next single observation only needs the plug-in rate
//! r0/n0. Chaining that one-step rule, updating the prior sample after
//! every simulated observation, reproduces the multi-step model-averaged
//! distribution exactly. The shortcut that looks frequentist is quietly
//! doing the full averaging.
//!
//! ```bash
//! cargo run --example sequential_updates
//! ```

use transduct::binomial::{beta_binomial_log_pmf, sequential_predict, PriorSample};

fn main() -> transduct::Result<()> {
    let prior = PriorSample::new(6, 100)?;
    let n = 10;

    println!("prior sample: 6 defects in 100; predicting defects among the next {n}\n");
    println!(
        "{:>3} {:>16} {:>16} {:>12}",
        "r", "chained", "closed form", "difference"
    );

    let chained = sequential_predict(n, &prior)?;
    for (r, lp) in chained.outcomes() {
        let direct = beta_binomial_log_pmf(*r, n, &prior)?.linear();
        let chain = lp.linear();
        println!(
            "{r:>3} {chain:>16.12} {direct:>16.12} {:>12.2e}",
            (chain - direct).abs()
        );
    }

    let one_step = sequential_predict(1, &prior)?;
    println!(
        "\none-step case: P(defect) = {:.6}, exactly the plug-in rate {:.6}",
        one_step.probability_of(&1).unwrap(),
        prior.defect_rate()
    );
    Ok(())
}
