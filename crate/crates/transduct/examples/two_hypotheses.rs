//! Two rival hypotheses, one observation, two ways to predict.
//!
//! A commander believes the enemy hides north (probability 0.7) or south
//! (0.3). A radio signal is twice as telling: the north position rarely
//! leaks signals (0.2), the south one usually does (0.9). After hearing
//! one signal, what are the odds of hearing another?
//!
//! Averaging both hypotheses by their posterior weight answers 0.661.
//! Committing to the single best hypothesis (south, posterior 0.659)
//! answers 0.9 — confident, and badly calibrated if north is the truth.
//!
//! ```bash
//! cargo run --example two_hypotheses
//! ```

use transduct::engine::{ModelSpace, TabulatedFamily};
use transduct::numerics::LogProb;

fn main() -> transduct::Result<()> {
    let outcomes = ["signal", "no-signal"];
    let family = TabulatedFamily::new(vec![1.0, 0.0]);
    let row = |p_signal: f64| -> transduct::Result<Vec<LogProb>> {
        Ok(vec![
            LogProb::from_linear(p_signal)?,
            LogProb::from_linear(1.0 - p_signal)?,
        ])
    };
    let space = ModelSpace::new(
        family,
        vec![
            ("hiding-north".into(), row(0.2)?, LogProb::from_linear(0.7)?),
            ("hiding-south".into(), row(0.9)?, LogProb::from_linear(0.3)?),
        ],
    )?;

    let observed = [0usize]; // one signal heard
    let outcome_space = [0usize, 1];

    let posterior = space.posterior(&observed)?;
    println!("posterior over hypotheses after one signal:");
    for model in posterior.models() {
        println!("  {:<13} {:.6}", model.id, model.log_weight().linear());
    }

    let transductive = space.posterior_predictive(&observed, &outcome_space)?;
    let (abductive, choice) = space.abductive_predictive(&observed, &outcome_space)?;

    println!("\nprediction for the next observation:");
    println!(
        "  {:<12} {:>14} {:>12}",
        "outcome", "model-averaged", "best-model"
    );
    for (i, label) in outcomes.iter().enumerate() {
        println!(
            "  {:<12} {:>14.6} {:>12.6}",
            label,
            transductive.probability_of(&i).unwrap(),
            abductive.probability_of(&i).unwrap(),
        );
    }
    println!(
        "\nbest model: {} (posterior {:.4})",
        choice.id,
        choice.log_posterior.linear()
    );
    println!(
        "total variation distance between the two predictions: {:.4}",
        transductive.total_variation_distance(&abductive)?
    );
    Ok(())
}
