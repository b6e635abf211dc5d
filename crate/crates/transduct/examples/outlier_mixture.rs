//! When glitches are expected, say so in the likelihood.
//!
//! A plain normal model has to explain every reading, so one corrupted
//! value drags its posterior toward huge variances. Giving each data point
//! a small chance of being an outlier drawn from a flat distribution lets
//! the model shrug off the glitch and keep predicting from the clean core.
//!
//! ```bash
//! cargo run --example outlier_mixture
//! ```

use transduct::engine::{
    mixture_outlier_log_likelihood, normal_grid_space, outlier_mixture_grid_space, MixtureParams,
    NormalParams,
};

fn main() -> transduct::Result<()> {
    let readings = [5.1, 4.8, 5.3, 5.0, 87.4, 4.9]; // one glitch at 87.4

    let plain = normal_grid_space((0.0, 10.0), (0.25, 2000.0), 41, 81, |_| 0.0)?;
    let plain_moments = plain.posterior(&readings)?.predictive_moments(&[])?;

    let robust = outlier_mixture_grid_space(
        (0.0, 10.0),
        (0.25, 9.0),
        41,
        41,
        0.05,
        (-100.0, 100.0),
        |_| 0.0,
    )?;
    let robust_moments = robust.posterior(&readings)?.predictive_moments(&[])?;

    println!("readings: {readings:?}\n");
    println!("{:<28} {:>12} {:>12}", "", "plain normal", "with outliers");
    println!(
        "{:<28} {:>12.3} {:>13.3}",
        "predictive mean", plain_moments.mean, robust_moments.mean
    );
    println!(
        "{:<28} {:>12.3} {:>13.3}",
        "predictive sd",
        plain_moments.standard_deviation(),
        robust_moments.standard_deviation()
    );
    println!("\nThe plain model inflates its variance to cover the glitch; the");
    println!("mixture charges the glitch to the flat component instead.\n");

    // the mixture likelihood itself, at a clean and a glitchy point
    let params = MixtureParams::new(NormalParams::new(5.0, 1.0)?, 0.05, (-100.0, 100.0))?;
    for x in [5.2, 87.4] {
        println!(
            "log likelihood of {x:>5}: {:>9.3}",
            mixture_outlier_log_likelihood(x, &params).value()
        );
    }
    Ok(())
}
