//! Predicting from a normal process with unknown mean and variance.
//!
//! Discretize (mean, variance) into a grid of candidate models, condition
//! on a handful of measurements, and read off the predictive moments. The
//! predictive variance splits into what the best-fitting process would
//! scatter anyway (within-model) plus the spread coming from not knowing
//! the parameters (between-model). The predictive distribution is heavier
//! tailed than any normal: its excess kurtosis is strictly positive.
//!
//! ```bash
//! cargo run --example normal_grid
//! ```

use transduct::engine::normal_grid_space;

fn main() -> transduct::Result<()> {
    let space = normal_grid_space((200.0, 300.0), (1.0, 400.0), 61, 61, |_| 0.0)?;
    let observed = [251.3, 247.9, 255.2, 249.8, 252.6];

    let posterior = space.posterior(&observed)?;
    let moments = posterior.predictive_moments(&[])?;

    println!("observed: {observed:?}\n");
    println!("predictive moments for the next measurement:");
    println!("  mean                   {:10.4}", moments.mean);
    println!("  variance               {:10.4}", moments.variance);
    println!(
        "    within-model         {:10.4}",
        moments.within_model_variance
    );
    println!(
        "    between-model        {:10.4}",
        moments.between_model_variance
    );
    println!(
        "  standard deviation     {:10.4}",
        moments.standard_deviation()
    );
    println!(
        "  excess kurtosis        {:10.4}  (> 0: heavier tails than normal)",
        posterior.mixture_excess_kurtosis()
    );

    // more data shrinks only the between-model term
    let more: Vec<f64> = (0..40)
        .map(|i| 251.0 + 3.0 * ((i * 2654435761_u64 % 1000) as f64 / 1000.0 - 0.5))
        .collect();
    let tighter = space.posterior(&more)?.predictive_moments(&[])?;
    println!(
        "\nwith {} observations instead of {}:",
        more.len(),
        observed.len()
    );
    println!(
        "  within-model variance  {:10.4}",
        tighter.within_model_variance
    );
    println!(
        "  between-model variance {:10.4}",
        tighter.between_model_variance
    );
    Ok(())
}
