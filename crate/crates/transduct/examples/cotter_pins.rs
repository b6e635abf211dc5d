//! The cotter-pin box acceptance problem.
//!
//! A manufacturer knows "from experience" that 6% of pins are defective
//! and sells boxes of 100 with at most 10 defects guaranteed. Treating 6%
//! as exact is a plug-in prediction; experience is really a finite prior
//! sample, and averaging over the uncertain defect rate fattens the tail
//! of the predicted defect count — more boxes fail the guarantee than the
//! plug-in expects.
//!
//! ```bash
//! cargo run --example cotter_pins
//! ```

use transduct::binomial::{tail_and_overconfidence, PriorSample};
use transduct::render::{render_table, OutputFormat};
use transduct::scenario::{run_cotter_pin, CotterPinParams};

fn main() -> transduct::Result<()> {
    let params = CotterPinParams {
        n0: vec![100, 1000, 10_000, 100_000],
        ratio: 0.06,
        n: 100,
        threshold: 10,
        pseudo_count: None,
    };
    let rows = run_cotter_pin(&params)?;
    println!("{}", render_table(&rows, OutputFormat::Markdown, 4));

    println!("The bottom row treats the defect rate as exactly 6%; the other");
    println!("rows average the binomial prediction over a posterior fitted to");
    println!("r0 = 0.06·n0 defects seen in n0 pins. The smaller the prior");
    println!("sample, the more the plug-in understates the rejection rate.\n");

    // the same comparison for a single prior sample, via the tails directly
    let prior = PriorSample::new(6, 100)?;
    let tails = tail_and_overconfidence(100, 10, &prior)?;
    println!("prior sample (6 defects / 100 pins):");
    println!(
        "  model-averaged P(reject) = {:.5}",
        tails.transductive_tail
    );
    println!("  plug-in        P(reject) = {:.5}", tails.abductive_tail);
    if let Some(pct) = tails.additional_rejected_pct {
        println!("  additional rejected boxes: {pct:.1}%");
    }
    Ok(())
}
