//! Model-averaged prediction over finite model spaces.
//!
//! Two ways to predict future data from past data: average every candidate
//! model's prediction, weighted by its posterior probability, or pick the
//! single best model and predict with it alone. This crate computes both,
//! quantifies how overconfident the single-model shortcut is, and ships a
//! closed-form binomial chain, a grid engine for discretized model
//! families, and a small CLI (`transduct`) with a scenario-file front end.
//!
//! ## Examples
//!
//! The `examples/` directory is the guided tour — one runnable program per
//! capability:
//!
//! - **`cotter_pins`** — the rejected-boxes table: how much a plug-in
//!   defect rate understates rejections
//! - **`two_hypotheses`** — a discrete model space, posterior weights, and
//!   model-averaged vs best-model prediction
//! - **`sequential_updates`** — chaining one-step predictions equals the
//!   closed-form multi-step predictive
//! - **`normal_grid`** — (mean, variance) grids, the two-term variance
//!   split, and the heavier-than-normal predictive tails
//! - **`outlier_mixture`** — robust prediction when glitch data are
//!   expected
//! - **`scenario_files`** — the declarative JSON front door used by
//!   `transduct run`
//!
//! ```bash
//! cargo run --example cotter_pins
//! ```
//!
//! ## Modules
//!
//! [`numerics`] holds the log-domain primitives (`ln_gamma`, `ln_choose`,
//! `log_sum_exp`, compensated tail sums). [`binomial`] is the closed-form
//! chain from a prior sample to the beta-binomial predictive and its
//! moments. [`engine`] runs induction and prediction over any finite,
//! explicit model space. [`scenario`] and [`render`] back the CLI.

pub mod binomial;
pub mod engine;
pub mod error;
pub mod numerics;
pub mod predictive;
pub mod render;
pub mod scenario;
pub mod selftest;

#[cfg(test)]
pub(crate) mod test_oracles;

pub use error::{Error, Result};
