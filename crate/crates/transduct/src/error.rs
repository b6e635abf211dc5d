use thiserror::Error;

/// Errors raised by the prediction library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ln_gamma is defined for x > 0, got {0}")]
    GammaDomain(f64),

    #[error("ln_choose requires k <= n, got n={n}, k={k}")]
    ChooseDomain { n: u64, k: u64 },

    #[error("log_sum_exp of an empty sequence is undefined")]
    EmptyLogSumExp,

    #[error("tail sum over an empty range: from={from} > to={to}")]
    EmptyTailRange { from: u64, to: u64 },

    #[error("log-probability must be finite or -inf, got {0}")]
    InvalidLogProb(f64),

    #[error("count r={r} lies outside [0, {n}]")]
    CountOutOfRange { r: u64, n: u64 },

    #[error("proportion must lie strictly inside (0, 1), got {0}")]
    ProportionDomain(f64),

    #[error("sample size must be at least 1")]
    ZeroTrials,

    #[error(
        "prior sample must satisfy 0 < r0 < n0, got r0={r0}, n0={n0}; \
         the posterior is improper at the boundaries (a pseudo-count smooths this)"
    )]
    BoundaryPrior { r0: f64, n0: f64 },

    #[error("observed data are impossible under every model in the space")]
    ImpossibleData,

    #[error("model space must contain at least one model")]
    EmptyModelSpace,

    #[error("model priors have zero total weight")]
    ZeroPriorMass,

    #[error("predictive distributions range over different outcome spaces")]
    MismatchedOutcomes,

    #[error("grid axis {axis}: {reason}")]
    GridDomain { axis: &'static str, reason: String },

    #[error("mixture parameters: {0}")]
    MixtureDomain(String),

    #[error("cannot read scenario file: {0}")]
    ScenarioIo(String),

    #[error("scenario file is not valid JSON: {0}")]
    ScenarioSyntax(String),

    #[error("unknown scenario kind {kind:?}; expected one of {expected}")]
    UnknownKind {
        kind: String,
        expected: &'static str,
    },

    #[error("scenario field `{path}`: {message}")]
    ScenarioField { path: String, message: String },

    #[error("n0={n0}: ratio {ratio} yields non-integral defect count {r0}")]
    NonIntegralDefects { n0: u64, ratio: f64, r0: f64 },
}

impl Error {
    /// Process exit code for the CLI: 2 for input validation failures,
    /// 3 for numeric/domain failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ScenarioIo(_)
            | Error::ScenarioSyntax(_)
            | Error::UnknownKind { .. }
            | Error::ScenarioField { .. }
            | Error::NonIntegralDefects { .. }
            | Error::BoundaryPrior { .. }
            | Error::ProportionDomain(_)
            | Error::ZeroTrials
            | Error::GridDomain { .. }
            | Error::MixtureDomain(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
