use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid exact to L = {available} cannot resolve band limit {needed}")]
    InsufficientGrid { needed: usize, available: usize },

    #[error("kernel property ({property}) violated for two_j = {two_j}: residual {residual:e}")]
    KernelProperty {
        property: &'static str,
        two_j: u32,
        residual: f64,
    },

    #[error("principal spectrum degenerate at n = {n:?} (lambda = {lambda})")]
    Degenerate { n: [f64; 3], lambda: f64 },

    #[error("spectral gap {gap:.3e} below threshold {threshold:.3e} (lambda = {lambda})")]
    GapTooSmall { gap: f64, threshold: f64, lambda: f64 },

    #[error("reference unitary is not globally smooth: {0}")]
    GaugeSingular(String),

    #[error("ambiguous band clustering: gap ratio {ratio:.3} below {threshold}")]
    AmbiguousClusters { ratio: f64, threshold: f64 },

    #[error("symbol has a component with l = {l} outside the lower-symbol range l <= {max_l}")]
    OutsideLowerRange { l: usize, max_l: usize },

    #[error("unsupported truncation order {0}")]
    UnsupportedOrder(usize),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("flow invariant drift {drift:.3e} exceeds {bound:.3e} at t = {t}")]
    FlowDrift { drift: f64, bound: f64, t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
