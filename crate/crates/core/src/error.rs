use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("weight is zero: {total_photons} photons cannot fit in {n_modes} modes capped at {per_mode_cutoff}")]
    ZeroWeight {
        n_modes: usize,
        total_photons: usize,
        per_mode_cutoff: usize,
    },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("every surviving amplitude vanishes")]
    VanishingState,

    #[error("cutoff {cutoff} too small: discarded tail mass {tail_mass:e} exceeds {bound:e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail_mass: f64,
        bound: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid subsystem index {index} for a state with {systems} systems")]
    InvalidSystem { index: usize, systems: usize },

    #[error("outcome has zero probability")]
    ZeroProbability,

    #[error("photon cap {cap} exceeded by a sector with {photons} photons")]
    CapExceeded { cap: usize, photons: usize },

    #[error("tensor of {size} amplitudes exceeds the budget of {budget}")]
    BudgetExceeded { size: usize, budget: usize },
}
