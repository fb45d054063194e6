use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} lies outside the domain of the {family} potential")]
    Domain { family: &'static str, x: f64 },

    #[error("x = {x} is classically forbidden at E = {energy} (V = {potential})")]
    Forbidden { x: f64, energy: f64, potential: f64 },

    #[error("no pair of turning points for the {family} potential at E = {energy}")]
    NoTurningPoints { family: &'static str, energy: f64 },

    #[error("the {family} potential has no bound level with index {n}")]
    NoSuchLevel { family: &'static str, n: u32 },

    #[error("energy scan exhausted: {0}")]
    ScanExhausted(String),

    #[error("ODE step size underflow at x = {x} ({stage})")]
    StepUnderflow { x: f64, stage: &'static str },

    #[error("no phase-amplitude frame satisfies both turning-point conditions at E = {energy}")]
    NoMilneFrame { energy: f64 },

    #[error("G is undefined at x = {x} (1 + F = {one_plus_f})")]
    GUndefined { x: f64, one_plus_f: f64 },

    #[error("{0} is not available for this potential family")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
