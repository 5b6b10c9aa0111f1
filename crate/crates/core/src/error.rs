use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("cannot subtract statistics with weight {subtrahend} from statistics with weight {total}")]
    Underflow { total: f64, subtrahend: f64 },

    #[error("branch weights {left} + {right} do not add up to parent weight {parent}")]
    CountMismatch { parent: f64, left: f64, right: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn check_observation(x: f64, y: f64, w: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::RejectedInput(format!("feature value {x} is not finite")));
    }
    check_target(y, w)
}

pub(crate) fn check_target(y: f64, w: f64) -> Result<()> {
    if !y.is_finite() {
        return Err(Error::RejectedInput(format!("target value {y} is not finite")));
    }
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::RejectedInput(format!("weight {w} must be positive and finite")));
    }
    Ok(())
}
