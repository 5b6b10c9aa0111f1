use std::fmt;
use std::str::FromStr;

use splitobs::{AttributeObserver, EbstObserver, QoObserver, RadiusPolicy};

use crate::error::{BenchError, Result};

/// Decimal places kept by TE-BST.
pub const TEBST_DIGITS: u32 = 3;

/// An observer configuration, named the way it appears in result files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObserverConfig {
    Ebst,
    Tebst { digits: u32 },
    Qo(RadiusPolicy),
}

impl ObserverConfig {
    /// The five configurations of the benchmark protocol.
    pub fn standard() -> [ObserverConfig; 5] {
        [
            ObserverConfig::Ebst,
            ObserverConfig::Tebst { digits: TEBST_DIGITS },
            ObserverConfig::Qo(RadiusPolicy::Fixed(0.01)),
            ObserverConfig::Qo(RadiusPolicy::StdFraction(2.0)),
            ObserverConfig::Qo(RadiusPolicy::StdFraction(3.0)),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            ObserverConfig::Ebst => "EBST".into(),
            ObserverConfig::Tebst { digits } if *digits == TEBST_DIGITS => "TEBST".into(),
            ObserverConfig::Tebst { digits } => format!("TEBST_{digits}"),
            ObserverConfig::Qo(RadiusPolicy::Fixed(r)) => format!("QO_fixed_{r}"),
            ObserverConfig::Qo(RadiusPolicy::StdFraction(k)) => format!("QO_std_div_{k}"),
        }
    }

    pub fn is_qo(&self) -> bool {
        matches!(self, ObserverConfig::Qo(_))
    }

    /// Builds a fresh observer; `feature_std` resolves standard-deviation
    /// radius policies.
    pub fn build(&self, feature_std: f64) -> Result<Box<dyn AttributeObserver + Send>> {
        Ok(match self {
            ObserverConfig::Ebst => Box::new(EbstObserver::new()),
            ObserverConfig::Tebst { digits } => Box::new(EbstObserver::truncated(*digits)),
            ObserverConfig::Qo(policy) => Box::new(QoObserver::new(policy.resolve(feature_std)?)?),
        })
    }
}

impl fmt::Display for ObserverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ObserverConfig {
    type Err = BenchError;

    /// Accepts `EBST`, `TEBST`, `TEBST_<digits>`, `QO_fixed_<r>` and
    /// `QO_std_div_<k>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || BenchError::Config(format!("unknown observer {s:?}"));
        let config = match s {
            "EBST" => ObserverConfig::Ebst,
            "TEBST" => ObserverConfig::Tebst { digits: TEBST_DIGITS },
            _ => {
                if let Some(d) = s.strip_prefix("TEBST_") {
                    ObserverConfig::Tebst { digits: d.parse().map_err(|_| bad())? }
                } else if let Some(r) = s.strip_prefix("QO_fixed_") {
                    ObserverConfig::Qo(RadiusPolicy::Fixed(r.parse().map_err(|_| bad())?))
                } else if let Some(k) = s.strip_prefix("QO_std_div_") {
                    ObserverConfig::Qo(RadiusPolicy::StdFraction(k.parse().map_err(|_| bad())?))
                } else {
                    return Err(bad());
                }
            }
        };
        if let ObserverConfig::Qo(policy) = config {
            policy.resolve(1.0)?;
        }
        Ok(config)
    }
}
