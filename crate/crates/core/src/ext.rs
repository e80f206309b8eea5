//! Extended reals: finite values plus the two infinities.
//!
//! Divergences take values in ℝ ∪ {+∞}, and correction terms can be −∞-free
//! but are compared against +∞ branches, so a small total order over
//! `{-∞} ∪ ℝ ∪ {+∞}` keeps the call sites honest. Arithmetic follows the
//! usual conventions: finite ± ∞ saturates, ∞ − ∞ is an error.

use crate::{Error, Result};
use core::cmp::Ordering;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Classify an `f64`, mapping the IEEE infinities to the tags.
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(!x.is_nan(), "NaN has no extended-real meaning");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Collapse back to `f64`, with infinities mapped to IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(self, rhs: ExtReal) -> Result<ExtReal> {
        use ExtReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::Indeterminate("inf + -inf")),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn checked_sub(self, rhs: ExtReal) -> Result<ExtReal> {
        use ExtReal::*;
        let neg = match rhs {
            PosInf => NegInf,
            NegInf => PosInf,
            Finite(x) => Finite(-x),
        };
        self.checked_add(neg)
            .map_err(|_| Error::Indeterminate("inf - inf"))
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        Some(match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.partial_cmp(b)?,
        })
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
}
