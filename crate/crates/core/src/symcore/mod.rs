//! Exact polynomial arithmetic over the rationals, multi-index combinatorics
//! and the textual polynomial format.
//!
//! Everything lives in a single trivializing chart of a vector bundle
//! `E -> M`: base coordinates `x1..xn`, fiber coordinates `u1..um` on `E`
//! (or transverse coordinates on an ambient manifold), and dual fiber
//! coordinates `v1..vm` on `E*`.

mod multi_index;
mod parse;
mod poly;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use multi_index::MultiIndex;
pub use poly::{Monomial, Poly};

/// Coefficient field. Always normalized (lowest terms, positive denominator).
pub type Rational = BigRational;

/// `numer / denom` as an exact rational. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// An integer as a rational.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dimensions of the single chart everything is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chart {
    pub base_dim: usize,
    pub fiber_rank: usize,
}

impl Chart {
    pub fn new(base_dim: usize, fiber_rank: usize) -> Result<Self> {
        if base_dim == 0 || fiber_rank == 0 {
            return Err(Error::InvalidChart(base_dim, fiber_rank));
        }
        Ok(Chart {
            base_dim,
            fiber_rank,
        })
    }

    /// Total number of coordinates `n + m`.
    pub fn nvars(&self) -> usize {
        self.base_dim + self.fiber_rank
    }

    pub(crate) fn ensure_same(&self, other: &Chart) -> Result<()> {
        if self != other {
            return Err(Error::ChartMismatch(*self, *other));
        }
        Ok(())
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m={})", self.base_dim, self.fiber_rank)
    }
}

/// Which total space a polynomial or operator lives on.
///
/// `Ambient` reuses the `E` coordinates: fiber variables play the role of the
/// transverse coordinates `U^a` of a submanifold `{U = 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    E,
    Estar,
    Ambient,
}

impl Space {
    /// The letter fiber-slot variables print with.
    pub fn fiber_letter(&self) -> char {
        match self {
            Space::Estar => 'v',
            Space::E | Space::Ambient => 'u',
        }
    }

    pub fn fiber_kind(&self) -> VarKind {
        match self {
            Space::Estar => VarKind::DualFiber,
            Space::E | Space::Ambient => VarKind::Fiber,
        }
    }

    pub(crate) fn ensure(&self, expected: &[Space]) -> Result<()> {
        if expected.contains(self) {
            Ok(())
        } else {
            let names: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
            Err(Error::SpaceMismatch {
                expected: names.join("|"),
                found: *self,
            })
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::E => "E",
            Space::Estar => "Estar",
            Space::Ambient => "Ambient",
        };
        f.write_str(s)
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" => Ok(Space::E),
            "Estar" => Ok(Space::Estar),
            "Ambient" => Ok(Space::Ambient),
            other => Err(Error::Document(format!("unknown space `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Base,
    Fiber,
    DualFiber,
}

/// A coordinate function. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub fn x(index: usize) -> Self {
        Var {
            kind: VarKind::Base,
            index,
        }
    }

    pub fn u(index: usize) -> Self {
        Var {
            kind: VarKind::Fiber,
            index,
        }
    }

    pub fn v(index: usize) -> Self {
        Var {
            kind: VarKind::DualFiber,
            index,
        }
    }

    /// Position of this variable in a monomial's exponent vector.
    pub(crate) fn slot(&self, chart: &Chart, space: Space) -> Result<usize> {
        let in_range = |limit: usize| self.index >= 1 && self.index <= limit;
        match self.kind {
            VarKind::Base if in_range(chart.base_dim) => Ok(self.index - 1),
            VarKind::Fiber | VarKind::DualFiber if self.kind != space.fiber_kind() => {
                Err(Error::SpaceMismatch {
                    expected: match self.kind {
                        VarKind::DualFiber => "Estar".into(),
                        _ => "E|Ambient".into(),
                    },
                    found: space,
                })
            }
            VarKind::Fiber | VarKind::DualFiber if in_range(chart.fiber_rank) => {
                Ok(chart.base_dim + self.index - 1)
            }
            _ => Err(Error::IndexOutOfRange {
                name: self.to_string(),
                offset: 0,
                chart: *chart,
            }),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            VarKind::Base => 'x',
            VarKind::Fiber => 'u',
            VarKind::DualFiber => 'v',
        };
        write!(f, "{letter}{}", self.index)
    }
}

/// `k!` as a rational.
pub fn factorial(k: usize) -> Rational {
    let mut acc = BigInt::from(1);
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}
