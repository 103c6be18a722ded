//! Numerical laboratory for Clifford analysis on R^n.
//!
//! The crate is organized around exact arithmetic in the real Clifford
//! algebra C(n) ([`algebra`]), discrete Dirac operators on uniform grids
//! ([`grid`]), the Cauchy-type reproducing formula and uniform approximation
//! on measure-zero compacta ([`cauchy`]), generators for the classical
//! fractal example sets ([`fractal`]), Whitney 1-jet experiments
//! ([`jets`]), and divided-difference commutator kernels ([`commutator`]).

pub mod algebra;
pub mod cauchy;
pub mod commutator;
pub mod fractal;
pub mod grid;
pub mod jets;
pub mod rng;

pub use algebra::{BladeIndex, Multivector, VectorRn};

/// Which side a Dirac-type operator acts on: coefficients multiplied on
/// the left (`D_L`) or on the right (`D_R`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" | "L" => Ok(Side::Left),
            "right" | "R" => Ok(Side::Right),
            other => Err(format!("unknown side `{other}` (expected left|right)")),
        }
    }
}
