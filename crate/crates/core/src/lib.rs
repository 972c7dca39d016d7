//! Homotopy string links.
//!
//! String links are carried by pure braid words. Link-homotopy classes are
//! decided by a complete invariant: for each strand, the reduced Magnus
//! expansion of its longitude with the strand's own variable killed. On top
//! of that the crate provides strand deletion, the Borromean kernel and its
//! integer coordinates, a polyline realization inside the cylinder
//! `D² × [0,1]`, sampled configuration-space maps on the cube `Iⁿ`, the
//! closure into a solid torus, Gauss linking numbers, and the two
//! little-intervals actions (on string links and on maps `Iⁿ → Conf(C, n)`).
//!
//! ```
//! use slink::stringlink::StringLink;
//!
//! let a12: StringLink = "n=2: s1 s1".parse().unwrap();
//! let id = StringLink::identity(2).unwrap();
//! assert!(!a12.link_homotopy_equal(&id).unwrap());
//! assert!(a12.stack(&a12.inverse()).unwrap().link_homotopy_equal(&id).unwrap());
//! assert_eq!(a12.mu(&[1, 2]).unwrap(), 1.into());
//! ```

use serde::{Deserialize, Serialize};

pub mod braid;
pub mod error;
pub mod free_word;
pub mod geometry;
pub mod magnus;
pub mod operad;
pub mod par;
pub mod report;
pub mod stringlink;

pub use error::{Error, Result};

/// Exponent sign of a letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}
