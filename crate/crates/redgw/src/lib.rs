//! Reduced and relative genus-zero and genus-one Gromov-Witten invariants of
//! projective space relative to a hyperplane, computed by a tangency
//! recursion organized along the boundary of a tropical moduli space.

pub mod dm;
pub mod engine;
pub mod error;
pub mod genus0;
pub mod key;
pub mod multiplicities;
pub mod rat;
pub mod selftest;
pub mod store;
pub mod trace;
pub mod tropical;

pub use engine::{Engine, EngineOptions, MarkingChoice};
pub use error::{Error, Result};
pub use key::{normalize_key, primary_key, Insertion, InvariantKey, TangencyVector, Theory};
pub use rat::Rat;
pub use store::Store;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/keys.md")]
    pub mod keys {}
    #[doc = include_str!("../../../book/src/tropical.md")]
    pub mod tropical {}
    #[doc = include_str!("../../../book/src/multiplicities.md")]
    pub mod multiplicities {}
    #[doc = include_str!("../../../book/src/recursion.md")]
    pub mod recursion {}
    #[doc = include_str!("../../../book/src/store.md")]
    pub mod store {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
