//! Milnor invariants of links in the 3-sphere, computed from tangle words in
//! the solid torus, and of the covering links in the double branched cover
//! over the axis.
//!
//! Pipeline: [`tanglediag`] words are closed up (optionally with the axis)
//! into [`diagram::PDiagram`]s; [`milnor`] reads invariants off a diagram;
//! [`cover`] doubles a word to get covering links; [`brunnian`] generates
//! Milnor links and band sums; [`verify`] checks the mod-2 congruence.
//!
//! Loops over indices, lift selections and samples go through [`par`]; the
//! `parallel` feature (on by default) runs them on rayon.

pub mod brunnian;
pub mod cover;
pub mod diagram;
pub mod error;
pub mod freealg;
pub mod milnor;
pub mod par;
pub mod tanglediag;
pub mod verify;

pub use error::{Error, Result};
pub use freealg::Modulus;
pub use milnor::{Index, MilnorEngine, MuResult};
pub use par::Exec;
pub use tanglediag::{parse_tangle, TangleWord};
