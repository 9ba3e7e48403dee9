//! Sharp constants for strengthened Hölder inequalities.
//!
//! For dual exponents `θ, θ'` the inequality `|⟨f,g⟩| ≤ ‖f‖_θ‖g‖_θ'` can be
//! sharpened by a deficit term `c·inf_α ‖f − αe‖^r`. This crate computes the
//! largest admissible `c` (and its twin `d`) together with the Bellman
//! functions that produce them, and checks everything against brute force on
//! step functions.
//!
//! ```
//! use holder_sharp::constants::c_star_pp;
//!
//! let c = c_star_pp(4.0).unwrap();
//! assert!((c.value - 1.0 / 3.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellman;
pub mod constants;
pub mod error;
pub mod kernel;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::Exponent;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/structural-roots.md")]
    mod structural_roots {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/bellman.md")]
    mod bellman {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
