//! Bilinear averages over convex bodies and their q-variation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod average;
pub mod body;
pub mod carleson;
pub mod cz;
pub mod error;
pub mod ergodic;
pub mod extremal;
pub mod field;
pub mod interp;
pub mod io;
pub mod random;
pub mod martingale;
pub mod square;
pub mod time;
pub mod variation;

pub use average::{avg_at, avg_sweep, AvgRequest, Mode};
pub use body::{ConvexBody, LatticePointSet};
pub use error::{Error, Result};
pub use field::{Field, GridBox, NormKind, NormReport};
pub use time::TimeGrid;
pub use variation::{vq_exact, VariationOutcome};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fields.md")]
mod book_fields {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/bodies.md")]
mod book_bodies {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/averages.md")]
mod book_averages {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/variation.md")]
mod book_variation {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/martingales.md")]
mod book_martingales {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/square.md")]
mod book_square {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cz.md")]
mod book_cz {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/extremal.md")]
mod book_extremal {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/ergodic.md")]
mod book_ergodic {}
