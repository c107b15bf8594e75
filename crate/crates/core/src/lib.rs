//! A context calculus: contexts as typed finite relations between dimensions
//! and tags, the operators over contexts and over sets of simple contexts,
//! Box sets, a parser and evaluator for context and context-set expressions,
//! and a demand-driven evaluator for intensional streams.
//!
//! ```
//! use ctxcalc::{ops, Context, DimSet, MicroContext};
//!
//! let c: Context = [("d", 1), ("e", 4), ("f", 3)]
//!     .into_iter()
//!     .map(|(d, t)| MicroContext::new(d, t))
//!     .collect();
//! let d: DimSet = ["d", "e"].into_iter().collect();
//! assert_eq!(ops::projection(&c, &d).to_string(), "{(d,1),(e,4)}");
//! assert_eq!(ops::hiding(&c, &d).to_string(), "{(f,3)}");
//! ```

pub mod boxset;
pub mod error;
pub mod expr;
pub mod model;
pub mod ops;
pub mod set;
pub mod stream;

pub use boxset::{BoolExpr, BoxSet};
pub use error::{Error, Result};
pub use model::{
    Context, ContextOrdering, Dim, DimSet, Dimension, DimensionRegistry, EnumDomain, MicroContext, TagKind, TagValue,
};
pub use set::ContextSet;
