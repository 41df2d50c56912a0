//! Differential-algebra workbench: differential polynomials over ℚ and ℚ(t),
//! rankings, Ritt division, characteristic-set decomposition, Jacobi numbers
//! and a truncated ideal-membership oracle.

pub mod decompose;
pub mod diffpoly;
pub mod error;
pub mod field;
pub mod jacobi;
pub mod linearize;
pub mod oracle;
pub mod par;
pub mod point;
pub mod ranking;
pub mod reduction;
pub mod text;

pub use diffpoly::{Convention, DerVar, DiffPoly, Monomial, Order, Ring};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldTag};
pub use par::Exec;
pub use ranking::{Ranking, RankingKind};
