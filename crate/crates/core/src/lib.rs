//! Continuous semigroups of holomorphic self-maps of the unit disk built from
//! Koenigs data, with orbit tracing, hyperbolic geometry and Lipschitz audits.

pub mod analysis;
pub mod audit;
pub mod confmap;
pub mod domains;
pub mod error;
pub mod ext;
pub mod hypgeo;
pub mod interval;
pub mod par;
pub mod quadrature;
pub mod scenarios;
pub mod semigroup;

pub use confmap::{MapExpr, Primitive, StripChannel};
pub use domains::{Domain, DomainKind};
pub use error::{Error, Result};
pub use interval::Interval;
pub use num_complex::Complex64;
