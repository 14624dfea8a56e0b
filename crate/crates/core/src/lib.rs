//! Exact divisor and intersection theory on iterated blow-ups of rational
//! surfaces, with contractions, Riemann–Roch and cone constructions built on
//! top.
//!
//! All arithmetic is exact (`BigInt` / `BigRational`).

pub mod cohomology;
pub mod cone;
pub mod contraction;
pub mod divisor;
pub mod exactlin;
pub mod singularity;
pub mod surface;

pub use contraction::{ClassGroupReport, Contraction, ContractionError, SingularityClass};
pub use divisor::QDivisor;
pub use exactlin::{int, rat, Rational};
pub use surface::{class_from_i64, Base, Class, SurfaceError, SurfaceModel};
