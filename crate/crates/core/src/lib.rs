//! Computable point-free topology.
//!
//! * [`lattice`]: finite Heyting algebras (the finite locales).
//! * [`space`]: finite topological spaces and their opens.
//! * [`line`]: the frame of rational open regions of the real line, with
//!   piecewise polynomial functions, germs and strata.
//! * [`axioms`]: global/local connectivity and divisibility checks.
//! * [`sheaf`]: presheaves on finite spaces, gluing, stalks and the sections
//!   around closed sets.
//! * [`nilpotent`]: truncated polynomial rings and dual-number derivatives.
//! * [`logic`]: intuitionistic formulas evaluated in any Heyting algebra.
//! * [`cli`]: the `continuum` command-line front end.
//!
//! All arithmetic is exact. Exhaustive scans run on rayon when the
//! `parallel` feature is on (the default) and [`Exec::Parallel`] is chosen.

pub mod axioms;
pub mod catalog;
pub mod cli;
pub mod exec;
pub mod lattice;
pub mod line;
pub mod logic;
pub mod nilpotent;
pub mod poly;
pub mod rational;
pub mod sheaf;
pub mod space;

pub use exec::Exec;
pub use lattice::{Elem, HeytingAlgebra, LatticeError};
pub use line::{Endpoint, Germ, Interval, LineError, OpenRegion, PiecewiseFn};
pub use nilpotent::TruncatedPoly;
pub use poly::Poly;
pub use rational::Q;
pub use sheaf::{Presheaf, SheafError, SheafVerdict, Stalk};
pub use space::{FiniteSpace, PointMap, PointSet, SpaceError};
