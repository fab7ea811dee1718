//! An exact-arithmetic workbench for commutative differential graded
//! algebras (CDGAs) over the rationals.
//!
//! The crate builds free graded-commutative algebras with Koszul signs and
//! generator-defined differentials, computes their cohomology with exact
//! rational linear algebra, and layers three constructions on top:
//!
//! * odd spherical fibrations with Euler classes and Gysin-sequence
//!   verification ([`fibration`]),
//! * the even-cohomology-killing tower and its finite sub-towers
//!   ([`fibration`]),
//! * Sullivan minimal models by degree induction, bouquets of odd spheres,
//!   and the comparison machinery between them ([`minimal`]),
//!
//! together with theorem-level harnesses ([`verify`]) that check, at a
//! stated degree cutoff, that the tower kills all positive even cohomology
//! and that no fibration with cohomologically small fiber can kill odd
//! classes of a base with vanishing even cohomology.
//!
//! Everything is a value: algebras, elements, and morphisms are immutable
//! after construction, operations are pure, and all coefficients are exact
//! rationals. Every cohomological statement carries an explicit degree
//! cutoff; nothing is ever computed "in the limit".
//!
//! ```
//! use cdga::algebra::{DGAlgebra, Element};
//! use cdga::cohomology::betti;
//!
//! // The S^2 model: Lambda(a_2, b_3; db = a^2).
//! let alg = DGAlgebra::free([("a", 2), ("b", 3)])?;
//! let b = alg.by_name("b")?;
//! let a = Element::generator(alg.by_name("a")?);
//! let alg = alg.with_differential(b, alg.power(&a, 2)?)?;
//!
//! assert_eq!(betti(&alg, 6)?, vec![1, 0, 1, 0, 0, 0, 0]);
//! # Ok::<(), cdga::Error>(())
//! ```

pub mod algebra;
pub mod cohomology;
pub mod error;
pub mod fibration;
pub mod format;
pub mod linalg;
pub mod minimal;
pub mod testutil;
pub mod verify;

pub use error::{Error, Result};

/// Coefficients are exact rationals throughout; the type is re-exported so
/// downstream code does not need its own `num-rational` dependency.
pub use num_rational::BigRational;
