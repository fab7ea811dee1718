//! Doc-test shim for the guide book.
//!
//! mdbook does not compile book snippets against this workspace, so each
//! chapter is included here as module documentation and `cargo test --doc`
//! runs every fenced Rust block. If a chapter drifts from the library, the
//! build breaks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}

#[doc = include_str!("../../../book/src/differentials.md")]
pub mod differentials {}

#[doc = include_str!("../../../book/src/cohomology.md")]
pub mod cohomology {}

#[doc = include_str!("../../../book/src/fibrations.md")]
pub mod fibrations {}

#[doc = include_str!("../../../book/src/tower.md")]
pub mod tower {}

#[doc = include_str!("../../../book/src/minimal-models.md")]
pub mod minimal_models {}

#[doc = include_str!("../../../book/src/theorems.md")]
pub mod theorems {}

#[doc = include_str!("../../../book/src/file-format.md")]
pub mod file_format {}
