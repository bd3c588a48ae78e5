//! The rendered guide, embedded chapter by chapter as module docs so that
//! every code block in `book/src/` compiles and runs under
//! `cargo test --doc`. The book can never drift from the library: a stale
//! snippet is a failing test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/covers.md")]
pub mod covers {}

#[doc = include_str!("../../../book/src/hierarchy.md")]
pub mod hierarchy {}

#[doc = include_str!("../../../book/src/costs.md")]
pub mod costs {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
