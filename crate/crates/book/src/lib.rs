//! Compiles the guide's code listings as doctests; one module per chapter
//! so a failure points back at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/binary-svm.md")]
pub mod binary_svm {}
#[doc = include_str!("../../../book/src/one-vs-one.md")]
pub mod one_vs_one {}
#[doc = include_str!("../../../book/src/protocol.md")]
pub mod protocol {}
#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}
#[doc = include_str!("../../../book/src/data-and-format.md")]
pub mod data_and_format {}
#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
