//! Compiles every Rust listing of the guide in `book/src` as a doc-test, so
//! `cargo test -p lapq-book` fails when the guide and the library disagree.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/quantizer.md")]
pub mod quantizer {}

#[doc = include_str!("../../../book/src/huffman.md")]
pub mod huffman {}

#[doc = include_str!("../../../book/src/container.md")]
pub mod container {}

#[doc = include_str!("../../../book/src/reproduction.md")]
pub mod reproduction {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
