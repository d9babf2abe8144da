//! Asymmetric two-level scalar quantization of a unit-variance Laplacian
//! source, followed by extended Huffman coding of symbol blocks.
//!
//! * [`quantizer`]: closed-form levels, distortion and cell probabilities as
//!   functions of the decision threshold, and the SQNR → threshold solve.
//! * [`block_code`]: block distributions, entropy, Huffman code construction.
//! * [`codec`]: sample encoder/decoder and the `LAPQ` container.
//! * [`sim`]: analytic tables and curves, Laplacian sampling, Monte Carlo
//!   verification.
//!
//! ```
//! use lapq::{solve_threshold, build_block_model, build_huffman};
//!
//! let design = solve_threshold(2.5)?;
//! let model = build_block_model(design.p1, design.p2, 3)?;
//! let book = build_huffman(&model)?;
//! assert!((book.avg_bits_per_symbol - 0.6555).abs() < 1e-3);
//! # Ok::<(), lapq::Error>(())
//! ```

pub mod block_code;
pub mod codec;
mod error;
pub mod quantizer;
mod real17;
pub mod sim;

pub use block_code::{
    average_bit_rate, block_entropy, build_block_model, build_huffman, single_symbol_entropy,
    BlockModel, CodeBook, Codeword,
};
pub use codec::{decode, encode, BitStream};
pub use error::{Error, Result};
pub use quantizer::{
    distortion, distortion_to_sqnr, laplacian_pdf, quantize, representation_levels,
    solve_for_distortion, solve_threshold, sqnr_to_distortion, symbol_probabilities,
    QuantizerDesign, Symbol,
};
pub use sim::{make_curve, make_table, run_simulation, sample_laplacian, SimulationReport};
