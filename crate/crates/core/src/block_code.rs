//! Extended Huffman coding of quantizer symbol blocks.
//!
//! Quantizer outputs are grouped into blocks of `M` symbols. With independent
//! samples a block's probability is the product of its symbols'
//! probabilities, so the `2^M` block distribution is fully determined by
//! `(p1, p2)`. A Huffman code over that distribution gets the per-symbol rate
//! within `1/M` bits of the source entropy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantizer::Symbol;

/// Largest supported block size.
pub const MAX_BLOCK_SIZE: usize = 16;

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// One block of the extended alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub tuple: Vec<Symbol>,
    pub probability: f64,
}

/// The `2^M` blocks of length `M` with their probabilities, in lexicographic
/// tuple order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModel {
    pub block_size: usize,
    pub blocks: Vec<Block>,
}

/// Lexicographic rank of a tuple (`Low` < `High`, first symbol most significant).
pub fn tuple_index(tuple: &[Symbol]) -> usize {
    tuple
        .iter()
        .fold(0, |acc, s| (acc << 1) | usize::from(*s == Symbol::High))
}

/// Inverse of [`tuple_index`].
pub fn tuple_from_index(index: usize, block_size: usize) -> Vec<Symbol> {
    (0..block_size)
        .rev()
        .map(|bit| {
            if index >> bit & 1 == 1 {
                Symbol::High
            } else {
                Symbol::Low
            }
        })
        .collect()
}

fn check_block_size(m: usize) -> Result<()> {
    if (1..=MAX_BLOCK_SIZE).contains(&m) {
        Ok(())
    } else {
        Err(Error::BlockSizeOutOfRange(m))
    }
}

/// Block distribution for symbol probabilities `(p1, p2)` and block size `m`.
pub fn build_block_model(p1: f64, p2: f64, m: usize) -> Result<BlockModel> {
    let valid = |p: f64| p.is_finite() && (0.0..=1.0).contains(&p);
    if !(valid(p1) && valid(p2)) || (p1 + p2 - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::InvalidProbability { p1, p2 });
    }
    check_block_size(m)?;
    let blocks = (0..1usize << m)
        .map(|i| {
            let tuple = tuple_from_index(i, m);
            let probability = tuple
                .iter()
                .map(|s| match s {
                    Symbol::Low => p1,
                    Symbol::High => p2,
                })
                .product();
            Block { tuple, probability }
        })
        .collect();
    Ok(BlockModel {
        block_size: m,
        blocks,
    })
}

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of the block distribution, bits per block.
pub fn block_entropy(model: &BlockModel) -> f64 {
    model
        .blocks
        .iter()
        .map(|b| entropy_term(b.probability))
        .sum()
}

/// Binary entropy of the quantizer output, bits per symbol.
pub fn single_symbol_entropy(p1: f64, p2: f64) -> f64 {
    entropy_term(p1) + entropy_term(p2)
}

/// A binary codeword, most significant (first transmitted) bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Codeword(Vec<bool>);

impl Codeword {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Codeword) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<bool>> for Codeword {
    fn from(bits: Vec<bool>) -> Self {
        Codeword(bits)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Codeword {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit {other:?} in codeword")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Codeword)
    }
}

impl Serialize for Codeword {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Codeword {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeEntry {
    pub tuple: Vec<Symbol>,
    pub code: Codeword,
    pub length: usize,
}

/// Prefix code over the blocks of one [`BlockModel`]; entries are in the
/// model's lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeBook {
    pub block_size: usize,
    pub entries: Vec<CodeEntry>,
    #[serde(with = "crate::real17")]
    pub avg_bits_per_block: f64,
    #[serde(with = "crate::real17")]
    pub avg_bits_per_symbol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    probability: f64,
    id: usize,
}

impl Eq for Node {}

impl Ord for Node {
    // Reversed so that BinaryHeap pops the least probable node, and among
    // equal probabilities the lowest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .probability
            .total_cmp(&self.probability)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Huffman code lengths for `probabilities`.
///
/// The two least probable nodes are merged repeatedly. Ties go to the node
/// with the smaller id: leaves are numbered by position, internal nodes by
/// creation order after all leaves. Lengths are the leaf depths of the final
/// tree.
pub fn huffman_lengths(probabilities: &[f64]) -> Result<Vec<usize>> {
    let n = probabilities.len();
    if n < 2 {
        return Err(Error::DegenerateModel(n));
    }
    if let Some(i) = probabilities
        .iter()
        .position(|&p| !(p > 0.0 && p.is_finite()))
    {
        return Err(Error::ZeroProbability(i));
    }

    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Node> = probabilities
        .iter()
        .enumerate()
        .map(|(id, &probability)| Node { probability, id })
        .collect();
    let mut next_id = n;
    while heap.len() > 1 {
        let a = heap.pop().expect("heap has two nodes");
        let b = heap.pop().expect("heap has two nodes");
        parent[a.id] = next_id;
        parent[b.id] = next_id;
        heap.push(Node {
            probability: a.probability + b.probability,
            id: next_id,
        });
        next_id += 1;
    }

    // Parents always have larger ids, so walk internal nodes root-first.
    let root = next_id - 1;
    let mut depth = vec![0usize; 2 * n - 1];
    for id in (0..root).rev() {
        depth[id] = depth[parent[id]] + 1;
    }
    depth.truncate(n);
    Ok(depth)
}

/// Canonical codewords for a set of lengths: entries sorted by
/// `(length, position)` receive consecutive binary values.
pub fn canonical_codes(lengths: &[usize]) -> Vec<Codeword> {
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));

    let mut codes = vec![Codeword::default(); lengths.len()];
    let mut current: Vec<bool> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k > 0 {
            // binary increment
            for bit in current.iter_mut().rev() {
                *bit = !*bit;
                if *bit {
                    break;
                }
            }
        }
        current.resize(lengths[i], false);
        codes[i] = Codeword(current.clone());
    }
    codes
}

/// Builds the extended Huffman codebook for a block model.
pub fn build_huffman(model: &BlockModel) -> Result<CodeBook> {
    check_block_size(model.block_size)?;
    let probabilities: Vec<f64> = model.blocks.iter().map(|b| b.probability).collect();
    let lengths = huffman_lengths(&probabilities)?;
    let codes = canonical_codes(&lengths);
    let entries: Vec<CodeEntry> = model
        .blocks
        .iter()
        .zip(codes)
        .map(|(block, code)| CodeEntry {
            tuple: block.tuple.clone(),
            length: code.len(),
            code,
        })
        .collect();
    let mut book = CodeBook {
        block_size: model.block_size,
        entries,
        avg_bits_per_block: 0.0,
        avg_bits_per_symbol: 0.0,
    };
    let (per_block, per_symbol) = average_bit_rate(&book, model)?;
    book.avg_bits_per_block = per_block;
    book.avg_bits_per_symbol = per_symbol;
    Ok(book)
}

/// Expected code length `(bits per block, bits per symbol)` under `model`.
pub fn average_bit_rate(codebook: &CodeBook, model: &BlockModel) -> Result<(f64, f64)> {
    if codebook.block_size != model.block_size {
        return Err(Error::ModelMismatch(format!(
            "block size {} vs {}",
            codebook.block_size, model.block_size
        )));
    }
    if codebook.entries.len() != model.blocks.len() {
        return Err(Error::ModelMismatch(format!(
            "{} entries vs {} blocks",
            codebook.entries.len(),
            model.blocks.len()
        )));
    }
    let mut per_block = 0.0;
    for (entry, block) in codebook.entries.iter().zip(&model.blocks) {
        if entry.tuple != block.tuple {
            return Err(Error::ModelMismatch("block order differs".into()));
        }
        per_block += block.probability * entry.length as f64;
    }
    Ok((per_block, per_block / model.block_size as f64))
}

impl CodeBook {
    /// Codeword for the block at lexicographic index `i`.
    pub fn code(&self, i: usize) -> &Codeword {
        &self.entries[i].code
    }

    /// Checks the structural invariants a decoder relies on: one entry per
    /// tuple in lexicographic order, consistent lengths, and a complete
    /// prefix-free code. Returns the decoding table on success.
    pub fn decoder(&self) -> std::result::Result<DecodeTable, String> {
        let m = self.block_size;
        if !(1..=MAX_BLOCK_SIZE).contains(&m) {
            return Err(format!("block size {m} out of range"));
        }
        if self.entries.len() != 1 << m {
            return Err(format!("{} entries for block size {m}", self.entries.len()));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if e.tuple.len() != m || tuple_index(&e.tuple) != i {
                return Err(format!("entry {i} is out of order"));
            }
            if e.length != e.code.len() || e.code.is_empty() {
                return Err(format!("entry {i} has inconsistent length"));
            }
        }
        DecodeTable::build(self)
    }
}

const UNSET: u32 = u32::MAX;
const LEAF: u32 = 1 << 31;

/// Bit-driven state table for a complete prefix code.
///
/// State 0 is the root. `next[state][bit]` is either another state or a
/// leaf marker carrying the block index.
#[derive(Debug, Clone)]
pub struct DecodeTable {
    next: Vec<[u32; 2]>,
}

/// Outcome of feeding one bit to a [`DecodeTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Continue(u32),
    Emit(usize),
}

impl DecodeTable {
    fn build(book: &CodeBook) -> std::result::Result<Self, String> {
        let mut next: Vec<[u32; 2]> = vec![[UNSET; 2]];
        for (i, entry) in book.entries.iter().enumerate() {
            let bits = entry.code.bits();
            let mut state = 0usize;
            for (depth, &bit) in bits.iter().enumerate() {
                let slot = next[state][usize::from(bit)];
                let last = depth + 1 == bits.len();
                if last {
                    if slot != UNSET {
                        return Err(format!("codeword {i} is a prefix or duplicate of another"));
                    }
                    next[state][usize::from(bit)] = LEAF | i as u32;
                } else if slot == UNSET {
                    next.push([UNSET; 2]);
                    let fresh = (next.len() - 1) as u32;
                    next[state][usize::from(bit)] = fresh;
                    state = fresh as usize;
                } else if slot & LEAF != 0 {
                    return Err(format!(
                        "codeword {} is a prefix of codeword {i}",
                        slot & !LEAF
                    ));
                } else {
                    state = slot as usize;
                }
            }
        }
        if next.iter().any(|n| n.contains(&UNSET)) {
            return Err("code is not complete (Kraft sum below 1)".into());
        }
        Ok(DecodeTable { next })
    }

    /// Advances from `state` on `bit`.
    #[inline]
    pub fn step(&self, state: u32, bit: bool) -> Step {
        let t = self.next[state as usize][usize::from(bit)];
        if t & LEAF != 0 {
            Step::Emit((t & !LEAF) as usize)
        } else {
            Step::Continue(t)
        }
    }
}
