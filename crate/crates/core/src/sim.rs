//! Analytic tables and curves, and Monte Carlo checks of them.
//!
//! The analytic path ([`make_table`], [`make_curve`]) is a pure function of
//! its grid. The Monte Carlo path draws unit-variance Laplacian samples,
//! pushes them through the quantizer and the block codec, and reports what
//! was actually measured next to what the formulas predict.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block_code::{build_block_model, build_huffman, single_symbol_entropy, MAX_BLOCK_SIZE};
use crate::codec::{decode, encode};
use crate::error::{Error, Result};
use crate::quantizer::{
    distortion_to_sqnr, solve_for_distortion, solve_threshold, QuantizerDesign, Symbol,
    MIN_DISTORTION,
};

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `start, start + step, ...` up to and including `stop`, with `stop`
/// counted as reached when within half a step.
pub fn inclusive_grid(start: f64, step: f64, stop: f64) -> Option<Vec<f64>> {
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) || stop < start {
        return None;
    }
    if step <= 0.0 {
        return (start == stop).then(|| vec![start]);
    }
    let count = ((stop - start) / step + 0.5).floor();
    if count > 1e7 {
        return None;
    }
    Some(
        (0..=count as usize)
            .map(|k| start + k as f64 * step)
            .collect(),
    )
}

/// Distortion grid for the rate/entropy-versus-distortion curve: 101 points
/// over `[0.5, 0.631]`, i.e. roughly 2 to 3 dB SQNR.
pub fn default_distortion_grid() -> Vec<f64> {
    linspace(MIN_DISTORTION, 0.631, 101)
}

/// SplitMix64 finalizer of `master` mixed with `index`; gives every grid
/// point its own stream, independent of evaluation order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform on the open interval (0, 1) from the top 53 bits of a draw.
fn open_unit(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `n` independent unit-variance Laplacian samples by inverse CDF.
///
/// The generator is ChaCha20 (`rand_chacha`) seeded with
/// `seed_from_u64(seed)`, so output is identical across platforms.
pub fn sample_laplacian(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c = open_unit(&mut rng) - 0.5;
            -c.signum() * FRAC_1_SQRT_2 * (1.0 - 2.0 * c.abs()).ln()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub block_size: usize,
    #[serde(with = "crate::real17")]
    pub bits_per_symbol: f64,
}

fn check_block_sizes(block_sizes: &[usize]) -> Result<()> {
    match block_sizes
        .iter()
        .find(|m| !(1..=MAX_BLOCK_SIZE).contains(*m))
    {
        Some(&m) => Err(Error::BlockSizeOutOfRange(m)),
        None => Ok(()),
    }
}

/// Analytic Huffman rates (bits/symbol) of a design for each block size.
pub fn analytic_rates(design: &QuantizerDesign, block_sizes: &[usize]) -> Result<Vec<Rate>> {
    block_sizes
        .iter()
        .map(|&m| {
            let cb = build_huffman(&build_block_model(design.p1, design.p2, m)?)?;
            Ok(Rate {
                block_size: m,
                bits_per_symbol: cb.avg_bits_per_symbol,
            })
        })
        .collect()
}

/// One row of the design table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(with = "crate::real17")]
    pub sqnr_db: f64,
    #[serde(with = "crate::real17")]
    pub distortion: f64,
    #[serde(with = "crate::real17")]
    pub t1: f64,
    #[serde(with = "crate::real17")]
    pub p1: f64,
    #[serde(with = "crate::real17")]
    pub p2: f64,
    #[serde(with = "crate::real17")]
    pub entropy: f64,
    pub rates: Vec<Rate>,
}

impl TableRow {
    fn from_design(design: &QuantizerDesign, block_sizes: &[usize]) -> Result<Self> {
        Ok(TableRow {
            sqnr_db: design.sqnr_db,
            distortion: design.distortion,
            t1: design.t1,
            p1: design.p1,
            p2: design.p2,
            entropy: single_symbol_entropy(design.p1, design.p2),
            rates: analytic_rates(design, block_sizes)?,
        })
    }

    pub fn rate(&self, block_size: usize) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.block_size == block_size)
            .map(|r| r.bits_per_symbol)
    }
}

/// Design table over an SQNR grid (dB). No sampling involved.
pub fn make_table(sqnr_grid: &[f64], block_sizes: &[usize]) -> Result<Vec<TableRow>> {
    check_block_sizes(block_sizes)?;
    sqnr_grid
        .iter()
        .map(|&s| TableRow::from_design(&solve_threshold(s)?, block_sizes))
        .collect()
}

/// Point of the entropy/rate-versus-distortion curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(with = "crate::real17")]
    pub distortion: f64,
    #[serde(with = "crate::real17")]
    pub entropy: f64,
    pub rates: Vec<Rate>,
}

impl CurvePoint {
    pub fn rate(&self, block_size: usize) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.block_size == block_size)
            .map(|r| r.bits_per_symbol)
    }
}

/// Entropy and Huffman rates as functions of distortion.
pub fn make_curve(distortion_grid: &[f64], block_sizes: &[usize]) -> Result<Vec<CurvePoint>> {
    check_block_sizes(block_sizes)?;
    distortion_grid
        .iter()
        .map(|&d| {
            let design = solve_for_distortion(d)?;
            Ok(CurvePoint {
                distortion: d,
                entropy: single_symbol_entropy(design.p1, design.p2),
                rates: analytic_rates(&design, block_sizes)?,
            })
        })
        .collect()
}

fn rate_headers(out: &mut String, block_sizes: &[usize]) {
    for m in block_sizes {
        let _ = write!(out, ",rate_m{m}");
    }
    out.push('\n');
}

fn rate_cells(out: &mut String, rates: &[Rate]) {
    for r in rates {
        let _ = write!(out, ",{:.6}", r.bits_per_symbol);
    }
    out.push('\n');
}

/// CSV rendering of a table: header row, six decimals.
pub fn table_csv(rows: &[TableRow], block_sizes: &[usize]) -> String {
    let mut out = String::from("sqnr_db,distortion,t1,p1,p2,entropy");
    rate_headers(&mut out, block_sizes);
    for r in rows {
        let _ = write!(
            out,
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.sqnr_db, r.distortion, r.t1, r.p1, r.p2, r.entropy
        );
        rate_cells(&mut out, &r.rates);
    }
    out
}

/// CSV rendering of a curve: header row, six decimals.
pub fn curve_csv(points: &[CurvePoint], block_sizes: &[usize]) -> String {
    let mut out = String::from("distortion,entropy");
    rate_headers(&mut out, block_sizes);
    for p in points {
        let _ = write!(out, "{:.6},{:.6}", p.distortion, p.entropy);
        rate_cells(&mut out, &p.rates);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    #[serde(with = "crate::real17")]
    pub t1: f64,
    #[serde(with = "crate::real17")]
    pub distortion: f64,
    #[serde(with = "crate::real17")]
    pub sqnr_db: f64,
    #[serde(with = "crate::real17")]
    pub p1: f64,
    #[serde(with = "crate::real17")]
    pub p2: f64,
    #[serde(with = "crate::real17")]
    pub entropy_per_symbol: f64,
    pub rates: Vec<Rate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    #[serde(with = "crate::real17")]
    pub mse: f64,
    #[serde(with = "crate::real17")]
    pub sqnr_db: f64,
    pub rates: Vec<Rate>,
    /// Observed fraction of samples in the lower cell.
    #[serde(with = "crate::real17")]
    pub p1_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub n_samples: usize,
    #[serde(with = "crate::real17")]
    pub sqnr_target_db: f64,
    pub analytic: Analytic,
    pub empirical: Empirical,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Designs for `target_sqnr_db`, encodes `n` samples drawn with `seed` at
/// every block size, and measures rate and distortion on the decoded output.
pub fn run_simulation(
    target_sqnr_db: f64,
    block_sizes: &[usize],
    n: usize,
    seed: u64,
) -> Result<SimulationReport> {
    check_block_sizes(block_sizes)?;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some(&m) = block_sizes.iter().find(|&&m| m > n) {
        return Err(Error::BlockSizeOutOfRange(m));
    }
    let design = solve_threshold(target_sqnr_db)?;
    let samples = sample_laplacian(seed, n);

    let mut analytic_rates = Vec::with_capacity(block_sizes.len());
    let mut empirical_rates = Vec::with_capacity(block_sizes.len());
    let mut reconstruction = None;
    for &m in block_sizes {
        let codebook = build_huffman(&build_block_model(design.p1, design.p2, m)?)?;
        analytic_rates.push(Rate {
            block_size: m,
            bits_per_symbol: codebook.avg_bits_per_symbol,
        });
        let stream = encode(&samples, &design, &codebook)?;
        empirical_rates.push(Rate {
            block_size: m,
            bits_per_symbol: stream.bits_per_symbol(),
        });
        if reconstruction.is_none() {
            reconstruction = Some(decode(&stream)?);
        }
    }
    let reconstruction =
        reconstruction.unwrap_or_else(|| samples.iter().map(|&x| design.reconstruct(x)).collect());

    let mse = samples
        .iter()
        .zip(&reconstruction)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n as f64;
    let low = samples
        .iter()
        .filter(|&&x| design.quantize(x) == Symbol::Low)
        .count();

    Ok(SimulationReport {
        seed,
        n_samples: n,
        sqnr_target_db: target_sqnr_db,
        analytic: Analytic {
            t1: design.t1,
            distortion: design.distortion,
            sqnr_db: design.sqnr_db,
            p1: design.p1,
            p2: design.p2,
            entropy_per_symbol: single_symbol_entropy(design.p1, design.p2),
            rates: analytic_rates,
        },
        empirical: Empirical {
            mse,
            sqnr_db: distortion_to_sqnr(mse)?,
            rates: empirical_rates,
            p1_hat: low as f64 / n as f64,
        },
    })
}

/// [`run_simulation`] at every grid point in parallel. Point `i` uses seed
/// `derive_seed(master_seed, i)`, so results match a serial run exactly.
pub fn run_grid(
    sqnr_grid: &[f64],
    block_sizes: &[usize],
    n: usize,
    master_seed: u64,
) -> Result<Vec<SimulationReport>> {
    sqnr_grid
        .par_iter()
        .enumerate()
        .map(|(i, &s)| run_simulation(s, block_sizes, n, derive_seed(master_seed, i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = inclusive_grid(2.0, 0.1, 3.0).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 3.0).abs() < 1e-12);
        assert_eq!(inclusive_grid(3.0103, 1.0, 3.0103).unwrap(), vec![3.0103]);
        assert_eq!(inclusive_grid(0.5, 0.1, 0.5).unwrap(), vec![0.5]);
        assert_eq!(inclusive_grid(1.0, 0.5, 1.5).unwrap().len(), 2);
        assert!(inclusive_grid(2.0, 0.1, 1.0).is_none());
        assert!(inclusive_grid(1.0, 0.0, 2.0).is_none());
        let d = default_distortion_grid();
        assert_eq!(d.len(), 101);
        assert_eq!(d[0], 0.5);
        assert!((d[100] - 0.631).abs() < 1e-15);
    }

    #[test]
    fn sampler_moments() {
        let xs = sample_laplacian(7, 1_000_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.005, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
        let below = xs.iter().filter(|&&x| x <= 1.1876).count() as f64 / n;
        assert!((below - 0.9067).abs() < 0.002, "{below}");
        assert!(xs.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn sampler_is_deterministic() {
        assert_eq!(sample_laplacian(42, 1000), sample_laplacian(42, 1000));
        assert_ne!(sample_laplacian(42, 10), sample_laplacian(43, 10));
    }

    #[test]
    fn seeds_differ_per_index() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(1, i)).collect();
        let mut u = s.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), s.len());
    }

    #[test]
    fn table_optimum_row() {
        let rows = make_table(&[10.0 * 2f64.log10()], &[2, 3, 4, 5]).unwrap();
        let r = &rows[0];
        assert_eq!(r.t1, 0.0);
        assert_eq!(r.distortion, 0.5);
        assert_eq!(r.entropy, 1.0);
        assert!(r.rates.iter().all(|x| x.bits_per_symbol == 1.0));
    }

    #[test]
    fn table_infeasible() {
        assert!(matches!(
            make_table(&[2.0, 3.5], &[2]),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            make_table(&[2.0], &[0]),
            Err(Error::BlockSizeOutOfRange(0))
        ));
    }

    #[test]
    fn curve_points() {
        let c = make_curve(&[0.5, 0.55, 0.6309], &[2, 3]).unwrap();
        assert_eq!(c[0].entropy, 1.0);
        assert_eq!(c[0].rate(2), Some(1.0));
        assert!((c[2].entropy - 0.4471).abs() < 2e-4);
        for m in [2usize, 3] {
            let r = c[1].rate(m).unwrap();
            assert!(c[1].entropy <= r && r < c[1].entropy + 1.0 / m as f64);
        }
        assert!(matches!(
            make_curve(&[0.45], &[2]),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let rows = make_table(&[2.0], &[2, 3]).unwrap();
        let csv = table_csv(&rows, &[2, 3]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("sqnr_db,distortion,t1,p1,p2,entropy,rate_m2,rate_m3")
        );
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells.len(), 8);
        assert_eq!(cells[0], "2.000000");
        assert!(cells
            .iter()
            .all(|c| c.split('.').nth(1).unwrap().len() == 6));
        let c = make_curve(&[0.5], &[2]).unwrap();
        assert_eq!(
            curve_csv(&c, &[2]),
            "distortion,entropy,rate_m2\n0.500000,1.000000,1.000000\n"
        );
    }

    #[test]
    fn simulation_optimum_is_one_bit() {
        let r = run_simulation(10.0 * 2f64.log10(), &[2, 3], 1000, 5).unwrap();
        for rate in &r.empirical.rates {
            assert!(rate.bits_per_symbol >= 1.0);
        }
        // 1000 is divisible by 2; no filler bits
        assert_eq!(r.empirical.rates[0].bits_per_symbol, 1.0);
    }

    #[test]
    fn simulation_errors() {
        assert!(run_simulation(3.5, &[2], 100, 1).is_err());
        assert!(run_simulation(2.5, &[4], 3, 1).is_err());
        assert!(run_simulation(2.5, &[2], 0, 1).is_err());
    }

    #[test]
    fn grid_matches_serial() {
        let grid = [2.0, 2.5, 2.9];
        let par = run_grid(&grid, &[2], 2000, 11).unwrap();
        for (i, &s) in grid.iter().enumerate() {
            let serial = run_simulation(s, &[2], 2000, derive_seed(11, i as u64)).unwrap();
            assert_eq!(par[i].to_json(), serial.to_json());
        }
    }
}
