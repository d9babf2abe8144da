//! Closed-form design of the asymmetric two-level quantizer.
//!
//! The source is the zero-mean Laplacian with unit variance,
//! `p(x) = exp(-√2|x|) / √2`. A single decision threshold `t1 ≥ 0` splits the
//! real line into the cells `(-∞, t1]` and `(t1, ∞)`; each cell is
//! represented by its conditional mean. Every quantity below (levels,
//! distortion, cell probabilities) is an elementary function of `t1`, and the
//! inverse problem, finding `t1` for a requested SQNR, is a one-dimensional
//! monotone root find.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variance of the modelled source. Fixed; all formulas assume it.
pub const SOURCE_VARIANCE: f64 = 1.0;

/// Distortion of the two-level Lloyd-Max quantizer (`t1 = 0`), the smallest
/// distortion any threshold can reach.
pub const MIN_DISTORTION: f64 = 0.5;

/// Requested distortions this far below [`MIN_DISTORTION`] are treated as the
/// optimum itself. Absorbs SQNR targets quoted to a few decimals, e.g.
/// `3.0103` dB, which lands 2e-8 under 0.5.
pub const OPTIMUM_SLACK: f64 = 1e-7;

/// Convergence bound on `|D(t1) - D_target|` for the threshold solver.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Largest threshold the bracket search will try.
pub const MAX_BRACKET: f64 = 50.0;

/// Output cell of the quantizer. Serialized as its 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Cell `(-∞, t1]`, level `y1`.
    Low,
    /// Cell `(t1, ∞)`, level `y2`.
    High,
}

impl Symbol {
    pub fn index(self) -> u8 {
        match self {
            Symbol::Low => 1,
            Symbol::High => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Symbol> {
        match i {
            1 => Some(Symbol::Low),
            2 => Some(Symbol::High),
            _ => None,
        }
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index())
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let i = u8::deserialize(d)?;
        Symbol::from_index(i)
            .ok_or_else(|| serde::de::Error::custom(format!("symbol index {i} not in {{1, 2}}")))
    }
}

fn check_threshold(t1: f64) -> Result<()> {
    if t1.is_finite() && t1 >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeThreshold(t1))
    }
}

/// Unit-variance Laplacian density.
pub fn laplacian_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2 * (-SQRT_2 * x.abs()).exp()
}

/// Centroids `(y1, y2)` of the two cells for threshold `t1`.
pub fn representation_levels(t1: f64) -> Result<(f64, f64)> {
    check_threshold(t1)?;
    // (√2 + 2t) / (2 - 4e^{√2 t}), scaled by e^{-√2 t} so large t cannot overflow.
    let decay = (-SQRT_2 * t1).exp();
    let y1 = (SQRT_2 + 2.0 * t1) * decay / (2.0 * decay - 4.0);
    let y2 = t1 + FRAC_1_SQRT_2;
    Ok((y1, y2))
}

/// Mean squared error of the centroid quantizer with threshold `t1`.
pub fn distortion(t1: f64) -> Result<f64> {
    check_threshold(t1)?;
    Ok(distortion_unchecked(t1))
}

fn distortion_unchecked(t1: f64) -> f64 {
    let decay = (-SQRT_2 * t1).exp();
    let num = 3.0 * decay - 4.0 + 2.0 * SQRT_2 * t1 * decay + 2.0 * t1 * t1 * decay;
    num / (2.0 * decay - 4.0)
}

/// Cell probabilities `(p1, p2)`: `P(X ≤ t1)` and `P(X > t1)`.
pub fn symbol_probabilities(t1: f64) -> Result<(f64, f64)> {
    check_threshold(t1)?;
    let p2 = 0.5 * (-SQRT_2 * t1).exp();
    Ok((1.0 - p2, p2))
}

/// `D = σ² / 10^(SQNR/10)` with `σ² = 1`.
pub fn sqnr_to_distortion(sqnr_db: f64) -> f64 {
    SOURCE_VARIANCE * 10f64.powf(-sqnr_db / 10.0)
}

/// `SQNR = 10 log10(σ² / D)` in dB.
pub fn distortion_to_sqnr(d: f64) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidDistortion(d));
    }
    Ok(10.0 * (SOURCE_VARIANCE / d).log10())
}

/// A fully evaluated quantizer: threshold plus every quantity derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerDesign {
    #[serde(with = "crate::real17")]
    pub t1: f64,
    #[serde(with = "crate::real17")]
    pub y1: f64,
    #[serde(with = "crate::real17")]
    pub y2: f64,
    #[serde(with = "crate::real17")]
    pub distortion: f64,
    #[serde(with = "crate::real17")]
    pub sqnr_db: f64,
    #[serde(with = "crate::real17")]
    pub p1: f64,
    #[serde(with = "crate::real17")]
    pub p2: f64,
}

impl QuantizerDesign {
    /// Evaluates the design at a given threshold.
    pub fn from_threshold(t1: f64) -> Result<Self> {
        let (y1, y2) = representation_levels(t1)?;
        let (p1, p2) = symbol_probabilities(t1)?;
        let distortion = distortion_unchecked(t1);
        Ok(QuantizerDesign {
            t1,
            y1,
            y2,
            distortion,
            sqnr_db: distortion_to_sqnr(distortion)?,
            p1,
            p2,
        })
    }

    /// The two-level Lloyd-Max quantizer, `t1 = 0`.
    pub fn lloyd_max() -> Self {
        Self::from_threshold(0.0).expect("zero is a valid threshold")
    }

    /// Cell index of `x`. The threshold itself belongs to the lower cell.
    pub fn quantize(&self, x: f64) -> Symbol {
        if x <= self.t1 {
            Symbol::Low
        } else {
            Symbol::High
        }
    }

    /// Representation level of a cell.
    pub fn level(&self, s: Symbol) -> f64 {
        match s {
            Symbol::Low => self.y1,
            Symbol::High => self.y2,
        }
    }

    /// `level(quantize(x))`.
    pub fn reconstruct(&self, x: f64) -> f64 {
        self.level(self.quantize(x))
    }
}

/// Free-function form of [`QuantizerDesign::quantize`].
pub fn quantize(x: f64, design: &QuantizerDesign) -> Symbol {
    design.quantize(x)
}

/// Designs the quantizer whose SQNR equals `target_sqnr_db`.
pub fn solve_threshold(target_sqnr_db: f64) -> Result<QuantizerDesign> {
    if !target_sqnr_db.is_finite() {
        return Err(Error::InvalidDistortion(f64::NAN));
    }
    solve_for_distortion(sqnr_to_distortion(target_sqnr_db))
}

/// Designs the quantizer whose distortion equals `target`.
///
/// `D(t1)` rises strictly from 0.5 at `t1 = 0` towards the source variance,
/// so the threshold is found by bisection on `[0, t_hi]`, with `t_hi` doubled
/// from 1 (capped at [`MAX_BRACKET`]) until it brackets the target. Bisection
/// runs until the bracket cannot shrink further in `f64`; `D` is flat at
/// `t1 = 0`, so stopping on the residual alone would leave the threshold
/// loose near the optimum.
pub fn solve_for_distortion(target: f64) -> Result<QuantizerDesign> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::InvalidDistortion(target));
    }
    if target < MIN_DISTORTION - OPTIMUM_SLACK {
        return Err(Error::Infeasible {
            requested: target,
            max_sqnr_db: distortion_to_sqnr(MIN_DISTORTION)?,
        });
    }
    if target <= MIN_DISTORTION {
        return Ok(QuantizerDesign::lloyd_max());
    }

    let mut hi = 1.0;
    while distortion_unchecked(hi) <= target {
        if hi >= MAX_BRACKET {
            return Err(Error::BracketFailure(target));
        }
        hi = (2.0 * hi).min(MAX_BRACKET);
    }

    let mut lo = 0.0;
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if distortion_unchecked(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let err_lo = (distortion_unchecked(lo) - target).abs();
    let err_hi = (distortion_unchecked(hi) - target).abs();
    let t1 = if err_lo <= err_hi { lo } else { hi };
    if err_lo.min(err_hi) > SOLVER_TOLERANCE {
        return Err(Error::BracketFailure(target));
    }
    QuantizerDesign::from_threshold(t1)
}
