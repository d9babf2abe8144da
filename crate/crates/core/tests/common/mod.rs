//! Oracles shared by the integration tests. Nothing here calls into the
//! closed-form paths it is used to check.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// Laplacian density written out independently of the library.
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2 * (-SQRT_2 * x.abs()).exp()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
        + adapt(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on a finite interval.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    adapt(f, a, fa, b, fb, whole, m, fm, 1e-14, 60)
}

/// Tails beyond this many units carry less than 1e-24 probability.
const TAIL: f64 = 40.0;

/// ∫ f(x) p(x) dx over (-∞, t], split at the density's kink.
pub fn lower(f: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    let g = |x: f64| f(x) * pdf(x);
    if t <= 0.0 {
        integrate(&g, -TAIL, t)
    } else {
        integrate(&g, -TAIL, 0.0) + integrate(&g, 0.0, t)
    }
}

/// ∫ f(x) p(x) dx over (t, ∞).
pub fn upper(f: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    let g = |x: f64| f(x) * pdf(x);
    if t >= 0.0 {
        integrate(&g, t, TAIL)
    } else {
        integrate(&g, t, 0.0) + integrate(&g, 0.0, TAIL)
    }
}

/// Centroids, probabilities and MSE for threshold `t` by quadrature only.
pub struct QuadratureDesign {
    pub y1: f64,
    pub y2: f64,
    pub p1: f64,
    pub p2: f64,
    pub distortion: f64,
}

pub fn quadrature_design(t: f64) -> QuadratureDesign {
    let one = |_: f64| 1.0;
    let id = |x: f64| x;
    let p1 = lower(&one, t);
    let p2 = upper(&one, t);
    let y1 = lower(&id, t) / p1;
    let y2 = upper(&id, t) / p2;
    let distortion = lower(&|x| (x - y1) * (x - y1), t) + upper(&|x| (x - y2) * (x - y2), t);
    QuadratureDesign {
        y1,
        y2,
        p1,
        p2,
        distortion,
    }
}

/// Minimum expected length over every complete prefix code, found by
/// enumerating non-decreasing length vectors with Kraft sum exactly 1
/// (lengths at most n-1) and pairing the shortest lengths with the largest
/// probabilities.
pub fn brute_force_min_length(probabilities: &[f64]) -> f64 {
    let n = probabilities.len();
    assert!((2..=12).contains(&n));
    let mut sorted = probabilities.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let max_len = n - 1;
    let full: u64 = 1 << max_len;
    let mut best = f64::INFINITY;
    let mut lengths = Vec::with_capacity(n);

    fn rec(
        sorted: &[f64],
        lengths: &mut Vec<usize>,
        min_len: usize,
        max_len: usize,
        used: u64,
        full: u64,
        best: &mut f64,
    ) {
        let n = sorted.len();
        if lengths.len() == n {
            if used == full {
                let avg: f64 = sorted
                    .iter()
                    .zip(lengths.iter())
                    .map(|(p, &l)| p * l as f64)
                    .sum();
                if avg < *best {
                    *best = avg;
                }
            }
            return;
        }
        for l in min_len..=max_len {
            let w = 1u64 << (max_len - l);
            if used + w > full {
                continue;
            }
            lengths.push(l);
            rec(sorted, lengths, l, max_len, used + w, full, best);
            lengths.pop();
        }
    }

    rec(&sorted, &mut lengths, 1, max_len, 0, full, &mut best);
    best
}

/// SQNR, D, t1, p1, p2, H, rate per symbol at M = 2, 3, 4, 5.
pub type ReferenceRow = (f64, f64, f64, f64, f64, f64, [f64; 4]);

pub const REFERENCE_TABLE: [ReferenceRow; 11] = [
    (
        2.0,
        0.6309,
        1.1876,
        0.9067,
        0.0932,
        0.4471,
        [0.6353, 0.5191, 0.4749, 0.4612],
    ),
    (
        2.1,
        0.6165,
        1.1096,
        0.8958,
        0.1041,
        0.4819,
        [0.6506, 0.5406, 0.5030, 0.4918],
    ),
    (
        2.2,
        0.6025,
        1.0324,
        0.8838,
        0.1161,
        0.5181,
        [0.6673, 0.5643, 0.5343, 0.5256],
    ),
    (
        2.3,
        0.5888,
        0.9546,
        0.8703,
        0.1296,
        0.5564,
        [0.6859, 0.5909, 0.5697, 0.5616],
    ),
    (
        2.4,
        0.5754,
        0.8756,
        0.8550,
        0.1449,
        0.5970,
        [0.7067, 0.6209, 0.6073, 0.6017],
    ),
    (
        2.5,
        0.5623,
        0.7943,
        0.8373,
        0.1626,
        0.6405,
        [0.7306, 0.6555, 0.6504, 0.6475],
    ),
    (
        2.6,
        0.5495,
        0.7091,
        0.8165,
        0.1834,
        0.6878,
        [0.7582, 0.6958, 0.7008, 0.7009],
    ),
    (
        2.7,
        0.5370,
        0.6176,
        0.7912,
        0.2087,
        0.7390,
        [0.7911, 0.7445, 0.7588, 0.7542],
    ),
    (
        2.8,
        0.5248,
        0.5147,
        0.7585,
        0.2414,
        0.7974,
        [0.8328, 0.8066, 0.8056, 0.8075],
    ),
    (
        2.9,
        0.5128,
        0.3866,
        0.7105,
        0.2894,
        0.8680,
        [0.8921, 0.8958, 0.8758, 0.8796],
    ),
    (3.0, 0.5, 0.0, 0.5, 0.5, 1.0, [1.0, 1.0, 1.0, 1.0]),
];

/// SQNR of the t1 = 0 optimum, 10·log10(2) dB; the last reference row.
pub fn optimum_sqnr() -> f64 {
    10.0 * 2f64.log10()
}

/// Design SQNR for reference row `i`; the last row is the optimum.
pub fn row_sqnr(i: usize) -> f64 {
    if i == REFERENCE_TABLE.len() - 1 {
        optimum_sqnr()
    } else {
        REFERENCE_TABLE[i].0
    }
}
