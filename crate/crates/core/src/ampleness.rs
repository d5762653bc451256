//! Very-ampleness certificates for adjoint classes via Reider's inequalities.
//!
//! For `D = K + M` the check is `M² ≥ 10` and `M·Γ ≥ 3` for every curve
//! `Γ`. A lattice model cannot list every curve, so `Γ` ranges over the
//! model's declared effective test classes and every report carries
//! [`SURROGATE_CAVEAT`].
//!
//! # Threshold chain
//!
//! Let `t` be the twist from [`find_twist_t`]: `tH − Σ ε_i C_i` meets every
//! test class positively and has positive square for all `ε ∈ {−1, 0, 1}^18`.
//! Take `M = mH + Σ x_i C_i` with `|x_i| ≤ k ≤ e√m` and `m > (18te)²`, so
//! that `kt ≤ te√m < m/18`.
//!
//! * Test classes. Positivity of the twist at `ε_i = sgn(C_i·Γ)` gives
//!   `Σ|C_i·Γ| ≤ tH·Γ − 1`, hence
//!   `M·Γ ≥ mH·Γ − kΣ|C_i·Γ| ≥ H·Γ(m − kt) + k > (17/18)·m·H·Γ`.
//! * Square. The curves are disjoint, so
//!   `M² ≥ m²H² − 2mkΣ|H·C_i| − k²Σ|C_i²|`. Positivity of the twisted
//!   square at `ε_i = sgn(H·C_i)` gives `2tΣ|H·C_i| + Σ|C_i²| < t²H²`, and
//!   with `k² ≤ mk/t` the subtracted terms are below `mktH² < m²H²/18`.
//!
//! So `17·m·H·Γ ≥ 54` and `17·m²H² ≥ 180` certify every larger `m`. Below
//! that tail the exact worst case over the box `|x_i| ≤ k` is evaluated
//! directly ([`worst_case_in_box`]); no `x` is ever enumerated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{intersect, DivisorClass, IntersectionModel};

pub const SQUARE_BOUND: i64 = 10;
pub const CURVE_BOUND: i64 = 3;

/// Largest twist [`find_twist_t`] will try.
pub const MAX_TWIST: u64 = 1_000_000;

pub const SURROGATE_CAVEAT: &str =
    "curve positivity checked against the declared effective test classes, not every irreducible curve";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReiderReport {
    pub passed: bool,
    /// `(D − K)²`.
    pub square_value: BigInt,
    /// The test class minimizing `(D − K)·Γ`, first in declaration order on ties.
    pub worst_test: Option<(String, BigInt)>,
    pub caveat: &'static str,
}

pub fn reider_check(model: &IntersectionModel, d: &DivisorClass) -> Result<ReiderReport> {
    let m = d - model.canonical();
    let square_value = intersect(model, &m, &m)?;
    let mut worst: Option<(String, BigInt)> = None;
    for t in model.effective_tests() {
        let v = intersect(model, &m, &t.class)?;
        if worst.as_ref().is_none_or(|(_, w)| v < *w) {
            worst = Some((t.name.clone(), v));
        }
    }
    let curves_ok = worst
        .as_ref()
        .is_none_or(|(_, v)| *v >= BigInt::from(CURVE_BOUND));
    Ok(ReiderReport {
        passed: curves_ok && square_value >= BigInt::from(SQUARE_BOUND),
        square_value,
        worst_test: worst,
        caveat: SURROGATE_CAVEAT,
    })
}

/// Per-curve data the twist and box computations need.
struct CurveData {
    h_dot: Vec<BigInt>,
    self_int: Vec<BigInt>,
    /// `C_i·Γ` for each test class, test-major.
    test_dot: Vec<Vec<BigInt>>,
    h_dot_test: Vec<BigInt>,
    h_square: BigInt,
}

fn curve_data(model: &IntersectionModel, curves: &[DivisorClass]) -> Result<CurveData> {
    let h = model.polarization();
    let pair = |a: &DivisorClass, b: &DivisorClass| intersect(model, a, b);
    let tests = model.effective_tests();
    Ok(CurveData {
        h_dot: curves.iter().map(|c| pair(h, c)).collect::<Result<_>>()?,
        self_int: curves.iter().map(|c| pair(c, c)).collect::<Result<_>>()?,
        test_dot: tests
            .iter()
            .map(|t| {
                curves
                    .iter()
                    .map(|c| pair(c, &t.class))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
        h_dot_test: tests
            .iter()
            .map(|t| pair(h, &t.class))
            .collect::<Result<_>>()?,
        h_square: pair(h, h)?,
    })
}

/// Whether `tH − Σ ε_i C_i` is positive on every test class and has positive
/// square for every `ε ∈ {−1, 0, 1}^n`, for pairwise disjoint `curves`.
///
/// Against a test class the expression is linear in `ε`, so its minimum is
/// `tH·Γ − Σ|C_i·Γ|`. Disjointness makes the square separable,
/// `t²H² + Σ (ε_i² C_i² − 2tε_i H·C_i)`, minimized coordinate by coordinate.
/// On a valid model the curves within a block are numerically identical, so
/// the minimizing sign pattern is constant on each block; either way the
/// `3^n` patterns never need listing.
fn twist_holds_for(data: &CurveData, t: &BigInt) -> bool {
    for (row, h_gamma) in data.test_dot.iter().zip(&data.h_dot_test) {
        let spread: BigInt = row.iter().map(|v| v.abs()).sum();
        if t * h_gamma - spread <= BigInt::zero() {
            return false;
        }
    }
    let mut square = t * t * &data.h_square;
    for (h, c) in data.h_dot.iter().zip(&data.self_int) {
        let at_sign: BigInt = c - 2 * t * h.abs();
        square += at_sign.min(BigInt::zero());
    }
    square.is_positive()
}

fn block_curves(model: &IntersectionModel) -> Result<Vec<DivisorClass>> {
    (0..18).map(|i| model.curve(i)).collect()
}

/// Whether `t` is an admissible twist for the model's 18 curves.
pub fn twist_holds(model: &IntersectionModel, t: &BigInt) -> Result<bool> {
    let curves = block_curves(model)?;
    Ok(twist_holds_for(&curve_data(model, &curves)?, t))
}

/// Least `t ≥ 1` such that every `tH − Σ ε_i C_i` is positive on the test
/// classes and has positive square.
pub fn find_twist_t(model: &IntersectionModel) -> Result<BigInt> {
    model.ensure_valid()?;
    let curves = block_curves(model)?;
    let data = curve_data(model, &curves)?;

    // Each test-class condition is monotone in t; start past all of them.
    let mut t = BigInt::one();
    for (row, h_gamma) in data.test_dot.iter().zip(&data.h_dot_test) {
        let spread: BigInt = row.iter().map(|v| v.abs()).sum();
        t = t.max(spread.div_floor(h_gamma) + 1);
    }
    // On a valid model every C_i² < 0, so the square condition is
    // t²H² − 2tΣ|H·C_i| − Σ|C_i²| > 0: a quadratic negative at 0, hence
    // monotone from its first positive integer on.
    let limit = BigInt::from(MAX_TWIST);
    while !twist_holds_for(&data, &t) {
        t += 1;
        if t > limit {
            return Err(Error::NotFound(format!("no twist t ≤ {MAX_TWIST}")));
        }
    }
    Ok(t)
}

/// `⌊e√m⌋`, computed as `⌊√⌊e²m⌋⌋`.
pub fn box_radius(m: &BigInt, e: &BigRational) -> BigInt {
    if m.is_negative() {
        return BigInt::zero();
    }
    let scaled = (e * e * BigRational::from_integer(m.clone()))
        .floor()
        .to_integer();
    scaled.sqrt()
}

/// Whether `x_i² ≤ e²m` for every entry.
pub fn in_guarantee_region(m: &BigInt, x: &[BigInt], e: &BigRational) -> bool {
    let bound = e * e * BigRational::from_integer(m.clone());
    x.iter().all(|v| BigRational::from_integer(v * v) <= bound)
}

/// Exact minima of `M²` and `M·Γ` over `M = mH + Σ x_i C_i`, `|x_i| ≤ k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxBounds {
    pub min_square: BigInt,
    pub min_test: Option<(String, BigInt)>,
}

impl BoxBounds {
    pub fn certified(&self) -> bool {
        self.min_square >= BigInt::from(SQUARE_BOUND)
            && self
                .min_test
                .as_ref()
                .is_none_or(|(_, v)| *v >= BigInt::from(CURVE_BOUND))
    }
}

fn box_bounds(model: &IntersectionModel, data: &CurveData, m: &BigInt, k: &BigInt) -> BoxBounds {
    let mut min_test: Option<(String, BigInt)> = None;
    for ((t, row), h_gamma) in model
        .effective_tests()
        .iter()
        .zip(&data.test_dot)
        .zip(&data.h_dot_test)
    {
        let spread: BigInt = row.iter().map(|v| v.abs()).sum();
        let v = m * h_gamma - k * spread;
        if min_test.as_ref().is_none_or(|(_, w)| v < *w) {
            min_test = Some((t.name.clone(), v));
        }
    }
    let mut min_square = m * m * &data.h_square;
    for (h, c) in data.h_dot.iter().zip(&data.self_int) {
        // Minimize c x² + 2mh x over |x| ≤ k: endpoints, plus the vertex when convex.
        let term = |x: &BigInt| -> BigInt { c * x * x + 2 * m * h * x };
        let mut best = term(k).min(term(&-k));
        if c.is_positive() {
            let vertex = (-(m * h)).div_floor(c);
            for x in [vertex.clone(), vertex + 1] {
                if x.abs() <= *k {
                    best = best.min(term(&x));
                }
            }
        }
        min_square += best;
    }
    BoxBounds {
        min_square,
        min_test,
    }
}

/// The exact worst case of both Reider quantities over the box `|x_i| ≤ k`.
pub fn worst_case_in_box(model: &IntersectionModel, m: &BigInt, k: &BigInt) -> Result<BoxBounds> {
    let curves = block_curves(model)?;
    let data = curve_data(model, &curves)?;
    Ok(box_bounds(model, &data, m, k))
}

/// Least `m₁` such that every `K + mH + Σ x_i C_i` with `m ≥ m₁` and
/// `|x_i| ≤ e√m` passes [`reider_check`].
///
/// `m₁` is never below `(18te)² + 1`; see the module docs for why that
/// region is certified past a small tail.
pub fn m1_threshold(model: &IntersectionModel, e: &BigRational) -> Result<BigInt> {
    if e.is_negative() {
        return Err(Error::invalid(format!("e must be nonnegative, got {e}")));
    }
    let t = find_twist_t(model)?;
    let curves = block_curves(model)?;
    let data = curve_data(model, &curves)?;

    let scale = BigRational::from_integer(18 * &t) * e;
    let base: BigInt = (&scale * &scale).floor().to_integer() + 1;

    let min_h_test = data.h_dot_test.iter().min().cloned();
    // Past the tail the analytic chain applies; with e = 0 the box is {0}
    // and the conditions are exact.
    let tail_ok = |m: &BigInt| {
        let (factor, lin, sq) = if e.is_zero() {
            (BigInt::one(), CURVE_BOUND, SQUARE_BOUND)
        } else {
            (BigInt::from(17), 18 * CURVE_BOUND, 18 * SQUARE_BOUND)
        };
        let lin_ok = min_h_test
            .as_ref()
            .is_none_or(|h| &factor * m * h >= BigInt::from(lin));
        lin_ok && &factor * m * m * &data.h_square >= BigInt::from(sq)
    };
    let mut tail = base.clone();
    while !tail_ok(&tail) {
        tail += 1;
    }
    let mut m = tail - 1;
    while m >= base {
        let k = box_radius(&m, e);
        if !box_bounds(model, &data, &m, &k).certified() {
            return Ok(m + 1);
        }
        m -= 1;
    }
    Ok(base)
}
