//! Representation of even integers by the mixed quadratic form
//!
//! ```text
//! f(x_1, ..., x_18) = a (x_1² + ... + x_9²) + b (x_10² + ... + x_18²) + c (x_1 + ... + x_18)
//! ```
//!
//! with `a, b ≥ 1` and `|a − b| ∈ {1, 2}`.
//!
//! The construction pairs every entry with its negative, so the linear part
//! cancels and `c` never enters. What is left is `2(a·r + b·s)` with `r` and
//! `s` sums of four squares; the numerical semigroup generated by `a` and `b`
//! (after dividing out their gcd) supplies `r` and `s`. When `gcd(a, b) = 2`
//! and `m ≡ 2 (mod 4)` one extra unit pair `x_9 = 1, x_18 = −1` absorbs the
//! residue.
//!
//! Alongside the construction lives an exhaustive oracle ([`m0_exact`]) that
//! decides representability by dynamic programming over all 18 variables,
//! without using the pairing trick.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Number of variables of the form.
pub const ARITY: usize = 18;
/// Size of each coefficient block.
pub const BLOCK: usize = 9;

/// The form `a Σ_{i≤9} x_i² + b Σ_{i≥10} x_i² + c Σ x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedQuadForm {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl MixedQuadForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        if a < BigInt::one() || b < BigInt::one() {
            return Err(Error::invalid(format!(
                "form coefficients must be positive, got a = {a}, b = {b}"
            )));
        }
        let diff = (&a - &b).abs();
        if diff != BigInt::from(1) && diff != BigInt::from(2) {
            return Err(Error::invalid(format!(
                "|a − b| must be 1 or 2, got a = {a}, b = {b}"
            )));
        }
        Ok(MixedQuadForm { a, b, c })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// `gcd(a, b)`, which is 1 or 2 for every valid form.
    pub fn block_gcd(&self) -> BigInt {
        self.a.gcd(&self.b)
    }

    /// The same block coefficients with a different linear coefficient.
    pub fn with_linear(&self, c: impl Into<BigInt>) -> Self {
        MixedQuadForm {
            a: self.a.clone(),
            b: self.b.clone(),
            c: c.into(),
        }
    }

    pub fn evaluate(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != ARITY {
            return Err(Error::invalid(format!(
                "expected {ARITY} entries, got {}",
                x.len()
            )));
        }
        let (first, second) = x.split_at(BLOCK);
        let sq = |block: &[BigInt]| block.iter().map(|v| v * v).sum::<BigInt>();
        let linear: BigInt = x.iter().sum();
        Ok(&self.a * sq(first) + &self.b * sq(second) + &self.c * linear)
    }
}

impl fmt::Display for MixedQuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a = {}, b = {}, c = {})", self.a, self.b, self.c)
    }
}

/// Which construction produced a [`Representation18`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pattern {
    /// `(u, −u, 0, v, −v, 0)` with `u, v` four-tuples.
    Paired,
    /// As `Paired` but with `x_9 = 1` and `x_18 = −1`.
    PairedWithUnitShift,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Paired => f.write_str("paired"),
            Pattern::PairedWithUnitShift => f.write_str("paired+unit-shift"),
        }
    }
}

/// An 18-tuple solving `f(x) = m`, tagged with the pattern that built it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Representation18 {
    x: Vec<BigInt>,
    pattern: Pattern,
}

impl Representation18 {
    fn assemble(first: &FourSquare, second: &FourSquare, pattern: Pattern) -> Self {
        let unit = match pattern {
            Pattern::Paired => BigInt::zero(),
            Pattern::PairedWithUnitShift => BigInt::one(),
        };
        let mut x = Vec::with_capacity(ARITY);
        for block in [(first, unit.clone()), (second, -unit)] {
            let parts = block.0.parts();
            x.extend(parts.iter().map(|&p| p.clone()));
            x.extend(parts.iter().map(|&p| -p));
            x.push(block.1);
        }
        Representation18 { x, pattern }
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.x
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.x
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn max_abs(&self) -> BigInt {
        self.x.iter().map(|v| v.abs()).max().unwrap_or_default()
    }

    /// Whether the entries have the shape their pattern promises.
    pub fn is_well_formed(&self) -> bool {
        if self.x.len() != ARITY {
            return false;
        }
        let paired = [0, BLOCK]
            .iter()
            .all(|&start| (start..start + 4).all(|i| self.x[i + 4] == -&self.x[i]));
        let (u9, u18) = match self.pattern {
            Pattern::Paired => (BigInt::zero(), BigInt::zero()),
            Pattern::PairedWithUnitShift => (BigInt::one(), -BigInt::one()),
        };
        paired && self.x[BLOCK - 1] == u9 && self.x[ARITY - 1] == u18
    }
}

/// `w² + x² + y² + z²` with `w ≥ x ≥ y ≥ z ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FourSquare {
    pub w: BigInt,
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl FourSquare {
    pub fn parts(&self) -> [&BigInt; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn sum_of_squares(&self) -> BigInt {
        self.parts().iter().map(|&p| p * p).sum()
    }
}

/// Lexicographically greatest ordered four-square decomposition of `n`.
///
/// Exhaustive descending search: the first `w` (from `⌊√n⌋` down) whose
/// remainder splits into three squares bounded by `w` wins, and the inner
/// loops descend the same way.
pub fn four_square_decompose(n: &BigInt) -> Result<FourSquare> {
    if n.is_negative() {
        return Err(Error::invalid(format!(
            "four-square decomposition needs n ≥ 0, got {n}"
        )));
    }
    let [w, x, y, z] = match n.to_u64() {
        Some(small) => lex_greatest_four(&small).map(BigInt::from),
        None => {
            let big = n.to_biguint().expect("nonnegative");
            lex_greatest_four(&big).map(BigInt::from)
        }
    };
    Ok(FourSquare { w, x, y, z })
}

fn lex_greatest_four<T>(n: &T) -> [T; 4]
where
    T: Clone + Integer + Roots + From<u8>,
{
    let mut w = n.sqrt();
    loop {
        let rem = n.clone() - w.clone() * w.clone();
        if is_sum_of_three_squares(&rem) {
            if let Some([x, y, z]) = lex_greatest_three(&rem, &w) {
                return [w, x, y, z];
            }
        }
        // Lagrange: some w ≤ ⌊√n⌋ always succeeds before w underflows.
        w = w - T::one();
    }
}

fn lex_greatest_three<T>(rem: &T, cap: &T) -> Option<[T; 3]>
where
    T: Clone + Integer + Roots + From<u8>,
{
    let two = T::from(2u8);
    let mut x = std::cmp::min(rem.sqrt(), cap.clone());
    loop {
        let rest = rem.clone() - x.clone() * x.clone();
        if rest > two.clone() * x.clone() * x.clone() {
            return None;
        }
        if let Some((y, z)) = lex_greatest_two(&rest, &x) {
            return Some([x, y, z]);
        }
        if x.is_zero() {
            return None;
        }
        x = x - T::one();
    }
}

fn lex_greatest_two<T>(rem: &T, cap: &T) -> Option<(T, T)>
where
    T: Clone + Integer + Roots + From<u8>,
{
    let two = T::from(2u8);
    let mut y = std::cmp::min(rem.sqrt(), cap.clone());
    while two.clone() * y.clone() * y.clone() >= *rem {
        let z2 = rem.clone() - y.clone() * y.clone();
        let z = z2.sqrt();
        if z.clone() * z.clone() == z2 {
            return Some((y, z));
        }
        if y.is_zero() {
            break;
        }
        y = y - T::one();
    }
    None
}

/// Legendre: `n` is a sum of three squares unless `n = 4^k (8j + 7)`.
fn is_sum_of_three_squares<T>(n: &T) -> bool
where
    T: Clone + Integer + From<u8>,
{
    if n.is_zero() {
        return true;
    }
    let four = T::from(4u8);
    let mut n = n.clone();
    while n.is_multiple_of(&four) {
        n = n / four.clone();
    }
    n.mod_floor(&T::from(8u8)) != T::from(7u8)
}

fn check_coprime_pair(p: &BigInt, q: &BigInt) -> Result<()> {
    if p < &BigInt::one() || q < &BigInt::one() {
        return Err(Error::invalid(format!(
            "semigroup generators must be positive, got ({p}, {q})"
        )));
    }
    if !p.gcd(q).is_one() {
        return Err(Error::invalid(format!(
            "semigroup generators must be coprime, got ({p}, {q})"
        )));
    }
    Ok(())
}

/// Least `n_0` such that every `n ≥ n_0` is `p·r + q·s` with `r, s ≥ 0`.
///
/// This is the conductor `(p − 1)(q − 1)`, one more than the Frobenius number.
pub fn frobenius_threshold(p: &BigInt, q: &BigInt) -> Result<BigInt> {
    check_coprime_pair(p, q)?;
    Ok((p - 1) * (q - 1))
}

/// Writes `n = p·r + q·s` with `r, s ≥ 0` and `r` minimal.
pub fn frobenius_represent(n: &BigInt, p: &BigInt, q: &BigInt) -> Result<(BigInt, BigInt)> {
    check_coprime_pair(p, q)?;
    let unrepresentable = || {
        Error::NoRepresentation(format!(
            "{n} is not a nonnegative combination of {p} and {q}"
        ))
    };
    if n.is_negative() {
        return Err(unrepresentable());
    }
    // The least r ≥ 0 with q | n − p·r is the residue n·p⁻¹ mod q.
    let r = if q.is_one() {
        BigInt::zero()
    } else {
        let inverse = p.extended_gcd(q).x.mod_floor(q);
        (n.mod_floor(q) * inverse).mod_floor(q)
    };
    let rest = n - p * &r;
    if rest.is_negative() {
        return Err(unrepresentable());
    }
    Ok((r, rest / q))
}

/// Solves `target = 2(a·r + b·s)` with `r, s ≥ 0`, dividing out `gcd(a, b)`.
fn split_between_blocks(target: &BigInt, a: &BigInt, b: &BigInt) -> Option<(BigInt, BigInt)> {
    if target.is_negative() || target.is_odd() {
        return None;
    }
    let half: BigInt = target / 2;
    let g = a.gcd(b);
    if !half.is_multiple_of(&g) {
        return None;
    }
    frobenius_represent(&(half / &g), &(a / &g), &(b / &g)).ok()
}

/// Constructs `x` with `f(x) = m` for even `m`.
///
/// The paired pattern is tried first, then the unit-shift pattern on
/// `m − a − b`. Above [`m0_bound`] the first applicable pattern always
/// succeeds; below it the same two patterns act as a bounded fallback search,
/// and `NoRepresentation` only means the construction does not reach `m`.
/// [`m0_exact`] decides representability itself. The result never depends
/// on `c`.
pub fn represent_even(m: &BigInt, form: &MixedQuadForm) -> Result<Representation18> {
    if m.is_odd() {
        return Err(Error::invalid(format!(
            "only even integers are represented, got {m}"
        )));
    }
    let (a, b) = (form.a(), form.b());
    let attempts = [
        (Pattern::Paired, m.clone()),
        (Pattern::PairedWithUnitShift, m - a - b),
    ];
    for (pattern, target) in attempts {
        if let Some((r, s)) = split_between_blocks(&target, a, b) {
            let first = four_square_decompose(&r)?;
            let second = four_square_decompose(&s)?;
            return Ok(Representation18::assemble(&first, &second, pattern));
        }
    }
    Err(Error::NoRepresentation(format!(
        "{m} has no paired representation by {form}"
    )))
}

/// Every even `m` at or above this value is representable by the construction.
///
/// `gcd(a, b) = 1`: `2·(a − 1)(b − 1)`.
/// `gcd(a, b) = 2`: `4·(a/2 − 1)(b/2 − 1) + a + b`, which covers both residue
/// classes mod 4. Independent of `c`.
pub fn m0_bound(form: &MixedQuadForm) -> BigInt {
    let (a, b) = (form.a(), form.b());
    let g = form.block_gcd();
    if g.is_one() {
        2 * frobenius_threshold(a, b).expect("valid form has coprime blocks")
    } else {
        let conductor = frobenius_threshold(&(a / &g), &(b / &g)).expect("halves are coprime");
        let bound: BigInt = 4 * conductor + a + b;
        if bound.is_odd() {
            bound + 1
        } else {
            bound
        }
    }
}

/// Largest oracle range accepted by [`representable_up_to`].
pub const ORACLE_MAX_LIMIT: i64 = 50_000_000;

/// For each integer `0 ..= limit`, whether some integer `x` has `f(x)` equal to it.
///
/// Exhaustive: every term `α x² + c x` is at least `t_min`, so a solution of
/// `f(x) = v ≤ limit` has each term at most `limit − 17·t_min`. That bounds
/// every variable, and a reachability bitset is pushed through all 18 of them.
pub fn representable_up_to(form: &MixedQuadForm, limit: &BigInt) -> Result<Vec<bool>> {
    let to_i64 = |v: &BigInt, what: &str| {
        v.to_i64()
            .ok_or_else(|| Error::invalid(format!("{what} = {v} is outside the oracle range")))
    };
    let limit = to_i64(limit, "limit")?;
    if limit < 0 {
        return Err(Error::invalid("oracle limit must be nonnegative"));
    }
    if limit > ORACLE_MAX_LIMIT {
        return Err(Error::invalid(format!(
            "oracle limit {limit} exceeds {ORACLE_MAX_LIMIT}"
        )));
    }
    let (a, b, c) = (
        to_i64(form.a(), "a")?,
        to_i64(form.b(), "b")?,
        to_i64(form.c(), "c")?,
    );
    if a > 1 << 20 || b > 1 << 20 || c.abs() > 1 << 20 {
        return Err(Error::invalid("form coefficients too large for the oracle"));
    }

    let term_min = |alpha: i64| {
        // Vertex of α x² + c x sits at −c / 2α; check the two nearest integers.
        let v = (-c).div_euclid(2 * alpha);
        [v, v + 1]
            .iter()
            .map(|&x| alpha * x * x + c * x)
            .min()
            .unwrap()
            .min(0)
    };
    let t_min = term_min(a).min(term_min(b));
    let lo = 18 * t_min;
    let hi = limit - 17 * t_min;
    let term_cap = hi;

    let term_values = |alpha: i64| {
        let reach = ((c.abs() as f64
            + ((c * c) as f64 + 4.0 * alpha as f64 * term_cap as f64).sqrt())
            / (2.0 * alpha as f64))
            .ceil() as i64
            + 2;
        let mut vals: Vec<i64> = (-reach..=reach)
            .map(|x| alpha * x * x + c * x)
            .filter(|&v| v <= term_cap)
            .collect();
        vals.sort_unstable();
        vals.dedup();
        vals
    };

    let width = (hi - lo + 1) as usize;
    let mut reach = Bits::new(width);
    reach.set((0 - lo) as usize);
    for alpha in [a, b] {
        let vals = term_values(alpha);
        for _ in 0..BLOCK {
            let mut next = Bits::new(width);
            for &v in &vals {
                next.or_shifted(&reach, v);
            }
            reach = next;
        }
    }
    Ok((0..=limit).map(|v| reach.get((v - lo) as usize)).collect())
}

/// Least even `m*` such that every even `m ∈ [m*, search_limit]` is
/// representable by the form, decided by the exhaustive oracle.
pub fn m0_exact(form: &MixedQuadForm, search_limit: &BigInt) -> Result<BigInt> {
    if search_limit.is_odd() {
        return Err(Error::invalid("search limit must be even"));
    }
    let bound = m0_bound(form);
    if search_limit < &bound {
        return Err(Error::invalid(format!(
            "search limit {search_limit} is below the constructive bound {bound}"
        )));
    }
    let flags = representable_up_to(form, search_limit)?;
    let limit = flags.len() - 1;
    if !flags[limit] {
        return Err(Error::NotFound(format!(
            "{search_limit} itself is not represented by {form}"
        )));
    }
    let mut start = limit;
    while start >= 2 && flags[start - 2] {
        start -= 2;
    }
    Ok(BigInt::from(start))
}

/// Fixed-width bitset with shifted-or, enough for the oracle's sumset DP.
struct Bits {
    words: Vec<u64>,
    width: usize,
}

impl Bits {
    fn new(width: usize) -> Self {
        Bits {
            words: vec![0; width.div_ceil(64)],
            width,
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// `self |= src << shift`, where a negative shift moves bits down.
    fn or_shifted(&mut self, src: &Bits, shift: i64) {
        let n = self.words.len();
        let (ws, bs) = (
            (shift.unsigned_abs() / 64) as usize,
            (shift.unsigned_abs() % 64) as u32,
        );
        if ws >= n {
            return;
        }
        if shift >= 0 {
            for i in 0..n - ws {
                let w = src.words[i];
                self.words[i + ws] |= w << bs;
                if bs > 0 && i + ws + 1 < n {
                    self.words[i + ws + 1] |= w >> (64 - bs);
                }
            }
        } else {
            for i in ws..n {
                let w = src.words[i];
                self.words[i - ws] |= w >> bs;
                if bs > 0 && i > ws {
                    self.words[i - ws - 1] |= w << (64 - bs);
                }
            }
        }
        let spare = self.words.len() * 64 - self.width;
        if spare > 0 {
            self.words[n - 1] &= u64::MAX >> spare;
        }
    }
}
