//! Nodal curves through blowup bookkeeping.
//!
//! Blowing up `r` points adds exceptional classes `E_i` with `E_i² = −1`,
//! orthogonal to each other and to every pulled-back class; the canonical
//! class becomes `f*K + Σ E_i`. With `L = m·f*H − 3ΣE_i` the adjoint class
//! `K̃ + L = f*(K + mH) − 2ΣE_i` has arithmetic genus `p_a(K + mH) − r`, and
//! a smooth member pushes down to a curve in `|K + mH|` with `r` nodes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ampleness::{reider_check, ReiderReport};
use crate::error::{Error, Result};
use crate::lattice::{arithmetic_genus, intersect, DivisorClass, IntersectionModel, TestClass};
use crate::planner::{first_increasing, g_sequence, scan_for_run, G0Report, DEFAULT_SCAN_CAP};

/// Largest node count [`blowup_extend`] accepts; the Gram matrix is dense.
pub const MAX_BLOWUP_POINTS: i64 = 100_000;

#[derive(Clone, Debug)]
pub struct BlowupModel {
    base: IntersectionModel,
    r: usize,
    lattice: IntersectionModel,
}

impl BlowupModel {
    pub fn base(&self) -> &IntersectionModel {
        &self.base
    }

    pub fn points(&self) -> usize {
        self.r
    }

    /// The extended lattice with canonical class `f*K + ΣE_i`.
    pub fn lattice(&self) -> &IntersectionModel {
        &self.lattice
    }

    /// Pullback of a base class.
    pub fn pullback(&self, d: &DivisorClass) -> DivisorClass {
        d.extended(self.lattice.dim())
    }

    /// `E_1 + … + E_r`.
    pub fn exceptional_sum(&self) -> DivisorClass {
        let n = self.base.dim();
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs.extend(std::iter::repeat_n(BigInt::one(), self.r));
        DivisorClass::new(coeffs)
    }

    /// `E_i`, `0 ≤ i < r`.
    pub fn exceptional(&self, i: usize) -> DivisorClass {
        DivisorClass::basis(self.lattice.dim(), self.base.dim() + i)
    }
}

pub fn blowup_extend(base: &IntersectionModel, r: i64) -> Result<BlowupModel> {
    if r < 0 {
        return Err(Error::invalid(format!("cannot blow up {r} points")));
    }
    if r > MAX_BLOWUP_POINTS {
        return Err(Error::invalid(format!(
            "at most {MAX_BLOWUP_POINTS} points"
        )));
    }
    base.ensure_valid()?;
    let r = r as usize;
    let n = base.dim();
    let dim = n + r;

    let mut generators = base.generators().to_vec();
    generators.extend((1..=r).map(|i| format!("E{i}")));
    let mut gram = vec![vec![BigInt::zero(); dim]; dim];
    for (i, row) in base.gram().iter().enumerate() {
        gram[i][..n].clone_from_slice(row);
    }
    for (i, row) in gram.iter_mut().enumerate().skip(n) {
        row[i] = -BigInt::one();
    }

    let mut canonical = base.canonical().extended(dim);
    let mut tests: Vec<TestClass> = base
        .effective_tests()
        .iter()
        .map(|t| TestClass {
            name: t.name.clone(),
            class: t.class.extended(dim),
        })
        .collect();
    for (i, name) in generators.iter().enumerate().skip(n) {
        let e = DivisorClass::basis(dim, i);
        canonical = &canonical + &e;
        tests.push(TestClass {
            name: name.clone(),
            class: e,
        });
    }
    let lattice = IntersectionModel::from_parts(
        generators,
        gram,
        canonical,
        base.polarization().extended(dim),
        tests,
        base.curve_blocks().cloned(),
    );
    Ok(BlowupModel {
        base: base.clone(),
        r,
        lattice,
    })
}

/// Numeric trace of `L ≡ (m − 3⌊m/4⌋)·f*H + 3C̃₁` with `C₁ ∈ |⌊m/4⌋H|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub quarter: BigInt,
    /// `m − 3⌊m/4⌋`.
    pub h_coefficient: BigInt,
    pub nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalClasses {
    /// `L_{m,r} = m·f*H − 3ΣE_i`.
    pub l_class: DivisorClass,
    /// `K̃ + L_{m,r}`.
    pub adjoint: DivisorClass,
    pub decomposition: DecompositionCertificate,
}

pub fn nodal_class(blowup: &BlowupModel, m: &BigInt) -> Result<NodalClasses> {
    let h = blowup.pullback(blowup.base.polarization());
    let e_sum = blowup.exceptional_sum();
    let l_class = &(m * &h) - &(&BigInt::from(3) * &e_sum);
    let adjoint = blowup.lattice.canonical() + &l_class;

    let base_adjoint = blowup.base.canonical() + &(m * blowup.base.polarization());
    let expected = &blowup.pullback(&base_adjoint) - &(&BigInt::from(2) * &e_sum);
    if adjoint != expected {
        return Err(Error::WitnessInvariant(
            "K̃ + L differs from f*(K + mH) − 2ΣE".into(),
        ));
    }
    let quarter = m.div_floor(&BigInt::from(4));
    let h_coefficient: BigInt = m - 3 * &quarter;
    Ok(NodalClasses {
        l_class,
        adjoint,
        decomposition: DecompositionCertificate {
            nonnegative: !h_coefficient.is_negative(),
            quarter,
            h_coefficient,
        },
    })
}

/// A certified curve class with `r` nodes and geometric genus `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalWitness {
    pub g: BigInt,
    pub m: BigInt,
    pub r: BigInt,
    pub l_class: DivisorClass,
    pub adjoint: DivisorClass,
    pub reider: ReiderReport,
}

/// Least `m` with `g_m > g_{m−1}`: the first `m` where a node count
/// `1 ≤ r ≤ d_m` exists.
pub fn default_nodal_m_min(base: &IntersectionModel) -> Result<BigInt> {
    first_increasing(base)
}

/// Least `m ≥ m_min` with `g_{m−1} ≤ g ≤ g_m − 1`.
pub fn locate_nodal(base: &IntersectionModel, g: &BigInt, m_min: &BigInt) -> Result<BigInt> {
    if m_min < &first_increasing(base)? {
        return Err(Error::invalid(format!(
            "g_m is not strictly increasing from m = {} on",
            m_min - 1
        )));
    }
    let floor = g_sequence(base, &(m_min - 1))?;
    if g < &floor {
        return Err(Error::OutOfRange(format!(
            "genus {g} is below g_{{m_min − 1}} = {floor}"
        )));
    }
    let mut m = m_min.clone();
    let mut step = BigInt::one();
    while &g_sequence(base, &m)? <= g {
        m += &step;
        step *= 2;
    }
    let mut lo = m_min.clone();
    let mut hi = m;
    while lo < hi {
        let mid = (&lo + &hi) / 2;
        if &g_sequence(base, &mid)? > g {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Finds `m`, sets `r = g_m − g`, blows up `r` points and certifies
/// `K̃ + L_{m,r}`.
///
/// Only the least admissible `m` is tried: at any larger `m'` the node count
/// `g_{m'} − g` would exceed `d_{m'}`.
pub fn nodal_witness(base: &IntersectionModel, g: &BigInt, m_min: &BigInt) -> Result<NodalWitness> {
    base.ensure_valid()?;
    let m = locate_nodal(base, g, m_min)?;
    let gm = g_sequence(base, &m)?;
    let r = &gm - g;
    let r_small = r
        .to_i64()
        .ok_or_else(|| Error::invalid(format!("node count {r} too large")))?;
    let blowup = blowup_extend(base, r_small)?;
    let classes = nodal_class(&blowup, &m)?;
    let reider = reider_check(blowup.lattice(), &classes.adjoint)?;
    if !reider.passed {
        return Err(Error::CertificationFailed(format!(
            "genus {g} at m = {m} with {r} nodes: L² = {}",
            reider.square_value
        )));
    }
    let w = NodalWitness {
        g: g.clone(),
        m,
        r,
        l_class: classes.l_class,
        adjoint: classes.adjoint,
        reider,
    };
    let problems = check_nodal_witness(base, &w);
    if !problems.is_empty() {
        return Err(Error::WitnessInvariant(problems.join("; ")));
    }
    Ok(w)
}

/// Rebuilds the blowup and rechecks every invariant; empty means sound.
pub fn check_nodal_witness(base: &IntersectionModel, w: &NodalWitness) -> Vec<String> {
    let mut problems = Vec::new();
    let (gm, gm1) = match (g_sequence(base, &w.m), g_sequence(base, &(&w.m - 1))) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return vec!["cannot evaluate g_m on the base".into()],
    };
    let d_m = &gm - &gm1;
    if w.r < BigInt::one() || w.r > d_m {
        problems.push(format!("r = {} outside [1, d_m = {d_m}]", w.r));
    }
    if w.g != &gm - &w.r {
        problems.push(format!("g = {} is not g_m − r = {}", w.g, &gm - &w.r));
    }
    let Some(r) = w.r.to_i64() else {
        problems.push("node count does not fit".into());
        return problems;
    };
    let blowup = match blowup_extend(base, r) {
        Ok(b) => b,
        Err(e) => {
            problems.push(format!("cannot rebuild blowup: {e}"));
            return problems;
        }
    };
    let lattice = blowup.lattice();
    let pair = |a: &DivisorClass, b: &DivisorClass| intersect(lattice, a, b);
    match nodal_class(&blowup, &w.m) {
        Ok(c) if c.l_class == w.l_class && c.adjoint == w.adjoint => {}
        _ => problems.push("classes differ from m·f*H − 3ΣE and its adjoint".into()),
    }
    match arithmetic_genus(lattice, &w.adjoint) {
        Ok(pa) if pa == w.g => {}
        Ok(pa) => problems.push(format!("strict transform has p_a = {pa}, not {}", w.g)),
        Err(e) => problems.push(format!("cannot compute genus: {e}")),
    }
    for i in 0..blowup.points() {
        let e = blowup.exceptional(i);
        if !matches!(pair(&w.l_class, &e), Ok(v) if v == BigInt::from(3)) {
            problems.push(format!("L·E{} ≠ 3", i + 1));
        }
        if !matches!(pair(&w.adjoint, &e), Ok(v) if v == BigInt::from(2)) {
            problems.push(format!("(K̃ + L)·E{} ≠ 2", i + 1));
        }
    }
    let h2 = pair(lattice.polarization(), lattice.polarization()).unwrap_or_default();
    let expected_sq = &w.m * &w.m * h2 - 9 * &w.r;
    match pair(&w.l_class, &w.l_class) {
        Ok(sq) if sq == expected_sq && sq >= BigInt::from(10) => {}
        Ok(sq) => problems.push(format!(
            "L² = {sq}, expected m²H² − 9r = {expected_sq} ≥ 10"
        )),
        Err(e) => problems.push(e.to_string()),
    }
    match reider_check(lattice, &w.adjoint) {
        Ok(rep) if rep.passed && rep == w.reider => {}
        _ => problems.push("Reider report does not reproduce".into()),
    }
    problems
}

/// Empirical threshold for nodal witnesses from [`default_nodal_m_min`].
pub fn empirical_nodal_g0(base: &IntersectionModel, span: u64) -> Result<G0Report<NodalWitness>> {
    empirical_nodal_g0_with(base, span, &default_nodal_m_min(base)?, DEFAULT_SCAN_CAP)
}

pub fn empirical_nodal_g0_with(
    base: &IntersectionModel,
    span: u64,
    m_min: &BigInt,
    cap: u64,
) -> Result<G0Report<NodalWitness>> {
    base.ensure_valid()?;
    let start = g_sequence(base, &(m_min - 1))?;
    let (g0, witnesses) = scan_for_run(start, span, cap, |g| nodal_witness(base, g, m_min))?;
    Ok(G0Report {
        g0,
        span,
        m_min: m_min.clone(),
        witnesses,
    })
}
