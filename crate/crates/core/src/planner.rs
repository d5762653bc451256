//! Genus witnesses on a model with curve blocks.
//!
//! Write `g_m = p_a(K + mH)`. For a target genus `g` the planner finds the
//! least `m` with `g_{m−2} ≤ g ≤ g_{m−1}`, sets the even gap
//! `T = 2(g_m − g)`, represents `T` by the gap form of
//! [`exact_gap_form`](crate::lattice::exact_gap_form) and returns the class
//! `K + mH + Σ x_i C_i`, whose arithmetic genus is `g_m − T/2 = g`, together
//! with a Reider report certifying it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ampleness::{in_guarantee_region, reider_check, ReiderReport};
use crate::error::{Error, Result};
use crate::lattice::{
    adjoint_class, arithmetic_genus, exact_gap_form, DivisorClass, IntersectionModel,
};
use crate::quadform::represent_even;

/// Default cap on how many genera an empirical threshold scan may visit.
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000;

/// `g_m = p_a(K + mH)`.
pub fn g_sequence(model: &IntersectionModel, m: &BigInt) -> Result<BigInt> {
    arithmetic_genus(model, &adjoint_class(model, m, None)?)
}

/// Least `m` with `g_m > g_{m−1}`.
///
/// `d_m = g_m − g_{m−1}` is affine in `m` with slope `H²`, so the answer
/// follows from `d_0` alone.
pub fn first_increasing(model: &IntersectionModel) -> Result<BigInt> {
    let h = model.polarization();
    let h2 = crate::lattice::intersect(model, h, h)?;
    if !h2.is_positive() {
        return Err(Error::invalid("H² must be positive"));
    }
    let d0 = g_sequence(model, &BigInt::zero())? - g_sequence(model, &-BigInt::one())?;
    Ok((-d0).div_floor(&h2) + 1)
}

/// Smallest `m_min` for which `g` is strictly increasing from `m_min − 2` on.
pub fn default_m_min(model: &IntersectionModel) -> Result<BigInt> {
    Ok(first_increasing(model)? + 1)
}

/// Least `m ≥ m_min` with `g_{m−2} ≤ g ≤ g_{m−1}`.
pub fn locate_interval(model: &IntersectionModel, g: &BigInt, m_min: &BigInt) -> Result<BigInt> {
    if m_min - 1 < first_increasing(model)? {
        return Err(Error::invalid(format!(
            "g_m is not strictly increasing from m = {} on",
            m_min - 2
        )));
    }
    let floor = g_sequence(model, &(m_min - 2))?;
    if g < &floor {
        return Err(Error::OutOfRange(format!(
            "genus {g} is below g_{{m_min − 2}} = {floor}"
        )));
    }
    let reaches = |m: &BigInt| -> Result<bool> { Ok(&g_sequence(model, &(m - 1))? >= g) };
    // Gallop to an upper end, then bisect on the monotone predicate.
    let mut lo = m_min.clone();
    let mut step = BigInt::one();
    let mut hi = m_min.clone();
    while !reaches(&hi)? {
        lo = &hi + 1;
        hi = &hi + &step;
        step *= 2;
    }
    while lo < hi {
        let mid = (&lo + &hi) / 2;
        if reaches(&mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// A certified class of genus `g` of the form `K + mH + Σ x_i C_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusWitness {
    pub g: BigInt,
    pub m: BigInt,
    pub x: Vec<BigInt>,
    pub divisor: DivisorClass,
    pub e_used: BigRational,
    pub reider: ReiderReport,
}

/// Least integer `e` with `e²m ≥ 2(g_m − g_{m−2})` for every `m ≥ m_min`.
///
/// `2(g_m − g_{m−2})` is affine in `m` with slope `4H²`. Starting from the
/// least `e` with `e² ≥ 4H² + 2` the slope of `e²m` is larger, so the
/// inequality holds for all `m ≥ m_min` once it holds at `m_min`.
pub fn choose_e(model: &IntersectionModel, m_min: &BigInt) -> Result<BigInt> {
    let h = model.polarization();
    let h2 = crate::lattice::intersect(model, h, h)?;
    let floor_sq: BigInt = 4 * &h2 + 2;
    let mut e = floor_sq.sqrt();
    if &e * &e < floor_sq {
        e += 1;
    }
    let need = 2 * (g_sequence(model, m_min)? - g_sequence(model, &(m_min - 2))?);
    while &e * &e * m_min < need {
        e += 1;
    }
    Ok(e)
}

/// Witness search bound to one validated model and starting `m`.
#[derive(Clone, Debug)]
pub struct Planner<'a> {
    model: &'a IntersectionModel,
    m_min: BigInt,
    e: BigInt,
}

impl<'a> Planner<'a> {
    pub fn new(model: &'a IntersectionModel, m_min: &BigInt) -> Result<Self> {
        model.ensure_valid()?;
        model
            .curve_blocks()
            .ok_or_else(|| Error::invalid("genus planning needs a model with curve blocks"))?;
        if m_min - 1 < first_increasing(model)? {
            return Err(Error::invalid(format!(
                "g_m is not strictly increasing from m = {} on",
                m_min - 2
            )));
        }
        if !m_min.is_positive() {
            return Err(Error::invalid("m_min must be positive"));
        }
        let e = choose_e(model, m_min)?;
        Ok(Planner {
            model,
            m_min: m_min.clone(),
            e,
        })
    }

    /// A planner starting at [`default_m_min`].
    pub fn with_default_start(model: &'a IntersectionModel) -> Result<Self> {
        Self::new(model, &default_m_min(model)?)
    }

    pub fn m_min(&self) -> &BigInt {
        &self.m_min
    }

    pub fn e_used(&self) -> &BigInt {
        &self.e
    }

    /// Smallest genus this planner can be asked about.
    pub fn lowest_genus(&self) -> Result<BigInt> {
        g_sequence(self.model, &(&self.m_min - 2))
    }

    pub fn witness(&self, g: &BigInt) -> Result<GenusWitness> {
        let model = self.model;
        let m = locate_interval(model, g, &self.m_min)?;
        let gap = 2 * (g_sequence(model, &m)? - g);
        let form = exact_gap_form(model, &m)?.form;
        let rep = represent_even(&gap, &form).map_err(|err| match err {
            Error::NoRepresentation(msg) => {
                Error::NoWitness(format!("genus {g} at m = {m}: {msg}"))
            }
            other => other,
        })?;
        let x = rep.into_entries();
        let divisor = adjoint_class(model, &m, Some(&x))?;
        let reider = reider_check(model, &divisor)?;
        if !reider.passed {
            let worst = reider
                .worst_test
                .as_ref()
                .map(|(n, v)| format!(", worst test {n} = {v}"))
                .unwrap_or_default();
            return Err(Error::CertificationFailed(format!(
                "genus {g} at m = {m}: (D − K)² = {}{worst}",
                reider.square_value
            )));
        }
        let w = GenusWitness {
            g: g.clone(),
            m,
            x,
            divisor,
            e_used: BigRational::from_integer(self.e.clone()),
            reider,
        };
        let problems = check_witness(model, &w);
        if !problems.is_empty() {
            return Err(Error::WitnessInvariant(problems.join("; ")));
        }
        Ok(w)
    }
}

/// Finds and certifies a witness for `g` using `m ≥ m_min`.
pub fn witness(model: &IntersectionModel, g: &BigInt, m_min: &BigInt) -> Result<GenusWitness> {
    Planner::new(model, m_min)?.witness(g)
}

/// Recomputes every witness invariant from scratch; empty means sound.
pub fn check_witness(model: &IntersectionModel, w: &GenusWitness) -> Vec<String> {
    let mut problems = Vec::new();
    match adjoint_class(model, &w.m, Some(&w.x)) {
        Ok(d) if d == w.divisor => {}
        Ok(_) => problems.push("divisor is not K + mH + Σ x_i C_i".to_string()),
        Err(e) => problems.push(format!("cannot rebuild divisor: {e}")),
    }
    match arithmetic_genus(model, &w.divisor) {
        Ok(g) if g == w.g => {}
        Ok(g) => problems.push(format!("arithmetic genus is {g}, not {}", w.g)),
        Err(e) => problems.push(format!("cannot compute genus: {e}")),
    }
    if !in_guarantee_region(&w.m, &w.x, &w.e_used) {
        problems.push(format!("some x_i² exceeds e²m with e = {}", w.e_used));
    }
    match reider_check(model, &w.divisor) {
        Ok(r) if r.passed && r == w.reider => {}
        Ok(r) if !r.passed => problems.push("Reider check fails".to_string()),
        Ok(_) => problems.push("stored Reider report differs from recomputation".to_string()),
        Err(e) => problems.push(format!("cannot run Reider check: {e}")),
    }
    problems
}

/// Outcome of an empirical threshold scan.
#[derive(Clone, Debug)]
pub struct G0Report<W> {
    /// Least `G` such that every genus in `[G, G + span]` was certified.
    pub g0: BigInt,
    pub span: u64,
    pub m_min: BigInt,
    /// Witnesses for `G ..= G + span`, in order.
    pub witnesses: Vec<W>,
}

/// Scans genera upward from `start` for the first run of `span + 1`
/// consecutive successes. Arithmetic and certification failures restart the
/// run; any other error aborts.
pub(crate) fn scan_for_run<W>(
    start: BigInt,
    span: u64,
    cap: u64,
    mut attempt: impl FnMut(&BigInt) -> Result<W>,
) -> Result<(BigInt, Vec<W>)> {
    let mut run_start = start.clone();
    let mut run = Vec::new();
    let mut g = start.clone();
    loop {
        if &g - &start > BigInt::from(cap) {
            return Err(Error::NotFound(format!(
                "no run of {} certified genera within {cap} of {start}",
                span + 1
            )));
        }
        match attempt(&g) {
            Ok(w) => {
                run.push(w);
                if &g - &run_start == BigInt::from(span) {
                    return Ok((run_start, run));
                }
            }
            Err(Error::NoWitness(_)) | Err(Error::CertificationFailed(_)) => {
                run.clear();
                run_start = &g + 1;
            }
            Err(e) => return Err(e),
        }
        g += 1;
    }
}

/// Empirical genus threshold with the default start and scan cap.
///
/// This is an observation over `[g0, g0 + span]`, not a proof that every
/// larger genus is attained.
pub fn empirical_g0(model: &IntersectionModel, span: u64) -> Result<G0Report<GenusWitness>> {
    let planner = Planner::with_default_start(model)?;
    empirical_g0_with(&planner, span, DEFAULT_SCAN_CAP)
}

pub fn empirical_g0_with(
    planner: &Planner<'_>,
    span: u64,
    cap: u64,
) -> Result<G0Report<GenusWitness>> {
    let (g0, witnesses) = scan_for_run(planner.lowest_genus()?, span, cap, |g| planner.witness(g))?;
    Ok(G0Report {
        g0,
        span,
        m_min: planner.m_min().clone(),
        witnesses,
    })
}

/// `min(g1, g2, g3)`: on a product of three curves every smooth irreducible
/// curve has genus at least this, so no single genus threshold serves all
/// threefolds.
pub fn product_lower_bound(g1: &BigInt, g2: &BigInt, g3: &BigInt) -> Result<BigInt> {
    if [g1, g2, g3].iter().any(|g| g.is_negative()) {
        return Err(Error::invalid("genera must be nonnegative"));
    }
    Ok(g1.min(g2).min(g3).clone())
}
