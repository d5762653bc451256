//! Intersection lattices: named divisor classes with an integer Gram matrix.
//!
//! A model carries a canonical class `K`, a polarization `H`, a set of
//! effective test classes standing in for curves, and optionally two blocks
//! of nine pairwise disjoint curves `C_1..C_9` (self-intersection `−a`) and
//! `C_10..C_18` (self-intersection `−(a + 2)`) that meet every other
//! generator identically.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::quadform::{MixedQuadForm, ARITY, BLOCK};

/// Integer coefficient vector over a model's generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    coeffs: Vec<BigInt>,
}

impl DivisorClass {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        DivisorClass { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        DivisorClass {
            coeffs: vec![BigInt::zero(); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut d = Self::zero(dim);
        d.coeffs[index] = BigInt::one();
        d
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The same class in a larger lattice, padded with zero coefficients.
    pub fn extended(&self, dim: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim, BigInt::zero());
        DivisorClass { coeffs }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        assert_eq!(
            self.dim(),
            other.dim(),
            "divisor classes from different lattices"
        );
        DivisorClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: Self) -> DivisorClass {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: Self) -> DivisorClass {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul<&DivisorClass> for &BigInt {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coeffs: rhs.coeffs.iter().map(|a| self * a).collect(),
        }
    }
}

/// Indices of the two curve blocks, in emission order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveBlocks {
    pub a_block: Vec<usize>,
    pub b_block: Vec<usize>,
}

impl CurveBlocks {
    /// All 18 curve indices: the a-block followed by the b-block.
    pub fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.a_block.iter().chain(&self.b_block).copied()
    }
}

/// A declared effective class used as a stand-in for irreducible curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestClass {
    pub name: String,
    pub class: DivisorClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionModel {
    generators: Vec<String>,
    gram: Vec<Vec<BigInt>>,
    canonical: DivisorClass,
    polarization: DivisorClass,
    tests: Vec<TestClass>,
    blocks: Option<CurveBlocks>,
}

impl IntersectionModel {
    /// Assembles a model, checking only its shape. Axioms are checked by
    /// [`validate_model`].
    pub fn new(
        generators: Vec<String>,
        gram: Vec<Vec<BigInt>>,
        effective_tests: &[String],
        blocks: Option<(Vec<String>, Vec<String>)>,
    ) -> Result<Self> {
        let n = generators.len();
        for (i, name) in generators.iter().enumerate() {
            if generators[..i].contains(name) {
                return Err(Error::invalid(format!("duplicate generator {name:?}")));
            }
        }
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(format!(
                "gram must be {n}×{n} to match the generator list"
            )));
        }
        let index = |name: &str| {
            generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| Error::invalid(format!("unknown generator {name:?}")))
        };
        let canonical = DivisorClass::basis(n, index("K")?);
        let polarization = DivisorClass::basis(n, index("H")?);
        let tests = effective_tests
            .iter()
            .map(|name| {
                Ok(TestClass {
                    name: name.clone(),
                    class: DivisorClass::basis(n, index(name)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let blocks = match blocks {
            None => None,
            Some((a_names, b_names)) => {
                if a_names.len() != BLOCK || b_names.len() != BLOCK {
                    return Err(Error::invalid(format!(
                        "curve blocks must list {BLOCK} names each, got {} and {}",
                        a_names.len(),
                        b_names.len()
                    )));
                }
                let a_block = a_names
                    .iter()
                    .map(|s| index(s))
                    .collect::<Result<Vec<_>>>()?;
                let b_block = b_names
                    .iter()
                    .map(|s| index(s))
                    .collect::<Result<Vec<_>>>()?;
                let blocks = CurveBlocks { a_block, b_block };
                let all: Vec<usize> = blocks.all().collect();
                for (i, g) in all.iter().enumerate() {
                    if all[..i].contains(g) || *g == canonical_index(&canonical) {
                        return Err(Error::invalid(format!(
                            "curve {:?} listed twice or collides with K",
                            generators[*g]
                        )));
                    }
                }
                Some(blocks)
            }
        };
        Ok(IntersectionModel {
            generators,
            gram,
            canonical,
            polarization,
            tests,
            blocks,
        })
    }

    /// A model whose canonical class and test classes are arbitrary vectors,
    /// as produced by blowing up.
    pub(crate) fn from_parts(
        generators: Vec<String>,
        gram: Vec<Vec<BigInt>>,
        canonical: DivisorClass,
        polarization: DivisorClass,
        tests: Vec<TestClass>,
        blocks: Option<CurveBlocks>,
    ) -> Self {
        IntersectionModel {
            generators,
            gram,
            canonical,
            polarization,
            tests,
            blocks,
        }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// The basis class of a named generator.
    pub fn generator(&self, name: &str) -> Result<DivisorClass> {
        self.index_of(name)
            .map(|i| DivisorClass::basis(self.dim(), i))
            .ok_or_else(|| Error::invalid(format!("unknown generator {name:?}")))
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn polarization(&self) -> &DivisorClass {
        &self.polarization
    }

    pub fn effective_tests(&self) -> &[TestClass] {
        &self.tests
    }

    pub fn curve_blocks(&self) -> Option<&CurveBlocks> {
        self.blocks.as_ref()
    }

    pub(crate) fn require_blocks(&self) -> Result<&CurveBlocks> {
        self.blocks
            .as_ref()
            .ok_or_else(|| Error::invalid("model has no curve blocks"))
    }

    /// The `i`-th curve class, `0 ≤ i < 18`, a-block first.
    pub fn curve(&self, i: usize) -> Result<DivisorClass> {
        let blocks = self.require_blocks()?;
        let idx = blocks
            .all()
            .nth(i)
            .ok_or_else(|| Error::invalid(format!("curve index {i} out of range")))?;
        Ok(DivisorClass::basis(self.dim(), idx))
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_model(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    fn check_dim(&self, d: &DivisorClass) -> Result<()> {
        if d.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "class has {} coefficients, model has {} generators",
                d.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[i][j]
    }

    /// The self-intersection `−a` of the a-block, read off its first curve.
    pub(crate) fn block_a(&self) -> Result<BigInt> {
        let blocks = self.require_blocks()?;
        let first = blocks.a_block[0];
        Ok(-self.entry(first, first))
    }
}

fn canonical_index(k: &DivisorClass) -> usize {
    k.coeffs()
        .iter()
        .position(One::is_one)
        .unwrap_or(usize::MAX)
}

/// A single failed axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    GramNotSymmetric {
        row: String,
        col: String,
    },
    OddAdjoint {
        generator: String,
    },
    PolarizationNotPositive {
        square: BigInt,
    },
    TestClassNotPositive {
        name: String,
        value: BigInt,
    },
    BlocksNotDisjoint {
        first: String,
        second: String,
        value: BigInt,
    },
    NonPositiveA {
        a: BigInt,
    },
    NonUniformSelfIntersection {
        curve: String,
        expected: BigInt,
        found: BigInt,
    },
    SelfIntersectionGap {
        a_self: BigInt,
        b_self: BigInt,
    },
    NonUniformIntersection {
        generator: String,
        curve: String,
    },
    GenusGap {
        a_curve: String,
        b_curve: String,
        twice_gap: BigInt,
    },
}

impl Violation {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::GramNotSymmetric { .. } => "gram_not_symmetric",
            Violation::OddAdjoint { .. } => "odd_adjoint",
            Violation::PolarizationNotPositive { .. } => "polarization_not_positive",
            Violation::TestClassNotPositive { .. } => "test_class_not_positive",
            Violation::BlocksNotDisjoint { .. } => "blocks_not_disjoint",
            Violation::NonPositiveA { .. } => "non_positive_a",
            Violation::NonUniformSelfIntersection { .. } => "non_uniform_self_intersection",
            Violation::SelfIntersectionGap { .. } => "self_intersection_gap",
            Violation::NonUniformIntersection { .. } => "non_uniform_intersection",
            Violation::GenusGap { .. } => "genus_gap",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GramNotSymmetric { row, col } => {
                write!(f, "gram not symmetric: {row}·{col} ≠ {col}·{row}")
            }
            Violation::OddAdjoint { generator } => {
                write!(f, "{generator}·{generator} + {generator}·K is odd")
            }
            Violation::PolarizationNotPositive { square } => {
                write!(f, "H·H = {square} is not positive")
            }
            Violation::TestClassNotPositive { name, value } => {
                write!(f, "H·{name} = {value} is not positive")
            }
            Violation::BlocksNotDisjoint {
                first,
                second,
                value,
            } => {
                write!(f, "blocks not disjoint: {first}·{second} = {value}")
            }
            Violation::NonPositiveA { a } => {
                write!(f, "a-block self-intersection −a has a = {a} ≤ 0")
            }
            Violation::NonUniformSelfIntersection {
                curve,
                expected,
                found,
            } => {
                write!(
                    f,
                    "non-uniform self-intersection: {curve}² = {found}, expected {expected}"
                )
            }
            Violation::SelfIntersectionGap { a_self, b_self } => write!(
                f,
                "self-intersection gap ≠ 2: a-block {a_self}, b-block {b_self}"
            ),
            Violation::NonUniformIntersection { generator, curve } => {
                write!(f, "{curve}·{generator} differs from the first curve's")
            }
            Violation::GenusGap {
                a_curve,
                b_curve,
                twice_gap,
            } => write!(
                f,
                "p_a({a_curve}) − p_a({b_curve}) ≠ 1 (twice the gap is {twice_gap})"
            ),
        }
    }
}

/// Every axiom breach of the model; empty means valid.
pub fn validate_model(model: &IntersectionModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = model.dim();
    let name = |i: usize| model.generators[i].clone();

    for i in 0..n {
        for j in i + 1..n {
            if model.entry(i, j) != model.entry(j, i) {
                out.push(Violation::GramNotSymmetric {
                    row: name(i),
                    col: name(j),
                });
            }
        }
    }

    let pair = |d1: &DivisorClass, d2: &DivisorClass| pairing(model, d1, d2);
    let k = model.canonical();
    for i in 0..n {
        let g = DivisorClass::basis(n, i);
        if (pair(&g, &g) + pair(&g, k)).is_odd() {
            out.push(Violation::OddAdjoint { generator: name(i) });
        }
    }

    let h = model.polarization();
    let h2 = pair(h, h);
    if !h2.is_positive() {
        out.push(Violation::PolarizationNotPositive { square: h2 });
    }
    for t in model.effective_tests() {
        let v = pair(h, &t.class);
        if !v.is_positive() {
            out.push(Violation::TestClassNotPositive {
                name: t.name.clone(),
                value: v,
            });
        }
    }

    if let Some(blocks) = model.curve_blocks() {
        let curves: Vec<usize> = blocks.all().collect();
        for (x, &i) in curves.iter().enumerate() {
            for &j in &curves[x + 1..] {
                let v = model.entry(i, j);
                if !v.is_zero() {
                    out.push(Violation::BlocksNotDisjoint {
                        first: name(i),
                        second: name(j),
                        value: v.clone(),
                    });
                }
            }
        }

        let a0 = blocks.a_block[0];
        let b0 = blocks.b_block[0];
        let a_self = model.entry(a0, a0).clone();
        let b_self = model.entry(b0, b0).clone();
        if !(-&a_self).is_positive() {
            out.push(Violation::NonPositiveA { a: -&a_self });
        }
        if &a_self - &b_self != BigInt::from(2) {
            out.push(Violation::SelfIntersectionGap {
                a_self: a_self.clone(),
                b_self: b_self.clone(),
            });
        }
        for (block, expected) in [(&blocks.a_block, &a_self), (&blocks.b_block, &b_self)] {
            for &i in &block[1..] {
                if model.entry(i, i) != expected {
                    out.push(Violation::NonUniformSelfIntersection {
                        curve: name(i),
                        expected: expected.clone(),
                        found: model.entry(i, i).clone(),
                    });
                }
            }
        }

        // Every class not in the blocks must meet all curves alike; K is
        // checked through its vector so blown-up canonicals are covered too.
        let first = DivisorClass::basis(n, curves[0]);
        let mut others: Vec<(String, DivisorClass)> = (0..n)
            .filter(|i| !curves.contains(i))
            .map(|i| (name(i), DivisorClass::basis(n, i)))
            .collect();
        if !others.iter().any(|(_, g)| g == k) {
            others.push(("K".into(), k.clone()));
        }
        for (gname, g) in &others {
            let reference = pair(&first, g);
            for &c in &curves[1..] {
                if pair(&DivisorClass::basis(n, c), g) != reference {
                    out.push(Violation::NonUniformIntersection {
                        generator: gname.clone(),
                        curve: name(c),
                    });
                }
            }
        }

        let twice_genus = |i: usize| {
            let c = DivisorClass::basis(n, i);
            pair(&c, &c) + pair(&c, k)
        };
        'outer: for &i in &blocks.a_block {
            for &j in &blocks.b_block {
                let gap = twice_genus(i) - twice_genus(j);
                if gap != BigInt::from(2) {
                    out.push(Violation::GenusGap {
                        a_curve: name(i),
                        b_curve: name(j),
                        twice_gap: gap,
                    });
                    break 'outer;
                }
            }
        }
    }
    out
}

fn pairing(model: &IntersectionModel, d1: &DivisorClass, d2: &DivisorClass) -> BigInt {
    let mut total = BigInt::zero();
    for (i, a) in d1.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in d2.coeffs().iter().enumerate() {
            if !b.is_zero() {
                total += a * b * model.entry(i, j);
            }
        }
    }
    total
}

/// The Gram pairing `D1 · D2`.
pub fn intersect(
    model: &IntersectionModel,
    d1: &DivisorClass,
    d2: &DivisorClass,
) -> Result<BigInt> {
    model.check_dim(d1)?;
    model.check_dim(d2)?;
    Ok(pairing(model, d1, d2))
}

/// `p_a(D) = 1 + D·(D + K)/2`.
pub fn arithmetic_genus(model: &IntersectionModel, d: &DivisorClass) -> Result<BigInt> {
    let twice = intersect(model, d, &(d + model.canonical()))?;
    if twice.is_odd() {
        return Err(Error::invalid(format!(
            "D·(D + K) = {twice} is odd; the model breaks the even-adjoint axiom"
        )));
    }
    Ok(1 + twice / 2)
}

/// `p_a(C)` from `2p_a(C) − 2 = K_X·C + nH·C + C·_S C` for a curve on a
/// surface `S ∈ |nH|` inside a threefold.
pub fn adjunction_on_threefold(
    kx_dot_c: &BigInt,
    nh_dot_c: &BigInt,
    c_self: &BigInt,
) -> Result<BigInt> {
    let sum = kx_dot_c + nh_dot_c + c_self;
    if sum.is_odd() {
        return Err(Error::invalid(format!(
            "K_X·C + nH·C + C·C = {sum} is odd, so p_a would not be an integer"
        )));
    }
    Ok(1 + sum / 2)
}

/// `K + mH`, plus `Σ x_i C_i` when `x` is given.
pub fn adjoint_class(
    model: &IntersectionModel,
    m: &BigInt,
    x: Option<&[BigInt]>,
) -> Result<DivisorClass> {
    let mut d = model.canonical() + &(m * model.polarization());
    if let Some(x) = x {
        let blocks = model.require_blocks()?;
        if x.len() != ARITY {
            return Err(Error::invalid(format!(
                "expected {ARITY} curve coefficients, got {}",
                x.len()
            )));
        }
        for (idx, coeff) in blocks.all().zip(x) {
            d.coeffs[idx] += coeff;
        }
    }
    Ok(d)
}

/// The quadratic form governing `p_a(K + mH) − p_a(K + mH + Σ x_i C_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapForm {
    pub form: MixedQuadForm,
    pub certificate: GapCertificate,
}

/// How the gap form was obtained, next to the alternative bookkeeping that
/// puts `a + 2` on the a-block, `a` on the b-block and `m(H·C)` as the linear
/// coefficient. The alternative is kept for comparison only; it does not
/// satisfy the gap identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCertificate {
    pub m: BigInt,
    /// `−C_i²` on the a-block.
    pub a_block_coefficient: BigInt,
    /// `−C_i²` on the b-block.
    pub b_block_coefficient: BigInt,
    /// `−(3K + 2mH)·C_i`.
    pub linear_coefficient: BigInt,
    pub alternative: (BigInt, BigInt, BigInt),
    pub agrees_with_alternative: bool,
}

/// Expanding adjunction with `X = Σ x_i C_i` and the curves disjoint:
///
/// ```text
/// 2(p_a(D_m) − p_a(D_m + X)) = −X² − (3K + 2mH)·X
///                            = Σ (−C_i²) x_i² − Σ ((3K + 2mH)·C_i) x_i
/// ```
///
/// so `p_a(D_m) − p_a(D_{m,x}) = ½ f(x)` for the returned form, for every `x`.
pub fn exact_gap_form(model: &IntersectionModel, m: &BigInt) -> Result<GapForm> {
    model.ensure_valid()?;
    model.require_blocks()?;
    let a = model.block_a()?;
    let b: BigInt = &a + 2;
    let c1 = model.curve(0)?;
    let weight = &(&BigInt::from(3) * model.canonical()) + &(&(2 * m) * model.polarization());
    let linear = -pairing(model, &weight, &c1);
    let form = MixedQuadForm::new(a.clone(), b.clone(), linear.clone())?;

    let h_dot_c = pairing(model, model.polarization(), &c1);
    let alternative = (b.clone(), a.clone(), m * h_dot_c);
    let agrees = alternative == (a.clone(), b.clone(), linear.clone());
    Ok(GapForm {
        form,
        certificate: GapCertificate {
            m: m.clone(),
            a_block_coefficient: a,
            b_block_coefficient: b,
            linear_coefficient: linear,
            alternative,
            agrees_with_alternative: agrees,
        },
    })
}
