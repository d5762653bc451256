//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Expected values come from the oracles below,
//! written independently of the library code they check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use genusforge::ampleness::{box_radius, reider_check};
use genusforge::lattice::{
    adjoint_class, arithmetic_genus, exact_gap_form, validate_model, DivisorClass,
    IntersectionModel,
};
use genusforge::nodal::{check_nodal_witness, empirical_nodal_g0};
use genusforge::planner::{
    check_witness, default_m_min, empirical_g0, g_sequence, locate_interval, product_lower_bound,
};
use genusforge::quadform::{
    four_square_decompose, frobenius_threshold, m0_bound, m0_exact, represent_even, MixedQuadForm,
};
use genusforge::samples::{plane_model, reference_model};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// ---------------------------------------------------------------- oracles

/// `D·D'` straight from a Gram matrix given as `i64` rows.
fn pair(gram: &[Vec<i64>], u: &[BigInt], v: &[BigInt]) -> BigInt {
    let mut s = BigInt::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            if g != 0 {
                s += &u[i] * &v[j] * g;
            }
        }
    }
    s
}

/// `1 + D·(D + K)/2`.
fn adjunction(gram: &[Vec<i64>], k: &[BigInt], d: &[BigInt]) -> BigInt {
    let dk: Vec<BigInt> = d.iter().zip(k).map(|(a, b)| a + b).collect();
    let twice = pair(gram, d, &dk);
    assert!(twice.is_even(), "odd adjoint pairing");
    1 + twice / 2
}

fn gram_i64(model: &IntersectionModel) -> Vec<Vec<i64>> {
    model
        .gram()
        .iter()
        .map(|row| row.iter().map(|v| v.to_i64().unwrap()).collect())
        .collect()
}

fn forms() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in 1..=15i64 {
        for b in 1..=15i64 {
            if matches!((a - b).abs(), 1 | 2) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Lexicographically greatest `w ≥ x ≥ y ≥ z ≥ 0` with `w² + x² + y² + z² = n`,
/// by plain nested search.
fn brute_four_square(n: i64) -> [i64; 4] {
    let isqrt = |v: i64| (v as f64).sqrt() as i64 + 1;
    for w in (0..=isqrt(n)).rev() {
        let r1 = n - w * w;
        if r1 < 0 {
            continue;
        }
        for x in (0..=w.min(isqrt(r1))).rev() {
            let r2 = r1 - x * x;
            if r2 < 0 {
                continue;
            }
            for y in (0..=x.min(isqrt(r2))).rev() {
                let r3 = r2 - y * y;
                if r3 < 0 {
                    continue;
                }
                let z = (r3 as f64).sqrt() as i64;
                for z in [z.saturating_sub(1), z, z + 1] {
                    if z >= 0 && z <= y && z * z == r3 {
                        return [w, x, y, z];
                    }
                }
            }
        }
    }
    unreachable!("Lagrange")
}

/// Least `t` with every integer `≥ t` in `pℕ + qℕ`, by scanning.
fn brute_conductor(p: i64, q: i64) -> i64 {
    let top = p * q + p + q;
    let mut hit = vec![false; top as usize + 1];
    for u in 0..=top / p {
        for v in 0..=(top - u * p) / q {
            hit[(u * p + v * q) as usize] = true;
        }
    }
    let mut t = top;
    while t > 0 && hit[t as usize - 1] {
        t -= 1;
    }
    t
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Outcome {
    let mut checked = 0u64;
    for (a, b) in forms() {
        for c in [-5i64, 0, 7] {
            let form = MixedQuadForm::new(a, b, c).unwrap();
            let start = m0_bound(&form);
            ensure!(start.is_even(), "m0_bound({a},{b}) = {start} is odd");
            for k in 0..=2000i64 {
                let m = &start + 2 * k;
                let rep =
                    represent_even(&m, &form).map_err(|e| format!("({a},{b},{c}) m = {m}: {e}"))?;
                let x = rep.entries();
                ensure!(x.len() == 18, "arity {}", x.len());
                let value: BigInt = x[..9].iter().map(|v| a * v * v + c * v).sum::<BigInt>()
                    + x[9..].iter().map(|v| b * v * v + c * v).sum::<BigInt>();
                ensure!(value == m, "({a},{b},{c}) m = {m}: value {value}");
                ensure!(
                    x.iter().all(|v| v * v <= m),
                    "({a},{b},{c}) m = {m}: entry above √m"
                );
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} representations over 54 forms × 3 linear terms"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst_gap = None::<(i64, i64, BigInt)>;
    for (a, b) in forms() {
        for c in [-5i64, 0, 7] {
            let form = MixedQuadForm::new(a, b, c).unwrap();
            let bound = m0_bound(&form);
            let exact =
                m0_exact(&form, &(&bound + 4000)).map_err(|e| format!("({a},{b},{c}): {e}"))?;
            ensure!(
                exact <= bound,
                "({a},{b},{c}): m0_exact {exact} > m0_bound {bound}"
            );
            let gap = &bound - &exact;
            if worst_gap.as_ref().is_none_or(|(_, _, g)| gap > *g) {
                worst_gap = Some((a, b, gap));
            }
        }
        let reps: Vec<_> = [-5i64, 0, 7]
            .iter()
            .map(|&c| {
                let form = MixedQuadForm::new(a, b, c).unwrap();
                let start = m0_bound(&form);
                (0..=2000i64)
                    .map(|k| represent_even(&(&start + 2 * k), &form).unwrap())
                    .collect::<Vec<_>>()
            })
            .collect();
        ensure!(
            reps[0] == reps[1] && reps[1] == reps[2],
            "({a},{b}): representation depends on c"
        );
    }
    let (a, b, gap) = worst_gap.unwrap();
    Ok(format!(
        "m0_exact ≤ m0_bound on 162 forms (largest slack {gap} at a = {a}, b = {b})"
    ))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    for n in 0..=100_000i64 {
        let d = four_square_decompose(&big(n)).map_err(|e| format!("{n}: {e}"))?;
        ensure!(d.sum_of_squares() == big(n), "{n}: wrong sum");
        ensure!(
            d.w >= d.x && d.x >= d.y && d.y >= d.z && !d.z.is_negative(),
            "{n}: not ordered"
        );
    }
    let elapsed = t.elapsed();
    ensure!(
        elapsed < Duration::from_secs(10),
        "four-square sweep took {elapsed:?}"
    );
    for n in 0..=3000i64 {
        let d = four_square_decompose(&big(n)).unwrap();
        let got = [&d.w, &d.x, &d.y, &d.z].map(|v| v.to_i64().unwrap());
        ensure!(
            got == brute_four_square(n),
            "{n}: {got:?} is not lexicographically greatest"
        );
    }
    let mut pairs = 0;
    for p in 1..=30i64 {
        for q in 1..=30i64 {
            if p.gcd(&q) != 1 {
                continue;
            }
            let t = frobenius_threshold(&big(p), &big(q)).unwrap();
            ensure!(t == big(brute_conductor(p, q)), "({p},{q}): {t}");
            pairs += 1;
        }
    }
    Ok(format!(
        "n ≤ 10^5 in {:.2?}; {pairs} coprime pairs",
        elapsed
    ))
}

fn criterion_4() -> Outcome {
    let model = reference_model();
    ensure!(
        validate_model(&model).is_empty(),
        "reference model is not clean"
    );
    let h = model.polarization();
    let k = model.canonical();
    let ip =
        |u: &DivisorClass, v: &DivisorClass| genusforge::lattice::intersect(&model, u, v).unwrap();
    ensure!(ip(h, h) == big(2) && ip(k, h) == big(0), "H² or K·H off");
    for i in 0..18 {
        let c = model.curve(i).unwrap();
        let self_int = if i < 9 { -3 } else { -5 };
        ensure!(
            ip(&c, &c) == big(self_int) && ip(h, &c) == big(1) && ip(k, &c) == big(1),
            "C{} off",
            i + 1
        );
    }

    let gram = gram_i64(&model);
    let kv = k.coeffs().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let m = big(rng.random_range(20..=200));
        let x: Vec<BigInt> = (0..18).map(|_| big(rng.random_range(-20..=20))).collect();
        let mut base = kv.clone();
        base[1] += &m;
        let mut shifted = base.clone();
        for (i, xi) in x.iter().enumerate() {
            shifted[2 + i] += xi;
        }
        let drop = adjunction(&gram, &kv, &base) - adjunction(&gram, &kv, &shifted);
        let form = exact_gap_form(&model, &m).unwrap().form;
        ensure!(
            2 * &drop == form.evaluate(&x).unwrap(),
            "m = {m}, x = {x:?}"
        );
        ensure!(
            arithmetic_genus(&model, &adjoint_class(&model, &m, Some(&x)).unwrap()).unwrap()
                == adjunction(&gram, &kv, &shifted),
            "library genus disagrees with the oracle"
        );
    }
    Ok("1000 random (m, x)".into())
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let model = reference_model();
    let report = empirical_g0(&model, 2000).map_err(|e| e.to_string())?;
    let gram = gram_i64(&model);
    let kv = model.canonical().coeffs().to_vec();
    ensure!(
        report.witnesses.len() == 2001,
        "{} witnesses",
        report.witnesses.len()
    );
    for (i, w) in report.witnesses.iter().enumerate() {
        let g = &report.g0 + i;
        ensure!(w.g == g, "witness {i} has genus {} instead of {g}", w.g);
        let problems = check_witness(&model, w);
        ensure!(problems.is_empty(), "genus {g}: {problems:?}");
        ensure!(
            adjunction(&gram, &kv, w.divisor.coeffs()) == g,
            "genus {g}: oracle disagrees"
        );
        let mut expect = kv.clone();
        expect[1] += &w.m;
        for (j, xj) in w.x.iter().enumerate() {
            expect[2 + j] += xj;
        }
        ensure!(
            expect == w.divisor.coeffs(),
            "genus {g}: divisor is not K + mH + Σ x_i C_i"
        );
        ensure!(w.reider.passed, "genus {g}: Reider failed");
    }
    let elapsed = t.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!(
        "empirical g0 = {} (m_min = {}), [g0, g0 + 2000] gap-free in {:.2?}",
        report.g0, report.m_min, elapsed
    ))
}

fn criterion_6() -> Outcome {
    let model = reference_model();
    let m_min = default_m_min(&model).unwrap();
    let gram = gram_i64(&model);
    let kv = model.canonical().coeffs().to_vec();
    let g_oracle = |m: &BigInt| {
        let mut d = kv.clone();
        d[1] += m;
        adjunction(&gram, &kv, &d)
    };
    let start = &m_min - 2;
    let seq: Vec<BigInt> = (0..=201)
        .map(|i| g_sequence(&model, &(&start + i)).unwrap())
        .collect();
    for (i, g) in seq.iter().enumerate() {
        ensure!(
            *g == g_oracle(&(&start + i)),
            "g_{} differs from the oracle",
            &start + i
        );
    }
    for w in seq.windows(2) {
        ensure!(w[0] < w[1], "g not strictly increasing");
    }
    for i in 0..200usize {
        // Interval for m = start + i + 2 is [seq[i], seq[i + 1]]; the next
        // one starts at seq[i + 1].
        let m = &start + i + 2;
        for g in [&seq[i], &seq[i + 1]] {
            let found = locate_interval(&model, g, &m_min).unwrap();
            let lo = g_sequence(&model, &(&found - 2)).unwrap();
            let hi = g_sequence(&model, &(&found - 1)).unwrap();
            ensure!(lo <= *g && *g <= hi, "genus {g} placed at m = {found}");
            ensure!(found <= m, "genus {g} placed above m = {m}");
        }
        let mid = (&seq[i] + &seq[i + 1]) / 2;
        if mid > seq[i] && mid < seq[i + 1] {
            ensure!(
                locate_interval(&model, &mid, &m_min).unwrap() == m,
                "interior genus {mid} misplaced"
            );
        }
    }
    Ok(format!("200 intervals from m = {m_min} tile without gaps"))
}

fn criterion_7() -> Outcome {
    let model = plane_model();
    for m in 6..=100i64 {
        let g = g_sequence(&model, &big(m)).unwrap();
        let prev = g_sequence(&model, &big(m - 1)).unwrap();
        ensure!(g == big((m - 4) * (m - 5) / 2), "g_{m} = {g}");
        ensure!(&g - prev == big(m - 5), "d_{m}");
    }
    let report = empirical_nodal_g0(&model, 1000).map_err(|e| e.to_string())?;
    ensure!(
        report.witnesses.len() == 1001,
        "{} witnesses",
        report.witnesses.len()
    );
    for (i, w) in report.witnesses.iter().enumerate() {
        let g = &report.g0 + i;
        ensure!(w.g == g, "witness {i} has genus {}", w.g);
        let m = w.m.to_i64().unwrap();
        let r = w.r.to_i64().unwrap();
        ensure!(1 <= r && r <= m - 5, "genus {g}: r = {r} outside [1, d_m]");

        // Blown-up Gram built here from scratch: K, H, E1..Er.
        let n = 2 + r as usize;
        let mut gram = vec![vec![0i64; n]; n];
        gram[0][0] = 9;
        gram[0][1] = -3;
        gram[1][0] = -3;
        gram[1][1] = 1;
        for (j, row) in gram.iter_mut().enumerate().skip(2) {
            row[j] = -1;
        }
        let mut k_tilde = vec![big(1), big(0)];
        k_tilde.extend((0..r).map(|_| big(1)));
        let mut l = vec![big(0), big(m)];
        l.extend((0..r).map(|_| big(-3)));
        let adj: Vec<BigInt> = k_tilde.iter().zip(&l).map(|(a, b)| a + b).collect();
        ensure!(
            l == w.l_class.coeffs() && adj == w.adjoint.coeffs(),
            "genus {g}: classes differ"
        );

        let g_m = big((m - 4) * (m - 5) / 2);
        ensure!(
            adjunction(&gram, &k_tilde, &adj) == g && g == &g_m - r,
            "genus {g}: genus identity"
        );
        for j in 0..r as usize {
            let mut e = vec![big(0); n];
            e[2 + j] = big(1);
            ensure!(pair(&gram, &l, &e) == big(3), "genus {g}: L·E ≠ 3");
            ensure!(pair(&gram, &adj, &e) == big(2), "genus {g}: (K̃ + L)·E ≠ 2");
        }
        let l2 = pair(&gram, &l, &l);
        ensure!(
            l2 == big(m * m - 9 * r) && l2 >= big(10),
            "genus {g}: L² = {l2}"
        );
        let problems = check_nodal_witness(&model, w);
        ensure!(problems.is_empty(), "genus {g}: {problems:?}");
    }
    Ok(format!(
        "closed forms on [6, 100]; empirical g0' = {}, 1001 nodal witnesses",
        report.g0
    ))
}

fn criterion_8() -> Outcome {
    let model = reference_model();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let es = [
        BigRational::new(big(1), big(2)),
        BigRational::from_integer(big(1)),
        BigRational::from_integer(big(4)),
    ];
    let mut samples = 0;
    for e in &es {
        let m1 = genusforge::ampleness::m1_threshold(&model, e).map_err(|err| err.to_string())?;
        for s in 0..67 {
            let m = if s == 0 {
                m1.clone()
            } else {
                &m1 + rng.random_range(0..5_000_000i64)
            };
            let k = box_radius(&m, e).to_i64().unwrap();
            let x: Vec<BigInt> = (0..18)
                .map(|i| match s {
                    1 => big(k),
                    2 => big(-k),
                    3 => big(if i % 2 == 0 { k } else { -k }),
                    _ => big(rng.random_range(-k..=k)),
                })
                .collect();
            // x_i² ≤ e²m, checked with rationals.
            let e2m = e * e * BigRational::from_integer(m.clone());
            ensure!(
                x.iter().all(|v| BigRational::from_integer(v * v) <= e2m),
                "sample outside the region"
            );
            let d = adjoint_class(&model, &m, Some(&x)).unwrap();
            let report = reider_check(&model, &d).unwrap();
            ensure!(
                report.passed,
                "e = {e}, m = {m}: (D − K)² = {}",
                report.square_value
            );
            samples += 1;
        }
    }
    let plane = plane_model();
    let h = plane.polarization();
    let k = plane.canonical();
    let at = |t: i64| reider_check(&plane, &(k + &(&big(t) * h))).unwrap();
    let (four, three) = (at(4), at(3));
    ensure!(four.passed, "K + 4H failed");
    ensure!(
        !three.passed && three.square_value == big(9),
        "K + 3H: {three:?}"
    );
    Ok(format!(
        "{samples} samples in the guarantee region; plane K + 4H passes, K + 3H fails at 9"
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let g: [i64; 3] = std::array::from_fn(|_| rng.random_range(0..1_000_000));
        let got = product_lower_bound(&big(g[0]), &big(g[1]), &big(g[2])).unwrap();
        ensure!(got == big(*g.iter().min().unwrap()), "{g:?} → {got}");
    }
    ensure!(
        product_lower_bound(&big(-1), &big(0), &big(0)).is_err(),
        "negative genus accepted"
    );
    Ok("1000 random triples".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("representations past the bound", criterion_1),
        ("threshold consistency", criterion_2),
        ("four squares and Frobenius", criterion_3),
        ("gap-form identity", criterion_4),
        ("smooth genus run", criterion_5),
        ("interval tiling", criterion_6),
        ("nodal genus run", criterion_7),
        ("ampleness soundness", criterion_8),
        ("product lower bound", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
