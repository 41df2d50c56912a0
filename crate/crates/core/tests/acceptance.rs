//! Acceptance runner: one PASS/FAIL line per criterion. Arithmetic is exact,
//! so every comparison is exact equality; the only tolerances are the
//! wall-clock limits below.
//!
//! The exit status is nonzero on any failure not listed in `KNOWN_FAILURES`,
//! and on any listed criterion that starts passing. With
//! `JBC_ACCEPTANCE_STRICT=1` every FAIL line is fatal.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use jbc_core::decompose::{
    component_dimension, jbc_check, split_decompose, CharSetComponent, ComponentSource, Dimension,
    SplitBounds, Verdict,
};
use jbc_core::diffpoly::{Convention, DerVar, DiffPoly, Order, Ring};
use jbc_core::field::FieldTag;
use jbc_core::jacobi::jacobi_number;
use jbc_core::linearize::{jacobi_after_linearization, linearize_at, linearized_system, Linearization};
use jbc_core::oracle::{low_degree_subspace_dim, radical_member, truncated_member, TruncationBounds};
use jbc_core::par::Exec;
use jbc_core::point::DiffPoint;
use jbc_core::ranking::{analyze, is_reduced, Ranking};
use jbc_core::reduction::{ritt_reduce_seq, ritt_remainder, verify_certificate, verify_identity, DiffOperator};
use jbc_core::text::parse_poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LIMIT_RITT: Duration = Duration::from_secs(1);
const LIMIT_DECOMPOSE: Duration = Duration::from_secs(5);
const LIMIT_NILPOTENT: Duration = Duration::from_secs(30);
const LIMIT_RADICAL: Duration = Duration::from_secs(10);
const LIMIT_SYZYGY: Duration = Duration::from_secs(1);
const LIMIT_LINEARIZE: Duration = Duration::from_secs(1);
const LIMIT_PROPERTIES: Duration = Duration::from_secs(60);
const LIMIT_EQUALITY: Duration = Duration::from_secs(10);

const PROPERTY_CASES: usize = 1000;
const PROPERTY_SEED: u64 = 0x5eed_0007;
const EQUALITY_SYSTEMS: usize = 20;
const EQUALITY_SEED: u64 = 0x5eed_0008;

/// Criteria that fail for an understood reason. The FAIL line is still
/// printed; see the README for the analysis.
const KNOWN_FAILURES: &[&str] = &["3"];

type Outcome = Result<String, String>;

fn polys(ring: &Arc<Ring>, src: &[&str]) -> Vec<DiffPoly> {
    src.iter().map(|s| parse_poly(s, ring).unwrap()).collect()
}

fn need(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn ritt_division() -> Outcome {
    let ring = Ring::new(FieldTag::RationalFunctionsInT, ["x", "y"]);
    let r = Ranking::elimination(2);
    let [f, g]: [DiffPoly; 2] = polys(&ring, &["x' + y'''", "x^2 + y''*x' + t"]).try_into().unwrap();
    let cert = ritt_reduce_seq(&f, std::slice::from_ref(&g), &r).map_err(|e| e.to_string())?;
    need(verify_certificate(&cert, &f, std::slice::from_ref(&g), &r), "certificate does not verify")?;
    let ga = analyze(&r, &g).unwrap();
    need(is_reduced(&cert.remainder, &ga), "remainder is not reduced with respect to g")?;

    let s = parse_poly("-x'^2", &ring).unwrap();
    let q = DiffOperator::from_terms(
        &ring,
        [(parse_poly("x''", &ring).unwrap(), 0), (parse_poly("-x'", &ring).unwrap(), 1)],
    );
    let rem = parse_poly("-x^2*x'' - t*x'' - x'^3 + 2*x*x'^2 + x'", &ring).unwrap();
    need(verify_identity(&s, &f, &[(q, g)], &rem), "expected triple fails s·f = Q(g) + r")?;
    Ok(format!(
        "multiplier {}, remainder {}; expected triple verified",
        cert.multiplier, cert.remainder
    ))
}

/// `a` and `b` generate the same saturated ideal as far as Ritt remainders
/// can tell: each element of one reduces to zero modulo the other.
fn mutually_member(a: &[DiffPoly], b: &[DiffPoly], r: &Ranking) -> bool {
    let into = |xs: &[DiffPoly], ys: &[DiffPoly]| {
        xs.iter()
            .all(|p| ritt_remainder(p, ys, r).is_ok_and(|rem| rem.is_zero()))
    };
    into(a, b) && into(b, a)
}

fn decomposition() -> Outcome {
    let ring = Ring::new(FieldTag::Rationals, ["x", "y"]);
    let r = Ranking::elimination(2);
    let us = polys(&ring, &["x'' + y", "x'^2 + y"]);
    let d = split_decompose(&us, &r, SplitBounds::default(), Exec::default()).map_err(|e| e.to_string())?;
    let finite: Vec<&CharSetComponent> = d.components.iter().filter(|c| c.finite_dimensional()).collect();
    need(d.components.len() == 2 && finite.len() == 2, "expected exactly two finite-dimensional components")?;

    let expected = [
        (polys(&ring, &["y'^2 + 4*y^3", "2*y*x' - y'"]), 2),
        (polys(&ring, &["y", "x'"]), 1),
    ];
    for (seq, dim) in &expected {
        let hit = finite.iter().find(|c| mutually_member(&c.sequence, seq, &r));
        let c = hit.ok_or_else(|| format!("no component matches {seq:?}"))?;
        need(component_dimension(c) == Dimension::Finite(*dim), "component dimension mismatch")?;
    }
    let j = jacobi_number(&us, 2, Convention::MaxPlus).unwrap().value;
    need(j == Order::Finite(2), "J(system) ≠ 2")?;
    let eqs = vec![("u1".to_string(), us[0].clone()), ("u2".to_string(), us[1].clone())];
    let rep = jbc_check(&eqs, &r, ComponentSource::Split(SplitBounds::default()), Exec::default())
        .map_err(|e| e.to_string())?;
    need(rep.verdict == Verdict::Holds, "jbc-check verdict is not HOLDS")?;
    let dims: Vec<String> = rep.components.iter().map(|c| c.dimension.to_string()).collect();
    Ok(format!("J = 2, dimensions [{}], verdict HOLDS", dims.join(", ")))
}

fn nilpotent(target: &str, bounds: TruncationBounds) -> Outcome {
    let ring = Ring::new(FieldTag::Rationals, ["x"]);
    let f = parse_poly(target, &ring).unwrap();
    let gens = polys(&ring, &["x^2"]);
    let w = truncated_member(&f, &gens, &bounds).map_err(|e| e.to_string())?;
    if !w.is_member() {
        return Err(format!(
            "{target} inconclusive: {}",
            w.diagnostic.unwrap_or_default()
        ));
    }
    need(w.verify(&f, &gens), "witness does not re-verify")?;
    Ok(format!("{target} ∈ [x^2] with {} terms ({bounds})", w.terms.len()))
}

fn nilpotency() -> Outcome {
    let a = nilpotent("x'^3", TruncationBounds::new(2, 3, 6, 1))?;
    let b = nilpotent("x''^5", TruncationBounds::new(3, 6, 12, 1)).map_err(|e| format!("{a}; {e}"))?;
    Ok(format!("{a}; {b}"))
}

fn radical() -> Outcome {
    let ring = Ring::new(FieldTag::Rationals, ["x", "y"]);
    let f = parse_poly("y'", &ring).unwrap();
    let gens = polys(&ring, &["y^2 - x^3", "x'"]);
    let w = radical_member(&f, &gens, &TruncationBounds::default()).map_err(|e| e.to_string())?;
    need(w.is_member(), "no power found")?;
    need(w.power == 3, &format!("exponent {} instead of 3", w.power))?;
    need(w.verify(&f, &gens), "witness does not re-verify")?;
    Ok("y'^3 ∈ [y^2 - x^3, x']".into())
}

fn syzygy() -> Outcome {
    let ring = Ring::new(FieldTag::Rationals, ["s", "t", "u"]);
    let gens = polys(&ring, &["s^2 + t*u", "t^2 + u*s", "u^2 + s*t"]);
    let lhs = parse_poly("2*s^4", &ring).unwrap();
    let coeffs = polys(&ring, &["2*s^2 - t*u", "u^2", "-s*u"]);
    let combo = gens
        .iter()
        .zip(&coeffs)
        .fold(DiffPoly::zero(&ring), |acc, (g, c)| &acc + &(c * g));
    need(combo == lhs, "explicit combination does not expand to 2*s^4")?;
    let b = TruncationBounds::new(0, 0, 4, 1);
    let w = truncated_member(&lhs, &gens, &b).map_err(|e| e.to_string())?;
    need(w.is_member() && w.verify(&lhs, &gens), "oracle does not recover the syzygy")?;
    let low = low_degree_subspace_dim(&gens, 1, &b).map_err(|e| e.to_string())?;
    need(low == 0, "the span has elements of degree ≤ 1")?;
    let s = parse_poly("s", &ring).unwrap();
    need(!truncated_member(&s, &gens, &b).unwrap().is_member(), "s found in the span")?;
    Ok("explicit combination expands exactly; degree-≤1 part of the span is {0}".into())
}

fn linearization() -> Outcome {
    let rx = Ring::new(FieldTag::Rationals, ["x"]);
    let x2 = parse_poly("x^2", &rx).unwrap();
    let Linearization::Exact(l) = linearize_at(&x2, &DiffPoint::zero(&rx)).map_err(|e| e.to_string())? else {
        return Err("expected an exact linearization".into());
    };
    need(l.is_zero(), "L[x^2, 0] ≠ 0")?;

    let ring = Ring::new(FieldTag::Rationals, ["x", "y"]);
    let us = polys(&ring, &["y^2 - x^3", "x'"]);
    let origin = DiffPoint::zero(&ring);
    let sys = linearized_system(&us, &origin).map_err(|e| e.to_string())?;
    let texts: Vec<String> = sys.iter().map(|l| l.describe(&ring)).collect();
    need(texts == ["0", "dx'"], &format!("linearized system is {texts:?}"))?;
    let orig = jacobi_number(&us, 2, Convention::MinusInfinity).unwrap().value;
    let (_, lin) = jacobi_after_linearization(&us, &origin, Convention::MinusInfinity).map_err(|e| e.to_string())?;
    need(orig == Order::Finite(1), "original J ≠ 1")?;
    need(lin.value == Order::NegInf, "strong linearized J ≠ −∞")?;
    Ok("L = (0, dx'), strong J drops from 1 to -inf".into())
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);
    let mut names = Vec::new();
    for (name, check) in common::all_properties::<ChaCha8Rng>() {
        for case in 0..PROPERTY_CASES {
            check(&mut rng).map_err(|e| format!("{name}, case {case}: {e}"))?;
        }
        names.push(name);
    }
    Ok(format!("{} properties × {PROPERTY_CASES} cases", names.len()))
}

/// A monic linear triangular sequence under elimination `x ≻ y ≻ z`:
/// element `k` has leader `v_k^{(r_k)}` where `v_0` is the lowest variable,
/// and involves lower variables only below their leader orders.
fn monic_linear(rng: &mut ChaCha8Rng, ring: &Arc<Ring>) -> (Vec<DiffPoly>, u32) {
    let n = ring.nvars();
    let vars: Vec<usize> = (0..n).rev().collect();
    let orders: Vec<u32> = (0..n).map(|_| rng.random_range(0..=3)).collect();
    let mut seq = Vec::new();
    for k in 0..n {
        let lead = DiffPoly::var(ring, DerVar::new(vars[k], orders[k]));
        let mut p = lead;
        for (j, &v) in vars[..=k].iter().enumerate() {
            for o in 0..orders[j] {
                if rng.random_bool(0.5) {
                    let c = common::rand_coeff(rng, ring.field());
                    p = &p + &DiffPoly::var(ring, DerVar::new(v, o)).scale(&c);
                }
            }
        }
        if rng.random_bool(0.5) {
            p = &p + &DiffPoly::constant(ring, common::rand_coeff(rng, ring.field()));
        }
        seq.push(p);
    }
    (seq, orders.iter().sum())
}

/// Ingests `seq` as its own characteristic sequence and checks that the
/// reported dimension equals both the weak Jacobi number and the count of
/// parametric derivatives `Σ r_k`.
fn equality_one(ring: &Arc<Ring>, seq: Vec<DiffPoly>, parametric: u32) -> Result<(), String> {
    let r = Ranking::elimination(ring.nvars());
    let comp = CharSetComponent::new("A".into(), ring, r.clone(), seq.clone(), Vec::new(), true)
        .map_err(|e| e.to_string())?;
    let eqs: Vec<(String, DiffPoly)> = seq
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("a{}", i + 1), p.clone()))
        .collect();
    let rep = jbc_check(&eqs, &r, ComponentSource::Ingested(vec![comp]), Exec::default())
        .map_err(|e| e.to_string())?;
    let c = &rep.components[0];
    need(c.verified, &format!("component {:?} does not verify", c.sequence))?;
    let j = rep.jacobi_weak.value.max_plus();
    need(
        c.dimension == Dimension::Finite(j) && j == parametric,
        &format!("dimension {} vs J {j} vs Σ r {parametric} for {:?}", c.dimension, c.sequence),
    )
}

fn equality() -> Outcome {
    let ring = Ring::new(FieldTag::Rationals, ["x", "y"]);
    equality_one(&ring, polys(&ring, &["y'^2 + 4*y^3", "2*y*x' - y'"]), 2)?;
    equality_one(&ring, polys(&ring, &["y", "x'"]), 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(EQUALITY_SEED);
    for _ in 0..EQUALITY_SYSTEMS {
        let n = rng.random_range(1..=3);
        let tag = common::rand_tag(&mut rng);
        let ring = common::ring(tag, n);
        let (seq, parametric) = monic_linear(&mut rng, &ring);
        equality_one(&ring, seq, parametric)?;
    }
    Ok(format!("2 reference sequences and {EQUALITY_SYSTEMS} random monic linear systems"))
}

/// Not a criterion: the order-4 jets needed by the `x''^5` witness.
fn nilpotency_wider() -> Outcome {
    nilpotent("x''^5", TruncationBounds::new(4, 6, 12, 1))
}

type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1", "Ritt division regression", LIMIT_RITT, ritt_division),
        ("2", "characteristic-set decomposition", LIMIT_DECOMPOSE, decomposition),
        ("3", "nilpotency oracle", LIMIT_NILPOTENT, nilpotency),
        ("4", "radical membership", LIMIT_RADICAL, radical),
        ("5", "syzygy", LIMIT_SYZYGY, syzygy),
        ("6", "linearization regression", LIMIT_LINEARIZE, linearization),
        ("7", "property suites", LIMIT_PROPERTIES, properties),
        ("8", "equality case", LIMIT_EQUALITY, equality),
    ];
    let strict = std::env::var("JBC_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut failed = 0;
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let (ok, detail) = match out {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {took:.2?}, limit {limit:?}")),
            Err(e) => (false, e),
        };
        let known = KNOWN_FAILURES.contains(&id);
        if !ok {
            failed += 1;
        }
        if ok == known || (strict && !ok) {
            unexpected.push(id);
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if !ok && known { " [known failure]" } else { "" };
        println!("{tag} {id} {name} ({took:.2?}){note}: {detail}");
    }
    let start = Instant::now();
    let info = match nilpotency_wider() {
        Ok(d) => format!("member: {d}"),
        Err(e) => format!("not found: {e}"),
    };
    println!("INFO 3 with N=4 ({:.2?}): {info}", start.elapsed());
    println!("{failed} of 8 criteria failed");
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
