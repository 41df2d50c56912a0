//! Random generators and property checks shared by the property suite and
//! the acceptance runner. Every check returns `Err` with a description of
//! the counterexample.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use jbc_core::diffpoly::{Convention, DerVar, DiffPoly, Monomial, Order, Ring};
use jbc_core::field::{field_derive, FieldElement, FieldTag};
use jbc_core::jacobi::{jacobi_assign, jacobi_brute, order_matrix, ritt_bound, OrderMatrix};
use jbc_core::linearize::{extended_ring, jacobi_after_linearization, linearize_at, linearize_sym, tangent_rename_check, Linearization};
use jbc_core::point::{eval_at, DiffPoint, Evaluation};
use jbc_core::ranking::{is_autoreduced, Ranking, RankingKind};
use jbc_core::reduction::{ritt_reduce_seq_capped, verify_certificate};
use jbc_core::text::parse_poly;
use rand::seq::SliceRandom;
use rand::Rng;

pub type Check = Result<(), String>;

pub const NAMES: [&str; 3] = ["x", "y", "z"];

pub fn ring(tag: FieldTag, n: usize) -> Arc<Ring> {
    Ring::new(tag, NAMES[..n].iter().copied())
}

pub fn rand_tag<R: Rng>(rng: &mut R) -> FieldTag {
    if rng.random_bool(0.5) {
        FieldTag::Rationals
    } else {
        FieldTag::RationalFunctionsInT
    }
}

pub fn rand_rational<R: Rng>(rng: &mut R, tag: FieldTag) -> FieldElement {
    let n = rng.random_range(-6..=6);
    let d = rng.random_range(1..=4);
    FieldElement::ratio(tag, n, d).unwrap()
}

/// Nonzero rational, or for `Q(t)` a quotient of low-degree polynomials.
pub fn rand_coeff<R: Rng>(rng: &mut R, tag: FieldTag) -> FieldElement {
    loop {
        let c = match tag {
            FieldTag::Rationals => rand_rational(rng, tag),
            FieldTag::RationalFunctionsInT => {
                let num = rand_tpoly(rng, 2);
                if rng.random_bool(0.3) {
                    let den = rand_tpoly(rng, 1);
                    if den.is_zero() {
                        continue;
                    }
                    num.try_div(&den).unwrap()
                } else {
                    num
                }
            }
        };
        if !c.is_zero() {
            return c;
        }
    }
}

/// `a_0 + a_1 t + … + a_deg t^deg` with small rational coefficients.
pub fn rand_tpoly<R: Rng>(rng: &mut R, deg: u32) -> FieldElement {
    let tag = FieldTag::RationalFunctionsInT;
    let mut acc = FieldElement::zero(tag);
    for k in 0..=deg {
        let a = rand_rational(rng, tag);
        acc = &acc + &(&a * &FieldElement::t().pow(k));
    }
    acc
}

pub fn rand_monomial<R: Rng>(rng: &mut R, n: usize, max_order: u32, max_deg: u32) -> Monomial {
    let deg = rng.random_range(0..=max_deg);
    Monomial::from_factors((0..deg).map(|_| {
        (
            DerVar::new(rng.random_range(0..n), rng.random_range(0..=max_order)),
            1,
        )
    }))
}

pub fn rand_poly<R: Rng>(
    rng: &mut R,
    ring: &Arc<Ring>,
    max_terms: usize,
    max_order: u32,
    max_deg: u32,
) -> DiffPoly {
    let k = rng.random_range(1..=max_terms);
    let terms: Vec<_> = (0..k)
        .map(|_| {
            (
                rand_monomial(rng, ring.nvars(), max_order, max_deg),
                rand_coeff(rng, ring.field()),
            )
        })
        .collect();
    DiffPoly::from_terms(ring, terms)
}

/// Like [`rand_poly`] but never constant.
pub fn rand_nonconstant<R: Rng>(
    rng: &mut R,
    ring: &Arc<Ring>,
    max_terms: usize,
    max_order: u32,
    max_deg: u32,
) -> DiffPoly {
    loop {
        let p = rand_poly(rng, ring, max_terms, max_order, max_deg.max(1));
        if !p.is_constant() {
            return p;
        }
    }
}

pub fn rand_ranking<R: Rng>(rng: &mut R, n: usize) -> Ranking {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let kind = if rng.random_bool(0.5) {
        RankingKind::Elimination
    } else {
        RankingKind::Orderly
    };
    Ranking::new(kind, &perm).unwrap()
}

/// A concrete point; over `Q(t)` the coordinates are polynomials in `t`, so
/// their derivatives are nontrivial.
pub fn rand_point<R: Rng>(rng: &mut R, ring: &Arc<Ring>) -> DiffPoint {
    let values: BTreeMap<usize, FieldElement> = (0..ring.nvars())
        .map(|i| {
            let v = match ring.field() {
                FieldTag::Rationals => rand_rational(rng, FieldTag::Rationals),
                FieldTag::RationalFunctionsInT => rand_tpoly(rng, 3),
            };
            (i, v)
        })
        .collect();
    DiffPoint::concrete(ring, values).unwrap()
}

fn value(e: Evaluation) -> FieldElement {
    match e {
        Evaluation::Value(v) => v,
        other => panic!("expected a value, got {other:?}"),
    }
}

/// `p − p(η)`, which vanishes at `η`.
pub fn shift_to_zero(p: &DiffPoly, pt: &DiffPoint) -> DiffPoly {
    let c = value(eval_at(p, pt).unwrap());
    p - &DiffPoly::constant(p.ring(), c)
}

pub fn rand_order_matrix<R: Rng>(rng: &mut R, n: usize, convention: Convention) -> OrderMatrix {
    let entries = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if convention == Convention::MinusInfinity && rng.random_bool(0.3) {
                        Order::NegInf
                    } else {
                        Order::Finite(rng.random_range(0..=6))
                    }
                })
                .collect()
        })
        .collect();
    OrderMatrix::new(entries, convention).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn check_field_leibniz<R: Rng>(rng: &mut R) -> Check {
    let tag = rand_tag(rng);
    let a = rand_coeff(rng, tag);
    let b = rand_coeff(rng, tag);
    let lhs = field_derive(&(&a * &b));
    let rhs = &(&field_derive(&a) * &b) + &(&a * &field_derive(&b));
    ensure(lhs == rhs, || format!("∂({a}·{b}) = {lhs}, expected {rhs}"))
}

pub fn check_poly_leibniz<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let p = rand_poly(rng, &r, 4, 3, 3);
    let q = rand_poly(rng, &r, 4, 3, 3);
    let lhs = (&p * &q).derive();
    let rhs = &(&p.derive() * &q) + &(&p * &q.derive());
    ensure(lhs == rhs, || format!("Leibniz fails for p = {p}, q = {q}"))
}

pub fn check_order_increment<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let p = rand_poly(rng, &r, 4, 3, 3);
    let dp = p.derive();
    for j in 0..n {
        let before = p.order_of(j, Convention::MinusInfinity);
        let after = dp.order_of(j, Convention::MinusInfinity);
        let expected = match before {
            Order::Finite(k) => Order::Finite(k + 1),
            Order::NegInf => Order::NegInf,
        };
        ensure(after == expected, || {
            format!("ord_{j} of ∂({p}) is {after}, expected {expected}")
        })?;
    }
    Ok(())
}

/// Certificate identity and reduced remainder for random divisions by one
/// or two divisors; `n ≤ 3`, orders and degrees `≤ 3`.
pub fn check_certificate<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let rk = rand_ranking(rng, n);
    let mut seq = vec![rand_nonconstant(rng, &r, 3, 3, 3)];
    if n > 1 && rng.random_bool(0.5) {
        let cand = vec![seq[0].clone(), rand_nonconstant(rng, &r, 3, 3, 3)];
        if is_autoreduced(&rk, &cand) {
            seq = cand;
        }
    }
    let b = rand_poly(rng, &r, 3, 3, 3);
    match ritt_reduce_seq_capped(&b, &seq, &rk, 2_000) {
        Ok(cert) => ensure(verify_certificate(&cert, &b, &seq, &rk), || {
            format!("certificate for {b} by {seq:?} does not verify")
        }),
        // a hit step cap is a resource limit, not a counterexample
        Err(e) if e.code() == "E_STEP_CAP" || e.code() == "E_ORDER_CAP" => Ok(()),
        Err(e) => Err(format!("division of {b} failed: {e}")),
    }
}

/// `L[a·p + b·q] = a·L[p] + b·L[q]` and `L[∂u] = ∂L[u]`, symbolically and
/// at a zero.
pub fn check_linearization<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let p = rand_poly(rng, &r, 4, 3, 3);
    let q = rand_poly(rng, &r, 4, 3, 3);
    let a = rand_coeff(rng, r.field());
    let b = rand_coeff(rng, r.field());
    let combo = &p.scale(&a) + &q.scale(&b);
    let lhs = linearize_sym(&combo).poly;
    let rhs = &linearize_sym(&p).poly.scale(&a) + &linearize_sym(&q).poly.scale(&b);
    ensure(lhs == rhs, || format!("L is not linear on {p}, {q}"))?;
    ensure(tangent_rename_check(&p), || format!("L[∂u] ≠ ∂L[u] for {p}"))?;

    let pt = rand_point(rng, &r);
    let u = shift_to_zero(&p, &pt);
    let (Linearization::Exact(l), Linearization::Exact(ld)) =
        (linearize_at(&u, &pt).unwrap(), linearize_at(&u.derive(), &pt).unwrap())
    else {
        return Err("concrete points must give exact linearizations".into());
    };
    ensure(l.poly.derive() == ld.poly, || {
        format!("L[u,η]' ≠ L[u',η] for u = {u}")
    })?;
    let (value, eps) = dual_expand(&u, &pt);
    ensure(value.is_zero(), || format!("u(η) = {value} for u = {u}"))?;
    ensure(eps == l.poly, || format!("u(η + εy) has ε-part {eps}, L[u,η] = {}", l.poly))
}

/// `u(η + ε·y) mod ε²` as `(value, ε-coefficient)` in the extended ring,
/// computed with dual-number arithmetic term by term.
pub fn dual_expand(u: &DiffPoly, pt: &DiffPoint) -> (DiffPoly, DiffPoly) {
    let base = u.ring().clone();
    let ext = extended_ring(&base);
    let n = base.nvars();
    let mut value = DiffPoly::zero(&ext);
    let mut eps = DiffPoly::zero(&ext);
    for (m, c) in u.terms() {
        let mut a = DiffPoly::constant(&ext, c.clone());
        let mut b = DiffPoly::zero(&ext);
        for &(v, e) in m.factors() {
            let jet = DiffPoly::constant(&ext, pt.jet(v).expect("concrete point"));
            let dy = DiffPoly::var(&ext, DerVar::new(v.var + n, v.order));
            for _ in 0..e {
                b = &(&b * &jet) + &(&a * &dy);
                a = &a * &jet;
            }
        }
        value = &value + &a;
        eps = &eps + &b;
    }
    (value, eps)
}

/// `ord_{y_j} L[u, η] ≤ ord_{x_j} u` under both conventions.
pub fn check_linearized_order<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let pt = rand_point(rng, &r);
    let u = shift_to_zero(&rand_poly(rng, &r, 4, 3, 3), &pt);
    let lin = linearize_at(&u, &pt).unwrap();
    for conv in [Convention::MaxPlus, Convention::MinusInfinity] {
        for j in 0..n {
            let lo = lin.order_in(j, conv);
            let hi = u.order_of(j, conv);
            ensure(lo <= hi, || format!("ord_y{j} L = {lo} > ord_x{j} u = {hi} for {u}"))?;
        }
    }
    Ok(())
}

/// `J(L[u, η]) ≤ J(u)` for square systems vanishing at `η`.
pub fn check_linearized_jacobi<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let pt = rand_point(rng, &r);
    let us: Vec<DiffPoly> = (0..n)
        .map(|_| shift_to_zero(&rand_poly(rng, &r, 3, 3, 3), &pt))
        .collect();
    for conv in [Convention::MaxPlus, Convention::MinusInfinity] {
        let orig = jacobi_assign(&order_matrix(&us, n, conv).unwrap()).value;
        let (_, lin) = jacobi_after_linearization(&us, &pt, conv).unwrap();
        ensure(lin.value <= orig, || {
            format!("J increased under linearization ({} > {orig}) for {us:?}", lin.value)
        })?;
    }
    Ok(())
}

fn witness_value(m: &OrderMatrix, w: &[usize]) -> Order {
    let mut total = 0;
    for (j, &i) in w.iter().enumerate() {
        match m.get(i, j) {
            Order::Finite(v) => total += v,
            Order::NegInf => return Order::NegInf,
        }
    }
    Order::Finite(total)
}

/// Assignment and brute force agree on value and witness for `n ≤ 7`.
pub fn check_assign_vs_brute<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=7);
    let conv = if rng.random_bool(0.5) {
        Convention::MaxPlus
    } else {
        Convention::MinusInfinity
    };
    let m = rand_order_matrix(rng, n, conv);
    let a = jacobi_assign(&m);
    let b = jacobi_brute(&m).unwrap();
    ensure(a == b, || format!("assign {a:?} ≠ brute {b:?} on {m}"))?;
    if let Some(w) = &a.witness {
        ensure(witness_value(&m, w) == a.value, || format!("witness {w:?} misses the value on {m}"))?;
    }
    Ok(())
}

pub fn check_ritt_bound<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=7);
    let m = rand_order_matrix(rng, n, Convention::MinusInfinity);
    let j = jacobi_assign(&m).value.max_plus();
    let rb = ritt_bound(&m);
    ensure(j <= rb, || format!("J = {j} exceeds the Ritt bound {rb} on {m}"))
}

/// Totality, `u ≺ ∂u` and `u ≺ v ⇒ ∂u ≺ ∂v`.
pub fn check_ranking_axioms<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let rk = rand_ranking(rng, n);
    let mut v = || DerVar::new(rng.random_range(0..n), rng.random_range(0..=5));
    let (a, b) = (v(), v());
    let ab = rk.compare_vars(a, b);
    ensure(ab == rk.compare_vars(b, a).reverse(), || format!("asymmetric on {a:?}, {b:?}"))?;
    ensure((ab == std::cmp::Ordering::Equal) == (a == b), || format!("not total on {a:?}, {b:?}"))?;
    ensure(rk.compare_vars(a, a.shifted(1)).is_lt(), || format!("{a:?} ⊀ ∂{a:?}"))?;
    ensure(rk.compare_vars(a.shifted(1), b.shifted(1)) == ab, || {
        format!("derivation does not preserve {a:?} vs {b:?}")
    })
}

pub fn check_round_trip<R: Rng>(rng: &mut R) -> Check {
    let n = rng.random_range(1..=3);
    let r = ring(rand_tag(rng), n);
    let p = rand_poly(rng, &r, 5, 5, 3);
    let text = p.to_string();
    let back = parse_poly(&text, &r).map_err(|e| format!("`{text}` does not parse: {e}"))?;
    ensure(back == p, || format!("`{text}` parses to `{back}`"))
}

pub type Property<R> = (&'static str, fn(&mut R) -> Check);

/// Every property, by name, in a fixed order.
pub fn all_properties<R: Rng>() -> Vec<Property<R>> {
    vec![
        ("field Leibniz", check_field_leibniz::<R>),
        ("derive_poly Leibniz", check_poly_leibniz::<R>),
        ("order increment", check_order_increment::<R>),
        ("certificate identity", check_certificate::<R>),
        ("linearity and L[u,η]' = L[u',η]", check_linearization::<R>),
        ("linearized order bound", check_linearized_order::<R>),
        ("linearized Jacobi non-increase", check_linearized_jacobi::<R>),
        ("jacobi_assign = jacobi_brute", check_assign_vs_brute::<R>),
        ("J ≤ Ritt bound", check_ritt_bound::<R>),
        ("ranking axioms", check_ranking_axioms::<R>),
        ("text round trip", check_round_trip::<R>),
    ]
}
