//! Sparse differential polynomials K{x_1,…,x_n}.
//!
//! A polynomial is a finite map from [`Monomial`] to nonzero coefficients.
//! Monomials are products of derivative variables `x_i^{(j)}` ([`DerVar`]).
//! The derivation acts on variables by `∂ x_i^{(j)} = x_i^{(j+1)}` and on
//! coefficients through [`field_derive`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{field_derive, FieldElement, FieldTag};

/// Default cap on derivative orders, used to catch runaway reductions.
pub const DEFAULT_ORDER_CAP: u32 = 64;

/// Ring context: coefficient field and differential indeterminates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    field: FieldTag,
    names: Vec<String>,
    order_cap: u32,
}

impl Ring {
    pub fn new<S: Into<String>>(field: FieldTag, names: impl IntoIterator<Item = S>) -> Arc<Ring> {
        Arc::new(Ring {
            field,
            names: names.into_iter().map(Into::into).collect(),
            order_cap: DEFAULT_ORDER_CAP,
        })
    }

    pub fn with_order_cap(&self, cap: u32) -> Arc<Ring> {
        Arc::new(Ring {
            order_cap: cap,
            ..self.clone()
        })
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn order_cap(&self) -> u32 {
        self.order_cap
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Ring with `2n` indeterminates: the original `x_i` followed by one
    /// perturbation variable per `x_i` (printed `d<name>`), at index `i + n`.
    pub fn extended(&self) -> Arc<Ring> {
        let mut names = self.names.clone();
        for n in &self.names {
            let mut y = format!("d{n}");
            while names.contains(&y) {
                y.push('_');
            }
            names.push(y);
        }
        Arc::new(Ring {
            field: self.field,
            names,
            order_cap: self.order_cap,
        })
    }

    pub(crate) fn fmt_dervar(&self, v: DerVar, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.names.get(v.var).map(String::as_str).unwrap_or("?");
        match v.order {
            0 => write!(f, "{name}"),
            1..=3 => write!(f, "{name}{}", "'".repeat(v.order as usize)),
            k => write!(f, "{name}^({k})"),
        }
    }

    pub fn dervar_name(&self, v: DerVar) -> String {
        struct D<'a>(&'a Ring, DerVar);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_dervar(self.1, f)
            }
        }
        D(self, v).to_string()
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// The derivative variable `x_var^{(order)}`; `var` is 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DerVar {
    pub var: usize,
    pub order: u32,
}

impl DerVar {
    pub fn new(var: usize, order: u32) -> Self {
        DerVar { var, order }
    }

    /// `∂^k` applied to this variable.
    pub fn shifted(self, k: u32) -> Self {
        DerVar {
            var: self.var,
            order: self.order + k,
        }
    }
}

/// Product of derivative variables with positive exponents, sorted by
/// `(var, order)`. The empty product is 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(DerVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: DerVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (DerVar, u32)>) -> Self {
        let mut m = Monomial::one();
        for (v, e) in factors {
            m.mul_var(v, e);
        }
        m
    }

    pub fn factors(&self) -> &[(DerVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Sum of derivative orders counted with multiplicity.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&(v, e)| v.order * e).sum()
    }

    pub fn degree_in(&self, v: DerVar) -> u32 {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul_var(&mut self, v: DerVar, e: u32) {
        if e == 0 {
            return;
        }
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1 += e,
            Err(i) => self.0.insert(i, (v, e)),
        }
    }

    /// Lowers the exponent of `v` by `e`; the caller guarantees divisibility.
    pub fn div_var(&mut self, v: DerVar, e: u32) {
        if e == 0 {
            return;
        }
        let i = self
            .0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .expect("monomial not divisible");
        assert!(self.0[i].1 >= e, "monomial not divisible");
        self.0[i].1 -= e;
        if self.0[i].1 == 0 {
            self.0.remove(i);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Greatest common divisor of two monomials.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(v, e)| {
                    let f = other.degree_in(v);
                    (f > 0).then_some((v, e.min(f)))
                })
                .collect(),
        )
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut m = self.clone();
        for &(v, e) in &other.0 {
            m.div_var(v, e);
        }
        m
    }

    pub fn max_order(&self) -> Option<u32> {
        self.0.iter().map(|(v, _)| v.order).max()
    }
}

/// Convention for the order of a polynomial in a variable it does not
/// contain: 0 under `MaxPlus`, −∞ under `MinusInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    MaxPlus,
    MinusInfinity,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::MaxPlus => write!(f, "maxplus"),
            Convention::MinusInfinity => write!(f, "minusinf"),
        }
    }
}

/// An order value in ℤ≥0 ∪ {−∞}. `NegInf` sorts below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    NegInf,
    Finite(u32),
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(r) => Some(r),
            Order::NegInf => None,
        }
    }

    /// max⁺ reading: −∞ becomes 0.
    pub fn max_plus(self) -> u32 {
        self.finite().unwrap_or(0)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::NegInf => write!(f, "-inf"),
            Order::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::NegInf => s.serialize_str("-inf"),
            Order::Finite(r) => s.serialize_u32(*r),
        }
    }
}

/// Selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// A differential polynomial. No zero coefficients are stored, so equality
/// is map equality and zero is the empty map.
#[derive(Clone, Debug)]
pub struct DiffPoly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, FieldElement>,
}

fn add_term(terms: &mut BTreeMap<Monomial, FieldElement>, m: Monomial, c: FieldElement) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

impl DiffPoly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        DiffPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, FieldElement::one(ring.field()))
    }

    pub fn from_int(ring: &Arc<Ring>, n: i64) -> Self {
        Self::constant(ring, FieldElement::from_int(ring.field(), n))
    }

    /// Panics if `c` belongs to a different field than the ring.
    pub fn constant(ring: &Arc<Ring>, c: FieldElement) -> Self {
        assert_eq!(c.tag(), ring.field(), "field tag mismatch");
        Self::monomial(ring, c, Monomial::one())
    }

    pub fn var(ring: &Arc<Ring>, v: DerVar) -> Self {
        Self::monomial(ring, FieldElement::one(ring.field()), Monomial::var(v))
    }

    pub fn monomial(ring: &Arc<Ring>, c: FieldElement, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, m, c);
        DiffPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_terms(
        ring: &Arc<Ring>,
        terms: impl IntoIterator<Item = (Monomial, FieldElement)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            add_term(&mut map, m, c);
        }
        DiffPoly {
            ring: ring.clone(),
            terms: map,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant value, when the polynomial is constant.
    pub fn as_constant(&self) -> Option<FieldElement> {
        if !self.is_constant() {
            return None;
        }
        Some(
            self.terms
                .get(&Monomial::one())
                .cloned()
                .unwrap_or_else(|| FieldElement::zero(self.ring.field())),
        )
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElement {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(self.ring.field()))
    }

    /// All derivative variables present.
    pub fn der_vars(&self) -> BTreeSet<DerVar> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn contains_var(&self, v: DerVar) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest derivative order of any variable present.
    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().filter_map(Monomial::max_order).max()
    }

    pub fn degree_in(&self, v: DerVar) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^e`, viewing the polynomial as univariate in `v`.
    pub fn coeff_in(&self, v: DerVar, e: u32) -> DiffPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree_in(v) == e)
            .map(|(m, c)| {
                let mut m = m.clone();
                m.div_var(v, e);
                (m, c.clone())
            });
        DiffPoly::from_terms(&self.ring, terms)
    }

    /// Greatest common monomial divisor of all terms (1 for zero).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    /// Exact division by a monomial dividing every term.
    pub fn div_monomial(&self, m: &Monomial) -> DiffPoly {
        DiffPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.div(m), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero(&self.ring);
        }
        DiffPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, c: &FieldElement, m: &Monomial) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero(&self.ring);
        }
        DiffPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn try_add(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(DiffPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Ok(DiffPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    fn check(&self, other: &DiffPoly) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    /// One application of the derivation (Leibniz rule over monomials,
    /// coefficients differentiated by [`field_derive`]).
    pub fn derive(&self) -> DiffPoly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            add_term(&mut terms, m.clone(), field_derive(c));
            for &(v, e) in &m.0 {
                let mut nm = m.clone();
                nm.div_var(v, 1);
                nm.mul_var(v.shifted(1), 1);
                add_term(&mut terms, nm, c * &FieldElement::from_int(c.tag(), e as i64));
            }
        }
        DiffPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn derive_n(&self, times: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..times {
            p = p.derive();
        }
        p
    }

    /// Formal partial derivative with respect to the single variable `v`.
    pub fn partial(&self, v: DerVar) -> DiffPoly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.degree_in(v);
            (e > 0).then(|| {
                let mut nm = m.clone();
                nm.div_var(v, 1);
                (nm, c * &FieldElement::from_int(c.tag(), e as i64))
            })
        });
        DiffPoly::from_terms(&self.ring, terms)
    }

    /// Largest `r` with `x_var^{(r)}` present; otherwise 0 or −∞ according
    /// to the convention (the zero polynomial included).
    pub fn order_of(&self, var: usize, convention: Convention) -> Order {
        let top = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter())
            .filter(|(v, _)| v.var == var)
            .map(|(v, _)| v.order)
            .max();
        match (top, convention) {
            (Some(r), _) => Order::Finite(r),
            (None, Convention::MaxPlus) => Order::Finite(0),
            (None, Convention::MinusInfinity) => Order::NegInf,
        }
    }

    /// Reinterprets the polynomial in `ring`, which must share the field and
    /// contain at least as many indeterminates.
    pub fn lift_to(&self, ring: &Arc<Ring>) -> DiffPoly {
        assert_eq!(ring.field(), self.ring.field());
        assert!(ring.nvars() >= self.ring.nvars());
        DiffPoly {
            ring: ring.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Renames variable indices through `map`; the result lives in `ring`.
    pub fn map_vars(&self, ring: &Arc<Ring>, map: impl Fn(DerVar) -> DerVar) -> DiffPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial::from_factors(m.0.iter().map(|&(v, e)| (map(v), e))), c.clone()));
        DiffPoly::from_terms(ring, terms)
    }
}

/// Checked ring arithmetic.
pub fn poly_arith(p: &DiffPoly, q: &DiffPoly, op: PolyOp) -> Result<DiffPoly> {
    match op {
        PolyOp::Add => p.try_add(q),
        PolyOp::Sub => p.try_sub(q),
        PolyOp::Mul => p.try_mul(q),
    }
}

/// `∂^times p`.
pub fn derive_poly(p: &DiffPoly, times: u32) -> DiffPoly {
    p.derive_n(times)
}

impl PartialEq for DiffPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for DiffPoly {}

impl PartialOrd for DiffPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiffPoly {
    /// Structural order on the term maps, used only for canonical sorting.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl std::hash::Hash for DiffPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a DiffPoly> for &'a DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &'a DiffPoly) -> DiffPoly {
                self.$checked(rhs).expect("ring context mismatch")
            }
        }
        impl $tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &'a DiffPoly) -> DiffPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

impl fmt::Display for DiffPoly {
    /// Canonical text: terms by descending total degree, then descending
    /// weight, then ascending monomial order; factors joined by `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            b.degree()
                .cmp(&a.degree())
                .then_with(|| b.weight().cmp(&a.weight()))
                .then_with(|| a.cmp(b))
        });
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                if abs.needs_parens() {
                    write!(f, "({abs})")?;
                } else {
                    write!(f, "{abs}")?;
                }
                continue;
            }
            if !abs.is_one() {
                if abs.needs_parens() {
                    write!(f, "({abs})*")?;
                } else {
                    write!(f, "{abs}*")?;
                }
            }
            for (j, &(v, e)) in m.0.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                self.ring.fmt_dervar(v, f)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
