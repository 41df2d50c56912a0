//! Ritt division against one polynomial or an autoreduced sequence, with
//! exact certificates `multiplier·B = Σ Q_i(A_i) + remainder`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::decompose::CharSetComponent;
use crate::diffpoly::{DerVar, DiffPoly, Monomial, Ring};
use crate::error::{Error, Result};
use crate::par::{par_map, Exec};
use crate::ranking::{analyze, autoreduced_check, is_reduced, RankedPoly, Ranking};

/// Default cap on reduction steps.
pub const DEFAULT_STEP_CAP: usize = 100_000;

/// Element `Σ c_d ∂^d` of R[∂], coefficients on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOperator {
    ring: Arc<Ring>,
    terms: BTreeMap<u32, DiffPoly>,
}

impl DiffOperator {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        DiffOperator {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(ring: &Arc<Ring>) -> Self {
        Self::term(DiffPoly::one(ring), 0)
    }

    /// `c·∂^power`.
    pub fn term(c: DiffPoly, power: u32) -> Self {
        let mut op = Self::zero(c.ring());
        op.add_term(c, power);
        op
    }

    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (DiffPoly, u32)>) -> Self {
        let mut op = Self::zero(ring);
        for (c, d) in terms {
            op.add_term(c, d);
        }
        op
    }

    pub fn add_term(&mut self, c: DiffPoly, power: u32) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&power) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(power, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &DiffPoly)> {
        self.terms.iter().map(|(&d, c)| (d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ c_d · ∂^d p`.
    pub fn apply(&self, p: &DiffPoly) -> DiffPoly {
        let mut acc = DiffPoly::zero(p.ring());
        let mut deriv = p.clone();
        let mut at = 0;
        for (&d, c) in &self.terms {
            while at < d {
                deriv = deriv.derive();
                at += 1;
            }
            acc = &acc + &(c * &deriv);
        }
        acc
    }

    /// Left multiplication by a polynomial.
    pub fn mul_left(&self, m: &DiffPoly) -> Self {
        Self::from_terms(&self.ring, self.terms.iter().map(|(&d, c)| (m * c, d)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&d, c) in &other.terms {
            out.add_term(c.clone(), d);
        }
        out
    }

    /// Weyl-algebra product `self ∘ other`, using
    /// `∂^a r = Σ_k C(a,k) ∂^k(r) ∂^{a−k}`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ring);
        for (&a, c) in &self.terms {
            for (&b, r) in &other.terms {
                let mut binom: u64 = 1;
                let mut dr = r.clone();
                for k in 0..=a {
                    let coef = DiffPoly::from_int(&self.ring, binom as i64);
                    out.add_term(&(c * &dr) * &coef, a - k + b);
                    binom = binom * u64::from(a - k) / u64::from(k + 1);
                    dr = dr.derive();
                }
            }
        }
        out
    }
}

impl fmt::Display for DiffOperator {
    /// Terms by ascending power, e.g. `x'' - x'*∂`; powers print as `∂^k`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&d, c) in self.terms.iter() {
            let mut s = c.to_string();
            let neg = s.starts_with('-') && c.num_terms() == 1;
            if neg {
                s.remove(0);
            }
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let compound = c.num_terms() > 1;
            let coef = if compound { format!("({s})") } else { s };
            match d {
                0 => write!(f, "{coef}")?,
                _ => {
                    let op = if d == 1 { "∂".to_string() } else { format!("∂^{d}") };
                    if coef == "1" {
                        write!(f, "{op}")?
                    } else {
                        write!(f, "{coef}*{op}")?
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorKind {
    Separant,
    Initial,
}

/// One factor `(s or I of divisor)^exponent` of a certificate multiplier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplierFactor {
    pub divisor: usize,
    pub kind: FactorKind,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionCertificate {
    pub multiplier: DiffPoly,
    pub factors: Vec<MultiplierFactor>,
    pub quotients: Vec<DiffOperator>,
    pub remainder: DiffPoly,
    pub steps: usize,
}

struct Divisor {
    ranked: RankedPoly,
    derivatives: Vec<DiffPoly>,
}

impl Divisor {
    fn derivative(&mut self, k: u32) -> &DiffPoly {
        while self.derivatives.len() <= k as usize {
            let next = self.derivatives.last().unwrap().derive();
            self.derivatives.push(next);
        }
        &self.derivatives[k as usize]
    }
}

enum Step {
    Derivative { divisor: usize, k: u32 },
    Algebraic { divisor: usize },
}

/// Highest-ranked variable of `b` that some divisor can reduce.
fn next_step(b: &DiffPoly, r: &Ranking, divs: &[Divisor]) -> Option<(DerVar, Step)> {
    for v in r.sorted_vars_desc(b) {
        for (i, d) in divs.iter().enumerate() {
            let l = d.ranked.leader;
            if v.var != l.var || v.order < l.order {
                continue;
            }
            if v.order > l.order {
                return Some((v, Step::Derivative { divisor: i, k: v.order - l.order }));
            }
            if b.degree_in(v) >= d.ranked.degree {
                return Some((v, Step::Algebraic { divisor: i }));
            }
        }
    }
    None
}

struct Tracker {
    multiplier: DiffPoly,
    factors: Vec<MultiplierFactor>,
    quotients: Vec<DiffOperator>,
}

fn reduce_core(
    b: &DiffPoly,
    r: &Ranking,
    divs: &mut [Divisor],
    cap: usize,
    mut track: Option<&mut Tracker>,
) -> Result<(DiffPoly, usize)> {
    let ring = b.ring().clone();
    let mut cur = b.clone();
    let mut steps = 0;
    while let Some((v, step)) = next_step(&cur, r, divs) {
        steps += 1;
        if steps > cap {
            return Err(Error::StepCapExceeded(cap));
        }
        let e = cur.degree_in(v);
        let lc = cur.coeff_in(v, e);
        let (idx, kind, mult, shift, sub_power, k) = match step {
            Step::Derivative { divisor, k } => {
                if v.order > ring.order_cap() {
                    return Err(Error::OrderCapExceeded {
                        order: v.order,
                        cap: ring.order_cap(),
                    });
                }
                let s = divs[divisor].ranked.separant.clone();
                (divisor, FactorKind::Separant, s, e - 1, divs[divisor].derivative(k).clone(), k)
            }
            Step::Algebraic { divisor } => {
                let d = &divs[divisor].ranked;
                (divisor, FactorKind::Initial, d.initial.clone(), e - d.degree, d.poly.clone(), 0)
            }
        };
        // cur ← m·cur − q·∂^k A   with  q = lc·v^shift  (or lc/m·v^shift when m is a unit)
        let vpow = Monomial::from_factors([(v, shift)]);
        let unit = mult.as_constant();
        let (m_used, q) = match &unit {
            Some(c) => {
                let inv = c.inv().expect("separant and initial are nonzero");
                (None, lc.mul_monomial(&inv, &vpow))
            }
            None => (
                Some(&mult),
                lc.mul_monomial(&crate::field::FieldElement::one(ring.field()), &vpow),
            ),
        };
        let scaled = match m_used {
            Some(m) => m * &cur,
            None => cur.clone(),
        };
        cur = &scaled - &(&q * &sub_power);
        if let Some(t) = track.as_deref_mut() {
            if let Some(m) = m_used {
                t.multiplier = &t.multiplier * m;
                t.quotients = t.quotients.iter().map(|op| op.mul_left(m)).collect();
                match t
                    .factors
                    .iter_mut()
                    .find(|f| f.divisor == idx && f.kind == kind)
                {
                    Some(f) => f.exponent += 1,
                    None => t.factors.push(MultiplierFactor {
                        divisor: idx,
                        kind,
                        exponent: 1,
                    }),
                }
            }
            t.quotients[idx].add_term(q, k);
        }
    }
    Ok((cur, steps))
}

fn make_divisors(ranked: Vec<RankedPoly>) -> Vec<Divisor> {
    ranked
        .into_iter()
        .map(|rp| Divisor {
            derivatives: vec![rp.poly.clone()],
            ranked: rp,
        })
        .collect()
}

fn reduce_with_cert(
    b: &DiffPoly,
    r: &Ranking,
    ranked: Vec<RankedPoly>,
    cap: usize,
) -> Result<ReductionCertificate> {
    let ring = b.ring().clone();
    for rp in &ranked {
        if !crate::diffpoly::same_ring(rp.poly.ring(), &ring) {
            return Err(Error::RingMismatch);
        }
    }
    let mut tracker = Tracker {
        multiplier: DiffPoly::one(&ring),
        factors: Vec::new(),
        quotients: vec![DiffOperator::zero(&ring); ranked.len()],
    };
    let mut divs = make_divisors(ranked);
    let (remainder, steps) = reduce_core(b, r, &mut divs, cap, Some(&mut tracker))?;
    tracker.factors.sort_by_key(|f| (f.divisor, f.kind == FactorKind::Initial));
    Ok(ReductionCertificate {
        multiplier: tracker.multiplier,
        factors: tracker.factors,
        quotients: tracker.quotients,
        remainder,
        steps,
    })
}

/// Ritt division of `b` by a single non-constant `a`.
pub fn ritt_reduce_one(b: &DiffPoly, a: &RankedPoly, r: &Ranking) -> Result<ReductionCertificate> {
    reduce_with_cert(b, r, vec![a.clone()], DEFAULT_STEP_CAP)
}

/// Ritt division of `b` by an autoreduced sequence.
pub fn ritt_reduce_seq(b: &DiffPoly, seq: &[DiffPoly], r: &Ranking) -> Result<ReductionCertificate> {
    ritt_reduce_seq_capped(b, seq, r, DEFAULT_STEP_CAP)
}

pub fn ritt_reduce_seq_capped(
    b: &DiffPoly,
    seq: &[DiffPoly],
    r: &Ranking,
    cap: usize,
) -> Result<ReductionCertificate> {
    let ranked = autoreduced_check(r, seq)?;
    reduce_with_cert(b, r, ranked, cap)
}

/// Remainder only, without certificate bookkeeping.
pub fn ritt_remainder(b: &DiffPoly, seq: &[DiffPoly], r: &Ranking) -> Result<DiffPoly> {
    let ranked = autoreduced_check(r, seq)?;
    remainder_ranked(b, r, ranked)
}

/// Remainder by divisors that need not form an autoreduced sequence (the
/// leaders must have pairwise distinct leading variables).
pub(crate) fn remainder_ranked(b: &DiffPoly, r: &Ranking, ranked: Vec<RankedPoly>) -> Result<DiffPoly> {
    let mut divs = make_divisors(ranked);
    Ok(reduce_core(b, r, &mut divs, DEFAULT_STEP_CAP, None)?.0)
}

/// Product of the listed separant/initial powers.
fn factor_product(cert: &ReductionCertificate, ranked: &[RankedPoly], ring: &Arc<Ring>) -> Option<DiffPoly> {
    let mut acc = DiffPoly::one(ring);
    for f in &cert.factors {
        let d = ranked.get(f.divisor)?;
        let base = match f.kind {
            FactorKind::Separant => &d.separant,
            FactorKind::Initial => &d.initial,
        };
        acc = &acc * &base.pow(f.exponent);
    }
    Some(acc)
}

/// Recomputes `multiplier·B − Σ Q_i(A_i) − remainder`, checks it is zero,
/// that the multiplier equals its factor list, and that the remainder is
/// reduced with respect to every divisor.
pub fn verify_certificate(
    cert: &ReductionCertificate,
    b: &DiffPoly,
    seq: &[DiffPoly],
    r: &Ranking,
) -> bool {
    if cert.quotients.len() != seq.len() {
        return false;
    }
    let Ok(ranked) = seq.iter().map(|a| analyze(r, a)).collect::<Result<Vec<_>>>() else {
        return false;
    };
    match factor_product(cert, &ranked, b.ring()) {
        Some(p) if p == cert.multiplier => {}
        _ => return false,
    }
    let mut rhs = cert.remainder.clone();
    for (q, a) in cert.quotients.iter().zip(seq) {
        rhs = &rhs + &q.apply(a);
    }
    if &cert.multiplier * b != rhs {
        return false;
    }
    ranked.iter().all(|a| is_reduced(&cert.remainder, a))
}

/// Checks `s·b = Σ Q_i(A_i) + c` for an arbitrary triple, without any
/// structural requirement on `s` or `c`.
pub fn verify_identity(s: &DiffPoly, b: &DiffPoly, quotients: &[(DiffOperator, DiffPoly)], c: &DiffPoly) -> bool {
    let mut rhs = c.clone();
    for (q, a) in quotients {
        rhs = &rhs + &q.apply(a);
    }
    s * b == rhs
}

/// Saturated-ideal membership verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Set when the component is not known to be prime.
    pub heuristic: bool,
}

/// `f ∈ sat_S([A])` iff the Ritt remainder of `f` is zero.
pub fn member_saturated(f: &DiffPoly, comp: &CharSetComponent) -> Result<Membership> {
    let rem = ritt_remainder(f, &comp.sequence, &comp.ranking)?;
    Ok(Membership {
        member: rem.is_zero(),
        heuristic: !comp.prime_verified,
    })
}

/// Reduces each polynomial by the same autoreduced sequence.
pub fn reduce_batch(
    exec: Exec,
    polys: &[DiffPoly],
    seq: &[DiffPoly],
    r: &Ranking,
) -> Result<Vec<ReductionCertificate>> {
    let ranked = autoreduced_check(r, seq)?;
    par_map(exec, polys, |p| reduce_with_cert(p, r, ranked.clone(), DEFAULT_STEP_CAP))
        .into_iter()
        .collect()
}
