//! Characteristic-set components, a bounded Ritt–Wu splitting
//! decomposition, component dimensions and the Jacobi-bound checker.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::diffpoly::{Convention, DiffPoly, Order, Ring};
use crate::error::{Error, Result};
use crate::jacobi::{jacobi_assign, order_matrix, ritt_bound, JacobiResult, OrderMatrix};
use crate::par::{par_map, Exec};
use crate::ranking::{analyze, autoreduced_check, compare_ranks, is_reduced, RankedPoly, Ranking};
use crate::reduction::{
    remainder_ranked, ritt_reduce_seq, ritt_remainder, FactorKind, MultiplierFactor,
};

/// An autoreduced sequence with inequations, standing for
/// `sat_S([A_1, …, A_r])`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharSetComponent {
    pub name: String,
    pub ring: Arc<Ring>,
    pub ranking: Ranking,
    pub sequence: Vec<DiffPoly>,
    /// Side conditions; always includes the non-constant separants and
    /// initials of the sequence.
    pub inequations: Vec<DiffPoly>,
    pub prime_verified: bool,
}

fn push_unique(v: &mut Vec<DiffPoly>, p: DiffPoly) {
    if !v.contains(&p) {
        v.push(p);
    }
}

/// Non-constant separants and initials of a ranked sequence, in order.
fn saturation_factors(ranked: &[RankedPoly]) -> Vec<DiffPoly> {
    let mut out = Vec::new();
    for rp in ranked {
        for p in [&rp.initial, &rp.separant] {
            if !p.is_constant() {
                push_unique(&mut out, p.clone());
            }
        }
    }
    out
}

impl CharSetComponent {
    pub fn new(
        name: String,
        ring: &Arc<Ring>,
        ranking: Ranking,
        sequence: Vec<DiffPoly>,
        inequations: Vec<DiffPoly>,
        prime_verified: bool,
    ) -> Result<Self> {
        if ranking.nvars() != ring.nvars() {
            return Err(Error::InvalidRanking("ranking size differs from the ring".into()));
        }
        if sequence.iter().chain(&inequations).any(|p| p.ring() != ring) {
            return Err(Error::RingMismatch);
        }
        let ranked = autoreduced_check(&ranking, &sequence)?;
        let mut ineqs = Vec::new();
        for h in inequations {
            if h.as_constant().is_none_or(|c| c.is_zero()) {
                push_unique(&mut ineqs, h);
            }
        }
        for s in saturation_factors(&ranked) {
            push_unique(&mut ineqs, s);
        }
        Ok(CharSetComponent {
            name,
            ring: ring.clone(),
            ranking,
            sequence,
            inequations: ineqs,
            prime_verified,
        })
    }

    /// Sequence length equals the number of variables.
    pub fn finite_dimensional(&self) -> bool {
        self.sequence.len() == self.ring.nvars()
    }

    /// Canonical text of the sequence, used for ordering and deduplication.
    pub fn key(&self) -> Vec<String> {
        self.sequence.iter().map(DiffPoly::to_string).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Finite(u32),
    Infinite,
}

/// A number, or the string `"infinite"`.
impl Serialize for Dimension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(d) => s.serialize_u32(*d),
            Dimension::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::Infinite => write!(f, "infinite"),
        }
    }
}

/// Weak Jacobi number of the characteristic sequence; infinite when the
/// sequence is shorter than the number of variables.
pub fn component_dimension(c: &CharSetComponent) -> Dimension {
    component_dimension_detail(c).0
}

fn component_dimension_detail(c: &CharSetComponent) -> (Dimension, Option<(OrderMatrix, JacobiResult)>) {
    if !c.finite_dimensional() {
        return (Dimension::Infinite, None);
    }
    let m = order_matrix(&c.sequence, c.ring.nvars(), Convention::MaxPlus).expect("square");
    let j = jacobi_assign(&m);
    let d = j.value.max_plus();
    (Dimension::Finite(d), Some((m, j)))
}

/// Per-component verification detail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCheck {
    pub inputs_reduce_to_zero: Vec<bool>,
    pub inequations_nonzero: Vec<bool>,
}

impl ComponentCheck {
    pub fn ok(&self) -> bool {
        self.inputs_reduce_to_zero.iter().all(|&b| b) && self.inequations_nonzero.iter().all(|&b| b)
    }
}

pub fn check_component(c: &CharSetComponent, us: &[DiffPoly]) -> Result<ComponentCheck> {
    let rem = |p: &DiffPoly| ritt_remainder(p, &c.sequence, &c.ranking);
    Ok(ComponentCheck {
        inputs_reduce_to_zero: us.iter().map(|u| rem(u).map(|r| r.is_zero())).collect::<Result<_>>()?,
        inequations_nonzero: c
            .inequations
            .iter()
            .map(|h| rem(h).map(|r| !r.is_zero()))
            .collect::<Result<_>>()?,
    })
}

/// Every input reduces to zero and every inequation to a nonzero remainder.
pub fn verify_component(c: &CharSetComponent, us: &[DiffPoly]) -> Result<bool> {
    Ok(check_component(c, us)?.ok())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitBounds {
    pub max_components: usize,
    pub max_steps: usize,
}

impl Default for SplitBounds {
    fn default() -> Self {
        SplitBounds {
            max_components: 64,
            max_steps: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub components: Vec<CharSetComponent>,
    /// True when every branch of the splitting tree was closed.
    pub complete: bool,
    pub steps: usize,
}

#[derive(Clone, Debug)]
struct Node {
    eqs: Vec<DiffPoly>,
    ineqs: Vec<DiffPoly>,
}

impl Node {
    fn key(&self) -> (Vec<String>, Vec<String>) {
        let mut a: Vec<String> = self.eqs.iter().map(DiffPoly::to_string).collect();
        let mut b: Vec<String> = self.ineqs.iter().map(DiffPoly::to_string).collect();
        a.sort();
        b.sort();
        (a, b)
    }
}

enum Outcome {
    Empty,
    Children(Vec<Node>),
    Emit(Option<(Vec<DiffPoly>, Vec<DiffPoly>)>, Vec<Node>),
    /// A reduction hit a cap; the branch is abandoned.
    Aborted,
}

fn canonical_cmp(r: &Ranking, a: &RankedPoly, b: &RankedPoly) -> Ordering {
    compare_ranks(r, a.rank(), b.rank()).then_with(|| a.poly.to_string().cmp(&b.poly.to_string()))
}

/// Greedy lowest-rank autoreduced subsequence.
fn basic_set(r: &Ranking, ranked: &[RankedPoly]) -> Vec<RankedPoly> {
    let mut sorted: Vec<&RankedPoly> = ranked.iter().collect();
    sorted.sort_by(|a, b| canonical_cmp(r, a, b));
    let mut chosen: Vec<RankedPoly> = Vec::new();
    for cand in sorted {
        let fits = chosen.iter().all(|c| {
            is_reduced(&cand.poly, c)
                && is_reduced(&c.poly, cand)
                && r.compare_vars(c.leader, cand.leader) == Ordering::Less
        });
        if fits {
            chosen.push(cand.clone());
        }
    }
    chosen
}

fn process(node: Node, r: &Ranking) -> Outcome {
    let ring = node.eqs[0].ring().clone();
    let mut eqs: Vec<DiffPoly> = Vec::new();
    for p in node.eqs {
        if p.is_zero() {
            continue;
        }
        if p.is_constant() {
            return Outcome::Empty;
        }
        push_unique(&mut eqs, p);
    }
    if eqs.is_empty() {
        // no equations left: the whole space, which is infinite-dimensional
        return Outcome::Emit(Some((Vec::new(), node.ineqs)), Vec::new());
    }

    // Split off monomial content: m·f = 0 branches on each factor of m and on f.
    for (i, f) in eqs.iter().enumerate() {
        let m = f.monomial_content();
        if m.is_one() {
            continue;
        }
        let single = f.num_terms() == 1;
        if single && m.factors().len() == 1 && m.degree() == 1 && f.coeff(&m).is_one() {
            continue;
        }
        let mut children = Vec::new();
        for &(v, _) in m.factors() {
            let mut e = eqs.clone();
            e[i] = DiffPoly::var(&ring, v);
            children.push(Node {
                eqs: e,
                ineqs: node.ineqs.clone(),
            });
        }
        if !single {
            let mut e = eqs.clone();
            e[i] = f.div_monomial(&m);
            children.push(Node {
                eqs: e,
                ineqs: node.ineqs.clone(),
            });
        }
        return Outcome::Children(children);
    }

    let ranked: Vec<RankedPoly> = eqs.iter().map(|p| analyze(r, p).expect("non-constant")).collect();
    let basis = basic_set(r, &ranked);
    let mut new_rems = Vec::new();
    for p in &eqs {
        if basis.iter().any(|b| &b.poly == p) {
            continue;
        }
        match remainder_ranked(p, r, basis.clone()) {
            Ok(rem) if rem.is_zero() => {}
            Ok(rem) if rem.is_constant() => return Outcome::Empty,
            Ok(rem) => push_unique(&mut new_rems, rem),
            Err(_) => return Outcome::Aborted,
        }
    }
    if !new_rems.is_empty() {
        let mut e = eqs;
        e.extend(new_rems);
        return Outcome::Children(vec![Node {
            eqs: e,
            ineqs: node.ineqs,
        }]);
    }

    // Every equation reduces to zero: emit the generic component and branch
    // on the vanishing of each saturation factor.
    let seq: Vec<DiffPoly> = basis.iter().map(|b| b.poly.clone()).collect();
    let factors = saturation_factors(&basis);
    let mut ineq_ok = true;
    for h in &node.ineqs {
        match remainder_ranked(h, r, basis.clone()) {
            Ok(rem) if rem.is_zero() => ineq_ok = false,
            Ok(_) => {}
            Err(_) => return Outcome::Aborted,
        }
    }
    let mut children = Vec::new();
    for (k, s) in factors.iter().enumerate() {
        if node.ineqs.contains(s) {
            continue;
        }
        let mut e = eqs.clone();
        e.push(s.clone());
        let mut h = node.ineqs.clone();
        for earlier in &factors[..k] {
            push_unique(&mut h, earlier.clone());
        }
        children.push(Node { eqs: e, ineqs: h });
    }
    let emitted = ineq_ok.then_some((seq, node.ineqs));
    Outcome::Emit(emitted, children)
}

/// A component `b` is redundant when another component `a` satisfies
/// `A ⊂ sat(B)` while `a`'s saturation factors stay nonzero modulo `B`:
/// the generic zero of `b` is then a zero of `sat(A)`.
fn embedded_in(b: &CharSetComponent, a: &CharSetComponent) -> bool {
    let zero_mod_b = |p: &DiffPoly| {
        ritt_remainder(p, &b.sequence, &b.ranking).map(|r| r.is_zero()).unwrap_or(false)
    };
    let nonzero_mod_b = |p: &DiffPoly| {
        ritt_remainder(p, &b.sequence, &b.ranking).map(|r| !r.is_zero()).unwrap_or(false)
    };
    let Ok(ranked) = autoreduced_check(&a.ranking, &a.sequence) else {
        return false;
    };
    a.sequence.iter().all(zero_mod_b) && saturation_factors(&ranked).iter().all(nonzero_mod_b)
}

/// Bounded Ritt–Wu style splitting of `us` under `r`.
///
/// The tree is explored level by level; nodes of one level are processed
/// independently (in parallel under [`Exec::Parallel`]) and merged in
/// canonical order, so results do not depend on the execution strategy.
pub fn split_decompose(
    us: &[DiffPoly],
    r: &Ranking,
    bounds: SplitBounds,
    exec: Exec,
) -> Result<Decomposition> {
    let Some(first) = us.first() else {
        return Err(Error::ConstantPolynomial);
    };
    let ring = first.ring().clone();
    if us.iter().any(|u| u.ring() != &ring) {
        return Err(Error::RingMismatch);
    }
    if us.iter().any(DiffPoly::is_zero) {
        return Err(Error::ConstantPolynomial);
    }
    if r.nvars() != ring.nvars() {
        return Err(Error::InvalidRanking("ranking size differs from the ring".into()));
    }

    let mut frontier = vec![Node {
        eqs: us.to_vec(),
        ineqs: Vec::new(),
    }];
    let mut seen: BTreeSet<(Vec<String>, Vec<String>)> = BTreeSet::new();
    let mut raw: Vec<(Vec<DiffPoly>, Vec<DiffPoly>)> = Vec::new();
    let mut steps = 0usize;
    let mut complete = true;

    while !frontier.is_empty() {
        let budget = bounds.max_steps.saturating_sub(steps);
        if frontier.len() > budget {
            frontier.truncate(budget);
            complete = false;
        }
        if frontier.is_empty() {
            break;
        }
        steps += frontier.len();
        let outcomes = par_map(exec, &frontier, |n| process(n.clone(), r));
        let mut next = Vec::new();
        for o in outcomes {
            let children = match o {
                Outcome::Empty => Vec::new(),
                Outcome::Aborted => {
                    complete = false;
                    Vec::new()
                }
                Outcome::Children(c) => c,
                Outcome::Emit(e, c) => {
                    raw.extend(e);
                    c
                }
            };
            for c in children {
                if seen.insert(c.key()) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }

    // Build, verify against the inputs, deduplicate and order.
    let built: Vec<Option<CharSetComponent>> = par_map(exec, &raw, |(seq, ineqs)| {
        let c = CharSetComponent::new(String::new(), &ring, r.clone(), seq.clone(), ineqs.clone(), false).ok()?;
        verify_component(&c, us).ok()?.then_some(c)
    });
    let mut comps: Vec<CharSetComponent> = Vec::new();
    for c in built {
        match c {
            Some(c) => {
                if !comps.iter().any(|d| d.key() == c.key()) {
                    comps.push(c);
                }
            }
            None => complete = false,
        }
    }
    comps.sort_by(|a, b| {
        b.sequence
            .len()
            .cmp(&a.sequence.len())
            .then_with(|| a.key().cmp(&b.key()))
    });
    let mut kept: Vec<CharSetComponent> = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        let redundant = comps.iter().enumerate().any(|(j, a)| {
            j != i && embedded_in(c, a) && !(j > i && embedded_in(a, c))
        });
        if !redundant {
            kept.push(c.clone());
        }
    }
    if kept.len() > bounds.max_components {
        kept.truncate(bounds.max_components);
        complete = false;
    }
    for (i, c) in kept.iter_mut().enumerate() {
        c.name = format!("C{}", i + 1);
    }
    Ok(Decomposition {
        components: kept,
        complete,
        steps,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "HOLDS",
            Verdict::Violated => "VIOLATED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub divisor: usize,
    pub kind: FactorKind,
    pub exponent: u32,
}

impl From<&MultiplierFactor> for FactorReport {
    fn from(f: &MultiplierFactor) -> Self {
        FactorReport {
            divisor: f.divisor,
            kind: f.kind,
            exponent: f.exponent,
        }
    }
}

/// A reduction certificate in text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub id: String,
    pub component: String,
    pub equation: String,
    pub multiplier: String,
    pub factors: Vec<FactorReport>,
    pub quotients: Vec<String>,
    pub remainder: String,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub equation: String,
    pub member: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub name: String,
    pub sequence: Vec<String>,
    pub inequations: Vec<String>,
    pub prime_verified: bool,
    pub finite_dimensional: bool,
    pub dimension: Dimension,
    pub order_matrix: Option<OrderMatrix>,
    pub witness: Option<Vec<usize>>,
    pub memberships: Vec<MembershipReport>,
    pub inequations_nonzero: bool,
    pub verified: bool,
    /// `dimension ≤ J`; absent for infinite-dimensional or unverified components.
    pub bound_holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JbcReport {
    pub ranking: String,
    pub equations: Vec<(String, String)>,
    pub order_matrix_weak: OrderMatrix,
    pub order_matrix_strong: OrderMatrix,
    pub jacobi_weak: JacobiResult,
    pub jacobi_strong: JacobiResult,
    pub ritt_bound: u32,
    pub source: String,
    pub complete: bool,
    pub components: Vec<ComponentReport>,
    pub certificates: Vec<CertificateReport>,
    pub verdict: Verdict,
}

/// Where the components of a [`jbc_check`] come from.
pub enum ComponentSource {
    Split(SplitBounds),
    /// Externally computed decomposition, assumed to cover every component.
    Ingested(Vec<CharSetComponent>),
}

/// Compares each verified finite-dimensional component's dimension with
/// the weak Jacobi number of the system.
pub fn jbc_check(
    equations: &[(String, DiffPoly)],
    r: &Ranking,
    source: ComponentSource,
    exec: Exec,
) -> Result<JbcReport> {
    let us: Vec<DiffPoly> = equations.iter().map(|(_, p)| p.clone()).collect();
    let Some(first) = us.first() else {
        return Err(Error::NotSquare {
            equations: 0,
            variables: 0,
        });
    };
    let ring = first.ring().clone();
    let n = ring.nvars();
    let weak = order_matrix(&us, n, Convention::MaxPlus)?;
    let strong = order_matrix(&us, n, Convention::MinusInfinity)?;
    let jw = jacobi_assign(&weak);
    let js = jacobi_assign(&strong);
    let j = jw.value.max_plus();

    let (components, complete, source_name) = match source {
        ComponentSource::Split(b) => {
            let d = split_decompose(&us, r, b, exec)?;
            (d.components, d.complete, "split")
        }
        ComponentSource::Ingested(c) => (c, true, "ingested"),
    };

    let per_comp = par_map(exec, &components, |c| -> Result<(ComponentReport, Vec<CertificateReport>)> {
        let mut memberships = Vec::new();
        let mut certs = Vec::new();
        for (name, u) in equations {
            let cert = ritt_reduce_seq(u, &c.sequence, &c.ranking)?;
            let id = format!("{}/{}", c.name, name);
            let verified = crate::reduction::verify_certificate(&cert, u, &c.sequence, &c.ranking);
            memberships.push(MembershipReport {
                equation: name.clone(),
                member: cert.remainder.is_zero(),
                certificate: id.clone(),
            });
            certs.push(CertificateReport {
                id,
                component: c.name.clone(),
                equation: name.clone(),
                multiplier: cert.multiplier.to_string(),
                factors: cert.factors.iter().map(FactorReport::from).collect(),
                quotients: cert.quotients.iter().map(ToString::to_string).collect(),
                remainder: cert.remainder.to_string(),
                verified,
            });
        }
        let check = check_component(c, &us)?;
        let certs_ok = certs.iter().all(|c| c.verified);
        let verified = check.ok() && certs_ok;
        let (dimension, detail) = component_dimension_detail(c);
        let bound_holds = match dimension {
            Dimension::Finite(d) if verified => Some(d <= j),
            _ => None,
        };
        Ok((
            ComponentReport {
                name: c.name.clone(),
                sequence: c.key(),
                inequations: c.inequations.iter().map(ToString::to_string).collect(),
                prime_verified: c.prime_verified,
                finite_dimensional: c.finite_dimensional(),
                dimension,
                order_matrix: detail.as_ref().map(|(m, _)| m.clone()),
                witness: detail.and_then(|(_, w)| w.witness),
                memberships,
                inequations_nonzero: check.inequations_nonzero.iter().all(|&b| b),
                verified,
                bound_holds,
            },
            certs,
        ))
    });
    let mut reports = Vec::new();
    let mut certificates = Vec::new();
    for r in per_comp {
        let (rep, certs) = r?;
        reports.push(rep);
        certificates.extend(certs);
    }

    let verdict = if reports.iter().any(|c| c.bound_holds == Some(false)) {
        Verdict::Violated
    } else if !complete || reports.iter().any(|c| !c.verified) {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    };

    Ok(JbcReport {
        ranking: r.describe(&ring),
        equations: equations.iter().map(|(n, p)| (n.clone(), p.to_string())).collect(),
        order_matrix_weak: weak,
        order_matrix_strong: strong,
        jacobi_weak: jw,
        jacobi_strong: js,
        ritt_bound: ritt_bound(&order_matrix(&us, n, Convention::MaxPlus)?),
        source: source_name.to_string(),
        complete,
        components: reports,
        certificates,
        verdict,
    })
}

/// The weak Jacobi value as a plain number.
pub fn weak_value(j: &JacobiResult) -> u32 {
    match j.value {
        Order::Finite(v) => v,
        Order::NegInf => 0,
    }
}
