//! Rankings on derivative variables, leaders, separants and initials,
//! reduced-ness and autoreduced sequences.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::diffpoly::{DerVar, DiffPoly, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankingKind {
    /// Compare by variable priority first, then derivative order.
    Elimination,
    /// Compare by derivative order first, then variable priority.
    Orderly,
}

/// A ranking: `priority[i]` is the weight of variable `i`; larger is higher.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ranking {
    kind: RankingKind,
    priority: Vec<usize>,
}

impl Ranking {
    /// `descending` lists every variable index once, highest first.
    pub fn new(kind: RankingKind, descending: &[usize]) -> Result<Ranking> {
        let n = descending.len();
        let mut priority = vec![usize::MAX; n];
        for (pos, &v) in descending.iter().enumerate() {
            if v >= n || priority[v] != usize::MAX {
                return Err(Error::InvalidRanking(format!(
                    "not a permutation of the {n} variables"
                )));
            }
            priority[v] = n - 1 - pos;
        }
        Ok(Ranking { kind, priority })
    }

    /// Elimination ranking with `x_0 ≻ x_1 ≻ …`.
    pub fn elimination(n: usize) -> Ranking {
        Ranking::new(RankingKind::Elimination, &(0..n).collect::<Vec<_>>()).unwrap()
    }

    /// Orderly ranking with `x_0 ≻ x_1 ≻ …` at equal order.
    pub fn orderly(n: usize) -> Ranking {
        Ranking::new(RankingKind::Orderly, &(0..n).collect::<Vec<_>>()).unwrap()
    }

    pub fn kind(&self) -> RankingKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    pub fn priority(&self, var: usize) -> usize {
        self.priority[var]
    }

    /// Variable indices from highest to lowest priority.
    pub fn descending(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.priority.len()).collect();
        v.sort_by(|&a, &b| self.priority[b].cmp(&self.priority[a]));
        v
    }

    pub fn compare_vars(&self, a: DerVar, b: DerVar) -> Ordering {
        let ka = (self.priority[a.var], a.order);
        let kb = (self.priority[b.var], b.order);
        match self.kind {
            RankingKind::Elimination => ka.cmp(&kb),
            RankingKind::Orderly => (ka.1, ka.0).cmp(&(kb.1, kb.0)),
        }
    }

    /// Highest-ranked derivative variable of `p`, if any.
    pub fn leader(&self, p: &DiffPoly) -> Option<DerVar> {
        p.der_vars().into_iter().max_by(|&a, &b| self.compare_vars(a, b))
    }

    /// Derivative variables of `p`, highest first.
    pub fn sorted_vars_desc(&self, p: &DiffPoly) -> Vec<DerVar> {
        let mut v: Vec<DerVar> = p.der_vars().into_iter().collect();
        v.sort_by(|&a, &b| self.compare_vars(b, a));
        v
    }

    /// Text form, e.g. `elim x > y` or `orderly y < x`.
    pub fn describe(&self, ring: &Ring) -> String {
        let names: Vec<&str> = self
            .descending()
            .into_iter()
            .map(|i| ring.names()[i].as_str())
            .collect();
        match self.kind {
            RankingKind::Elimination => format!("elim {}", names.join(" > ")),
            RankingKind::Orderly => {
                let asc: Vec<&str> = names.into_iter().rev().collect();
                format!("orderly {}", asc.join(" < "))
            }
        }
    }
}

/// A non-constant polynomial together with its leader data under a ranking.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedPoly {
    pub poly: DiffPoly,
    pub leader: DerVar,
    pub degree: u32,
    pub separant: DiffPoly,
    pub initial: DiffPoly,
}

impl RankedPoly {
    pub fn leading_var(&self) -> usize {
        self.leader.var
    }

    /// The rank `ℓ^d` as a pair.
    pub fn rank(&self) -> (DerVar, u32) {
        (self.leader, self.degree)
    }
}

pub fn analyze(r: &Ranking, p: &DiffPoly) -> Result<RankedPoly> {
    let leader = r.leader(p).ok_or(Error::ConstantPolynomial)?;
    let degree = p.degree_in(leader);
    Ok(RankedPoly {
        poly: p.clone(),
        leader,
        degree,
        separant: p.partial(leader),
        initial: p.coeff_in(leader, degree),
    })
}

/// Compares ranks `ℓ^d`: leader first, then degree.
pub fn compare_ranks(r: &Ranking, a: (DerVar, u32), b: (DerVar, u32)) -> Ordering {
    r.compare_vars(a.0, b.0).then(a.1.cmp(&b.1))
}

/// No proper derivative of `ℓ_a` occurs in `b`, and `deg_{ℓ_a} b < d_a`.
pub fn is_reduced(b: &DiffPoly, a: &RankedPoly) -> bool {
    let l = a.leader;
    b.der_vars()
        .into_iter()
        .all(|v| v.var != l.var || v.order <= l.order)
        && b.degree_in(l) < a.degree
}

/// Every element is reduced with respect to every other, leaders strictly
/// increase, and each element involves a variable absent from its
/// predecessor.
pub fn is_autoreduced(r: &Ranking, seq: &[DiffPoly]) -> bool {
    autoreduced_check(r, seq).is_ok()
}

pub(crate) fn autoreduced_check(r: &Ranking, seq: &[DiffPoly]) -> Result<Vec<RankedPoly>> {
    let ranked = seq
        .iter()
        .map(|p| analyze(r, p))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::NotAutoreduced("contains a constant".into()))?;
    for (i, a) in ranked.iter().enumerate() {
        for (j, b) in ranked.iter().enumerate() {
            if i != j && !is_reduced(&b.poly, a) {
                return Err(Error::NotAutoreduced(format!(
                    "element {} is not reduced with respect to element {}",
                    j + 1,
                    i + 1
                )));
            }
        }
        if i > 0 {
            let prev = &ranked[i - 1];
            if r.compare_vars(prev.leader, a.leader) != Ordering::Less {
                return Err(Error::NotAutoreduced(format!(
                    "leaders of elements {i} and {} are not increasing",
                    i + 1
                )));
            }
            let pv = prev.poly.der_vars();
            if a.poly.der_vars().is_subset(&pv) {
                return Err(Error::NotAutoreduced(format!(
                    "element {} introduces no new variable",
                    i + 1
                )));
            }
        }
    }
    Ok(ranked)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeqOrdering {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Partial order on autoreduced sequences: the first differing rank
/// decides; with an equal-rank common prefix the longer sequence is lower.
/// Distinct sequences with identical ranks are incomparable.
pub fn seq_compare(r: &Ranking, a: &[DiffPoly], b: &[DiffPoly]) -> Result<SeqOrdering> {
    let ra = autoreduced_check(r, a)?;
    let rb = autoreduced_check(r, b)?;
    for (x, y) in ra.iter().zip(&rb) {
        match compare_ranks(r, x.rank(), y.rank()) {
            Ordering::Less => return Ok(SeqOrdering::Less),
            Ordering::Greater => return Ok(SeqOrdering::Greater),
            Ordering::Equal => {}
        }
    }
    Ok(match ra.len().cmp(&rb.len()) {
        Ordering::Greater => SeqOrdering::Less,
        Ordering::Less => SeqOrdering::Greater,
        Ordering::Equal if a == b => SeqOrdering::Equal,
        Ordering::Equal => SeqOrdering::Incomparable,
    })
}
