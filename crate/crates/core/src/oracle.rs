//! Truncated ideal membership: `f` is tested against the K-span of
//! `m·∂^k g` over generators `g`, `k ≤ P`, monomials `m`, with every
//! derivative order `≤ N` and total degree `≤ D`.
//!
//! Member verdicts carry an explicit combination that is re-verified by
//! polynomial arithmetic; Inconclusive verdicts say nothing.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::diffpoly::{DerVar, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::par::{par_map, Exec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationBounds {
    /// Largest derivative order allowed anywhere.
    pub jet_order: u32,
    /// Largest number of times a generator is differentiated.
    pub prolongation: u32,
    /// Largest total degree of a column.
    pub degree: u32,
    /// Largest exponent tried by [`radical_member`].
    pub power: u32,
    /// Largest number of columns assembled before giving up.
    pub max_columns: usize,
}

impl Default for TruncationBounds {
    fn default() -> Self {
        TruncationBounds {
            jet_order: 4,
            prolongation: 6,
            degree: 8,
            power: 6,
            max_columns: 200_000,
        }
    }
}

impl TruncationBounds {
    pub fn new(jet_order: u32, prolongation: u32, degree: u32, power: u32) -> Self {
        TruncationBounds {
            jet_order,
            prolongation,
            degree,
            power,
            ..Self::default()
        }
    }
}

impl fmt::Display for TruncationBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={}, P={}, D={}, E={}",
            self.jet_order, self.prolongation, self.degree, self.power
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleVerdict {
    Member,
    Inconclusive,
}

/// `coeff · multiplier · ∂^derivative(gens[generator])`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessTerm {
    pub coeff: FieldElement,
    pub multiplier: Monomial,
    pub generator: usize,
    pub derivative: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipWitness {
    pub verdict: OracleVerdict,
    /// Exponent `e` with `f^e` in the span (1 for plain membership).
    pub power: u32,
    pub terms: Vec<WitnessTerm>,
    pub bounds: TruncationBounds,
    pub columns: usize,
    pub rank: usize,
    pub diagnostic: Option<String>,
}

impl MembershipWitness {
    fn inconclusive(bounds: TruncationBounds, columns: usize, rank: usize, diag: String) -> Self {
        MembershipWitness {
            verdict: OracleVerdict::Inconclusive,
            power: 1,
            terms: Vec::new(),
            bounds,
            columns,
            rank,
            diagnostic: Some(diag),
        }
    }

    pub fn is_member(&self) -> bool {
        self.verdict == OracleVerdict::Member
    }

    /// Recomputes `Σ c·m·∂^k g` and compares with `f^power`.
    pub fn verify(&self, f: &DiffPoly, gens: &[DiffPoly]) -> bool {
        if !self.is_member() {
            return false;
        }
        let ring = f.ring();
        let mut acc = DiffPoly::zero(ring);
        for t in &self.terms {
            let Some(g) = gens.get(t.generator) else {
                return false;
            };
            acc = &acc + &g.derive_n(t.derivative).mul_monomial(&t.coeff, &t.multiplier);
        }
        acc == f.pow(self.power)
    }

    /// The combination as text, e.g. `(2*s^2)*∂^0[g1] + …`.
    pub fn describe(&self, f: &DiffPoly) -> String {
        let ring = f.ring();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let m = DiffPoly::monomial(ring, t.coeff.clone(), t.multiplier.clone());
                let g = match t.derivative {
                    0 => format!("g{}", t.generator + 1),
                    k => format!("∂^{k} g{}", t.generator + 1),
                };
                format!("({m})*{g}")
            })
            .collect();
        parts.join(" + ")
    }
}

/// Sparse vector over row ids, sorted by id.
type SparseVec = Vec<(usize, FieldElement)>;

/// `a − c·b`.
fn axpy(a: &SparseVec, c: &FieldElement, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -&(c * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row echelon form over the field. Each stored vector has a
/// unit entry at its pivot (its largest row id) and remembers the
/// combination of input columns that produced it.
struct Echelon {
    rows: HashMap<usize, (SparseVec, SparseVec)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: HashMap::new() }
    }

    /// Reduces `v`; returns the residual and the combination subtracted.
    fn reduce(&self, mut v: SparseVec, mut combo: SparseVec) -> (SparseVec, SparseVec) {
        while let Some((p, c)) = v.last().cloned() {
            match self.rows.get(&p) {
                Some((b, bc)) => {
                    v = axpy(&v, &c, b);
                    combo = axpy(&combo, &c, bc);
                }
                None => break,
            }
        }
        (v, combo)
    }

    /// Inserts a column; returns whether the rank grew.
    fn insert(&mut self, v: SparseVec, combo: SparseVec) -> bool {
        let (v, combo) = self.reduce(v, combo);
        let Some((p, lead)) = v.last().cloned() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        let scale = |x: SparseVec| x.into_iter().map(|(i, a)| (i, &a * &inv)).collect::<SparseVec>();
        self.rows.insert(p, (scale(v), scale(combo)));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// A generator derivative `∂^k g` admitted by the bounds.
struct Prolonged {
    generator: usize,
    k: u32,
    poly: DiffPoly,
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Grading {
    degree: bool,
    weight: bool,
}

/// `(degree, weight)` of every term, if constant across terms.
fn bidegrees(p: &DiffPoly) -> BTreeSet<(u32, u32)> {
    p.terms().map(|(m, _)| (m.degree(), m.weight())).collect()
}

fn homogeneous(p: &DiffPoly, grading: Grading) -> Option<(u32, u32)> {
    let set = bidegrees(p);
    let degs: BTreeSet<u32> = set.iter().map(|x| x.0).collect();
    let wts: BTreeSet<u32> = set.iter().map(|x| x.1).collect();
    if (grading.degree && degs.len() > 1) || (grading.weight && wts.len() > 1) {
        return None;
    }
    set.iter().next().copied()
}

/// Enumerates monomials in `vars` with degree in `[dmin, dmax]` and, when
/// given, weight exactly `w`. Stops early past `limit` results.
fn monomials(vars: &[DerVar], dmin: u32, dmax: u32, w: Option<u32>, limit: usize, out: &mut Vec<Monomial>) -> bool {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        vars: &[DerVar],
        idx: usize,
        cur: &mut Vec<(DerVar, u32)>,
        deg: u32,
        wt: u32,
        bounds: (u32, u32, Option<u32>),
        limit: usize,
        out: &mut Vec<Monomial>,
    ) -> bool {
        let (dmin, dmax, w) = bounds;
        if let Some(w) = w {
            if wt > w {
                return true;
            }
        }
        if idx == vars.len() {
            if deg >= dmin && w.is_none_or(|w| wt == w) {
                if out.len() >= limit {
                    return false;
                }
                out.push(Monomial::from_factors(cur.iter().copied()));
            }
            return true;
        }
        let v = vars[idx];
        let mut e = 0;
        loop {
            if e > 0 {
                cur.push((v, e));
            }
            let ok = rec(vars, idx + 1, cur, deg + e, wt + e * v.order, bounds, limit, out);
            if e > 0 {
                cur.pop();
            }
            if !ok {
                return false;
            }
            e += 1;
            if deg + e > dmax || w.is_some_and(|w| wt + e * v.order > w) {
                break;
            }
        }
        true
    }
    rec(vars, 0, &mut Vec::new(), 0, 0, (dmin, dmax, w), limit, out)
}

/// Column description: which prolonged generator and which multiplier.
struct Column {
    source: usize,
    multiplier: Monomial,
}

struct System {
    prolonged: Vec<Prolonged>,
    columns: Vec<Column>,
}

/// Admissible generator derivatives and the multiplier monomials needed to
/// reach the target degrees `targets` (empty means: any degree ≤ D).
fn assemble(
    gens: &[DiffPoly],
    targets: &[&DiffPoly],
    b: &TruncationBounds,
    exec: Exec,
) -> std::result::Result<System, String> {
    let Some(ring) = targets.first().map(|t| t.ring().clone()) else {
        return Err("no target".into());
    };
    let mut prolonged = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let mut p = g.clone();
        for k in 0..=b.prolongation {
            if k > 0 {
                p = p.derive();
            }
            if p.max_order().unwrap_or(0) > b.jet_order {
                break;
            }
            if p.total_degree() <= b.degree && !p.is_zero() {
                prolonged.push(Prolonged {
                    generator: gi,
                    k,
                    poly: p.clone(),
                });
            }
        }
    }
    let vars: Vec<DerVar> = (0..ring.nvars())
        .flat_map(|i| (0..=b.jet_order).map(move |j| DerVar::new(i, j)))
        .collect();

    // Pick the finest grading under which every column is homogeneous.
    let candidates = [
        Grading { degree: true, weight: true },
        Grading { degree: false, weight: true },
        Grading { degree: true, weight: false },
    ];
    let grading = candidates
        .into_iter()
        .find(|&gr| prolonged.iter().all(|p| homogeneous(&p.poly, gr).is_some()));
    let target_grades: BTreeSet<(u32, u32)> = targets.iter().flat_map(|t| bidegrees(t)).collect();

    let per_source: Vec<std::result::Result<Vec<Monomial>, ()>> = par_map(exec, &prolonged, |p| {
        let mut out = Vec::new();
        let dg = p.poly.total_degree();
        let room = b.degree - dg;
        match grading {
            None => {
                if !monomials(&vars, 0, room, None, b.max_columns, &mut out) {
                    return Err(());
                }
            }
            Some(gr) => {
                let (pd, pw) = homogeneous(&p.poly, gr).unwrap();
                let mut wanted: BTreeSet<(Option<u32>, Option<u32>)> = BTreeSet::new();
                for &(td, tw) in &target_grades {
                    let d = if gr.degree {
                        match td.checked_sub(pd) {
                            Some(d) if d <= room => Some(d),
                            _ => continue,
                        }
                    } else {
                        None
                    };
                    let w = if gr.weight {
                        match tw.checked_sub(pw) {
                            Some(w) => Some(w),
                            None => continue,
                        }
                    } else {
                        None
                    };
                    wanted.insert((d, w));
                }
                for (d, w) in wanted {
                    let (lo, hi) = d.map_or((0, room), |d| (d, d));
                    if !monomials(&vars, lo, hi, w, b.max_columns, &mut out) {
                        return Err(());
                    }
                }
            }
        }
        Ok(out)
    });
    let mut columns = Vec::new();
    for (source, ms) in per_source.into_iter().enumerate() {
        let ms = ms.map_err(|_| format!("column cap {} exceeded", b.max_columns))?;
        for m in ms {
            columns.push(Column { source, multiplier: m });
            if columns.len() > b.max_columns {
                return Err(format!("column cap {} exceeded", b.max_columns));
            }
        }
    }
    Ok(System { prolonged, columns })
}

struct RowIndex {
    ids: HashMap<Monomial, usize>,
}

impl RowIndex {
    fn id(&mut self, m: &Monomial) -> usize {
        let n = self.ids.len();
        *self.ids.entry(m.clone()).or_insert(n)
    }

    fn vector(&mut self, p: &DiffPoly) -> SparseVec {
        let mut v: SparseVec = p.terms().map(|(m, c)| (self.id(m), c.clone())).collect();
        v.sort_by_key(|x| x.0);
        v
    }
}

fn column_polys(sys: &System, exec: Exec) -> Vec<DiffPoly> {
    par_map(exec, &sys.columns, |c| {
        let p = &sys.prolonged[c.source].poly;
        p.mul_monomial(&FieldElement::one(p.ring().field()), &c.multiplier)
    })
}

/// Membership of `f` in the truncated span.
pub fn truncated_member(f: &DiffPoly, gens: &[DiffPoly], b: &TruncationBounds) -> Result<MembershipWitness> {
    truncated_member_with(Exec::default(), f, gens, b)
}

pub fn truncated_member_with(
    exec: Exec,
    f: &DiffPoly,
    gens: &[DiffPoly],
    b: &TruncationBounds,
) -> Result<MembershipWitness> {
    if gens.iter().any(|g| g.ring() != f.ring()) {
        return Err(Error::RingMismatch);
    }
    if f.is_zero() {
        return Ok(MembershipWitness {
            verdict: OracleVerdict::Member,
            power: 1,
            terms: Vec::new(),
            bounds: *b,
            columns: 0,
            rank: 0,
            diagnostic: None,
        });
    }
    if f.max_order().unwrap_or(0) > b.jet_order || f.total_degree() > b.degree {
        return Ok(MembershipWitness::inconclusive(
            *b,
            0,
            0,
            format!("target exceeds the bounds ({b})"),
        ));
    }
    let sys = match assemble(gens, &[f], b, exec) {
        Ok(s) => s,
        Err(msg) => return Ok(MembershipWitness::inconclusive(*b, 0, 0, format!("{msg} ({b})"))),
    };
    let polys = column_polys(&sys, exec);
    let mut rows = RowIndex { ids: HashMap::new() };
    // Assign row ids in canonical monomial order for determinism.
    let mut all: BTreeSet<Monomial> = polys.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    all.extend(f.terms().map(|(m, _)| m.clone()));
    for m in &all {
        rows.id(m);
    }
    let mut ech = Echelon::new();
    for (j, p) in polys.iter().enumerate() {
        let v = rows.vector(p);
        ech.insert(v, vec![(j, FieldElement::one(f.ring().field()))]);
    }
    let target = rows.vector(f);
    let (residual, combo) = ech.reduce(target, Vec::new());
    if !residual.is_empty() {
        return Ok(MembershipWitness::inconclusive(
            *b,
            sys.columns.len(),
            ech.rank(),
            format!("not in the truncated span ({b})"),
        ));
    }
    // f − Σ combo_j col_j = 0 after negation: reduce subtracted c·b, so
    // f = −combo.
    let terms = combo
        .into_iter()
        .map(|(j, c)| {
            let col = &sys.columns[j];
            let src = &sys.prolonged[col.source];
            WitnessTerm {
                coeff: -c,
                multiplier: col.multiplier.clone(),
                generator: src.generator,
                derivative: src.k,
            }
        })
        .collect();
    let w = MembershipWitness {
        verdict: OracleVerdict::Member,
        power: 1,
        terms,
        bounds: *b,
        columns: sys.columns.len(),
        rank: ech.rank(),
        diagnostic: None,
    };
    debug_assert!(w.verify(f, gens));
    Ok(w)
}

/// Tries `f^e` for `e = 1..=E`, returning the first Member.
pub fn radical_member(f: &DiffPoly, gens: &[DiffPoly], b: &TruncationBounds) -> Result<MembershipWitness> {
    let mut last = None;
    for e in 1..=b.power.max(1) {
        let mut w = truncated_member(&f.pow(e), gens, b)?;
        if w.is_member() {
            w.power = e;
            return Ok(w);
        }
        last = Some(w);
    }
    let mut w = last.expect("at least one power tried");
    w.diagnostic = Some(format!("no power up to {} in the truncated span ({b})", b.power.max(1)));
    Ok(w)
}

/// Dimension of the subspace of the truncated span made of polynomials of
/// total degree `≤ max_degree`.
pub fn low_degree_subspace_dim(gens: &[DiffPoly], max_degree: u32, b: &TruncationBounds) -> Result<usize> {
    let Some(g0) = gens.first() else {
        return Ok(0);
    };
    let ring = g0.ring().clone();
    let sys = assemble_all(gens, b).map_err(Error::InvalidPoint)?;
    let polys = column_polys(&sys, Exec::default());
    let mut rows = RowIndex { ids: HashMap::new() };
    let mut full = Echelon::new();
    let mut high = Echelon::new();
    let one = FieldElement::one(ring.field());
    for p in &polys {
        full.insert(rows.vector(p), vec![(0, one.clone())]);
        let hp = DiffPoly::from_terms(
            &ring,
            p.terms()
                .filter(|(m, _)| m.degree() > max_degree)
                .map(|(m, c)| (m.clone(), c.clone())),
        );
        high.insert(rows.vector(&hp), vec![(0, one.clone())]);
    }
    Ok(full.rank() - high.rank())
}

/// Every column up to the degree bound, without grading restrictions.
fn assemble_all(gens: &[DiffPoly], b: &TruncationBounds) -> std::result::Result<System, String> {
    let ring = gens[0].ring().clone();
    let mut prolonged = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        let mut p = g.clone();
        for k in 0..=b.prolongation {
            if k > 0 {
                p = p.derive();
            }
            if p.max_order().unwrap_or(0) > b.jet_order {
                break;
            }
            if p.total_degree() <= b.degree && !p.is_zero() {
                prolonged.push(Prolonged { generator: gi, k, poly: p.clone() });
            }
        }
    }
    let vars: Vec<DerVar> = (0..ring.nvars())
        .flat_map(|i| (0..=b.jet_order).map(move |j| DerVar::new(i, j)))
        .collect();
    let mut columns = Vec::new();
    for (source, p) in prolonged.iter().enumerate() {
        let mut out = Vec::new();
        if !monomials(&vars, 0, b.degree - p.poly.total_degree(), None, b.max_columns, &mut out) {
            return Err(format!("column cap {} exceeded", b.max_columns));
        }
        columns.extend(out.into_iter().map(|m| Column { source, multiplier: m }));
    }
    Ok(System { prolonged, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::Ring;
    use crate::field::FieldTag;
    use crate::text::parse_poly;
    use std::sync::Arc;

    fn ring(names: &[&str]) -> Arc<Ring> {
        Ring::new(FieldTag::Rationals, names.iter().copied())
    }

    #[test]
    fn cube_of_derivative() {
        let r = ring(&["x"]);
        let f = parse_poly("x'^3", &r).unwrap();
        let g = vec![parse_poly("x^2", &r).unwrap()];
        let w = truncated_member(&f, &g, &TruncationBounds::new(2, 3, 6, 1)).unwrap();
        assert!(w.is_member());
        assert!(w.verify(&f, &g));
    }

    #[test]
    fn non_members_are_inconclusive() {
        let r = ring(&["x"]);
        let g = vec![parse_poly("x^2", &r).unwrap()];
        let x = parse_poly("x", &r).unwrap();
        assert!(!truncated_member(&x, &g, &TruncationBounds::default()).unwrap().is_member());
        let one = DiffPoly::one(&r);
        let gx = vec![x.clone()];
        let w = radical_member(&one, &gx, &TruncationBounds::new(2, 2, 4, 3)).unwrap();
        assert!(!w.is_member());
        assert!(w.diagnostic.unwrap().contains("N=2"));
        let w = radical_member(&x, &g, &TruncationBounds::new(2, 2, 4, 3)).unwrap();
        assert_eq!((w.is_member(), w.power), (true, 2));
    }

    #[test]
    fn syzygy_span() {
        let r = ring(&["s", "t", "u"]);
        let gens: Vec<_> = ["s^2 + t*u", "t^2 + u*s", "u^2 + s*t"]
            .iter()
            .map(|g| parse_poly(g, &r).unwrap())
            .collect();
        let f = parse_poly("2*s^4", &r).unwrap();
        let b = TruncationBounds::new(0, 0, 4, 1);
        let w = truncated_member(&f, &gens, &b).unwrap();
        assert!(w.is_member() && w.verify(&f, &gens));
        assert_eq!(low_degree_subspace_dim(&gens, 1, &b).unwrap(), 0);
    }

    #[test]
    fn column_cap_is_reported() {
        let r = ring(&["x", "y"]);
        let g = vec![parse_poly("x^2 + y^3 + x'", &r).unwrap()];
        let f = parse_poly("x''*y", &r).unwrap();
        let b = TruncationBounds { max_columns: 10, ..TruncationBounds::default() };
        let w = truncated_member(&f, &g, &b).unwrap();
        assert!(!w.is_member());
        assert!(w.diagnostic.unwrap().contains("cap"));
    }
}
