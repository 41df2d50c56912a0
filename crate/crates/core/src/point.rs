//! Differential points: concrete assignments with coordinates in K, and
//! generic points of characteristic-set components.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::decompose::CharSetComponent;
use crate::diffpoly::{DerVar, DiffPoly, Ring};
use crate::error::{Error, Result};
use crate::field::{field_derive, FieldElement};
use crate::reduction::ritt_remainder;

#[derive(Clone, Debug, PartialEq)]
pub enum DiffPoint {
    /// `η(x_i)` for every variable; `η(x_i^{(j)})` is the j-th coefficient
    /// derivative, so the point is closed under ∂ by construction.
    Concrete {
        ring: Arc<Ring>,
        values: BTreeMap<usize, FieldElement>,
    },
    /// Generic point of a component; only zero/nonzero queries are answered.
    Generic(Box<CharSetComponent>),
}

/// Result of [`eval_at`].
#[derive(Clone, Debug, PartialEq)]
pub enum Evaluation {
    Value(FieldElement),
    /// Generic-mode verdicts; `heuristic` is set when the component is not
    /// known to be prime.
    Zero { heuristic: bool },
    NonZero { heuristic: bool },
}

impl Evaluation {
    pub fn is_zero(&self) -> bool {
        match self {
            Evaluation::Value(v) => v.is_zero(),
            Evaluation::Zero { .. } => true,
            Evaluation::NonZero { .. } => false,
        }
    }

    pub fn is_heuristic(&self) -> bool {
        matches!(
            self,
            Evaluation::Zero { heuristic: true } | Evaluation::NonZero { heuristic: true }
        )
    }
}

impl DiffPoint {
    /// A concrete point; every variable of `ring` needs a value of the
    /// ring's field.
    pub fn concrete(ring: &Arc<Ring>, values: BTreeMap<usize, FieldElement>) -> Result<DiffPoint> {
        for i in 0..ring.nvars() {
            match values.get(&i) {
                None => {
                    return Err(Error::InvalidPoint(format!(
                        "no value for `{}`",
                        ring.names()[i]
                    )))
                }
                Some(v) if v.tag() != ring.field() => {
                    return Err(Error::FieldMismatch(v.tag(), ring.field()))
                }
                _ => {}
            }
        }
        if let Some(&i) = values.keys().find(|&&i| i >= ring.nvars()) {
            return Err(Error::InvalidPoint(format!("variable index {i} out of range")));
        }
        Ok(DiffPoint::Concrete {
            ring: ring.clone(),
            values,
        })
    }

    pub fn zero(ring: &Arc<Ring>) -> DiffPoint {
        let values = (0..ring.nvars())
            .map(|i| (i, FieldElement::zero(ring.field())))
            .collect();
        DiffPoint::Concrete {
            ring: ring.clone(),
            values,
        }
    }

    pub fn generic(c: CharSetComponent) -> DiffPoint {
        DiffPoint::Generic(Box::new(c))
    }

    /// `η(v)` for a concrete point.
    pub fn jet(&self, v: DerVar) -> Option<FieldElement> {
        match self {
            DiffPoint::Concrete { values, .. } => {
                let mut a = values.get(&v.var)?.clone();
                for _ in 0..v.order {
                    a = field_derive(&a);
                }
                Some(a)
            }
            DiffPoint::Generic(_) => None,
        }
    }
}

/// Exact value of `p` at a concrete point.
pub(crate) fn eval_concrete(p: &DiffPoly, pt: &DiffPoint) -> Result<FieldElement> {
    let DiffPoint::Concrete { ring, .. } = pt else {
        return Err(Error::InvalidPoint("expected a concrete point".into()));
    };
    if ring.field() != p.ring().field() {
        return Err(Error::FieldMismatch(p.ring().field(), ring.field()));
    }
    let mut cache: BTreeMap<DerVar, FieldElement> = BTreeMap::new();
    for v in p.der_vars() {
        let val = pt.jet(v).ok_or_else(|| {
            Error::InvalidPoint(format!("no value for `{}`", p.ring().dervar_name(v)))
        })?;
        cache.insert(v, val);
    }
    let mut acc = FieldElement::zero(ring.field());
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for &(v, e) in m.factors() {
            t = &t * &cache[&v].pow(e);
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Evaluates `p` at a point: an exact value for concrete points, a
/// zero/nonzero verdict (via the Ritt remainder) for generic points.
pub fn eval_at(p: &DiffPoly, pt: &DiffPoint) -> Result<Evaluation> {
    match pt {
        DiffPoint::Concrete { .. } => eval_concrete(p, pt).map(Evaluation::Value),
        DiffPoint::Generic(c) => {
            let heuristic = !c.prime_verified;
            let r = ritt_remainder(p, &c.sequence, &c.ranking)?;
            Ok(if r.is_zero() {
                Evaluation::Zero { heuristic }
            } else {
                Evaluation::NonZero { heuristic }
            })
        }
    }
}
