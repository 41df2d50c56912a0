//! Linearization `L[u] = Σ ∂u/∂x_i^{(j)} · y_i^{(j)}` and its specialization
//! at differential points.
//!
//! The perturbation variables live in [`Ring::extended`]: `y_i` is index
//! `i + n` and prints as `d<name>`.

use std::fmt;
use std::sync::Arc;

use crate::diffpoly::{Convention, DerVar, DiffPoly, Monomial, Order, Ring};
use crate::error::{Error, Result};
use crate::jacobi::{jacobi_assign, JacobiResult, OrderMatrix};
use crate::point::{eval_at, eval_concrete, DiffPoint};

/// A polynomial in the extended ring, homogeneous of degree 1 in the
/// perturbation block (or zero).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedPoly {
    pub poly: DiffPoly,
    base_nvars: usize,
}

impl LinearizedPoly {
    pub fn base_nvars(&self) -> usize {
        self.base_nvars
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Coefficient of `y_var^{(order)}`, in the extended ring.
    pub fn coefficient(&self, var: usize, order: u32) -> DiffPoly {
        self.poly.coeff_in(DerVar::new(var + self.base_nvars, order), 1)
    }

    /// Order in `y_var`, under a convention.
    pub fn order_in(&self, var: usize, convention: Convention) -> Order {
        self.poly.order_of(var + self.base_nvars, convention)
    }
}

impl fmt::Display for LinearizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

fn y_of(v: DerVar, n: usize) -> DerVar {
    DerVar::new(v.var + n, v.order)
}

/// Symbolic linearization in the extended ring.
pub fn linearize_sym(u: &DiffPoly) -> LinearizedPoly {
    let base = u.ring();
    let n = base.nvars();
    let ext = base.extended();
    let mut acc = DiffPoly::zero(&ext);
    for v in u.der_vars() {
        let coef = u.partial(v).lift_to(&ext);
        acc = &acc + &(&coef * &DiffPoly::var(&ext, y_of(v, n)));
    }
    LinearizedPoly {
        poly: acc,
        base_nvars: n,
    }
}

/// Linearization at a generic point: only the support of nonvanishing
/// coefficients is known.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPattern {
    /// Perturbation variables `y_i^{(j)}` whose coefficient is nonzero at
    /// the point, expressed with base indices.
    pub support: Vec<DerVar>,
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Linearization {
    Exact(LinearizedPoly),
    Pattern(LinearPattern),
}

impl Linearization {
    pub fn order_in(&self, var: usize, convention: Convention) -> Order {
        match self {
            Linearization::Exact(l) => l.order_in(var, convention),
            Linearization::Pattern(p) => {
                match p.support.iter().filter(|v| v.var == var).map(|v| v.order).max() {
                    Some(r) => Order::Finite(r),
                    None if convention == Convention::MaxPlus => Order::Finite(0),
                    None => Order::NegInf,
                }
            }
        }
    }

    /// Canonical text; patterns print the support as `{dx', dy}`.
    pub fn describe(&self, ring: &Ring) -> String {
        match self {
            Linearization::Exact(l) => l.to_string(),
            Linearization::Pattern(p) => {
                let ext = ring.extended();
                let n = ring.nvars();
                let names: Vec<String> = p
                    .support
                    .iter()
                    .map(|&v| ext.dervar_name(y_of(v, n)))
                    .collect();
                format!("{{{}}}", names.join(", "))
            }
        }
    }
}

fn require_zero(u: &DiffPoly, pt: &DiffPoint) -> Result<()> {
    if eval_at(u, pt)?.is_zero() {
        Ok(())
    } else {
        Err(Error::NotAZero(u.to_string()))
    }
}

/// Coefficients of `L[u]` evaluated at a concrete point (no zero check).
pub(crate) fn linearize_eval(u: &DiffPoly, pt: &DiffPoint) -> Result<LinearizedPoly> {
    let n = u.ring().nvars();
    let ext = u.ring().extended();
    let mut terms = Vec::new();
    for v in u.der_vars() {
        let c = eval_concrete(&u.partial(v), pt)?;
        terms.push((Monomial::var(y_of(v, n)), c));
    }
    Ok(LinearizedPoly {
        poly: DiffPoly::from_terms(&ext, terms),
        base_nvars: n,
    })
}

/// `L[u, η]`; `η` must be a zero of `u`.
pub fn linearize_at(u: &DiffPoly, pt: &DiffPoint) -> Result<Linearization> {
    require_zero(u, pt)?;
    match pt {
        DiffPoint::Concrete { .. } => Ok(Linearization::Exact(linearize_eval(u, pt)?)),
        DiffPoint::Generic(c) => {
            let mut support = Vec::new();
            for v in u.der_vars() {
                if !eval_at(&u.partial(v), pt)?.is_zero() {
                    support.push(v);
                }
            }
            Ok(Linearization::Pattern(LinearPattern {
                support,
                heuristic: !c.prime_verified,
            }))
        }
    }
}

pub fn linearized_system(us: &[DiffPoly], pt: &DiffPoint) -> Result<Vec<Linearization>> {
    us.iter().map(|u| linearize_at(u, pt)).collect()
}

/// `max{ r : ∂u/∂x_j^{(r)}(η) ≠ 0 }` under the convention.
pub fn linearized_order(u: &DiffPoly, pt: &DiffPoint, var: usize, convention: Convention) -> Result<Order> {
    Ok(linearize_at(u, pt)?.order_in(var, convention))
}

/// Jacobi number of the linearized system together with its order matrix.
pub fn jacobi_after_linearization(
    us: &[DiffPoly],
    pt: &DiffPoint,
    convention: Convention,
) -> Result<(OrderMatrix, JacobiResult)> {
    let n = match us.first() {
        Some(u) => u.ring().nvars(),
        None => 0,
    };
    if us.len() != n {
        return Err(Error::NotSquare {
            equations: us.len(),
            variables: n,
        });
    }
    let lins = linearized_system(us, pt)?;
    let entries = lins
        .iter()
        .map(|l| (0..n).map(|j| l.order_in(j, convention)).collect())
        .collect();
    let m = OrderMatrix::new(entries, convention)?;
    let j = jacobi_assign(&m);
    Ok((m, j))
}

/// Checks `L[∂u] = ∂L[u]` in the extended ring.
pub fn tangent_rename_check(u: &DiffPoly) -> bool {
    let lhs = linearize_sym(&u.derive());
    let rhs = linearize_sym(u).poly.derive();
    lhs.poly == rhs
}

/// The extended ring used for perturbation variables.
pub fn extended_ring(ring: &Arc<Ring>) -> Arc<Ring> {
    ring.extended()
}
