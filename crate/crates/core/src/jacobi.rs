//! Order matrices, Jacobi numbers and the Ritt bound.

use std::fmt;

use serde::Serialize;

use crate::diffpoly::{Convention, DiffPoly, Order};
use crate::error::{Error, Result};
use crate::par::{par_map_range, Exec};

/// Largest size accepted by [`jacobi_brute`].
pub const MAX_BRUTE: usize = 9;

/// `entries[i][j]` is the order of equation `i` in variable `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderMatrix {
    pub entries: Vec<Vec<Order>>,
    pub convention: Convention,
}

impl OrderMatrix {
    pub fn new(entries: Vec<Vec<Order>>, convention: Convention) -> Result<Self> {
        let n = entries.len();
        if let Some(row) = entries.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                equations: n,
                variables: row.len(),
            });
        }
        Ok(OrderMatrix {
            entries,
            convention,
        })
    }

    /// Finite entries from plain integers.
    pub fn from_finite(rows: &[Vec<u32>]) -> Self {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&v| Order::Finite(v)).collect())
            .collect();
        OrderMatrix::new(entries, Convention::MaxPlus).expect("square input")
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, eq: usize, var: usize) -> Order {
        self.entries[eq][var]
    }

    /// The same matrix with −∞ replaced by 0.
    pub fn to_max_plus(&self) -> OrderMatrix {
        OrderMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|o| Order::Finite(o.max_plus())).collect())
                .collect(),
            convention: Convention::MaxPlus,
        }
    }
}

impl fmt::Display for OrderMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(Order::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `witness[j]` is the equation assigned to variable `j`; absent when the
/// value is −∞.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiResult {
    pub value: Order,
    pub witness: Option<Vec<usize>>,
}

pub fn order_matrix(us: &[DiffPoly], nvars: usize, convention: Convention) -> Result<OrderMatrix> {
    if us.len() != nvars {
        return Err(Error::NotSquare {
            equations: us.len(),
            variables: nvars,
        });
    }
    let entries = us
        .iter()
        .map(|u| (0..nvars).map(|j| u.order_of(j, convention)).collect())
        .collect();
    OrderMatrix::new(entries, convention)
}

fn sum_along(m: &OrderMatrix, sigma: &[usize]) -> Order {
    let mut total = 0u32;
    for (j, &i) in sigma.iter().enumerate() {
        match m.get(i, j) {
            Order::Finite(v) => total += v,
            Order::NegInf => return Order::NegInf,
        }
    }
    Order::Finite(total)
}

/// In-place lexicographic successor; false after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Best permutation with `σ(0) = first`, scanning in lexicographic order.
fn best_with_first(m: &OrderMatrix, first: usize) -> (Order, Vec<usize>) {
    let n = m.n();
    let mut perm: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&i| i != first)).collect();
    let mut best = (sum_along(m, &perm), perm.clone());
    while next_permutation(&mut perm[1..]) {
        let v = sum_along(m, &perm);
        if v > best.0 {
            best = (v, perm.clone());
        }
    }
    best
}

/// Exhaustive maximum over all permutations (n ≤ [`MAX_BRUTE`]).
pub fn jacobi_brute(m: &OrderMatrix) -> Result<JacobiResult> {
    jacobi_brute_with(Exec::default(), m)
}

pub fn jacobi_brute_with(exec: Exec, m: &OrderMatrix) -> Result<JacobiResult> {
    let n = m.n();
    if n > MAX_BRUTE {
        return Err(Error::TooLargeForBruteForce { n, max: MAX_BRUTE });
    }
    if n == 0 {
        return Ok(JacobiResult {
            value: Order::Finite(0),
            witness: Some(Vec::new()),
        });
    }
    let blocks = par_map_range(exec, n, |first| best_with_first(m, first));
    // blocks are in lexicographic order of σ(0); keep the first maximum
    let mut best = blocks[0].clone();
    for b in blocks.into_iter().skip(1) {
        if b.0 > best.0 {
            best = b;
        }
    }
    Ok(match best.0 {
        Order::NegInf => JacobiResult {
            value: Order::NegInf,
            witness: None,
        },
        v => JacobiResult {
            value: v,
            witness: Some(best.1),
        },
    })
}

/// Whether the finite entries admit a perfect matching (Kuhn's algorithm).
fn has_perfect_matching(w: &[Vec<Option<u64>>]) -> bool {
    let n = w.len();
    let mut match_of_col: Vec<Option<usize>> = vec![None; n];
    fn augment(
        row: usize,
        w: &[Vec<Option<u64>>],
        seen: &mut [bool],
        match_of_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..w.len() {
            if w[row][col].is_some() && !seen[col] {
                seen[col] = true;
                if match_of_col[col].is_none_or(|r| augment(r, w, seen, match_of_col)) {
                    match_of_col[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|row| {
        let mut seen = vec![false; n];
        augment(row, w, &mut seen, &mut match_of_col)
    })
}

/// Maximum-weight perfect matching over the finite entries of `w`
/// (rows × columns); `None` when no such matching exists. Returns the
/// weight and `col_to_row`.
fn max_weight_assignment(w: &[Vec<Option<u64>>]) -> Option<(u64, Vec<usize>)> {
    let n = w.len();
    if n == 0 {
        return Some((0, Vec::new()));
    }
    if !has_perfect_matching(w) {
        return None;
    }
    // Minimise (top − w); forbidden edges get a cost exceeding the cost of
    // any all-finite matching, so with a finite matching present the
    // optimum never uses them.
    let top = w.iter().flatten().flatten().copied().max().unwrap_or(0) as i128;
    let forbidden = top * n as i128 + 1;
    let cost = |i: usize, j: usize| -> i128 {
        match w[i][j] {
            Some(v) => top - v as i128,
            None => forbidden,
        }
    };
    // Hungarian algorithm with potentials, 1-based internal indexing.
    let inf = i128::MAX / 4;
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let col_to_row: Vec<usize> = (1..=n).map(|j| p[j] - 1).collect();
    let total = col_to_row
        .iter()
        .enumerate()
        .map(|(j, &i)| w[i][j].expect("feasible optimum uses finite edges"))
        .sum();
    Some((total, col_to_row))
}

/// Jacobi number by linear assignment. Ties resolve to the
/// lexicographically smallest witness, matching [`jacobi_brute`].
pub fn jacobi_assign(m: &OrderMatrix) -> JacobiResult {
    let n = m.n();
    let mut w: Vec<Vec<Option<u64>>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|o| o.finite().map(u64::from)).collect())
        .collect();
    let Some((best, _)) = max_weight_assignment(&w) else {
        return JacobiResult {
            value: Order::NegInf,
            witness: None,
        };
    };
    // Fix σ(0), σ(1), … greedily to the smallest row keeping the optimum.
    let mut sigma = Vec::with_capacity(n);
    for j in 0..n {
        for i in 0..n {
            if w[i][j].is_none() || sigma.contains(&i) {
                continue;
            }
            let mut trial = w.clone();
            for (r, row) in trial.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    if (c == j) != (r == i) {
                        *cell = None;
                    }
                }
            }
            if max_weight_assignment(&trial).is_some_and(|(v, _)| v == best) {
                w = trial;
                sigma.push(i);
                break;
            }
        }
    }
    debug_assert_eq!(sigma.len(), n);
    JacobiResult {
        value: Order::Finite(best as u32),
        witness: Some(sigma),
    }
}

/// `Σ_j max_i a[i][j]` with −∞ read as 0.
pub fn ritt_bound(m: &OrderMatrix) -> u32 {
    (0..m.n())
        .map(|j| (0..m.n()).map(|i| m.get(i, j).max_plus()).max().unwrap_or(0))
        .sum()
}

/// Jacobi number of a square system under a convention.
pub fn jacobi_number(us: &[DiffPoly], nvars: usize, convention: Convention) -> Result<JacobiResult> {
    Ok(jacobi_assign(&order_matrix(us, nvars, convention)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Order::{Finite as F, NegInf as N};

    fn m(rows: Vec<Vec<Order>>) -> OrderMatrix {
        OrderMatrix::new(rows, Convention::MinusInfinity).unwrap()
    }

    #[test]
    fn brute_examples() {
        let a = OrderMatrix::from_finite(&[vec![2, 0], vec![1, 0]]);
        let r = jacobi_brute(&a).unwrap();
        assert_eq!(r.value, F(2));
        assert_eq!(r.witness, Some(vec![0, 1]));
        assert_eq!(jacobi_brute(&OrderMatrix::from_finite(&[vec![7]])).unwrap().value, F(7));
        let z = m(vec![vec![N, N], vec![N, N]]);
        assert_eq!(jacobi_brute(&z).unwrap(), JacobiResult { value: N, witness: None });
        let big = OrderMatrix::from_finite(&vec![vec![0; 10]; 10]);
        assert!(matches!(jacobi_brute(&big), Err(Error::TooLargeForBruteForce { .. })));
    }

    #[test]
    fn assign_examples() {
        let a = m(vec![vec![1, 9, 9].into_iter().map(F).collect(), vec![F(9), F(1), F(9)], vec![F(9), F(9), F(1)]]);
        assert_eq!(jacobi_assign(&a).value, F(27));
        let k = 4;
        let diag = m((0..3).map(|i| (0..3).map(|j| if i == j { F(k) } else { N }).collect()).collect());
        let r = jacobi_assign(&diag);
        assert_eq!(r.value, F(3 * k));
        assert_eq!(r.witness, Some(vec![0, 1, 2]));
        let strong = m(vec![vec![N, F(1)], vec![F(1), F(1)]]);
        assert_eq!(jacobi_assign(&strong).value, F(2));
        assert_eq!(jacobi_assign(&m(vec![vec![N, N], vec![F(1), F(0)]])).value, N);
    }

    #[test]
    fn witnesses_agree_on_ties() {
        let a = OrderMatrix::from_finite(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 0]]);
        assert_eq!(jacobi_assign(&a), jacobi_brute(&a).unwrap());
    }

    #[test]
    fn ritt_bound_examples() {
        assert_eq!(ritt_bound(&OrderMatrix::from_finite(&[vec![2, 0], vec![1, 0]])), 2);
        assert_eq!(ritt_bound(&OrderMatrix::from_finite(&[vec![1, 1], vec![1, 1]])), 2);
    }

    #[test]
    fn non_square_rejected() {
        let ring = crate::diffpoly::Ring::new(crate::field::FieldTag::Rationals, ["x", "y"]);
        let u = crate::text::parse_poly("x'", &ring).unwrap();
        assert!(matches!(order_matrix(&[u], 2, Convention::MaxPlus), Err(Error::NotSquare { .. })));
    }
}
