//! Deterministic exact Gaussian elimination over sparse rational columns.
//!
//! One incremental structure drives every solve in the crate: columns are
//! fed in a fixed order, each is forward-reduced against the pivots found so
//! far, and a nonzero remainder becomes a new monic pivot at its lowest
//! nonzero row. Feeding order plus the lowest-row pivot rule make every
//! derived object (kernels, particular solutions, image bases, inverses)
//! reproducible to the byte.

use crate::scalar::{lc_axpy, lc_scale, lc_single, LinComb, Q};
use num_traits::One;
#[cfg(test)]
use num_traits::Zero;
use std::collections::BTreeMap;

/// Matrix-vector product with the matrix given as columns.
pub fn apply_cols(cols: &[LinComb], v: &LinComb) -> LinComb {
    let mut out = LinComb::new();
    for (j, c) in v {
        lc_axpy(&mut out, c, &cols[*j]);
    }
    out
}

/// Outcome of feeding one column to an [`Eliminator`].
pub enum Sift {
    /// The column was dependent; the payload expresses that dependency in
    /// terms of the payloads fed so far.
    Dependent(LinComb),
    /// The column became a new pivot at this row.
    Independent(usize),
}

/// Incremental forward elimination with per-column payloads.
///
/// Invariant: for every stored pivot row `r`, the stored column is monic at
/// `r`, `r` is its lowest nonzero row, and payload/column pairs stay related
/// by whatever linear bookkeeping the caller feeds in (payloads are reduced
/// by exactly the same operations as columns).
#[derive(Clone, Default)]
pub struct Eliminator {
    cols: BTreeMap<usize, (LinComb, LinComb)>,
}

impl Eliminator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forward-reduce `v` (and its payload in lockstep) against all pivots.
    pub fn reduce(&self, mut v: LinComb, mut payload: LinComb) -> (LinComb, LinComb) {
        for (row, (col, pay)) in &self.cols {
            if let Some(c) = v.get(row).cloned() {
                let neg = -c;
                lc_axpy(&mut v, &neg, col);
                lc_axpy(&mut payload, &neg, pay);
            }
        }
        (v, payload)
    }

    /// Reduce and, if independent, store the monic remainder as a pivot.
    pub fn insert(&mut self, v: LinComb, payload: LinComb) -> Sift {
        let (mut v, mut payload) = self.reduce(v, payload);
        match v.iter().next() {
            None => Sift::Dependent(payload),
            Some((row, lead)) => {
                let row = *row;
                let inv = lead.clone().recip();
                lc_scale(&mut v, &inv);
                lc_scale(&mut payload, &inv);
                self.cols.insert(row, (v, payload));
                Sift::Independent(row)
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn reduces_to_zero(&self, v: &LinComb) -> bool {
        self.reduce(v.clone(), LinComb::new()).0.is_empty()
    }

    /// Stored monic column and payload at a pivot row.
    pub fn pivot(&self, row: usize) -> Option<(&LinComb, &LinComb)> {
        self.cols.get(&row).map(|(c, p)| (c, p))
    }
}

/// Reusable solver for `A x = b` with `A` given as columns.
///
/// Solutions are the deterministic particular solution of the elimination:
/// dependent (free) columns never enter, so their coordinates are zero.
pub struct LinearSolver {
    elim: Eliminator,
}

impl LinearSolver {
    pub fn new<'a>(cols: impl IntoIterator<Item = &'a LinComb>) -> Self {
        let mut elim = Eliminator::new();
        for (j, col) in cols.into_iter().enumerate() {
            let _ = elim.insert(col.clone(), lc_single(j, Q::one()));
        }
        Self { elim }
    }

    pub fn rank(&self) -> usize {
        self.elim.rank()
    }

    /// Some(x) with A x = b, or None when b is outside the column span.
    pub fn solve(&self, b: &LinComb) -> Option<LinComb> {
        let (rem, pay) = self.elim.reduce(b.clone(), LinComb::new());
        if !rem.is_empty() {
            return None;
        }
        let mut x = pay;
        lc_scale(&mut x, &-Q::one());
        Some(x)
    }
}

/// Basis of the kernel of the column-matrix, in free-column order; each
/// vector is +1 at its free column.
pub fn kernel_basis(cols: &[LinComb]) -> Vec<LinComb> {
    let mut elim = Eliminator::new();
    let mut out = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        if let Sift::Dependent(p) = elim.insert(col.clone(), lc_single(j, Q::one())) {
            out.push(p);
        }
    }
    out
}

pub fn rank(cols: &[LinComb]) -> usize {
    let mut elim = Eliminator::new();
    for col in cols {
        let _ = elim.insert(col.clone(), LinComb::new());
    }
    elim.rank()
}

/// Columns of the inverse of a square column-matrix on `0..dim`, or None
/// when the matrix is singular or not square.
pub fn invert(cols: &[LinComb], dim: usize) -> Option<Vec<LinComb>> {
    if cols.len() != dim {
        return None;
    }
    let solver = LinearSolver::new(cols.iter());
    (0..dim)
        .map(|j| solver.solve(&lc_single(j, Q::one())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{lc_coeff, qi, qr};

    fn col(entries: &[(usize, Q)]) -> LinComb {
        let mut m = LinComb::new();
        for (i, c) in entries {
            if !c.is_zero() {
                m.insert(*i, c.clone());
            }
        }
        m
    }

    #[test]
    fn solves_a_full_rank_system() {
        // A = [[1, 1], [2, 3]] as columns.
        let a = vec![col(&[(0, qi(1)), (1, qi(2))]), col(&[(0, qi(1)), (1, qi(3))])];
        let solver = LinearSolver::new(a.iter());
        let b = col(&[(0, qi(0)), (1, qi(1))]);
        let x = solver.solve(&b).unwrap();
        assert_eq!(lc_coeff(&x, 0), qi(-1));
        assert_eq!(lc_coeff(&x, 1), qi(1));
        assert_eq!(apply_cols(&a, &x), b);
    }

    #[test]
    fn detects_inconsistent_systems() {
        let a = vec![col(&[(0, qi(1))]), col(&[(0, qi(2))])];
        let solver = LinearSolver::new(a.iter());
        assert!(solver.solve(&col(&[(1, qi(1))])).is_none());
        assert!(solver.solve(&col(&[(0, qr(7, 3))])).is_some());
    }

    #[test]
    fn kernel_of_dependent_columns() {
        // Second column is twice the first.
        let a = vec![col(&[(0, qi(1)), (1, qi(2))]), col(&[(0, qi(2)), (1, qi(4))])];
        let ker = kernel_basis(&a);
        assert_eq!(ker.len(), 1);
        assert!(apply_cols(&a, &ker[0]).is_empty());
        assert_eq!(lc_coeff(&ker[0], 1), qi(1));
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn inverts_a_matrix() {
        let a = vec![col(&[(0, qi(2)), (1, qi(1))]), col(&[(0, qi(5)), (1, qi(3))])];
        let inv = invert(&a, 2).unwrap();
        for j in 0..2 {
            let e = apply_cols(&a, &inv[j]);
            assert_eq!(e, lc_single(j, Q::one()));
        }
        let sing = vec![col(&[(0, qi(1))]), col(&[(0, qi(3))])];
        assert!(invert(&sing, 2).is_none());
    }
}
