//! Small named dg Lie algebras used across tests, the self-test suites and
//! the shipped example documents.
//!
//! * `fix_a`: an acyclic pair x → y, zero bracket.
//! * `fix_b`: zero differential, one bracket [z, a] = b.
//! * `fix_c`: the direct sum of `fix_b` and `fix_a`.
//! * `fix_d`: a two-step nilpotent algebra with interacting differential
//!   and brackets: dh = c, [a, b] = c, [a, h] = w.

use crate::algebra::LInftyAlgebra;
use crate::graded::GradedVectorSpace;
use crate::scalar::qi;
use std::sync::Arc;

fn space(items: &[(&str, i32)]) -> Arc<GradedVectorSpace> {
    Arc::new(
        GradedVectorSpace::new(items.iter().map(|(l, d)| (l.to_string(), *d)).collect())
            .expect("fixture space"),
    )
}

/// x in degree 0, y in degree 1, dx = y; zero bracket.
pub fn fix_a(n: usize) -> Arc<LInftyAlgebra> {
    let s = space(&[("x", 0), ("y", 1)]);
    Arc::new(LInftyAlgebra::abelian(s, n, &[("x", "y", qi(1))]).expect("fixture"))
}

/// z in degree 0, a and b in degree 1, zero differential, [z, a] = b.
pub fn fix_b(n: usize) -> Arc<LInftyAlgebra> {
    let s = space(&[("z", 0), ("a", 1), ("b", 1)]);
    Arc::new(
        LInftyAlgebra::dg_lie(s, n, &[], &[(("z", "a"), vec![("b", qi(1))])]).expect("fixture"),
    )
}

/// Direct sum of `fix_b` and `fix_a`: brackets from the first summand,
/// differential from the second.
pub fn fix_c(n: usize) -> Arc<LInftyAlgebra> {
    let s = space(&[("z", 0), ("a", 1), ("b", 1), ("x", 0), ("y", 1)]);
    Arc::new(
        LInftyAlgebra::dg_lie(
            s,
            n,
            &[("x", "y", qi(1))],
            &[(("z", "a"), vec![("b", qi(1))])],
        )
        .expect("fixture"),
    )
}

/// a, b, h in degree 1, c and w in degree 2; dh = c, [a, b] = c,
/// [a, h] = w. The class of w survives in cohomology and is the target of
/// the first interesting transferred l₃.
pub fn fix_d(n: usize) -> Arc<LInftyAlgebra> {
    let s = space(&[("a", 1), ("b", 1), ("h", 1), ("c", 2), ("w", 2)]);
    Arc::new(
        LInftyAlgebra::dg_lie(
            s,
            n,
            &[("h", "c", qi(1))],
            &[
                (("a", "b"), vec![("c", qi(1))]),
                (("a", "h"), vec![("w", qi(1))]),
            ],
        )
        .expect("fixture"),
    )
}
