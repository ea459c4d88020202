//! Multiset words over a shifted graded basis.
//!
//! An L∞ structure lives most comfortably on the symmetric coalgebra of the
//! suspension g[1]: a basis element of S^k(g[1]) is a non-decreasing word of
//! basis letters, where a letter may repeat only if its shifted degree
//! σ(x) = deg(x) − 1 is even. The same multisets, read through the décalage
//! sign, form a basis of Λ^k g. This module enumerates those words, sorts
//! arbitrary letter tuples into canonical order with the Koszul sign, and
//! enumerates block decompositions of a word with unshuffle signs.

use crate::graded::GradedVectorSpace;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A canonical word: non-decreasing letter indices into the base space.
pub type Word = Vec<usize>;

/// Shifted degree of a letter: deg(x) − 1.
pub fn sigma(space: &GradedVectorSpace, letter: usize) -> i32 {
    space.degree(letter) - 1
}

/// Total shifted degree of a word.
pub fn word_sigma(space: &GradedVectorSpace, w: &[usize]) -> i32 {
    w.iter().map(|&l| sigma(space, l)).sum()
}

/// Total unshifted degree of a word.
pub fn word_degree(space: &GradedVectorSpace, w: &[usize]) -> i32 {
    w.iter().map(|&l| space.degree(l)).sum()
}

/// Sign of the décalage identification between Λ^k g and S^k(g[1]) on a
/// word (x_1, ..., x_k): (−1)^{Σ_i (k−i)·deg(x_i)}.
pub fn decalage_sign(space: &GradedVectorSpace, w: &[usize]) -> i32 {
    let k = w.len();
    let mut e = 0i32;
    for (i, &l) in w.iter().enumerate() {
        e += ((k - 1 - i) as i32) * space.degree(l);
    }
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sort letters into canonical order inside S(g[1]), tracking the Koszul
/// sign over shifted degrees. None when the word vanishes (a repeated
/// letter of odd shifted degree).
pub fn normalize_s(space: &GradedVectorSpace, letters: &[usize]) -> Option<(Word, i32)> {
    let mut w = letters.to_vec();
    let mut sign = 1i32;
    // Insertion sort: each adjacent swap of letters of shifted degrees p, q
    // contributes (−1)^{pq}.
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            let p = sigma(space, w[j - 1]);
            let q = sigma(space, w[j]);
            if (p * q) % 2 != 0 {
                sign = -sign;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    for pair in w.windows(2) {
        if pair[0] == pair[1] && sigma(space, pair[0]) % 2 != 0 {
            return None;
        }
    }
    Some((w, sign))
}

/// Sort letters into canonical order inside Λg, tracking the sign of the
/// antisymmetry convention x∧y = (−1)^{deg x·deg y + 1} y∧x. None when the
/// word vanishes (a repeated letter of even unshifted degree).
pub fn normalize_wedge(space: &GradedVectorSpace, letters: &[usize]) -> Option<(Word, i32)> {
    let mut w = letters.to_vec();
    let mut sign = 1i32;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            let p = space.degree(w[j - 1]);
            let q = space.degree(w[j]);
            if (p * q + 1) % 2 != 0 {
                sign = -sign;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    for pair in w.windows(2) {
        if pair[0] == pair[1] && space.degree(pair[0]) % 2 == 0 {
            return None;
        }
    }
    Some((w, sign))
}

/// Ordered basis of Λ^k g (equivalently S^k(g[1])): non-decreasing words in
/// lexicographic order, repeats only on letters of even shifted degree.
pub fn exterior_basis(space: &GradedVectorSpace, k: usize) -> Vec<Word> {
    assert!(k >= 1, "arity must be positive");
    let mut out = Vec::new();
    let mut stack: Word = Vec::with_capacity(k);
    fn rec(space: &GradedVectorSpace, k: usize, from: usize, stack: &mut Word, out: &mut Vec<Word>) {
        if stack.len() == k {
            out.push(stack.clone());
            return;
        }
        for l in from..space.dim() {
            let repeat = stack.last() == Some(&l);
            if repeat && sigma(space, l) % 2 != 0 {
                continue;
            }
            stack.push(l);
            rec(space, k, l, stack, out);
            stack.pop();
        }
    }
    rec(space, k, 0, &mut stack, &mut out);
    out
}

/// All splittings of the positions of `w` into a size-`j` part and its
/// complement, as (part, rest, sign): the Koszul unshuffle sign over
/// shifted degrees for bringing the part to the front. Both outputs stay
/// non-decreasing because positions keep their order.
pub fn subword_splits(
    space: &GradedVectorSpace,
    w: &[usize],
    j: usize,
) -> Vec<(Word, Word, i32)> {
    let k = w.len();
    assert!(j >= 1 && j <= k);
    let mut out = Vec::new();
    let mut chosen = vec![false; k];
    fn rec(
        space: &GradedVectorSpace,
        w: &[usize],
        j: usize,
        from: usize,
        chosen: &mut Vec<bool>,
        picked: usize,
        out: &mut Vec<(Word, Word, i32)>,
    ) {
        if picked == j {
            let mut part = Word::new();
            let mut rest = Word::new();
            let mut sign = 1i32;
            for (p, &c) in chosen.iter().enumerate() {
                if c {
                    // Inversions: earlier unchosen positions hop over this one.
                    for (q, &c2) in chosen.iter().enumerate().take(p) {
                        if !c2 {
                            let d = sigma(space, w[q]) * sigma(space, w[p]);
                            if d % 2 != 0 {
                                sign = -sign;
                            }
                        }
                    }
                    part.push(w[p]);
                } else {
                    rest.push(w[p]);
                }
            }
            out.push((part, rest, sign));
            return;
        }
        for p in from..w.len() {
            chosen[p] = true;
            rec(space, w, j, p + 1, chosen, picked + 1, out);
            chosen[p] = false;
        }
    }
    rec(space, w, j, 0, &mut chosen, 0, &mut out);
    out
}

/// All assignments of the positions of `w` to `m` labelled nonempty blocks,
/// as (blocks, sign): the Koszul sign over shifted degrees of the unshuffle
/// sorting positions by block label.
pub fn decompositions(
    space: &GradedVectorSpace,
    w: &[usize],
    m: usize,
) -> Vec<(Vec<Word>, i32)> {
    let k = w.len();
    assert!(m >= 1);
    let mut out = Vec::new();
    if m > k {
        return out;
    }
    let mut assign = vec![0usize; k];
    'outer: loop {
        // Check all blocks nonempty.
        let mut seen = vec![false; m];
        for &a in &assign {
            seen[a] = true;
        }
        if seen.iter().all(|&s| s) {
            let mut blocks = vec![Word::new(); m];
            let mut sign = 1i32;
            for p in 0..k {
                for q in (p + 1)..k {
                    if assign[p] > assign[q] {
                        let d = sigma(space, w[p]) * sigma(space, w[q]);
                        if d % 2 != 0 {
                            sign = -sign;
                        }
                    }
                }
                blocks[assign[p]].push(w[p]);
            }
            out.push((blocks, sign));
        }
        // Next assignment, odometer style.
        for p in (0..k).rev() {
            assign[p] += 1;
            if assign[p] < m {
                continue 'outer;
            }
            assign[p] = 0;
        }
        break;
    }
    out
}

/// Word bases for every arity 1..=N over one space, with position lookup
/// and flat offsets for whole-coalgebra indexing.
#[derive(Debug, Clone)]
pub struct SymWords {
    space: Arc<GradedVectorSpace>,
    per_arity: Vec<Vec<Word>>,
    position: Vec<BTreeMap<Word, usize>>,
    offsets: Vec<usize>,
    total: usize,
}

impl SymWords {
    pub fn build(space: Arc<GradedVectorSpace>, n: usize) -> Self {
        assert!(n >= 1, "truncation must be positive");
        let mut per_arity = Vec::with_capacity(n);
        let mut position = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0;
        for k in 1..=n {
            let words = exterior_basis(&space, k);
            let mut idx = BTreeMap::new();
            for (pos, w) in words.iter().enumerate() {
                idx.insert(w.clone(), pos);
            }
            offsets.push(total);
            total += words.len();
            per_arity.push(words);
            position.push(idx);
        }
        Self { space, per_arity, position, offsets, total }
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn truncation(&self) -> usize {
        self.per_arity.len()
    }

    /// Words of one arity (1-based), lexicographic.
    pub fn words(&self, k: usize) -> &[Word] {
        &self.per_arity[k - 1]
    }

    pub fn pos(&self, k: usize, w: &[usize]) -> Option<usize> {
        self.position[k - 1].get(w).copied()
    }

    /// Flat index of a word across all arities.
    pub fn flat(&self, k: usize, pos: usize) -> usize {
        self.offsets[k - 1] + pos
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn label(&self, w: &[usize]) -> String {
        w.iter().map(|&l| self.space.label(l)).collect::<Vec<_>>().join("·")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedVectorSpace;

    fn space(items: &[(&str, i32)]) -> Arc<GradedVectorSpace> {
        Arc::new(
            GradedVectorSpace::new(items.iter().map(|(l, d)| (l.to_string(), *d)).collect())
                .unwrap(),
        )
    }

    #[test]
    fn exterior_basis_excludes_odd_shifted_repeats() {
        // x has degree 0, shifted degree −1 (odd): x·x excluded.
        let s = space(&[("x", 0), ("y", 1)]);
        let b2 = exterior_basis(&s, 2);
        assert_eq!(b2, vec![vec![0, 1], vec![1, 1]]);
        let b1 = exterior_basis(&s, 1);
        assert_eq!(b1, vec![vec![0], vec![1]]);
    }

    #[test]
    fn exterior_basis_three_letters() {
        // z degree 0 (odd shifted), a and b degree 1 (even shifted).
        let s = space(&[("z", 0), ("a", 1), ("b", 1)]);
        let b2 = exterior_basis(&s, 2);
        assert_eq!(
            b2,
            vec![vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]
        );
    }

    #[test]
    fn normalize_s_signs() {
        let s = space(&[("x", 0), ("y", 1)]);
        // Swapping two odd-shifted letters x, x would vanish:
        assert_eq!(normalize_s(&s, &[0, 0]), None);
        // y (even shifted) past x (odd shifted): no sign.
        assert_eq!(normalize_s(&s, &[1, 0]), Some((vec![0, 1], 1)));
        // Two odd-shifted distinct letters anticommute.
        let t = space(&[("u", 0), ("v", 2)]);
        assert_eq!(normalize_s(&t, &[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(normalize_s(&t, &[1, 1]), None);
    }

    #[test]
    fn normalize_wedge_signs() {
        let s = space(&[("x", 0), ("y", 1)]);
        // x∧x = 0 for even degree.
        assert_eq!(normalize_wedge(&s, &[0, 0]), None);
        // y∧y allowed for odd degree.
        assert_eq!(normalize_wedge(&s, &[1, 1]), Some((vec![1, 1], 1)));
        // y∧x = (−1)^{1·0+1} x∧y = −x∧y.
        assert_eq!(normalize_wedge(&s, &[1, 0]), Some((vec![0, 1], -1)));
        // Two odd-degree distinct letters commute with + sign.
        let t = space(&[("a", 1), ("b", 1)]);
        assert_eq!(normalize_wedge(&t, &[1, 0]), Some((vec![0, 1], 1)));
    }

    #[test]
    fn decalage_sign_examples() {
        let s = space(&[("z", 0), ("a", 1), ("b", 1)]);
        // (z, a): exponent 1·0 + 0·1 = 0.
        assert_eq!(decalage_sign(&s, &[0, 1]), 1);
        // (a, b): exponent 1·1 + 0·1 = 1.
        assert_eq!(decalage_sign(&s, &[1, 2]), -1);
        // (a, a, b): exponent 2·1 + 1·1 + 0 = 3.
        assert_eq!(decalage_sign(&s, &[1, 1, 2]), -1);
    }

    #[test]
    fn subword_splits_count_and_signs() {
        let s = space(&[("x", 0), ("y", 1)]);
        // Word x·y, j = 1: part {x} sign +, part {y} sign (−1)^{σx·σy} = +.
        let splits = subword_splits(&s, &[0, 1], 1);
        assert_eq!(
            splits,
            vec![(vec![0], vec![1], 1), (vec![1], vec![0], 1)]
        );
        // Two odd-shifted letters: picking the second letter flips sign.
        let t = space(&[("u", 0), ("v", 2)]);
        let splits = subword_splits(&t, &[0, 1], 1);
        assert_eq!(
            splits,
            vec![(vec![0], vec![1], 1), (vec![1], vec![0], -1)]
        );
        // Repeated letter: two equal splits, total coefficient 2.
        let splits = subword_splits(&s, &[1, 1], 1);
        assert_eq!(
            splits,
            vec![(vec![1], vec![1], 1), (vec![1], vec![1], 1)]
        );
    }

    #[test]
    fn decompositions_cover_all_assignments() {
        let s = space(&[("x", 0), ("y", 1)]);
        let d = decompositions(&s, &[0, 1], 2);
        // Assignments: (0,1) and (1,0).
        assert_eq!(d.len(), 2);
        let d3 = decompositions(&s, &[1, 1], 3);
        assert!(d3.is_empty());
        let d1 = decompositions(&s, &[0, 1], 1);
        assert_eq!(d1, vec![(vec![vec![0, 1]], 1)]);
    }

    #[test]
    fn sym_words_flat_indexing() {
        let s = space(&[("x", 0), ("y", 1)]);
        let words = SymWords::build(s, 3);
        assert_eq!(words.words(1).len(), 2);
        assert_eq!(words.words(2).len(), 2);
        // Arity 3: x·y·y, y·y·y.
        assert_eq!(words.words(3).len(), 2);
        assert_eq!(words.total(), 6);
        assert_eq!(words.flat(2, 0), 2);
        assert_eq!(words.pos(3, &[0, 1, 1]), Some(0));
        assert_eq!(words.label(&[0, 1, 1]), "x·y·y");
    }
}
