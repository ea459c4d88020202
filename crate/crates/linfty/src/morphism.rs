//! L∞ morphisms as Taylor components, the induced coalgebra morphisms, and
//! their composition.

use crate::algebra::{LInftyAlgebra, WordVec};
use crate::graded::GradedLinearMap;
use crate::scalar::{lc_axpy, lc_scale, sv_add_term, LinComb, Q};
use crate::words::{decalage_sign, decompositions, normalize_s, word_sigma};
use crate::{Error, Result};
use num_traits::One;
use std::collections::BTreeMap;
use std::sync::Arc;

/// An L∞ morphism g1 → g2 at a common truncation N, stored as components
/// F_k: S^k(g1[1]) → g2 on canonical words, where F_k(w) has degree
/// deg_S(w) + 1. Validity (the Maurer-Cartan equation of the convolution
/// algebra) is checked by `conv::check_morphism`, not enforced here.
#[derive(Debug, Clone, PartialEq)]
pub struct LInftyMorphism {
    source: Arc<LInftyAlgebra>,
    target: Arc<LInftyAlgebra>,
    comps: Vec<Vec<LinComb>>,
}

impl LInftyMorphism {
    /// Build from S-form components; validates shape and degrees.
    pub fn new_sform(
        source: Arc<LInftyAlgebra>,
        target: Arc<LInftyAlgebra>,
        comps: Vec<Vec<LinComb>>,
    ) -> Result<Self> {
        if source.truncation() != target.truncation() {
            return Err(Error::TruncationMismatch {
                left: source.truncation(),
                right: target.truncation(),
            });
        }
        let n = source.truncation();
        if comps.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} arity levels, got {}",
                n,
                comps.len()
            )));
        }
        for (ki, level) in comps.iter().enumerate() {
            let k = ki + 1;
            if level.len() != source.words().words(k).len() {
                return Err(Error::ShapeMismatch(format!(
                    "arity {k}: expected {} components, got {}",
                    source.words().words(k).len(),
                    level.len()
                )));
            }
            for (pos, value) in level.iter().enumerate() {
                let w = &source.words().words(k)[pos];
                let want = word_sigma(source.space(), w) + 1;
                for idx in value.keys() {
                    if *idx >= target.space().dim() || target.space().degree(*idx) != want {
                        return Err(Error::ShapeMismatch(format!(
                            "component {k} on {} must land in degree {want}",
                            source.words().label(w)
                        )));
                    }
                }
            }
        }
        Ok(Self { source, target, comps })
    }

    /// The identity morphism of an algebra.
    pub fn identity(alg: Arc<LInftyAlgebra>) -> Self {
        let n = alg.truncation();
        let mut comps: Vec<Vec<LinComb>> = Vec::with_capacity(n);
        for k in 1..=n {
            let words = alg.words().words(k);
            if k == 1 {
                comps.push((0..words.len()).map(|j| crate::scalar::lc_single(j, Q::one())).collect());
            } else {
                comps.push(vec![LinComb::new(); words.len()]);
            }
        }
        Self { source: alg.clone(), target: alg, comps }
    }

    /// Strict morphism: F_1 = f, higher components zero. `f` must be a
    /// degree-0 map between the underlying spaces.
    pub fn strict(
        source: Arc<LInftyAlgebra>,
        target: Arc<LInftyAlgebra>,
        f: &GradedLinearMap,
    ) -> Result<Self> {
        if f.shift != 0 || f.source != *source.space() || f.target != *target.space() {
            return Err(Error::ShapeMismatch(
                "strict morphism needs a degree-0 map between the two underlying spaces".into(),
            ));
        }
        let n = source.truncation();
        let mut comps = Vec::with_capacity(n);
        for k in 1..=n {
            let words = source.words().words(k);
            if k == 1 {
                comps.push((0..words.len()).map(|j| f.col(j).clone()).collect());
            } else {
                comps.push(vec![LinComb::new(); words.len()]);
            }
        }
        Self::new_sform(source, target, comps)
    }

    pub fn source(&self) -> &Arc<LInftyAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<LInftyAlgebra> {
        &self.target
    }

    pub fn truncation(&self) -> usize {
        self.source.truncation()
    }

    pub fn comp(&self, k: usize, pos: usize) -> &LinComb {
        &self.comps[k - 1][pos]
    }

    pub fn comps(&self) -> &Vec<Vec<LinComb>> {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut Vec<Vec<LinComb>> {
        &mut self.comps
    }

    /// The linear part F_1 as a graded map.
    pub fn linear_part(&self) -> GradedLinearMap {
        GradedLinearMap::new(
            self.source.space().clone(),
            self.target.space().clone(),
            0,
            self.comps[0].clone(),
        )
        .expect("stored components are degree-checked")
    }

    pub fn is_strict(&self) -> bool {
        self.comps.iter().skip(1).all(|level| level.iter().all(LinComb::is_empty))
    }

    /// Apply F_1 to an element of the source.
    pub fn apply_linear(&self, v: &LinComb) -> LinComb {
        crate::solve::apply_cols(&self.comps[0], v)
    }

    /// Evaluate F_m on m source vectors by multilinear expansion.
    pub fn eval_multi(&self, factors: &[&LinComb]) -> LinComb {
        let m = factors.len();
        assert!(m >= 1, "eval_multi needs at least one factor");
        if m > self.truncation() {
            return LinComb::new();
        }
        let mut out = LinComb::new();
        let mut letters = vec![0usize; m];
        fn rec(
            f: &LInftyMorphism,
            factors: &[&LinComb],
            slot: usize,
            letters: &mut Vec<usize>,
            coeff: Q,
            out: &mut LinComb,
        ) {
            if slot == factors.len() {
                let val = f.eval_letters(letters);
                lc_axpy(out, &coeff, &val);
                return;
            }
            for (idx, c) in factors[slot] {
                letters[slot] = *idx;
                rec(f, factors, slot + 1, letters, coeff.clone() * c, out);
            }
        }
        rec(self, factors, 0, &mut letters, Q::one(), &mut out);
        out
    }

    /// Evaluate F_k on letters in any order (S(g[1]) convention).
    pub fn eval_letters(&self, letters: &[usize]) -> LinComb {
        let k = letters.len();
        if k == 0 || k > self.truncation() {
            return LinComb::new();
        }
        match normalize_s(self.source.space(), letters) {
            None => LinComb::new(),
            Some((w, sign)) => {
                let pos = self.source.words().pos(k, &w).expect("canonical word");
                let mut out = self.comps[k - 1][pos].clone();
                if sign < 0 {
                    lc_scale(&mut out, &-Q::one());
                }
                out
            }
        }
    }
}

/// The coalgebra morphism induced by Taylor components, stored as one
/// coalgebra vector per source word. Block-triangular: a word of arity k
/// maps into arities ≤ k, with diagonal block S^k(F_1).
#[derive(Debug, Clone, PartialEq)]
pub struct CoalgebraMap {
    cols: Vec<Vec<WordVec>>,
}

impl CoalgebraMap {
    pub fn col(&self, k: usize, pos: usize) -> &WordVec {
        &self.cols[k - 1][pos]
    }

    pub fn apply(&self, v: &WordVec) -> WordVec {
        let mut out = WordVec::new();
        for ((k, pos), c) in v {
            crate::scalar::sv_axpy(&mut out, c, &self.cols[*k - 1][*pos]);
        }
        out
    }

    /// Exact rank test on the flattened matrix.
    pub fn is_injective(&self, morphism: &LInftyMorphism) -> bool {
        let src_words = morphism.source().words();
        let tgt_words = morphism.target().words();
        let mut flat: Vec<LinComb> = Vec::with_capacity(src_words.total());
        for level in &self.cols {
            for wv in level {
                let mut col = LinComb::new();
                for ((k, pos), c) in wv {
                    sv_add_term(&mut col, tgt_words.flat(*k, *pos), c.clone());
                }
                flat.push(col);
            }
        }
        crate::solve::rank(&flat) == src_words.total()
    }
}

/// Compute the induced coalgebra morphism F_*: the arity-m part of
/// F_*(w) is (1/m!) Σ over ordered block decompositions of w into m blocks
/// of ε(blocks) · F(block_1)···F(block_m), the product resorted into a
/// canonical target word.
pub fn induced_coalgebra_map(f: &LInftyMorphism) -> CoalgebraMap {
    let n = f.truncation();
    let src = f.source();
    let tgt = f.target();
    let mut cols = Vec::with_capacity(n);
    for k in 1..=n {
        let words = src.words().words(k);
        let mut level = Vec::with_capacity(words.len());
        for w in words {
            let mut out = WordVec::new();
            for m in 1..=k {
                let mut factorial = Q::one();
                for i in 2..=m {
                    factorial *= Q::from_integer(i.into());
                }
                let scale = Q::one() / factorial;
                for (blocks, sign) in decompositions(src.space(), w, m) {
                    let factors: Vec<LinComb> = blocks
                        .iter()
                        .map(|b| f.comp(b.len(), src.words().pos(b.len(), b).expect("canonical")))
                        .cloned()
                        .collect();
                    if factors.iter().any(LinComb::is_empty) {
                        continue;
                    }
                    let base = &scale * Q::from_integer((sign as i64).into());
                    expand_product(tgt, &factors, &base, &mut out);
                }
            }
            level.push(out);
        }
        cols.push(level);
    }
    CoalgebraMap { cols }
}

/// Expand a product of m sparse target values into canonical words of
/// S^m(g2[1]), resorting letters with Koszul signs.
fn expand_product(tgt: &LInftyAlgebra, factors: &[LinComb], scale: &Q, out: &mut WordVec) {
    let m = factors.len();
    let mut letters = vec![0usize; m];
    fn rec(
        tgt: &LInftyAlgebra,
        factors: &[LinComb],
        slot: usize,
        letters: &mut Vec<usize>,
        coeff: Q,
        out: &mut WordVec,
    ) {
        if slot == factors.len() {
            if let Some((w, sign)) = normalize_s(tgt.space(), letters) {
                let pos = tgt.words().pos(w.len(), &w).expect("canonical word");
                let c = if sign < 0 { -coeff } else { coeff };
                sv_add_term(out, (w.len(), pos), c);
            }
            return;
        }
        for (idx, c) in &factors[slot] {
            letters[slot] = *idx;
            rec(tgt, factors, slot + 1, letters, coeff.clone() * c, out);
        }
    }
    rec(tgt, factors, 0, &mut letters, scale.clone(), out);
}

/// Composite morphism: Taylor components of G_* ∘ F_*.
pub fn compose_morphisms(f: &LInftyMorphism, g: &LInftyMorphism) -> Result<LInftyMorphism> {
    if f.truncation() != g.truncation() {
        return Err(Error::TruncationMismatch { left: f.truncation(), right: g.truncation() });
    }
    if f.target() != g.source() {
        return Err(Error::ShapeMismatch(
            "composition needs the first morphism's target to be the second's source".into(),
        ));
    }
    let fstar = induced_coalgebra_map(f);
    let n = f.truncation();
    let mut comps = Vec::with_capacity(n);
    for k in 1..=n {
        let words = f.source().words().words(k);
        let mut level = Vec::with_capacity(words.len());
        for pos in 0..words.len() {
            let mut out = LinComb::new();
            for ((m, mpos), c) in fstar.col(k, pos) {
                lc_axpy(&mut out, c, g.comp(*m, *mpos));
            }
            level.push(out);
        }
        comps.push(level);
    }
    LInftyMorphism::new_sform(f.source().clone(), g.target().clone(), comps)
}

/// Λ-form export of the components, in (arity, word) order: letters of the
/// source word plus the value over target labels.
pub fn wedge_components(f: &LInftyMorphism) -> Vec<(Vec<String>, Vec<(String, Q)>)> {
    let mut out = Vec::new();
    for k in 1..=f.truncation() {
        for (pos, w) in f.source().words().words(k).iter().enumerate() {
            let stored = f.comp(k, pos);
            if stored.is_empty() {
                continue;
            }
            let mut value = stored.clone();
            if decalage_sign(f.source().space(), w) < 0 {
                lc_scale(&mut value, &-Q::one());
            }
            out.push((
                w.iter().map(|&l| f.source().space().label(l).to_string()).collect(),
                value
                    .iter()
                    .map(|(i, c)| (f.target().space().label(*i).to_string(), c.clone()))
                    .collect(),
            ));
        }
    }
    out
}

/// Build a morphism from Λ-form components (the inverse of
/// `wedge_components`): letters in any order, sorted with the antisymmetry
/// sign, consistent duplicates allowed.
pub fn from_wedge_components(
    source: Arc<LInftyAlgebra>,
    target: Arc<LInftyAlgebra>,
    entries: &[(Vec<String>, Vec<(String, Q)>)],
) -> Result<LInftyMorphism> {
    let n = source.truncation();
    let mut staged: Vec<BTreeMap<usize, LinComb>> = vec![BTreeMap::new(); n];
    for (letter_names, value_entries) in entries {
        let k = letter_names.len();
        if k == 0 || k > n {
            return Err(Error::ShapeMismatch(format!("component arity {k} outside 1..={n}")));
        }
        let mut letters = Vec::with_capacity(k);
        for l in letter_names {
            letters.push(
                source
                    .space()
                    .index_of(l)
                    .ok_or_else(|| Error::ShapeMismatch(format!("unknown source label {l:?}")))?,
            );
        }
        let mut value = LinComb::new();
        for (l, c) in value_entries {
            let idx = target
                .space()
                .index_of(l)
                .ok_or_else(|| Error::ShapeMismatch(format!("unknown target label {l:?}")))?;
            sv_add_term(&mut value, idx, c.clone());
        }
        match crate::words::normalize_wedge(source.space(), &letters) {
            None => {
                if !value.is_empty() {
                    return Err(Error::InvalidStructure(format!(
                        "nonzero component on the vanishing word {}",
                        letter_names.join("∧")
                    )));
                }
            }
            Some((w, sign)) => {
                if sign < 0 {
                    lc_scale(&mut value, &-Q::one());
                }
                let pos = source.words().pos(k, &w).expect("canonical word");
                match staged[k - 1].get(&pos) {
                    None => {
                        staged[k - 1].insert(pos, value);
                    }
                    Some(prev) if *prev == value => {}
                    Some(_) => {
                        return Err(Error::InvalidStructure(format!(
                            "conflicting components on {}",
                            source.words().label(&w)
                        )));
                    }
                }
            }
        }
    }
    let mut comps = Vec::with_capacity(n);
    for k in 1..=n {
        let words = source.words().words(k);
        let mut level = vec![LinComb::new(); words.len()];
        for (pos, mut value) in std::mem::take(&mut staged[k - 1]) {
            if decalage_sign(source.space(), &words[pos]) < 0 {
                lc_scale(&mut value, &-Q::one());
            }
            level[pos] = value;
        }
        comps.push(level);
    }
    LInftyMorphism::new_sform(source, target, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::{lc_single, qi};

    #[test]
    fn identity_and_strict_composition() {
        let b = fixtures::fix_b(3);
        let id = LInftyMorphism::identity(b.clone());
        let double = LInftyMorphism::strict(
            b.clone(),
            b.clone(),
            &GradedLinearMap::from_entries(
                b.space().clone(),
                b.space().clone(),
                0,
                &[("z", "z", qi(2)), ("a", "a", qi(2)), ("b", "b", qi(2))],
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(compose_morphisms(&double, &id).unwrap(), double);
        assert_eq!(compose_morphisms(&id, &double).unwrap(), double);
        // Strict composition is arity-diagonal: (G∘F)_1 = G_1 ∘ F_1.
        let quad = compose_morphisms(&double, &double).unwrap();
        assert!(quad.is_strict());
        let z = b.space().index_of("z").unwrap();
        assert_eq!(quad.comp(1, z), &lc_single(z, qi(4)));
    }

    #[test]
    fn induced_map_of_identity_is_identity() {
        let d = fixtures::fix_d(3);
        let id = LInftyMorphism::identity(d.clone());
        let m = induced_coalgebra_map(&id);
        for k in 1..=3 {
            for pos in 0..d.words().words(k).len() {
                assert_eq!(m.col(k, pos), &WordVec::from([((k, pos), qi(1))]));
            }
        }
        assert!(m.is_injective(&id));
    }

    #[test]
    fn induced_map_diagonal_blocks_are_symmetric_powers() {
        // Strict F with F_1 = (z ↦ 2z, a ↦ 3a, b ↦ 6b) on fix_b:
        // S²(F_1)(z·a) = 6 z·a.
        let b = fixtures::fix_b(2);
        let f = LInftyMorphism::strict(
            b.clone(),
            b.clone(),
            &GradedLinearMap::from_entries(
                b.space().clone(),
                b.space().clone(),
                0,
                &[("z", "z", qi(2)), ("a", "a", qi(3)), ("b", "b", qi(6))],
            )
            .unwrap(),
        )
        .unwrap();
        let m = induced_coalgebra_map(&f);
        let za = b.words().pos(2, &[0, 1]).unwrap();
        assert_eq!(m.col(2, za), &WordVec::from([((2, za), qi(6))]));
        // Repeated letter: a·a ↦ 9 a·a (the 1/2! cancels the two orderings).
        let aa = b.words().pos(2, &[1, 1]).unwrap();
        assert_eq!(m.col(2, aa), &WordVec::from([((2, aa), qi(9))]));
        assert!(m.is_injective(&f));
    }

    #[test]
    fn zero_morphism_between_abelian_algebras() {
        let a = fixtures::fix_a(3);
        let zero = LInftyMorphism::new_sform(
            a.clone(),
            a.clone(),
            (1..=3).map(|k| vec![LinComb::new(); a.words().words(k).len()]).collect(),
        )
        .unwrap();
        let m = induced_coalgebra_map(&zero);
        for k in 1..=3 {
            for pos in 0..a.words().words(k).len() {
                assert!(m.col(k, pos).is_empty());
            }
        }
        assert!(!m.is_injective(&zero));
    }

    #[test]
    fn wedge_round_trip() {
        let b = fixtures::fix_b(3);
        let id = LInftyMorphism::identity(b.clone());
        let entries = wedge_components(&id);
        let back = from_wedge_components(b.clone(), b.clone(), &entries).unwrap();
        assert_eq!(back, id);
    }

    #[test]
    fn truncation_mismatch_is_rejected() {
        let b2 = fixtures::fix_b(2);
        let b3 = fixtures::fix_b(3);
        let f = LInftyMorphism::identity(b2);
        let g = LInftyMorphism::identity(b3);
        assert!(matches!(
            compose_morphisms(&f, &g),
            Err(Error::TruncationMismatch { .. })
        ));
    }
}
