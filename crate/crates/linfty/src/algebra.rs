//! dg Lie and arity-truncated L∞ algebras.
//!
//! A structure is a graded space g together with Taylor coefficients l_k of
//! degree 2 − k for 1 ≤ k ≤ N. Internally every l_k is stored on the word
//! basis of S^k(g[1]) (degree +1 against shifted degrees, signs uniform);
//! constructors and exports speak the Λ^k g convention and convert through
//! the décalage sign. Validity is the flatness of the induced coderivation
//! on the reduced symmetric coalgebra: D∘D = 0 on all words of arity ≤ N,
//! which for a dg Lie algebra is exactly d² = 0, the Leibniz rule and
//! graded Jacobi.

use crate::graded::GradedVectorSpace;
use crate::scalar::{fmt_q, lc_axpy, sv_add_term, sv_axpy, LinComb, Q};
use crate::words::{
    decalage_sign, normalize_s, normalize_wedge, subword_splits, word_sigma, SymWords,
};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Sparse vector over the word basis of the reduced symmetric coalgebra,
/// keyed by (arity, word position).
pub type WordVec = BTreeMap<(usize, usize), Q>;

/// One Λ-form component: letters of a canonical word and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeComponent {
    pub letters: Vec<String>,
    pub value: Vec<(String, Q)>,
}

/// An L∞ algebra truncated at arity N; dg Lie is the special case where
/// every l_k with k ≥ 3 vanishes.
#[derive(Debug, Clone)]
pub struct LInftyAlgebra {
    space: Arc<GradedVectorSpace>,
    n: usize,
    words: SymWords,
    /// ops[k−1][pos] = l_k on the word at pos, S(g[1])-form.
    ops: Vec<Vec<LinComb>>,
}

impl PartialEq for LInftyAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.n == other.n && self.ops == other.ops
    }
}

impl LInftyAlgebra {
    /// Build from S(g[1])-form components; validates degrees.
    pub fn new_sform(
        space: Arc<GradedVectorSpace>,
        n: usize,
        ops: Vec<Vec<LinComb>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::ShapeMismatch("truncation must be positive".into()));
        }
        let words = SymWords::build(space.clone(), n);
        if ops.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} arity levels, got {}",
                n,
                ops.len()
            )));
        }
        for (ki, level) in ops.iter().enumerate() {
            let k = ki + 1;
            if level.len() != words.words(k).len() {
                return Err(Error::ShapeMismatch(format!(
                    "arity {k}: expected {} components, got {}",
                    words.words(k).len(),
                    level.len()
                )));
            }
            for (pos, value) in level.iter().enumerate() {
                let w = &words.words(k)[pos];
                let want = word_sigma(&space, w) + 2;
                for idx in value.keys() {
                    if *idx >= space.dim() || space.degree(*idx) != want {
                        return Err(Error::ShapeMismatch(format!(
                            "l_{k} on {} must land in degree {want}",
                            words.label(w)
                        )));
                    }
                }
            }
        }
        Ok(Self { space, n, words, ops })
    }

    /// Build from Λ-form components. Letters may come in any order; they are
    /// sorted with the antisymmetry sign. Conflicting duplicate components
    /// are rejected, consistent repetitions are allowed.
    pub fn from_wedge_components(
        space: Arc<GradedVectorSpace>,
        n: usize,
        comps: &[WedgeComponent],
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::ShapeMismatch("truncation must be positive".into()));
        }
        let words = SymWords::build(space.clone(), n);
        let mut staged: Vec<BTreeMap<usize, LinComb>> = vec![BTreeMap::new(); n];
        for comp in comps {
            let k = comp.letters.len();
            if k == 0 || k > n {
                return Err(Error::ShapeMismatch(format!(
                    "component arity {k} outside 1..={n}"
                )));
            }
            let mut letters = Vec::with_capacity(k);
            for l in &comp.letters {
                letters.push(
                    space
                        .index_of(l)
                        .ok_or_else(|| Error::ShapeMismatch(format!("unknown label {l:?}")))?,
                );
            }
            let mut value = LinComb::new();
            for (l, c) in &comp.value {
                let idx = space
                    .index_of(l)
                    .ok_or_else(|| Error::ShapeMismatch(format!("unknown label {l:?}")))?;
                sv_add_term(&mut value, idx, c.clone());
            }
            match normalize_wedge(&space, &letters) {
                None => {
                    if !value.is_empty() {
                        return Err(Error::InvalidStructure(format!(
                            "nonzero component on the vanishing word {}",
                            comp.letters.join("∧")
                        )));
                    }
                }
                Some((w, sign)) => {
                    if sign < 0 {
                        crate::scalar::lc_scale(&mut value, &-Q::from_integer(1.into()));
                    }
                    let pos = words.pos(k, &w).expect("normalized word is a basis word");
                    match staged[k - 1].get(&pos) {
                        None => {
                            staged[k - 1].insert(pos, value);
                        }
                        Some(prev) if *prev == value => {}
                        Some(_) => {
                            return Err(Error::InvalidStructure(format!(
                                "conflicting components on {}",
                                words.label(&w)
                            )));
                        }
                    }
                }
            }
        }
        let mut ops = Vec::with_capacity(n);
        for k in 1..=n {
            let mut level = vec![LinComb::new(); words.words(k).len()];
            for (pos, mut value) in std::mem::take(&mut staged[k - 1]) {
                let w = &words.words(k)[pos];
                if decalage_sign(&space, w) < 0 {
                    crate::scalar::lc_scale(&mut value, &-Q::from_integer(1.into()));
                }
                level[pos] = value;
            }
            ops.push(level);
        }
        Self::new_sform(space, n, ops)
    }

    /// dg Lie constructor: a differential given by entries and a bracket
    /// table of pairs with values.
    pub fn dg_lie(
        space: Arc<GradedVectorSpace>,
        n: usize,
        d_entries: &[(&str, &str, Q)],
        brackets: &[((&str, &str), Vec<(&str, Q)>)],
    ) -> Result<Self> {
        let mut comps = Vec::new();
        let mut by_source: BTreeMap<&str, Vec<(String, Q)>> = BTreeMap::new();
        for (from, to, c) in d_entries {
            by_source.entry(from).or_default().push((to.to_string(), c.clone()));
        }
        for (from, value) in by_source {
            comps.push(WedgeComponent { letters: vec![from.to_string()], value });
        }
        for ((x, y), value) in brackets {
            comps.push(WedgeComponent {
                letters: vec![x.to_string(), y.to_string()],
                value: value.iter().map(|(l, c)| (l.to_string(), c.clone())).collect(),
            });
        }
        Self::from_wedge_components(space, n, &comps)
    }

    /// Abelian algebra: only a differential.
    pub fn abelian(space: Arc<GradedVectorSpace>, n: usize, d_entries: &[(&str, &str, Q)]) -> Result<Self> {
        Self::dg_lie(space, n, d_entries, &[])
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &SymWords {
        &self.words
    }

    /// S-form component on a canonical word, by position.
    pub fn op(&self, k: usize, pos: usize) -> &LinComb {
        &self.ops[k - 1][pos]
    }

    /// l_1 as a sparse column per basis element.
    pub fn d_col(&self, idx: usize) -> &LinComb {
        // Arity-1 words are singletons in basis order.
        &self.ops[0][idx]
    }

    /// The unary operation as a degree 1 linear endomorphism.
    pub fn linear_map(&self) -> crate::graded::GradedLinearMap {
        crate::graded::GradedLinearMap::new(
            self.space.clone(),
            self.space.clone(),
            1,
            self.ops[0].clone(),
        )
        .expect("the stored differential is homogeneous")
    }

    pub fn is_dg_lie(&self) -> bool {
        self.ops.iter().skip(2).all(|level| level.iter().all(LinComb::is_empty))
    }

    /// Evaluate l_k on letters in any order (S(g[1]) convention).
    pub fn eval_letters(&self, letters: &[usize]) -> LinComb {
        let k = letters.len();
        if k == 0 || k > self.n {
            return LinComb::new();
        }
        match normalize_s(&self.space, letters) {
            None => LinComb::new(),
            Some((w, sign)) => {
                let pos = self.words.pos(k, &w).expect("canonical word");
                let mut out = self.ops[k - 1][pos].clone();
                if sign < 0 {
                    crate::scalar::lc_scale(&mut out, &-Q::from_integer(1.into()));
                }
                out
            }
        }
    }

    /// Evaluate l_k on letters in any order (Λ g convention).
    pub fn eval_wedge(&self, letters: &[usize]) -> LinComb {
        let k = letters.len();
        if k == 0 || k > self.n {
            return LinComb::new();
        }
        match normalize_wedge(&self.space, letters) {
            None => LinComb::new(),
            Some((w, sign)) => {
                let pos = self.words.pos(k, &w).expect("canonical word");
                let mut out = self.ops[k - 1][pos].clone();
                let total = sign * decalage_sign(&self.space, &w);
                if total < 0 {
                    crate::scalar::lc_scale(&mut out, &-Q::from_integer(1.into()));
                }
                out
            }
        }
    }

    /// Multilinear evaluation of l_m on m sparse arguments, expanding over
    /// supports. Arguments need not be homogeneous; signs come from sorting
    /// each chosen letter tuple.
    pub fn eval_multi(&self, factors: &[&LinComb]) -> LinComb {
        let m = factors.len();
        assert!(m >= 1, "eval_multi needs at least one factor");
        if m > self.n {
            return LinComb::new();
        }
        let mut out = LinComb::new();
        let mut letters = vec![0usize; m];
        fn rec(
            alg: &LInftyAlgebra,
            factors: &[&LinComb],
            slot: usize,
            letters: &mut Vec<usize>,
            coeff: Q,
            out: &mut LinComb,
        ) {
            if slot == factors.len() {
                let val = alg.eval_letters(letters);
                lc_axpy(out, &coeff, &val);
                return;
            }
            for (idx, c) in factors[slot] {
                letters[slot] = *idx;
                rec(alg, factors, slot + 1, letters, coeff.clone() * c, out);
            }
        }
        rec(self, factors, 0, &mut letters, Q::from_integer(1.into()), &mut out);
        out
    }

    /// Λ-form export: every nonzero component as letters plus value, in
    /// (arity, word) order.
    pub fn wedge_components(&self) -> Vec<WedgeComponent> {
        let mut out = Vec::new();
        for k in 1..=self.n {
            for (pos, w) in self.words.words(k).iter().enumerate() {
                let stored = &self.ops[k - 1][pos];
                if stored.is_empty() {
                    continue;
                }
                let mut value = stored.clone();
                if decalage_sign(&self.space, w) < 0 {
                    crate::scalar::lc_scale(&mut value, &-Q::from_integer(1.into()));
                }
                out.push(WedgeComponent {
                    letters: w.iter().map(|&l| self.space.label(l).to_string()).collect(),
                    value: value
                        .iter()
                        .map(|(i, c)| (self.space.label(*i).to_string(), c.clone()))
                        .collect(),
                });
            }
        }
        out
    }

    /// Human-readable vector in g.
    pub fn describe(&self, v: &LinComb) -> String {
        self.space.describe(v)
    }
}

/// Image of one canonical word under the coderivation D assembled from all
/// l_j: D(x_1···x_k) = Σ_j Σ_{|I|=j} ε(I) · l_j(x_I) · x_{I^c}.
pub fn coderivation_image(alg: &LInftyAlgebra, w: &[usize]) -> WordVec {
    let k = w.len();
    let mut out = WordVec::new();
    for j in 1..=k.min(alg.truncation()) {
        for (part, rest, sign) in subword_splits(alg.space(), w, j) {
            let pos = alg.words().pos(j, &part).expect("subword of a basis word");
            let val = alg.op(j, pos);
            if val.is_empty() {
                continue;
            }
            for (b, c) in val {
                let mut letters = Vec::with_capacity(rest.len() + 1);
                letters.push(*b);
                letters.extend_from_slice(&rest);
                if let Some((w2, s2)) = normalize_s(alg.space(), &letters) {
                    let arity = w2.len();
                    let pos2 = alg.words().pos(arity, &w2).expect("canonical word");
                    let total = Q::from_integer(((sign * s2) as i64).into()) * c;
                    sv_add_term(&mut out, (arity, pos2), total);
                }
            }
        }
    }
    out
}

/// Structure report: labels of all words of arity ≤ N on which D∘D ≠ 0.
/// Empty iff the Taylor coefficients form an L∞ algebra up to arity N.
pub fn check_structure(alg: &LInftyAlgebra) -> Vec<String> {
    let mut bad = Vec::new();
    let mut cols: Vec<Vec<WordVec>> = Vec::with_capacity(alg.truncation());
    for k in 1..=alg.truncation() {
        cols.push(alg.words().words(k).iter().map(|w| coderivation_image(alg, w)).collect());
    }
    for k in 1..=alg.truncation() {
        for (pos, w) in alg.words().words(k).iter().enumerate() {
            let mut dd = WordVec::new();
            for ((k2, pos2), c) in &cols[k - 1][pos] {
                sv_axpy(&mut dd, c, &cols[*k2 - 1][*pos2]);
            }
            if !dd.is_empty() {
                bad.push(alg.words().label(w));
            }
        }
    }
    bad
}

/// The reduced symmetric coalgebra of g[1] truncated at arity N, carrying
/// the cached coderivation. Construction fails on an invalid structure.
#[derive(Debug, Clone)]
pub struct ChainCoalgebra {
    base: Arc<LInftyAlgebra>,
    cols: Vec<Vec<WordVec>>,
}

impl ChainCoalgebra {
    pub fn new(base: Arc<LInftyAlgebra>) -> Result<Self> {
        let bad = check_structure(&base);
        if !bad.is_empty() {
            return Err(Error::InvalidStructure(format!(
                "coderivation does not square to zero on {}",
                bad.join(", ")
            )));
        }
        let mut cols = Vec::with_capacity(base.truncation());
        for k in 1..=base.truncation() {
            let level = base
                .words()
                .words(k)
                .iter()
                .map(|w| coderivation_image(&base, w))
                .collect();
            cols.push(level);
        }
        Ok(Self { base, cols })
    }

    pub fn base(&self) -> &Arc<LInftyAlgebra> {
        &self.base
    }

    pub fn d(&self, k: usize, pos: usize) -> &WordVec {
        &self.cols[k - 1][pos]
    }

    pub fn apply_d(&self, v: &WordVec) -> WordVec {
        let mut out = WordVec::new();
        for ((k, pos), c) in v {
            sv_axpy(&mut out, c, &self.cols[*k - 1][*pos]);
        }
        out
    }
}

/// Reduced coproduct of a canonical word: all two-block position
/// unshuffles with Koszul signs, as ((j, pos), (k−j, pos), sign).
pub fn reduced_coproduct(
    alg: &LInftyAlgebra,
    w: &[usize],
) -> Vec<((usize, usize), (usize, usize), Q)> {
    let k = w.len();
    let mut out = Vec::new();
    for j in 1..k {
        for (part, rest, sign) in subword_splits(alg.space(), w, j) {
            let lp = alg.words().pos(j, &part).expect("canonical");
            let rp = alg.words().pos(k - j, &rest).expect("canonical");
            out.push(((j, lp), (k - j, rp), Q::from_integer((sign as i64).into())));
        }
    }
    out
}

/// Pretty-print a coalgebra vector for diagnostics.
pub fn describe_wordvec(alg: &LInftyAlgebra, v: &WordVec) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|((k, pos), c)| {
            format!("{}*{}", fmt_q(c), alg.words().label(&alg.words().words(*k)[*pos]))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
