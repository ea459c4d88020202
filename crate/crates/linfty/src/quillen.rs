//! Chains of an L∞ algebra as a counital cocommutative dg coalgebra, the
//! free graded Lie algebra generated by such a coalgebra, and the truncated
//! adjunction between the two constructions. On top of the adjunction sits
//! the strictification correspondence: morphisms between two algebras
//! become strict dg Lie maps between their free covers, losslessly, and
//! gauge flows on the cover side transport to gauge flows downstairs.
//!
//! Weights truncate the coalgebra side (a chains word of arity k has
//! weight k) and word length truncates the Lie side; both cuts are
//! quotients by homogeneous ideals, so every structure identity is checked
//! exactly inside the retained range.

use crate::algebra::{check_structure, coderivation_image, LInftyAlgebra};
use crate::conv::{Convolution, ConvolutionElement};
use crate::graded::{GradedLinearMap, GradedVectorSpace};
use crate::morphism::{compose_morphisms, induced_coalgebra_map, LInftyMorphism};
use crate::scalar::{lc_axpy, lc_single, qi, qr, sv_add_term, sv_axpy, LinComb, Q};
use crate::words::{exterior_basis, normalize_s, subword_splits, word_sigma, Word};
use crate::{Error, Result};
use num_traits::One;
use std::collections::BTreeMap;
use std::sync::Arc;

fn psign(e: i32) -> Q {
    if e.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

fn inverse_factorial(k: usize) -> Q {
    let mut out = Q::one();
    for t in 1..=k {
        out = out / qi(t as i64);
    }
    out
}

/// A counital cocommutative dg coalgebra with a distinguished group-like
/// basis element spanning the complement of the counit kernel, carried
/// together with a weight grading bounded by `bound`. The coproduct is
/// stored in full, group-like terms included; the differential is a
/// coderivation of degree +1 that never raises weight.
///
/// Chains-type instances built by [`chains`] also remember which word of
/// the underlying algebra each basis element came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CounitalCoalgebra {
    space: Arc<GradedVectorSpace>,
    unit: usize,
    coproduct: Vec<Vec<((usize, usize), Q)>>,
    differential: GradedLinearMap,
    weights: Vec<usize>,
    bound: usize,
    letters: Vec<Option<Word>>,
    base: Option<Arc<GradedVectorSpace>>,
    by_word: BTreeMap<Word, usize>,
}

impl CounitalCoalgebra {
    /// Build from the reduced coproduct. `items` lists the basis of the
    /// counit kernel; the group-like element named `unit` is added in
    /// degree 0 and weight 0, and for every other element the two
    /// group-like coproduct terms are filled in automatically. Every
    /// non-unit element needs an entry in `weights`.
    pub fn new(
        items: &[(&str, i32)],
        unit: &str,
        reduced: &[(&str, Vec<((&str, &str), Q)>)],
        differential: &[(&str, &str, Q)],
        weights: &[(&str, usize)],
        bound: usize,
    ) -> Result<Self> {
        let mut all: Vec<(String, i32)> = items.iter().map(|(l, d)| (l.to_string(), *d)).collect();
        all.push((unit.to_string(), 0));
        let space = Arc::new(GradedVectorSpace::new(all)?);
        let unit_idx = space.index_of(unit).expect("unit label was just inserted");
        let dim = space.dim();
        let look = |l: &str| {
            space
                .index_of(l)
                .ok_or_else(|| Error::InvalidCoalgebra(format!("unknown basis label {l:?}")))
        };
        let mut staged: Vec<BTreeMap<(usize, usize), Q>> = vec![BTreeMap::new(); dim];
        staged[unit_idx].insert((unit_idx, unit_idx), Q::one());
        for i in 0..dim {
            if i != unit_idx {
                staged[i].insert((unit_idx, i), Q::one());
                staged[i].insert((i, unit_idx), Q::one());
            }
        }
        for (src, terms) in reduced {
            let i = look(src)?;
            if i == unit_idx {
                return Err(Error::InvalidCoalgebra(
                    "the group-like element admits no reduced coproduct terms".into(),
                ));
            }
            for ((a, b), c) in terms {
                sv_add_term(&mut staged[i], (look(a)?, look(b)?), c.clone());
            }
        }
        let mut wts = vec![usize::MAX; dim];
        wts[unit_idx] = 0;
        for (l, w) in weights {
            wts[look(l)?] = *w;
        }
        for i in 0..dim {
            if wts[i] == usize::MAX {
                return Err(Error::InvalidCoalgebra(format!(
                    "missing weight for {}",
                    space.label(i)
                )));
            }
        }
        let d = GradedLinearMap::from_entries(space.clone(), space.clone(), 1, differential)
            .map_err(|e| Error::InvalidCoalgebra(e.to_string()))?;
        let out = Self {
            space,
            unit: unit_idx,
            coproduct: staged.into_iter().map(|m| m.into_iter().collect()).collect(),
            differential: d,
            weights: wts,
            bound,
            letters: vec![None; dim],
            base: None,
            by_word: BTreeMap::new(),
        };
        out.validate()?;
        Ok(out)
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    /// Index of the group-like basis element.
    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn weight(&self, idx: usize) -> usize {
        self.weights[idx]
    }

    pub fn differential(&self) -> &GradedLinearMap {
        &self.differential
    }

    /// Full coproduct terms of one basis element, group-like terms included.
    pub fn coproduct_terms(&self, idx: usize) -> &[((usize, usize), Q)] {
        &self.coproduct[idx]
    }

    /// Coproduct terms with both tensor factors in the counit kernel.
    pub fn reduced_terms(&self, idx: usize) -> Vec<((usize, usize), Q)> {
        self.coproduct[idx]
            .iter()
            .filter(|((a, b), _)| *a != self.unit && *b != self.unit)
            .cloned()
            .collect()
    }

    /// The underlying algebra space for chains-type instances.
    pub fn base(&self) -> Option<&Arc<GradedVectorSpace>> {
        self.base.as_ref()
    }

    /// The algebra word a chains-type basis element stands for.
    pub fn letter_word(&self, idx: usize) -> Option<&Word> {
        self.letters[idx].as_ref()
    }

    /// Basis index of a chains-type word.
    pub fn word_index(&self, w: &[usize]) -> Option<usize> {
        self.by_word.get(w).copied()
    }

    fn term_map(&self, idx: usize) -> BTreeMap<(usize, usize), Q> {
        self.coproduct[idx].iter().cloned().collect()
    }

    /// Iterated reduced coproduct with exactly `k` tensor slots.
    fn iterated_reduced(&self, idx: usize, k: usize) -> Vec<(Vec<usize>, Q)> {
        let mut terms = vec![(vec![idx], Q::one())];
        for _ in 1..k {
            let mut next = Vec::new();
            for (tuple, c) in &terms {
                let last = *tuple.last().expect("nonempty tuple");
                for ((a, b), cab) in self.reduced_terms(last) {
                    let mut t = tuple[..tuple.len() - 1].to_vec();
                    t.push(a);
                    t.push(b);
                    next.push((t, c * &cab));
                }
            }
            terms = next;
        }
        terms
    }

    /// Check every axiom by exact arithmetic: the group-like unit, counit
    /// identities on both sides, graded cocommutativity, coassociativity,
    /// the coderivation law, a squaring-to-zero differential that kills the
    /// unit and never feeds the counit, weight additivity of the coproduct
    /// and weight monotonicity of the differential.
    pub fn validate(&self) -> Result<()> {
        let dim = self.space.dim();
        let bad = |msg: String| Err(Error::InvalidCoalgebra(msg));
        if self.coproduct.len() != dim || self.weights.len() != dim || self.letters.len() != dim {
            return bad("inconsistent table sizes".into());
        }
        if self.unit >= dim || self.space.degree(self.unit) != 0 || self.weights[self.unit] != 0 {
            return bad("the group-like element must sit in degree 0 and weight 0".into());
        }
        if self.term_map(self.unit) != BTreeMap::from([((self.unit, self.unit), Q::one())]) {
            return bad("the distinguished element is not group-like".into());
        }
        for i in 0..dim {
            let label = self.space.label(i);
            if self.weights[i] > self.bound {
                return bad(format!("weight of {label} exceeds the bound {}", self.bound));
            }
            let mut left = LinComb::new();
            let mut right = LinComb::new();
            for ((a, b), c) in &self.coproduct[i] {
                if *a >= dim || *b >= dim {
                    return bad(format!("coproduct of {label} leaves the space"));
                }
                if self.space.degree(*a) + self.space.degree(*b) != self.space.degree(i) {
                    return bad(format!("coproduct of {label} is not degree additive"));
                }
                if self.weights[*a] + self.weights[*b] != self.weights[i] {
                    return bad(format!("coproduct of {label} is not weight additive"));
                }
                if *a == self.unit {
                    sv_add_term(&mut left, *b, c.clone());
                }
                if *b == self.unit {
                    sv_add_term(&mut right, *a, c.clone());
                }
            }
            let e = lc_single(i, Q::one());
            if left != e || right != e {
                return bad(format!("counit identity fails at {label}"));
            }
            let m = self.term_map(i);
            for ((a, b), c) in &m {
                let sign = psign(self.space.degree(*a) * self.space.degree(*b));
                if m.get(&(*b, *a)) != Some(&(&sign * c)) {
                    return bad(format!("cocommutativity fails at {label}"));
                }
            }
            let mut lhs: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
            let mut rhs: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
            for ((a, b), c) in &self.coproduct[i] {
                for ((a1, a2), ca) in &self.coproduct[*a] {
                    sv_add_term(&mut lhs, (*a1, *a2, *b), c * ca);
                }
                for ((b1, b2), cb) in &self.coproduct[*b] {
                    sv_add_term(&mut rhs, (*a, *b1, *b2), c * cb);
                }
            }
            if lhs != rhs {
                return bad(format!("coassociativity fails at {label}"));
            }
        }
        if !self.differential.col(self.unit).is_empty() {
            return bad("the differential must kill the group-like element".into());
        }
        for i in 0..dim {
            let label = self.space.label(i);
            let col = self.differential.col(i);
            let mut dd = LinComb::new();
            for (t, c) in col {
                if *t == self.unit {
                    return bad(format!("the boundary of {label} hits the counit line"));
                }
                if self.weights[*t] > self.weights[i] {
                    return bad(format!("the differential raises the weight of {label}"));
                }
                lc_axpy(&mut dd, c, self.differential.col(*t));
            }
            if !dd.is_empty() {
                return bad(format!("the differential does not square to zero at {label}"));
            }
            let mut lhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            for (t, c) in col {
                for ((a, b), cab) in &self.coproduct[*t] {
                    sv_add_term(&mut lhs, (*a, *b), c * cab);
                }
            }
            let mut rhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            for ((a, b), cab) in &self.coproduct[i] {
                for (t, ct) in self.differential.col(*a) {
                    sv_add_term(&mut rhs, (*t, *b), cab * ct);
                }
                let sa = psign(self.space.degree(*a));
                for (t, ct) in self.differential.col(*b) {
                    sv_add_term(&mut rhs, (*a, *t), &(cab * ct) * &sa);
                }
            }
            if lhs != rhs {
                return bad(format!("the differential is not a coderivation at {label}"));
            }
        }
        Ok(())
    }
}

/// Chains of an L∞ algebra, truncated at word weight `bound`: one basis
/// element per symmetric word of arity at most `bound` plus the group-like
/// unit, the coproduct given by graded unshuffles, and the differential
/// given by the full coderivation packaging of the operations.
pub fn chains(y: &Arc<LInftyAlgebra>, bound: usize) -> Result<CounitalCoalgebra> {
    if bound < 1 || bound > y.truncation() {
        return Err(Error::TruncationMismatch { left: bound, right: y.truncation() });
    }
    let mut items = vec![("1".to_string(), 0)];
    let mut word_list: Vec<Word> = Vec::new();
    for k in 1..=bound {
        for w in exterior_basis(y.space(), k) {
            items.push((y.words().label(&w), word_sigma(y.space(), &w)));
            word_list.push(w);
        }
    }
    let space = Arc::new(GradedVectorSpace::new(items)?);
    let unit = space
        .index_of("1")
        .ok_or_else(|| Error::InvalidCoalgebra("missing unit label".into()))?;
    let dim = space.dim();
    let mut letters = vec![None; dim];
    let mut weights = vec![0usize; dim];
    let mut by_word = BTreeMap::new();
    for w in &word_list {
        let idx = space.index_of(&y.words().label(w)).expect("word label");
        letters[idx] = Some(w.clone());
        weights[idx] = w.len();
        by_word.insert(w.clone(), idx);
    }
    let mut staged: Vec<BTreeMap<(usize, usize), Q>> = vec![BTreeMap::new(); dim];
    staged[unit].insert((unit, unit), Q::one());
    let mut cols = vec![LinComb::new(); dim];
    for w in &word_list {
        let idx = by_word[w];
        staged[idx].insert((unit, idx), Q::one());
        staged[idx].insert((idx, unit), Q::one());
        for j in 1..w.len() {
            for (part, rest, sign) in subword_splits(y.space(), w, j) {
                let a = by_word[&part];
                let b = by_word[&rest];
                sv_add_term(&mut staged[idx], (a, b), qi(sign as i64));
            }
        }
        for ((k2, p2), c) in coderivation_image(y, w) {
            let t = by_word[&y.words().words(k2)[p2]];
            sv_add_term(&mut cols[idx], t, c);
        }
    }
    let differential = GradedLinearMap::new(space.clone(), space.clone(), 1, cols)?;
    let out = CounitalCoalgebra {
        space,
        unit,
        coproduct: staged.into_iter().map(|m| m.into_iter().collect()).collect(),
        differential,
        weights,
        bound,
        letters,
        base: Some(y.space().clone()),
        by_word,
    };
    out.validate()?;
    Ok(out)
}

type Tensor = BTreeMap<Word, Q>;

fn tensor_mul(a: &Tensor, b: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            sv_add_term(&mut out, w, ca * cb);
        }
    }
    out
}

/// Strictly smaller than every proper suffix.
fn is_lyndon(w: &[usize]) -> bool {
    (1..w.len()).all(|i| w < &w[i..])
}

/// Split off the longest proper suffix that is itself Lyndon; the prefix
/// is then Lyndon too.
fn standard_factorization(w: &[usize]) -> (&[usize], &[usize]) {
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            return (&w[..i], &w[i..]);
        }
    }
    unreachable!("every word of length at least two has a single-letter suffix")
}

fn generator_degree(space: &GradedVectorSpace, w: &[usize]) -> i32 {
    w.iter().map(|&l| space.degree(l) + 1).sum()
}

/// Tensor expansion of the iterated bracketing attached to a Lyndon word.
fn lyndon_expansion(
    space: &GradedVectorSpace,
    w: &[usize],
    memo: &mut BTreeMap<Word, Tensor>,
) -> Tensor {
    if let Some(t) = memo.get(w) {
        return t.clone();
    }
    let t = if w.len() == 1 {
        Tensor::from([(w.to_vec(), Q::one())])
    } else {
        let (u, v) = standard_factorization(w);
        let tu = lyndon_expansion(space, u, memo);
        let tv = lyndon_expansion(space, v, memo);
        let sign = psign(generator_degree(space, u) * generator_degree(space, v));
        let mut t = tensor_mul(&tu, &tv);
        sv_axpy(&mut t, &-sign, &tensor_mul(&tv, &tu));
        t
    };
    memo.insert(w.to_vec(), t.clone());
    t
}

struct BasisEntry {
    letters: Word,
    square: bool,
    label: String,
    degree: i32,
    lidx: usize,
    lead: Q,
    expansion: Tensor,
}

/// The free graded Lie algebra on the counit kernel of a coalgebra,
/// shifted up by one, cut to bracket words of length at most the
/// coalgebra's weight bound, with the differential forced by the coproduct
/// and the coalgebra differential. Basis elements are standard Lyndon
/// words in the generators together with the squares of odd-degree Lyndon
/// words.
#[derive(Debug, Clone)]
pub struct FreeLieAlgebra {
    coalgebra: CounitalCoalgebra,
    algebra: Arc<LInftyAlgebra>,
    length_bound: usize,
    word_of: Vec<(Word, bool)>,
    gen_of: BTreeMap<usize, usize>,
    by_basis: BTreeMap<(Word, bool), usize>,
}

impl FreeLieAlgebra {
    pub fn coalgebra(&self) -> &CounitalCoalgebra {
        &self.coalgebra
    }

    pub fn algebra(&self) -> &Arc<LInftyAlgebra> {
        &self.algebra
    }

    /// Maximal bracket word length kept by the cut.
    pub fn length_bound(&self) -> usize {
        self.length_bound
    }

    /// Generator letters of one basis element and whether it is the square
    /// of half its letter sequence.
    pub fn basis_word(&self, lidx: usize) -> (&[usize], bool) {
        let (w, s) = &self.word_of[lidx];
        (w, *s)
    }

    /// The generator attached to a coalgebra basis index.
    pub fn generator(&self, coalgebra_idx: usize) -> Option<usize> {
        self.gen_of.get(&coalgebra_idx).copied()
    }

    /// Extend images of the generators to every basis element along the
    /// standard factorization, with a caller-supplied bilinear bracket.
    fn extend_from_generators<F, G>(&self, gen: F, bracket: G) -> Vec<LinComb>
    where
        F: Fn(usize) -> LinComb,
        G: Fn(&LinComb, &LinComb) -> LinComb,
    {
        let dim = self.algebra.space().dim();
        let mut cols = vec![LinComb::new(); dim];
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by_key(|&l| (self.word_of[l].0.len(), self.word_of[l].0.clone()));
        for l in order {
            let (letters, square) = &self.word_of[l];
            if letters.len() == 1 {
                cols[l] = gen(letters[0]);
            } else {
                let (u, v) = if *square {
                    let h = &letters[..letters.len() / 2];
                    (h, h)
                } else {
                    standard_factorization(letters)
                };
                let lu = self.by_basis[&(u.to_vec(), false)];
                let lv = self.by_basis[&(v.to_vec(), false)];
                let a = cols[lu].clone();
                let b = cols[lv].clone();
                cols[l] = bracket(&a, &b);
            }
        }
        cols
    }
}

/// Wedge-bilinear bracket of two combinations.
fn bracket_lc(alg: &LInftyAlgebra, a: &LinComb, b: &LinComb) -> LinComb {
    let mut out = LinComb::new();
    for (ia, ca) in a {
        for (ib, cb) in b {
            let v = alg.eval_wedge(&[*ia, *ib]);
            if !v.is_empty() {
                lc_axpy(&mut out, &(ca * cb), &v);
            }
        }
    }
    out
}

/// Express a tensor of uniform word length in the Lyndon-square basis by
/// triangular peeling in ascending lexicographic order. Words longer than
/// the retained range are cut to zero.
fn normal_form(levels: &[Vec<BasisEntry>], t: &Tensor) -> Result<LinComb> {
    let mut out = LinComb::new();
    if t.is_empty() {
        return Ok(out);
    }
    let m = t.keys().next().expect("nonempty tensor").len();
    if m == 0 || m > levels.len() {
        return Ok(out);
    }
    let mut residue = t.clone();
    for item in &levels[m - 1] {
        if let Some(c) = residue.get(&item.letters) {
            let coeff = c / &item.lead;
            sv_add_term(&mut out, item.lidx, coeff.clone());
            sv_axpy(&mut residue, &-coeff, &item.expansion);
        }
    }
    if !residue.is_empty() {
        return Err(Error::InvalidStructure(
            "bracket expansion leaves the Lyndon-square span".into(),
        ));
    }
    Ok(out)
}

/// Free graded Lie algebra on a coalgebra's counit kernel, packaged as an
/// arity-truncated algebra. Generators are the non-group-like basis
/// elements shifted up by one degree; bracket words are cut at the
/// coalgebra weight bound; the differential is the lift of the coalgebra
/// differential corrected by half the bracket of each reduced coproduct
/// term, extended to longer words as a derivation. The assembled structure
/// is re-checked before it is returned.
pub fn free_lie(x: &CounitalCoalgebra, arities: usize) -> Result<FreeLieAlgebra> {
    x.validate()?;
    if arities < 2 {
        return Err(Error::InvalidStructure(
            "a Lie algebra needs the bracket arity".into(),
        ));
    }
    let xs = x.space.clone();
    let alphabet: Vec<usize> = (0..xs.dim()).filter(|i| *i != x.unit).collect();
    let bound = x.bound;
    let mut memo: BTreeMap<Word, Tensor> = BTreeMap::new();
    let mut raw_levels: Vec<Vec<(Word, bool)>> = Vec::new();
    for m in 1..=bound {
        let mut level: Vec<(Word, bool)> = Vec::new();
        if !alphabet.is_empty() {
            let g = alphabet.len();
            let mut counter = vec![0usize; m];
            loop {
                let word: Word = counter.iter().map(|&c| alphabet[c]).collect();
                if is_lyndon(&word) {
                    level.push((word, false));
                }
                let mut j = m as i64 - 1;
                while j >= 0 && counter[j as usize] == g - 1 {
                    counter[j as usize] = 0;
                    j -= 1;
                }
                if j < 0 {
                    break;
                }
                counter[j as usize] += 1;
            }
            if m % 2 == 0 {
                for (half, square) in &raw_levels[m / 2 - 1] {
                    if !square && generator_degree(&xs, half).rem_euclid(2) == 1 {
                        let mut w = half.clone();
                        w.extend_from_slice(half);
                        level.push((w, true));
                    }
                }
            }
        }
        level.sort();
        raw_levels.push(level);
    }
    let mut items = Vec::new();
    for level in &raw_levels {
        for (letters, _) in level {
            let label: String = letters.iter().map(|&l| format!("({})", xs.label(l))).collect();
            items.push((label, generator_degree(&xs, letters)));
        }
    }
    let space = Arc::new(GradedVectorSpace::new(items)?);
    let mut levels: Vec<Vec<BasisEntry>> = Vec::new();
    for raw in &raw_levels {
        let mut level = Vec::new();
        for (letters, square) in raw {
            let expansion = if *square {
                let half = &letters[..letters.len() / 2];
                let th = lyndon_expansion(&xs, half, &mut memo);
                let d = generator_degree(&xs, half);
                let mut t = tensor_mul(&th, &th);
                sv_axpy(&mut t, &-psign(d * d), &tensor_mul(&th, &th));
                t
            } else {
                lyndon_expansion(&xs, letters, &mut memo)
            };
            let label: String = letters.iter().map(|&l| format!("({})", xs.label(l))).collect();
            let lidx = space.index_of(&label).expect("basis label");
            let lead = match expansion.iter().next() {
                Some((w, c)) if w == letters => c.clone(),
                _ => {
                    return Err(Error::InvalidStructure(
                        "basis expansion does not lead with its own word".into(),
                    ))
                }
            };
            level.push(BasisEntry {
                letters: letters.clone(),
                square: *square,
                label,
                degree: generator_degree(&xs, letters),
                lidx,
                lead,
                expansion,
            });
        }
        levels.push(level);
    }
    let flat: Vec<&BasisEntry> = levels.iter().flatten().collect();
    let mut bracket_owned: Vec<((String, String), Vec<(String, Q)>)> = Vec::new();
    for (i, bi) in flat.iter().enumerate() {
        for bj in &flat[i..] {
            if bi.letters.len() + bj.letters.len() > bound {
                continue;
            }
            if bi.lidx == bj.lidx && bi.degree.rem_euclid(2) == 0 {
                continue;
            }
            let mut t = tensor_mul(&bi.expansion, &bj.expansion);
            sv_axpy(
                &mut t,
                &-psign(bi.degree * bj.degree),
                &tensor_mul(&bj.expansion, &bi.expansion),
            );
            let value = normal_form(&levels, &t)?;
            if value.is_empty() {
                continue;
            }
            bracket_owned.push((
                (bi.label.clone(), bj.label.clone()),
                value
                    .iter()
                    .map(|(l, c)| (space.label(*l).to_string(), c.clone()))
                    .collect(),
            ));
        }
    }
    let bracket_refs: Vec<((&str, &str), Vec<(&str, Q)>)> = bracket_owned
        .iter()
        .map(|((a, b), v)| {
            ((a.as_str(), b.as_str()), v.iter().map(|(l, c)| (l.as_str(), c.clone())).collect())
        })
        .collect();
    let alg0 = LInftyAlgebra::dg_lie(space.clone(), arities, &[], &bracket_refs)?;
    let mut gen_of = BTreeMap::new();
    for entry in &flat {
        if entry.letters.len() == 1 {
            gen_of.insert(entry.letters[0], entry.lidx);
        }
    }
    let mut by_basis = BTreeMap::new();
    for entry in &flat {
        by_basis.insert((entry.letters.clone(), entry.square), entry.lidx);
    }
    let half = qr(-1, 2);
    let mut cols = vec![LinComb::new(); space.dim()];
    for entry in &flat {
        let mut col = LinComb::new();
        if entry.letters.len() == 1 {
            let i = entry.letters[0];
            for (t, ct) in x.differential.col(i) {
                sv_add_term(&mut col, gen_of[t], ct.clone());
            }
            for ((a, b), c) in x.reduced_terms(i) {
                let v = alg0.eval_letters(&[gen_of[&a], gen_of[&b]]);
                lc_axpy(&mut col, &(&half * &c), &v);
            }
        } else {
            let (u, v) = if entry.square {
                let h = &entry.letters[..entry.letters.len() / 2];
                (h, h)
            } else {
                standard_factorization(&entry.letters)
            };
            let lu = by_basis[&(u.to_vec(), false)];
            let lv = by_basis[&(v.to_vec(), false)];
            let du = cols[lu].clone();
            let dv = cols[lv].clone();
            col = bracket_lc(&alg0, &du, &lc_single(lv, Q::one()));
            let leibniz = psign(space.degree(lu));
            lc_axpy(&mut col, &leibniz, &bracket_lc(&alg0, &lc_single(lu, Q::one()), &dv));
        }
        cols[entry.lidx] = col;
    }
    let mut d_owned: Vec<(String, String, Q)> = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        for (t, c) in col {
            d_owned.push((space.label(j).to_string(), space.label(*t).to_string(), c.clone()));
        }
    }
    let d_refs: Vec<(&str, &str, Q)> =
        d_owned.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.clone())).collect();
    let algebra = Arc::new(LInftyAlgebra::dg_lie(space.clone(), arities, &d_refs, &bracket_refs)?);
    let bad = check_structure(&algebra);
    if !bad.is_empty() {
        return Err(Error::InvalidStructure(format!(
            "free Lie structure identities fail on {}",
            bad.join(", ")
        )));
    }
    let mut word_of = vec![(Word::new(), false); space.dim()];
    for entry in &flat {
        word_of[entry.lidx] = (entry.letters.clone(), entry.square);
    }
    Ok(FreeLieAlgebra {
        coalgebra: x.clone(),
        algebra,
        length_bound: bound,
        word_of,
        gen_of,
        by_basis,
    })
}

/// The projection from the free cover of a dg Lie algebra back onto it:
/// single-letter generators map to their letters, all other generators to
/// zero, and longer bracket words follow by multiplicativity. The result
/// is a strict morphism.
pub fn counit_morphism(fl: &FreeLieAlgebra, y: &Arc<LInftyAlgebra>) -> Result<LInftyMorphism> {
    match &fl.coalgebra.base {
        Some(b) if **b == **y.space() => {}
        _ => {
            return Err(Error::ShapeMismatch(
                "the projection needs the free cover built over the same algebra".into(),
            ))
        }
    }
    if !y.is_dg_lie() {
        return Err(Error::UnsupportedStructure(
            "the projection lands in a dg Lie algebra".into(),
        ));
    }
    if fl.algebra.truncation() != y.truncation() {
        return Err(Error::TruncationMismatch {
            left: fl.algebra.truncation(),
            right: y.truncation(),
        });
    }
    let cols = fl.extend_from_generators(
        |cidx| {
            let w = fl.coalgebra.letters[cidx].as_ref().expect("chains letters");
            if w.len() == 1 {
                lc_single(w[0], Q::one())
            } else {
                LinComb::new()
            }
        },
        |a, b| bracket_lc(y, a, b),
    );
    let map = GradedLinearMap::new(fl.algebra.space().clone(), y.space().clone(), 0, cols)?;
    LInftyMorphism::strict(fl.algebra.clone(), y.clone(), &map)
}

/// The tautological morphism of an algebra into its free cover: the arity-k
/// component sends each word to the generator standing for it. Its
/// morphism equation is exactly what forces the cover differential.
pub fn unit_morphism(a: &Arc<LInftyAlgebra>, fl: &FreeLieAlgebra) -> Result<LInftyMorphism> {
    match &fl.coalgebra.base {
        Some(b) if **b == **a.space() => {}
        _ => {
            return Err(Error::ShapeMismatch(
                "the tautological morphism needs the free cover built over the same algebra".into(),
            ))
        }
    }
    if fl.coalgebra.bound < a.truncation() {
        return Err(Error::TruncationMismatch {
            left: fl.coalgebra.bound,
            right: a.truncation(),
        });
    }
    if fl.algebra.truncation() != a.truncation() {
        return Err(Error::TruncationMismatch {
            left: fl.algebra.truncation(),
            right: a.truncation(),
        });
    }
    let n = a.truncation();
    let mut comps = Vec::with_capacity(n);
    for k in 1..=n {
        let words = a.words().words(k);
        let mut level = Vec::with_capacity(words.len());
        for w in words {
            let cidx = fl.coalgebra.by_word[w];
            level.push(lc_single(fl.gen_of[&cidx], Q::one()));
        }
        comps.push(level);
    }
    LInftyMorphism::new_sform(a.clone(), fl.algebra.clone(), comps)
}

/// Extend a degree-0 assignment on generators to a strict candidate map
/// from the free cover into a dg Lie algebra. `core` is indexed by the
/// coalgebra basis; the group-like entry must be empty.
pub fn lie_map_of_corestriction(
    fl: &FreeLieAlgebra,
    y: &Arc<LInftyAlgebra>,
    core: &[LinComb],
) -> Result<LInftyMorphism> {
    if core.len() != fl.coalgebra.space.dim() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} corestriction entries, got {}",
            fl.coalgebra.space.dim(),
            core.len()
        )));
    }
    if !core[fl.coalgebra.unit].is_empty() {
        return Err(Error::ShapeMismatch(
            "the group-like direction carries no generator".into(),
        ));
    }
    if !y.is_dg_lie() {
        return Err(Error::UnsupportedStructure(
            "corestrictions extend into dg Lie algebras".into(),
        ));
    }
    if fl.algebra.truncation() != y.truncation() {
        return Err(Error::TruncationMismatch {
            left: fl.algebra.truncation(),
            right: y.truncation(),
        });
    }
    let cols = fl.extend_from_generators(|c| core[c].clone(), |a, b| bracket_lc(y, a, b));
    let map = GradedLinearMap::new(fl.algebra.space().clone(), y.space().clone(), 0, cols)?;
    LInftyMorphism::strict(fl.algebra.clone(), y.clone(), &map)
}

/// A map of counital coalgebras, validated on construction. Coproduct
/// compatibility is checked on tensor bidegrees whose combined weight
/// stays within the target bound, and differential compatibility on
/// outputs strictly below the bound; beyond that window a truncated target
/// cannot distinguish a genuine map from the cut of one.
#[derive(Debug, Clone)]
pub struct CoalgebraMorphism {
    source: CounitalCoalgebra,
    target: CounitalCoalgebra,
    map: GradedLinearMap,
}

impl CoalgebraMorphism {
    pub fn new(
        source: CounitalCoalgebra,
        target: CounitalCoalgebra,
        map: GradedLinearMap,
    ) -> Result<Self> {
        let out = Self { source, target, map };
        out.validate()?;
        Ok(out)
    }

    pub fn source(&self) -> &CounitalCoalgebra {
        &self.source
    }

    pub fn target(&self) -> &CounitalCoalgebra {
        &self.target
    }

    pub fn map(&self) -> &GradedLinearMap {
        &self.map
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.source;
        let t = &self.target;
        let bad = |msg: String| Err(Error::InvalidCoalgebra(msg));
        if self.map.shift != 0 || *self.map.source != *s.space || *self.map.target != *t.space {
            return Err(Error::ShapeMismatch(
                "a coalgebra map is a degree-0 map between the two coalgebra spaces".into(),
            ));
        }
        if self.map.col(s.unit) != &lc_single(t.unit, Q::one()) {
            return bad("the group-like element must map to the group-like element".into());
        }
        for i in 0..s.space.dim() {
            if i != s.unit && self.map.col(i).contains_key(&t.unit) {
                return bad(format!(
                    "the counit is not preserved at {}",
                    s.space.label(i)
                ));
            }
        }
        for i in 0..s.space.dim() {
            let mut lhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            for (j, c) in self.map.col(i) {
                for ((a, b), cab) in &t.coproduct[*j] {
                    sv_add_term(&mut lhs, (*a, *b), c * cab);
                }
            }
            let mut rhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            for ((a, b), cab) in &s.coproduct[i] {
                for (ja, ca) in self.map.col(*a) {
                    for (jb, cb) in self.map.col(*b) {
                        if t.weights[*ja] + t.weights[*jb] > t.bound {
                            continue;
                        }
                        sv_add_term(&mut rhs, (*ja, *jb), &(cab * ca) * cb);
                    }
                }
            }
            lhs.retain(|(a, b), _| t.weights[*a] + t.weights[*b] <= t.bound);
            if lhs != rhs {
                return bad(format!(
                    "coproduct compatibility fails at {}",
                    s.space.label(i)
                ));
            }
        }
        let cap = t.bound.saturating_sub(1);
        for i in 0..s.space.dim() {
            let mut lhs = self.map.apply(s.differential.col(i));
            let mut rhs = t.differential.apply(self.map.col(i));
            lhs.retain(|k, _| t.weights[*k] <= cap);
            rhs.retain(|k, _| t.weights[*k] <= cap);
            if lhs != rhs {
                return bad(format!(
                    "differential compatibility fails at {}",
                    s.space.label(i)
                ));
            }
        }
        Ok(())
    }
}

/// Lift a degree-0 corestriction onto single letters to a full coalgebra
/// map into a chains-type target, using the cofreeness of the target over
/// its letters: the weight-k part of the image is the k-fold corestriction
/// product of the iterated reduced coproduct, divided by k factorial.
pub fn coalgebra_map_of_corestriction(
    src: &CounitalCoalgebra,
    tgt: &CounitalCoalgebra,
    core: &[LinComb],
) -> Result<CoalgebraMorphism> {
    if core.len() != src.space.dim() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} corestriction entries, got {}",
            src.space.dim(),
            core.len()
        )));
    }
    if !core[src.unit].is_empty() {
        return Err(Error::ShapeMismatch(
            "the group-like direction carries no letters".into(),
        ));
    }
    let base = tgt.base.as_ref().ok_or_else(|| {
        Error::InvalidCoalgebra("the cofree lift needs a chains-type target".into())
    })?;
    for col in core {
        for t in col.keys() {
            if tgt.weights[*t] != 1 {
                return Err(Error::ShapeMismatch(
                    "a corestriction lands on single letters only".into(),
                ));
            }
        }
    }
    let dim = src.space.dim();
    let mut cols = vec![LinComb::new(); dim];
    cols[src.unit] = lc_single(tgt.unit, Q::one());
    for i in 0..dim {
        if i == src.unit {
            continue;
        }
        for k in 1..=tgt.bound {
            let terms = src.iterated_reduced(i, k);
            if terms.is_empty() {
                break;
            }
            let scale = inverse_factorial(k);
            for (tuple, c) in terms {
                let mut acc: Vec<(Vec<usize>, Q)> = vec![(Vec::new(), &c * &scale)];
                for a in &tuple {
                    let mut next = Vec::new();
                    for (letters, cc) in &acc {
                        for (t, ct) in &core[*a] {
                            let letter = tgt.letters[*t].as_ref().expect("chains letters")[0];
                            let mut l2 = letters.clone();
                            l2.push(letter);
                            next.push((l2, cc * ct));
                        }
                    }
                    acc = next;
                }
                for (lets, cc) in acc {
                    if let Some((word, sign)) = normalize_s(base, &lets) {
                        let widx = tgt.by_word[&word];
                        sv_add_term(&mut cols[i], widx, &cc * &qi(sign as i64));
                    }
                }
            }
        }
    }
    let map = GradedLinearMap::new(src.space.clone(), tgt.space.clone(), 0, cols)?;
    CoalgebraMorphism::new(src.clone(), tgt.clone(), map)
}

/// The two constructions applied both ways round at a common truncation,
/// with the unit embedding the coalgebra into the chains of its free cover
/// and the counit projecting the free cover of the chains back down.
pub struct Adjunction {
    pub free_lie: FreeLieAlgebra,
    pub chains_of_free: CounitalCoalgebra,
    pub chain_coalgebra: CounitalCoalgebra,
    pub free_of_chains: FreeLieAlgebra,
    pub unit: CoalgebraMorphism,
    pub counit: LInftyMorphism,
}

/// Build both adjunction maps over a coalgebra and a dg Lie algebra that
/// share the truncation level.
pub fn adjunction(x: &CounitalCoalgebra, y: &Arc<LInftyAlgebra>) -> Result<Adjunction> {
    let n = y.truncation();
    if x.bound != n {
        return Err(Error::TruncationMismatch { left: x.bound, right: n });
    }
    let free = free_lie(x, n)?;
    let chains_of_free = chains(&free.algebra, n)?;
    let mut core = vec![LinComb::new(); x.space.dim()];
    for i in 0..x.space.dim() {
        if i == x.unit {
            continue;
        }
        let lidx = free.gen_of[&i];
        let widx = chains_of_free.by_word[&vec![lidx]];
        core[i] = lc_single(widx, Q::one());
    }
    let unit = coalgebra_map_of_corestriction(x, &chains_of_free, &core)?;
    let chain_coalgebra = chains(y, n)?;
    let free_of_chains = free_lie(&chain_coalgebra, n)?;
    let counit = counit_morphism(&free_of_chains, y)?;
    Ok(Adjunction { free_lie: free, chains_of_free, chain_coalgebra, free_of_chains, unit, counit })
}

/// The exact correspondence between morphisms of two algebras and strict
/// dg Lie maps between their free covers. Going up is injective with a
/// one-sided inverse given by sandwiching between the tautological
/// morphism and the cover projection; gauge flows upstairs push forward to
/// gauge flows downstairs along the same sandwich, so homotopic cover maps
/// recover homotopic morphisms.
pub struct Strictification {
    pub source: Arc<LInftyAlgebra>,
    pub target: Arc<LInftyAlgebra>,
    pub source_cover: FreeLieAlgebra,
    pub target_cover: FreeLieAlgebra,
    pub unit: LInftyMorphism,
    pub counit: LInftyMorphism,
}

impl Strictification {
    /// The target must be dg Lie: a nonzero higher operation downstairs
    /// has no strict counterpart between the covers.
    pub fn new(source: &Arc<LInftyAlgebra>, target: &Arc<LInftyAlgebra>) -> Result<Self> {
        if !target.is_dg_lie() {
            return Err(Error::UnsupportedStructure(
                "strictification needs a dg Lie target".into(),
            ));
        }
        let n = source.truncation();
        if target.truncation() != n {
            return Err(Error::TruncationMismatch { left: n, right: target.truncation() });
        }
        let source_cover = free_lie(&chains(source, n)?, n)?;
        let target_cover = free_lie(&chains(target, n)?, n)?;
        let unit = unit_morphism(source, &source_cover)?;
        let counit = counit_morphism(&target_cover, target)?;
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            source_cover,
            target_cover,
            unit,
            counit,
        })
    }

    /// Turn a morphism into the strict dg Lie map between the covers that
    /// acts on generators by the induced coalgebra map.
    pub fn strictify(&self, m: &LInftyMorphism) -> Result<LInftyMorphism> {
        if m.source().as_ref() != self.source.as_ref()
            || m.target().as_ref() != self.target.as_ref()
        {
            return Err(Error::ShapeMismatch(
                "the morphism does not run between the two configured algebras".into(),
            ));
        }
        let mstar = induced_coalgebra_map(m);
        let cols = self.source_cover.extend_from_generators(
            |cidx| {
                let w = self.source_cover.coalgebra.letters[cidx]
                    .as_ref()
                    .expect("chains letters");
                let pos = self.source.words().pos(w.len(), w).expect("word position");
                let mut out = LinComb::new();
                for ((k2, p2), c) in mstar.col(w.len(), pos) {
                    let w2 = &self.target.words().words(*k2)[*p2];
                    let cidx2 = self.target_cover.coalgebra.by_word[w2];
                    sv_add_term(&mut out, self.target_cover.gen_of[&cidx2], c.clone());
                }
                out
            },
            |a, b| bracket_lc(&self.target_cover.algebra, a, b),
        );
        let map = GradedLinearMap::new(
            self.source_cover.algebra.space().clone(),
            self.target_cover.algebra.space().clone(),
            0,
            cols,
        )?;
        LInftyMorphism::strict(
            self.source_cover.algebra.clone(),
            self.target_cover.algebra.clone(),
            &map,
        )
    }

    /// Sandwich a cover map back down to a morphism between the original
    /// algebras. Left inverse to [`Strictification::strictify`].
    pub fn recover(&self, g: &LInftyMorphism) -> Result<LInftyMorphism> {
        if g.source().as_ref() != self.source_cover.algebra.as_ref()
            || g.target().as_ref() != self.target_cover.algebra.as_ref()
        {
            return Err(Error::ShapeMismatch(
                "the cover map does not run between the two configured covers".into(),
            ));
        }
        compose_morphisms(&compose_morphisms(&self.unit, g)?, &self.counit)
    }

    /// Push a convolution element between the covers down to one between
    /// the original algebras: precompose with the induced coalgebra map of
    /// the tautological morphism and postcompose with the projection. The
    /// transport is a map of dg Lie convolution algebras, so it carries
    /// gauges between cover maps to gauges between the recovered morphisms.
    pub fn transport_gauge(&self, theta: &ConvolutionElement) -> Result<ConvolutionElement> {
        let n = self.source.truncation();
        if theta.comps().len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected a convolution element with {} arity levels, got {}",
                n,
                theta.comps().len()
            )));
        }
        let rstar = induced_coalgebra_map(&self.unit);
        let conv = Convolution::new(self.source.clone(), self.target.clone())?;
        let mut out = conv.zero_element(theta.degree());
        for k in 1..=n {
            for pos in 0..self.source.words().words(k).len() {
                let mut acc = LinComb::new();
                for ((k2, p2), c) in rstar.col(k, pos) {
                    lc_axpy(&mut acc, c, theta.comp(*k2, *p2));
                }
                out.comps_mut()[k - 1][pos] = self.counit.apply_linear(&acc);
            }
        }
        Ok(out)
    }
}
