//! Graded vector spaces, degree-homogeneous maps, Koszul signs, and
//! deterministic contractions of a complex onto its cohomology.

use crate::scalar::{lc_axpy, lc_single, LinComb, Q};
use crate::solve::{Eliminator, LinearSolver, Sift};
use crate::{Error, Result};
use num_traits::One;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Finite graded vector space with a named, ordered rational basis.
///
/// Basis elements are flattened into one index range sorted by
/// (degree, label); the flat order is canonical so that identical inputs
/// produce identical bases regardless of construction order. All sparse
/// vectors in the crate are `LinComb`s over these flat indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVectorSpace {
    labels: Vec<String>,
    degrees: Vec<i32>,
    by_degree: BTreeMap<i32, Vec<usize>>,
    index: BTreeMap<String, usize>,
}

impl GradedVectorSpace {
    /// Build from `(label, degree)` pairs. Labels must be unique and
    /// nonempty.
    pub fn new(items: Vec<(String, i32)>) -> Result<Self> {
        let mut staged: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for (label, degree) in items {
            if label.is_empty() {
                return Err(Error::ShapeMismatch("empty basis label".into()));
            }
            staged.entry(degree).or_default().push(label);
        }
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        let mut by_degree = BTreeMap::new();
        let mut index = BTreeMap::new();
        for (degree, mut names) in staged {
            names.sort();
            let mut idxs = Vec::new();
            for name in names {
                if index.contains_key(&name) {
                    return Err(Error::ShapeMismatch(format!("duplicate basis label {name:?}")));
                }
                index.insert(name.clone(), labels.len());
                idxs.push(labels.len());
                labels.push(name);
                degrees.push(degree);
            }
            by_degree.insert(degree, idxs);
        }
        Ok(Self { labels, degrees, by_degree, index })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn degree(&self, idx: usize) -> i32 {
        self.degrees[idx]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Degrees with at least one basis element, ascending.
    pub fn degrees_present(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_degree.keys().copied()
    }

    /// Basis indices in one degree, in basis order.
    pub fn basis_in_degree(&self, degree: i32) -> &[usize] {
        self.by_degree.get(&degree).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dim_in_degree(&self, degree: i32) -> usize {
        self.basis_in_degree(degree).len()
    }

    /// The common degree of a homogeneous vector, None for 0 or mixed.
    pub fn degree_of(&self, v: &LinComb) -> Option<i32> {
        let mut out = None;
        for idx in v.keys() {
            let d = self.degrees[*idx];
            match out {
                None => out = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        out
    }

    /// Human-readable form of a vector, for diagnostics.
    pub fn describe(&self, v: &LinComb) -> String {
        if v.is_empty() {
            return "0".into();
        }
        v.iter()
            .map(|(i, c)| format!("{}*{}", crate::scalar::fmt_q(c), self.labels[*i]))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Degree-homogeneous linear map stored as one sparse column per source
/// basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedLinearMap {
    pub source: Arc<GradedVectorSpace>,
    pub target: Arc<GradedVectorSpace>,
    pub shift: i32,
    cols: Vec<LinComb>,
}

impl GradedLinearMap {
    /// Validates that column `j` lands in degree `deg(j) + shift`.
    pub fn new(
        source: Arc<GradedVectorSpace>,
        target: Arc<GradedVectorSpace>,
        shift: i32,
        cols: Vec<LinComb>,
    ) -> Result<Self> {
        if cols.len() != source.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} columns, got {}",
                source.dim(),
                cols.len()
            )));
        }
        for (j, col) in cols.iter().enumerate() {
            let want = source.degree(j) + shift;
            for idx in col.keys() {
                if *idx >= target.dim() {
                    return Err(Error::ShapeMismatch(format!(
                        "column {} hits index {} outside the target space",
                        source.label(j),
                        idx
                    )));
                }
                if target.degree(*idx) != want {
                    return Err(Error::ShapeMismatch(format!(
                        "map is not homogeneous of shift {}: {} -> {} lands in degree {}",
                        shift,
                        source.label(j),
                        target.label(*idx),
                        target.degree(*idx)
                    )));
                }
            }
        }
        Ok(Self { source, target, shift, cols })
    }

    pub fn zero(source: Arc<GradedVectorSpace>, target: Arc<GradedVectorSpace>, shift: i32) -> Self {
        let cols = vec![LinComb::new(); source.dim()];
        Self { source, target, shift, cols }
    }

    pub fn identity(space: Arc<GradedVectorSpace>) -> Self {
        let cols = (0..space.dim()).map(|j| lc_single(j, Q::one())).collect();
        Self { source: space.clone(), target: space, shift: 0, cols }
    }

    /// Build from `(source label, target label, coefficient)` entries,
    /// accumulating repeats.
    pub fn from_entries(
        source: Arc<GradedVectorSpace>,
        target: Arc<GradedVectorSpace>,
        shift: i32,
        entries: &[(&str, &str, Q)],
    ) -> Result<Self> {
        let mut cols = vec![LinComb::new(); source.dim()];
        for (from, to, c) in entries {
            let j = source
                .index_of(from)
                .ok_or_else(|| Error::ShapeMismatch(format!("unknown source label {from:?}")))?;
            let i = target
                .index_of(to)
                .ok_or_else(|| Error::ShapeMismatch(format!("unknown target label {to:?}")))?;
            lc_axpy(&mut cols[j], c, &lc_single(i, Q::one()));
        }
        Self::new(source, target, shift, cols)
    }

    pub fn col(&self, j: usize) -> &LinComb {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[LinComb] {
        &self.cols
    }

    pub fn apply(&self, v: &LinComb) -> LinComb {
        crate::solve::apply_cols(&self.cols, v)
    }

    /// g ∘ self (self first, then g).
    pub fn then(&self, g: &GradedLinearMap) -> Result<GradedLinearMap> {
        if g.source != self.target {
            return Err(Error::ShapeMismatch("composition through mismatched spaces".into()));
        }
        let cols = self.cols.iter().map(|c| g.apply(c)).collect();
        GradedLinearMap::new(self.source.clone(), g.target.clone(), self.shift + g.shift, cols)
    }

    pub fn add(&self, other: &GradedLinearMap) -> Result<GradedLinearMap> {
        if self.source != other.source || self.target != other.target || self.shift != other.shift {
            return Err(Error::ShapeMismatch("sum of incompatible maps".into()));
        }
        let mut cols = self.cols.clone();
        for (j, col) in other.cols.iter().enumerate() {
            lc_axpy(&mut cols[j], &Q::one(), col);
        }
        GradedLinearMap::new(self.source.clone(), self.target.clone(), self.shift, cols)
    }

    pub fn sub(&self, other: &GradedLinearMap) -> Result<GradedLinearMap> {
        let mut neg = other.clone();
        for col in neg.cols.iter_mut() {
            crate::scalar::lc_scale(col, &-Q::one());
        }
        self.add(&neg)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(LinComb::is_empty)
    }
}

/// Koszul sign of a permutation acting on homogeneous elements of the given
/// degrees: each inversion of elements of degrees p, q contributes
/// (−1)^{pq}. The permutation is 1-based, `perm[i]` = image position of slot
/// i+1; equivalently the element list (x_{perm[1]}, ..., x_{perm[k]}) read
/// off after permuting.
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Result<i32> {
    let k = perm.len();
    if degrees.len() != k {
        return Err(Error::MalformedPermutation(format!(
            "permutation of length {} against {} degrees",
            k,
            degrees.len()
        )));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p == 0 || p > k || seen[p - 1] {
            return Err(Error::MalformedPermutation(format!(
                "{perm:?} is not a bijection of 1..={k}"
            )));
        }
        seen[p - 1] = true;
    }
    let mut sign = 1i32;
    for a in 0..k {
        for b in (a + 1)..k {
            if perm[a] > perm[b] {
                let d = degrees[perm[a] - 1] * degrees[perm[b] - 1];
                if d % 2 != 0 {
                    sign = -sign;
                }
            }
        }
    }
    Ok(sign)
}

/// Labels of basis elements on which d∘d fails to vanish; empty means the
/// pair is a complex.
pub fn check_complex(space: &Arc<GradedVectorSpace>, d: &GradedLinearMap) -> Result<Vec<String>> {
    if d.shift != 1 {
        return Err(Error::ShapeMismatch(format!("differential must have shift +1, got {}", d.shift)));
    }
    if d.source != *space || d.target != *space {
        return Err(Error::ShapeMismatch("differential is not an endomorphism of the space".into()));
    }
    let mut bad = Vec::new();
    for j in 0..space.dim() {
        if !d.apply(d.col(j)).is_empty() {
            bad.push(space.label(j).to_string());
        }
    }
    Ok(bad)
}

/// Deterministic splitting of a complex onto its cohomology.
///
/// `p` projects onto cohomology, `i` picks representatives, `h` is the
/// chain contraction: exactly `d∘h + h∘d = 1 − i∘p` with the side
/// conditions `h² = 0`, `p∘h = 0`, `h∘i = 0` and `p∘i = id`.
#[derive(Debug, Clone)]
pub struct ContractionData {
    pub ambient: Arc<GradedVectorSpace>,
    pub d: GradedLinearMap,
    pub cohomology: Arc<GradedVectorSpace>,
    pub p: GradedLinearMap,
    pub i: GradedLinearMap,
    pub h: GradedLinearMap,
}

impl ContractionData {
    /// Check every invariant by exact arithmetic.
    pub fn verify(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::InvalidContraction(what.into()));
        if !check_complex(&self.ambient, &self.d)?.is_empty() {
            return fail("d squared is nonzero");
        }
        let id_h = GradedLinearMap::identity(self.cohomology.clone());
        if self.i.then(&self.p)? != id_h {
            return fail("p after i is not the identity");
        }
        // d h + h d = 1 - i p
        let dh = self.h.then(&self.d)?;
        let hd = self.d.then(&self.h)?;
        let ip = self.p.then(&self.i)?;
        let lhs = dh.add(&hd)?;
        let rhs = GradedLinearMap::identity(self.ambient.clone()).sub(&ip)?;
        if lhs != rhs {
            return fail("d h + h d differs from 1 - i p");
        }
        if !self.h.then(&self.h)?.is_zero() {
            return fail("h squared is nonzero");
        }
        if !self.h.then(&self.p)?.is_zero() {
            return fail("p after h is nonzero");
        }
        if !self.i.then(&self.h)?.is_zero() {
            return fail("h after i is nonzero");
        }
        if !self.i.then(&self.d)?.is_zero() {
            return fail("representatives are not closed");
        }
        if !self.d.then(&self.p)?.is_zero() {
            return fail("p does not kill exact elements");
        }
        Ok(())
    }
}

/// Compute the deterministic contraction of `(space, d)`.
///
/// Per degree, columns of `d` are fed in basis order to a forward
/// elimination with lowest-row pivoting; dependent columns yield kernel
/// vectors, independent ones record an image basis together with exact
/// preimages. Cohomology representatives are kernel vectors sifted against
/// the image, labelled `[pivot label]` after their pivot basis element.
pub fn cohomology_contraction(
    space: &Arc<GradedVectorSpace>,
    d: &GradedLinearMap,
) -> Result<ContractionData> {
    let bad = check_complex(space, d)?;
    if !bad.is_empty() {
        return Err(Error::InvalidStructure(format!(
            "d squared is nonzero on {}",
            bad.join(", ")
        )));
    }

    // Per degree n: kernel vectors, and (image, preimage) pairs landing in n.
    let mut kernels: BTreeMap<i32, Vec<LinComb>> = BTreeMap::new();
    let mut images: BTreeMap<i32, Vec<(LinComb, LinComb)>> = BTreeMap::new();
    for n in space.degrees_present().collect::<Vec<_>>() {
        let mut elim = Eliminator::new();
        for &j in space.basis_in_degree(n) {
            let v = d.col(j).clone();
            if v.is_empty() {
                kernels.entry(n).or_default().push(lc_single(j, Q::one()));
                continue;
            }
            match elim.insert(v, lc_single(j, Q::one())) {
                Sift::Dependent(pay) => kernels.entry(n).or_default().push(pay),
                Sift::Independent(row) => {
                    let (col, pay) = elim.pivot(row).expect("pivot just inserted");
                    images.entry(n + 1).or_default().push((col.clone(), pay.clone()));
                }
            }
        }
    }

    // Cohomology representatives per degree, sifting kernels against images.
    let mut coh_items: Vec<(String, i32)> = Vec::new();
    let mut reps: BTreeMap<i32, Vec<LinComb>> = BTreeMap::new();
    for n in space.degrees_present().collect::<Vec<_>>() {
        let mut elim = Eliminator::new();
        for (b, _) in images.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            let _ = elim.insert(b.clone(), LinComb::new());
        }
        for k in kernels.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            if let Sift::Independent(row) = elim.insert(k.clone(), LinComb::new()) {
                let (col, _) = elim.pivot(row).expect("pivot just inserted");
                coh_items.push((format!("[{}]", space.label(row)), n));
                reps.entry(n).or_default().push(col.clone());
            }
        }
    }
    let cohomology = Arc::new(GradedVectorSpace::new(coh_items)?);

    // Change of basis per degree: ambient = A ⊕ B ⊕ H with B = d(A).
    let mut p_cols = vec![LinComb::new(); space.dim()];
    let mut i_cols = vec![LinComb::new(); cohomology.dim()];
    let mut h_cols = vec![LinComb::new(); space.dim()];
    for n in space.degrees_present().collect::<Vec<_>>() {
        let empty_pairs: &[(LinComb, LinComb)] = &[];
        let a_part: Vec<&LinComb> =
            images.get(&(n + 1)).map(Vec::as_slice).unwrap_or(empty_pairs).iter().map(|(_, a)| a).collect();
        let b_pairs = images.get(&n).map(Vec::as_slice).unwrap_or(empty_pairs);
        let h_part = reps.get(&n).map(Vec::as_slice).unwrap_or(&[]);
        let dim_n = space.dim_in_degree(n);
        assert_eq!(
            a_part.len() + b_pairs.len() + h_part.len(),
            dim_n,
            "rank bookkeeping is off in degree {n}"
        );
        let mut t_cols: Vec<LinComb> = Vec::with_capacity(dim_n);
        t_cols.extend(a_part.iter().map(|c| (*c).clone()));
        t_cols.extend(b_pairs.iter().map(|(b, _)| b.clone()));
        t_cols.extend(h_part.iter().cloned());
        let solver = LinearSolver::new(t_cols.iter());
        let coh_idx = cohomology.basis_in_degree(n);
        assert_eq!(coh_idx.len(), h_part.len());
        for (local, &global) in coh_idx.iter().enumerate() {
            i_cols[global] = h_part[local].clone();
        }
        for &j in space.basis_in_degree(n) {
            let coords = solver
                .solve(&lc_single(j, Q::one()))
                .expect("combined basis spans its degree");
            for (slot, c) in &coords {
                if *slot < a_part.len() {
                    continue;
                }
                let b_slot = slot - a_part.len();
                if b_slot < b_pairs.len() {
                    // Exact part: send the image basis vector to its preimage.
                    lc_axpy(&mut h_cols[j], c, &b_pairs[b_slot].1);
                } else {
                    let h_slot = b_slot - b_pairs.len();
                    lc_axpy(&mut p_cols[j], c, &lc_single(coh_idx[h_slot], Q::one()));
                }
            }
        }
    }

    let data = ContractionData {
        ambient: space.clone(),
        d: d.clone(),
        cohomology: cohomology.clone(),
        p: GradedLinearMap::new(space.clone(), cohomology.clone(), 0, p_cols)?,
        i: GradedLinearMap::new(cohomology, space.clone(), 0, i_cols)?,
        h: GradedLinearMap::new(space.clone(), space.clone(), -1, h_cols)?,
    };
    data.verify()?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    fn space(items: &[(&str, i32)]) -> Arc<GradedVectorSpace> {
        Arc::new(
            GradedVectorSpace::new(items.iter().map(|(l, d)| (l.to_string(), *d)).collect())
                .unwrap(),
        )
    }

    fn fix_a() -> (Arc<GradedVectorSpace>, GradedLinearMap) {
        let s = space(&[("x", 0), ("y", 1)]);
        let d = GradedLinearMap::from_entries(s.clone(), s.clone(), 1, &[("x", "y", qi(1))]).unwrap();
        (s, d)
    }

    #[test]
    fn koszul_sign_spec_values() {
        assert_eq!(koszul_sign(&[2, 1], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 2, 3], &[5, 7, 9]).unwrap(), 1);
        assert_eq!(koszul_sign(&[2, 3, 1], &[1, 1, 1]).unwrap(), 1);
        assert_eq!(koszul_sign(&[2, 1], &[2, 1]).unwrap(), 1);
        assert!(matches!(
            koszul_sign(&[1, 1], &[0, 0]),
            Err(Error::MalformedPermutation(_))
        ));
        assert!(koszul_sign(&[1, 2], &[0]).is_err());
        assert!(koszul_sign(&[0, 1], &[0, 0]).is_err());
    }

    /// Independent oracle: accumulate the sign by bubble-sorting the
    /// permutation with adjacent transpositions.
    fn bubble_sign(perm: &[usize], degrees: &[i32]) -> i32 {
        let mut p = perm.to_vec();
        let mut sign = 1;
        loop {
            let mut swapped = false;
            for a in 0..p.len().saturating_sub(1) {
                if p[a] > p[a + 1] {
                    let d = degrees[p[a] - 1] * degrees[p[a + 1] - 1];
                    if d % 2 != 0 {
                        sign = -sign;
                    }
                    p.swap(a, a + 1);
                    swapped = true;
                }
            }
            if !swapped {
                return sign;
            }
        }
    }

    #[test]
    fn koszul_sign_matches_bubble_sort_exhaustively() {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for rest in perms(k - 1) {
                for pos in 0..=rest.len() {
                    let mut p = rest.clone();
                    p.insert(pos, k);
                    out.push(p);
                }
            }
            out
        }
        for k in 1..=5 {
            let mut degree_vectors = vec![vec![]];
            for _ in 0..k {
                degree_vectors = degree_vectors
                    .into_iter()
                    .flat_map(|v: Vec<i32>| {
                        [0, 1, 2].into_iter().map(move |d| {
                            let mut w = v.clone();
                            w.push(d);
                            w
                        })
                    })
                    .collect();
            }
            for perm in perms(k) {
                for degs in &degree_vectors {
                    assert_eq!(
                        koszul_sign(&perm, degs).unwrap(),
                        bubble_sign(&perm, degs),
                        "perm {perm:?} degrees {degs:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn check_complex_spec_values() {
        let (s, d) = fix_a();
        assert!(check_complex(&s, &d).unwrap().is_empty());

        let z = space(&[("u", 0), ("v", 1)]);
        let zero = GradedLinearMap::zero(z.clone(), z.clone(), 1);
        assert!(check_complex(&z, &zero).unwrap().is_empty());

        let t = space(&[("u", 0), ("v", 1), ("w", 2)]);
        let d3 = GradedLinearMap::from_entries(
            t.clone(),
            t.clone(),
            1,
            &[("u", "v", qi(1)), ("v", "w", qi(1))],
        )
        .unwrap();
        assert_eq!(check_complex(&t, &d3).unwrap(), vec!["u".to_string()]);

        let wrong_shift = GradedLinearMap::zero(t.clone(), t.clone(), 0);
        assert!(matches!(check_complex(&t, &wrong_shift), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn contraction_of_acyclic_pair() {
        let (s, d) = fix_a();
        let c = cohomology_contraction(&s, &d).unwrap();
        assert_eq!(c.cohomology.dim(), 0);
        let y = s.index_of("y").unwrap();
        let x = s.index_of("x").unwrap();
        assert_eq!(c.h.col(y), &lc_single(x, Q::one()));
        assert!(c.p.is_zero());
        c.verify().unwrap();
    }

    #[test]
    fn contraction_of_zero_differential() {
        let s = space(&[("u", 0), ("v", 3), ("w", 3)]);
        let d = GradedLinearMap::zero(s.clone(), s.clone(), 1);
        let c = cohomology_contraction(&s, &d).unwrap();
        assert_eq!(c.cohomology.dim(), 3);
        assert!(c.h.is_zero());
        for j in 0..s.dim() {
            assert_eq!(c.i.col(c.p.col(j).keys().next().cloned().unwrap()), &lc_single(j, Q::one()));
        }
        assert_eq!(c.cohomology.label(0), "[u]");
        c.verify().unwrap();
    }

    #[test]
    fn contraction_of_two_step_nilpotent_fixture() {
        // a, b, h in degree 1; c = dh and the spectator w in degree 2.
        let s = space(&[("a", 1), ("b", 1), ("h", 1), ("c", 2), ("w", 2)]);
        let d = GradedLinearMap::from_entries(s.clone(), s.clone(), 1, &[("h", "c", qi(1))]).unwrap();
        let c = cohomology_contraction(&s, &d).unwrap();
        let labels: Vec<_> = (0..c.cohomology.dim())
            .map(|j| (c.cohomology.label(j).to_string(), c.cohomology.degree(j)))
            .collect();
        assert_eq!(
            labels,
            vec![("[a]".to_string(), 1), ("[b]".to_string(), 1), ("[w]".to_string(), 2)]
        );
        let cc = s.index_of("c").unwrap();
        let hh = s.index_of("h").unwrap();
        assert_eq!(c.h.col(cc), &lc_single(hh, Q::one()));
        c.verify().unwrap();
    }

    #[test]
    fn contraction_is_deterministic() {
        let (s, d) = fix_a();
        let c1 = cohomology_contraction(&s, &d).unwrap();
        let c2 = cohomology_contraction(&s, &d).unwrap();
        assert_eq!(c1.p, c2.p);
        assert_eq!(c1.i, c2.i);
        assert_eq!(c1.h, c2.h);
    }
}
