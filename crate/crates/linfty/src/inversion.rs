//! Inverses of quasi-isomorphisms between truncated homotopy Lie algebras.
//!
//! Three routes, ordered by how much structure the input carries. A strict
//! inclusion of a dg Lie subalgebra whose complement is contracted by a
//! homotopy is inverted by an iterated gauge flow that straightens the
//! identity one arity at a time ([`embedding_inverse`]); the whole flow is
//! returned as a trace so every iterate and every gauge can be audited. A
//! morphism whose linear part is invertible has a two-sided compositional
//! inverse obtained arity by arity ([`formal_inverse`]). A general dg Lie
//! quasi-isomorphism is inverted up to gauge homotopy by passing through the
//! cohomology of both sides ([`homotopy_inverse`]); the result carries
//! certificates for both round trips.

use crate::algebra::LInftyAlgebra;
use crate::conv::{
    check_morphism, element_of_morphism, find_homotopy, Convolution, ConvolutionElement,
    HomotopyCertificate, HomotopyOutcome,
};
use crate::graded::{cohomology_contraction, GradedLinearMap};
use crate::morphism::{compose_morphisms, LInftyMorphism};
use crate::scalar::{lc_axpy, lc_scale, lc_single, sv_add_term, LinComb, Q};
use crate::solve::{invert, kernel_basis, Eliminator, LinearSolver};
use crate::transfer::transfer;
use crate::words::word_sigma;
use crate::{Error, Result};
use num_traits::One;
use std::sync::Arc;

/// A dg Lie subalgebra presented inside an ambient dg Lie algebra, together
/// with the linear data that contracts the complement: a projection
/// splitting the inclusion and a degree −1 homotopy with
/// d∘h + h∘d = 1 − inclusion∘projection and h∘inclusion = 0.
#[derive(Debug, Clone)]
pub struct SplittingData {
    pub sub: Arc<LInftyAlgebra>,
    pub ambient: Arc<LInftyAlgebra>,
    /// Strict dg Lie inclusion of the subalgebra, as a degree-0 map of the
    /// underlying spaces.
    pub inclusion: GradedLinearMap,
    /// Left inverse of the inclusion, degree 0.
    pub projection: GradedLinearMap,
    /// Contracting homotopy of the complement, degree −1.
    pub homotopy: GradedLinearMap,
}

impl SplittingData {
    /// Checks every identity the inversion relies on. Shape problems come
    /// back as `ShapeMismatch`, a non-injective or non-structural inclusion
    /// as `NotAnEmbedding`, broken splitting identities as `BadContraction`,
    /// and a genuine rank defect as `NotQuasiIso`.
    pub fn validate(&self) -> Result<()> {
        if self.sub.truncation() != self.ambient.truncation() {
            return Err(Error::TruncationMismatch {
                left: self.sub.truncation(),
                right: self.ambient.truncation(),
            });
        }
        if !self.sub.is_dg_lie() || !self.ambient.is_dg_lie() {
            return Err(Error::UnsupportedStructure(
                "embedding inversion is only implemented for dg Lie algebras".into(),
            ));
        }
        if *self.inclusion.source != **self.sub.space()
            || *self.inclusion.target != **self.ambient.space()
            || self.inclusion.shift != 0
        {
            return Err(Error::ShapeMismatch(
                "the inclusion must be a degree-0 map from the subalgebra into the ambient space"
                    .into(),
            ));
        }
        if *self.projection.source != **self.ambient.space()
            || *self.projection.target != **self.sub.space()
            || self.projection.shift != 0
        {
            return Err(Error::ShapeMismatch(
                "the projection must be a degree-0 map from the ambient space onto the subalgebra"
                    .into(),
            ));
        }
        if *self.homotopy.source != **self.ambient.space()
            || *self.homotopy.target != **self.ambient.space()
            || self.homotopy.shift != -1
        {
            return Err(Error::ShapeMismatch(
                "the homotopy must be a degree −1 endomorphism of the ambient space".into(),
            ));
        }

        let dim = self.sub.space().dim();
        let cols: Vec<LinComb> = (0..dim).map(|j| self.inclusion.col(j).clone()).collect();
        if !kernel_basis(&cols).is_empty() {
            return Err(Error::NotAnEmbedding("the inclusion is not injective".into()));
        }
        let d_sub = self.sub.linear_map();
        let d_amb = self.ambient.linear_map();
        if d_sub.then(&self.inclusion)? != self.inclusion.then(&d_amb)? {
            return Err(Error::NotAnEmbedding(
                "the inclusion does not commute with the differentials".into(),
            ));
        }
        for xi in 0..dim {
            let x = lc_single(xi, Q::one());
            let ix = self.inclusion.apply(&x);
            for yi in xi..dim {
                let y = lc_single(yi, Q::one());
                let iy = self.inclusion.apply(&y);
                let inside = self.inclusion.apply(&self.sub.eval_multi(&[&x, &y]));
                let outside = self.ambient.eval_multi(&[&ix, &iy]);
                if inside != outside {
                    return Err(Error::NotAnEmbedding(format!(
                        "the inclusion does not respect the bracket on {} and {}",
                        self.sub.space().label(xi),
                        self.sub.space().label(yi)
                    )));
                }
            }
        }

        if self.inclusion.then(&self.projection)?
            != GradedLinearMap::identity(self.sub.space().clone())
        {
            return Err(Error::BadContraction(
                "the projection does not split the inclusion".into(),
            ));
        }
        let side = self
            .homotopy
            .then(&d_amb)?
            .add(&d_amb.then(&self.homotopy)?)?;
        let expected = GradedLinearMap::identity(self.ambient.space().clone())
            .sub(&self.projection.then(&self.inclusion)?)?;
        if side != expected {
            return Err(Error::BadContraction(
                "the homotopy does not contract the complement of the subalgebra".into(),
            ));
        }
        if !self.inclusion.then(&self.homotopy)?.is_zero() {
            return Err(Error::BadContraction(
                "the homotopy does not vanish on the subalgebra".into(),
            ));
        }

        let h_sub = cohomology_contraction(self.sub.space(), &d_sub)?.cohomology;
        let h_amb = cohomology_contraction(self.ambient.space(), &d_amb)?.cohomology;
        let mut degrees: Vec<i32> = (0..h_sub.dim()).map(|i| h_sub.degree(i)).collect();
        degrees.extend((0..h_amb.dim()).map(|i| h_amb.degree(i)));
        degrees.sort_unstable();
        degrees.dedup();
        for d in degrees {
            if h_sub.dim_in_degree(d) != h_amb.dim_in_degree(d) {
                return Err(Error::NotQuasiIso(format!(
                    "cohomology ranks differ in degree {}: {} in the subalgebra, {} ambient",
                    d,
                    h_sub.dim_in_degree(d),
                    h_amb.dim_in_degree(d)
                )));
            }
        }
        Ok(())
    }
}

/// The full audit trail of [`embedding_inverse`]: every iterate of the
/// straightening flow, the gauge used at each round, the final retraction
/// onto the subalgebra, and gauge certificates for both round trips.
#[derive(Debug, Clone)]
pub struct InversionTrace {
    /// Endomorphisms of the ambient algebra, starting with the identity;
    /// iterate k+1 is the time-1 gauge flow of iterate k along `gauges[k]`.
    pub iterates: Vec<LInftyMorphism>,
    /// The gauge directions, one per round: minus the homotopy applied to
    /// every component of the current iterate.
    pub gauges: Vec<ConvolutionElement>,
    /// The limit iterate read as a morphism onto the subalgebra.
    pub result: LInftyMorphism,
    /// First: identity of the ambient algebra ~ inclusion∘result, with the
    /// flow composite of all round gauges. Second: result∘inclusion equals
    /// the subalgebra identity on the nose, so its gauge is zero.
    pub certificates: (HomotopyCertificate, HomotopyCertificate),
}

/// Inverts a strict dg Lie inclusion with contracted complement, up to gauge
/// homotopy. Starting from the identity, each round flows along minus the
/// homotopy applied to the current iterate; after round k the components of
/// arity at most k+1 take values in the subalgebra and never move again, so
/// after N rounds the limit is reached. The limit retracts the ambient
/// algebra onto the subalgebra and splits the inclusion exactly.
pub fn embedding_inverse(split: &SplittingData) -> Result<InversionTrace> {
    split.validate()?;
    let g = split.ambient.clone();
    let sub = split.sub.clone();
    let n = g.truncation();
    let conv = Convolution::new(g.clone(), g.clone())?;
    let id_g = LInftyMorphism::identity(g.clone());

    let mut image = Eliminator::new();
    for j in 0..sub.space().dim() {
        image.insert(split.inclusion.col(j).clone(), LinComb::new());
    }
    let endo_p = split.projection.then(&split.inclusion)?;

    let mut cur = element_of_morphism(&id_g);
    let mut iterates = vec![id_g.clone()];
    let mut gauges: Vec<ConvolutionElement> = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = conv.zero_element(0);
        for j in 1..=n {
            for pos in 0..g.words().words(j).len() {
                let mut v = split.homotopy.apply(cur.comp(j, pos));
                if v.is_empty() {
                    continue;
                }
                if j <= k {
                    return Err(Error::InvalidStructure(format!(
                        "round {} produced a gauge direction at already settled arity {}",
                        k, j
                    )));
                }
                lc_scale(&mut v, &-Q::one());
                x.comps_mut()[j - 1][pos] = v;
            }
        }
        let next = conv.gauge_action(&cur, &x)?;
        for j in 1..=k {
            for pos in 0..g.words().words(j).len() {
                if next.comp(j, pos) != cur.comp(j, pos) {
                    return Err(Error::InvalidStructure(format!(
                        "round {} changed an already settled component at arity {}",
                        k, j
                    )));
                }
            }
        }
        for pos in 0..g.words().words(k + 1).len() {
            if *next.comp(k + 1, pos) != endo_p.apply(cur.comp(k + 1, pos)) {
                return Err(Error::InvalidStructure(format!(
                    "round {} did not project the arity-{} component onto the subalgebra",
                    k,
                    k + 1
                )));
            }
        }
        for j in 1..=(k + 1) {
            for pos in 0..g.words().words(j).len() {
                if !image.reduces_to_zero(next.comp(j, pos)) {
                    return Err(Error::InvalidStructure(format!(
                        "round {} left the subalgebra at arity {}",
                        k, j
                    )));
                }
            }
        }
        iterates.push(conv.morphism_of_element(&next)?);
        gauges.push(x);
        cur = next;
    }

    let mut comps = Vec::with_capacity(n);
    for j in 1..=n {
        let words = g.words().words(j);
        let mut level = Vec::with_capacity(words.len());
        for pos in 0..words.len() {
            level.push(split.projection.apply(cur.comp(j, pos)));
        }
        comps.push(level);
    }
    let result = LInftyMorphism::new_sform(g.clone(), sub.clone(), comps)?;

    let include = LInftyMorphism::strict(sub.clone(), g.clone(), &split.inclusion)?;
    let retract = compose_morphisms(&include, &result)?;
    let id_sub = LInftyMorphism::identity(sub.clone());
    if retract.comps() != id_sub.comps() {
        return Err(Error::InvalidStructure(
            "the retraction does not split the inclusion exactly".into(),
        ));
    }
    let sub_conv = Convolution::new(sub.clone(), sub.clone())?;
    let sub_cert = HomotopyCertificate {
        from: retract,
        to: id_sub,
        gauge: sub_conv.zero_element(0),
    };
    sub_cert.verify()?;

    let mut total = gauges[0].clone();
    for x in &gauges[1..] {
        total = conv.bch_compose(x, &total)?;
    }
    let ambient_cert = HomotopyCertificate {
        from: id_g,
        to: compose_morphisms(&result, &include)?,
        gauge: total,
    };
    ambient_cert.verify()?;

    Ok(InversionTrace {
        iterates,
        gauges,
        result,
        certificates: (ambient_cert, sub_cert),
    })
}

/// Two-sided compositional inverse of a morphism with invertible linear
/// part. The inverse components are determined arity by arity: at each level
/// the unknown component enters the composite linearly through the invertible
/// symmetric power of the linear part. Fails with `SingularLinearPart` when
/// the linear part has no inverse.
pub fn formal_inverse(f: &LInftyMorphism) -> Result<LInftyMorphism> {
    let src = f.source().clone();
    let tgt = f.target().clone();
    let n = src.truncation();
    let dim = src.space().dim();
    if dim != tgt.space().dim() {
        return Err(Error::SingularLinearPart(format!(
            "the underlying spaces have dimensions {} and {}",
            dim,
            tgt.space().dim()
        )));
    }
    let f1 = f.linear_part();
    let cols: Vec<LinComb> = (0..dim).map(|j| f1.col(j).clone()).collect();
    let inv_cols = invert(&cols, dim)
        .ok_or_else(|| Error::SingularLinearPart("the linear part has no inverse".into()))?;
    let g1 = GradedLinearMap::new(tgt.space().clone(), src.space().clone(), 0, inv_cols)?;

    let mut comps: Vec<Vec<LinComb>> = Vec::with_capacity(n);
    for k in 1..=n {
        let len = tgt.words().words(k).len();
        if k == 1 {
            comps.push((0..len).map(|j| g1.col(j).clone()).collect());
        } else {
            comps.push(vec![LinComb::new(); len]);
        }
    }
    for k in 2..=n {
        let candidate = LInftyMorphism::new_sform(tgt.clone(), src.clone(), comps.clone())?;
        let base = compose_morphisms(f, &candidate)?;
        let flatten = |level: &[LinComb]| -> LinComb {
            let mut out = LinComb::new();
            for (pos, v) in level.iter().enumerate() {
                for (idx, c) in v {
                    out.insert(pos * dim + idx, c.clone());
                }
            }
            out
        };
        let base_flat = flatten(&base.comps()[k - 1]);
        let words_tgt = tgt.words().words(k);
        let mut unknowns = Vec::new();
        for (pos, w) in words_tgt.iter().enumerate() {
            let want = word_sigma(tgt.space(), w) + 1;
            for tv in 0..dim {
                if src.space().degree(tv) == want {
                    unknowns.push((pos, tv));
                }
            }
        }
        let mut sys_cols = Vec::with_capacity(unknowns.len());
        for &(pos, tv) in &unknowns {
            let mut trial = comps.clone();
            trial[k - 1][pos] = lc_single(tv, Q::one());
            let tm = LInftyMorphism::new_sform(tgt.clone(), src.clone(), trial)?;
            let mut col = flatten(&compose_morphisms(f, &tm)?.comps()[k - 1]);
            lc_axpy(&mut col, &-Q::one(), &base_flat);
            sys_cols.push(col);
        }
        let mut rhs = LinComb::new();
        lc_axpy(&mut rhs, &-Q::one(), &base_flat);
        let sol = LinearSolver::new(sys_cols.iter()).solve(&rhs).ok_or_else(|| {
            Error::InvalidStructure(format!("no inverse component exists at arity {}", k))
        })?;
        for (slot, c) in &sol {
            let (pos, tv) = unknowns[*slot];
            sv_add_term(&mut comps[k - 1][pos], tv, c.clone());
        }
    }

    let g = LInftyMorphism::new_sform(tgt.clone(), src.clone(), comps)?;
    let left = compose_morphisms(f, &g)?;
    let right = compose_morphisms(&g, f)?;
    if left.comps() != LInftyMorphism::identity(src).comps()
        || right.comps() != LInftyMorphism::identity(tgt).comps()
    {
        return Err(Error::InvalidStructure(
            "the computed inverse does not invert on both sides".into(),
        ));
    }
    Ok(g)
}

/// Inverts a dg Lie quasi-isomorphism up to gauge homotopy. Both sides are
/// transferred onto their cohomology, the induced morphism between the
/// transferred algebras is strictly invertible, and its formal inverse is
/// conjugated back by the transfer embeddings and projections. The returned
/// certificates witness that both composites flow to the respective
/// identities; when the gauge search cannot complete a round trip the
/// failure is reported as `CertificateNotFound`.
pub fn homotopy_inverse(
    f: &LInftyMorphism,
) -> Result<(LInftyMorphism, (HomotopyCertificate, HomotopyCertificate))> {
    let g1 = f.source().clone();
    let g2 = f.target().clone();
    if !g1.is_dg_lie() || !g2.is_dg_lie() {
        return Err(Error::UnsupportedStructure(
            "homotopy inversion is only implemented between dg Lie algebras".into(),
        ));
    }
    let report = check_morphism(f)?;
    if !report.is_empty() {
        return Err(Error::NotAMorphism(report.join("; ")));
    }
    let c1 = cohomology_contraction(g1.space(), &g1.linear_map())?;
    let c2 = cohomology_contraction(g2.space(), &g2.linear_map())?;
    let hdim = c1.cohomology.dim();
    if hdim != c2.cohomology.dim() {
        return Err(Error::NotQuasiIso(format!(
            "cohomology ranks differ: {} vs {}",
            hdim,
            c2.cohomology.dim()
        )));
    }
    let f1 = f.linear_part();
    let induced: Vec<LinComb> = (0..hdim)
        .map(|j| c2.p.apply(&f1.apply(c1.i.col(j))))
        .collect();
    if invert(&induced, hdim).is_none() {
        return Err(Error::NotQuasiIso(
            "the linear part does not induce a cohomology isomorphism".into(),
        ));
    }

    let t1 = transfer(&g1, &c1)?;
    let t2 = transfer(&g2, &c2)?;
    let down = compose_morphisms(&t1.embedding, f)?;
    let induced_mor = compose_morphisms(&down, &t2.projection)?;
    let inv_induced = formal_inverse(&induced_mor)?;
    let lift = compose_morphisms(&t2.projection, &inv_induced)?;
    let g = compose_morphisms(&lift, &t1.embedding)?;

    let forward = compose_morphisms(&g, f)?;
    let backward = compose_morphisms(f, &g)?;
    let cert_forward = match find_homotopy(&forward, &LInftyMorphism::identity(g2))? {
        HomotopyOutcome::Certificate(c) => c,
        HomotopyOutcome::NotHomotopic { arity, detail } => {
            return Err(Error::CertificateNotFound { arity, detail })
        }
    };
    let cert_backward = match find_homotopy(&backward, &LInftyMorphism::identity(g1))? {
        HomotopyOutcome::Certificate(c) => c,
        HomotopyOutcome::NotHomotopic { arity, detail } => {
            return Err(Error::CertificateNotFound { arity, detail })
        }
    };
    Ok((g, (cert_forward, cert_backward)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fix_a, fix_b, fix_c, fix_d};
    use crate::scalar::{qi, qr};

    fn identity_splitting(n: usize) -> SplittingData {
        let g = fix_b(n);
        let sub = fix_b(n);
        let id = GradedLinearMap::identity(g.space().clone());
        SplittingData {
            sub,
            ambient: g.clone(),
            inclusion: id.clone(),
            projection: id,
            homotopy: GradedLinearMap::zero(g.space().clone(), g.space().clone(), -1),
        }
    }

    fn collapse_splitting(n: usize) -> SplittingData {
        let ambient = fix_c(n);
        let sub = fix_b(n);
        let amb = ambient.space().clone();
        let sb = sub.space().clone();
        let unit = |label: &str, sp: &crate::graded::GradedVectorSpace| {
            lc_single(sp.index_of(label).expect("label"), Q::one())
        };
        let inc_cols: Vec<LinComb> = (0..sb.dim())
            .map(|j| unit(sb.label(j), &amb))
            .collect();
        let proj_cols: Vec<LinComb> = (0..amb.dim())
            .map(|j| match sb.index_of(amb.label(j)) {
                Some(i) => lc_single(i, Q::one()),
                None => LinComb::new(),
            })
            .collect();
        let mut hom_cols = vec![LinComb::new(); amb.dim()];
        hom_cols[amb.index_of("y").expect("y")] = unit("x", &amb);
        SplittingData {
            sub: sub.clone(),
            ambient: ambient.clone(),
            inclusion: GradedLinearMap::new(sb.clone(), amb.clone(), 0, inc_cols).expect("i"),
            projection: GradedLinearMap::new(amb.clone(), sb, 0, proj_cols).expect("p"),
            homotopy: GradedLinearMap::new(amb.clone(), amb, -1, hom_cols).expect("h"),
        }
    }

    #[test]
    fn a_trivial_splitting_returns_the_identity() {
        let split = identity_splitting(3);
        let trace = embedding_inverse(&split).expect("inverse");
        assert_eq!(trace.iterates.len(), 4);
        assert_eq!(trace.gauges.len(), 3);
        let id = LInftyMorphism::identity(split.sub.clone());
        assert_eq!(trace.result.comps(), id.comps());
        for x in &trace.gauges {
            for level in x.comps() {
                assert!(level.iter().all(LinComb::is_empty));
            }
        }
        trace.certificates.0.verify().expect("ambient certificate");
        trace.certificates.1.verify().expect("subalgebra certificate");
    }

    #[test]
    fn an_acyclic_complement_collapses_onto_the_subalgebra() {
        let split = collapse_splitting(3);
        let trace = embedding_inverse(&split).expect("inverse");

        let first = &trace.iterates[1];
        let endo_p = split.projection.then(&split.inclusion).expect("endo");
        for pos in 0..split.ambient.space().dim() {
            assert_eq!(
                *first.comp(1, pos),
                endo_p.apply(&lc_single(pos, Q::one())),
                "the first flow should straighten the linear part onto the subalgebra"
            );
        }

        assert_eq!(trace.result.linear_part(), split.projection);
        for k in 2..=3 {
            for pos in 0..split.ambient.words().words(k).len() {
                assert!(
                    trace.result.comp(k, pos).is_empty(),
                    "all higher components of the retraction should vanish"
                );
            }
        }
        trace.certificates.0.verify().expect("ambient certificate");
        trace.certificates.1.verify().expect("subalgebra certificate");

        let round = compose_morphisms(
            &LInftyMorphism::strict(split.sub.clone(), split.ambient.clone(), &split.inclusion)
                .expect("include"),
            &trace.result,
        )
        .expect("compose");
        assert_eq!(
            round.comps(),
            LInftyMorphism::identity(split.sub.clone()).comps()
        );
    }

    #[test]
    fn broken_splitting_data_is_reported_by_kind() {
        let mut no_homotopy = collapse_splitting(2);
        no_homotopy.homotopy = GradedLinearMap::zero(
            no_homotopy.ambient.space().clone(),
            no_homotopy.ambient.space().clone(),
            -1,
        );
        assert!(matches!(
            embedding_inverse(&no_homotopy),
            Err(Error::BadContraction(_))
        ));

        let good = collapse_splitting(2);
        let amb = good.ambient.space().clone();
        let squash = GradedLinearMap::new(
            good.sub.space().clone(),
            amb.clone(),
            0,
            vec![
                lc_single(amb.index_of("z").unwrap(), Q::one()),
                lc_single(amb.index_of("a").unwrap(), Q::one()),
                lc_single(amb.index_of("a").unwrap(), Q::one()),
            ],
        )
        .expect("map");
        let mut not_injective = good.clone();
        not_injective.inclusion = squash;
        assert!(matches!(
            embedding_inverse(&not_injective),
            Err(Error::NotAnEmbedding(_))
        ));

        let sub = fix_a(2);
        let sb = sub.space().clone();
        let mut wrong_chain = collapse_splitting(2);
        let icol = |l: &str| lc_single(amb.index_of(l).unwrap(), Q::one());
        wrong_chain.sub = sub;
        wrong_chain.inclusion =
            GradedLinearMap::new(sb.clone(), amb.clone(), 0, vec![icol("x"), icol("b")])
                .expect("map");
        let back_cols: Vec<LinComb> = (0..amb.dim())
            .map(|j| match sb.index_of(amb.label(j)) {
                Some(i) => lc_single(i, Q::one()),
                None => LinComb::new(),
            })
            .collect();
        wrong_chain.projection =
            GradedLinearMap::new(amb.clone(), sb.clone(), 0, back_cols).expect("map");
        assert!(matches!(
            embedding_inverse(&wrong_chain),
            Err(Error::NotAnEmbedding(_))
        ));
    }

    #[test]
    fn a_strict_automorphism_inverts_strictly() {
        let g = fix_b(3);
        let sp = g.space().clone();
        let scale = GradedLinearMap::new(
            sp.clone(),
            sp.clone(),
            0,
            vec![
                lc_single(sp.index_of("z").unwrap(), Q::one()),
                lc_single(sp.index_of("a").unwrap(), qi(2)),
                lc_single(sp.index_of("b").unwrap(), qi(2)),
            ],
        )
        .expect("map");
        let f = LInftyMorphism::strict(g.clone(), g.clone(), &scale).expect("morphism");
        let inv = formal_inverse(&f).expect("inverse");
        assert_eq!(
            *inv.comp(1, sp.index_of("a").unwrap()),
            lc_single(sp.index_of("a").unwrap(), qr(1, 2))
        );
        for k in 2..=3 {
            for pos in 0..g.words().words(k).len() {
                assert!(inv.comp(k, pos).is_empty());
            }
        }
        assert!(check_morphism(&inv).expect("check").is_empty());
    }

    #[test]
    fn correction_terms_cancel_in_the_formal_inverse() {
        let g = fix_b(3);
        let conv = Convolution::new(g.clone(), g.clone()).expect("conv");
        let id = LInftyMorphism::identity(g.clone());
        let mut gauge = conv.zero_element(0);
        gauge.comps_mut()[0][g.space().index_of("a").unwrap()] =
            lc_single(g.space().index_of("z").unwrap(), Q::one());
        let f = conv.gauge_morphism(&id, &gauge).expect("flow");
        let aa = g
            .words()
            .pos(2, &[g.space().index_of("a").unwrap(); 2])
            .expect("word");
        assert!(!f.comp(2, aa).is_empty(), "the flowed map must be non-strict");

        let inv = formal_inverse(&f).expect("inverse");
        let mut expected = f.comp(2, aa).clone();
        lc_scale(&mut expected, &-Q::one());
        assert_eq!(*inv.comp(2, aa), expected);
        assert!(check_morphism(&inv).expect("check").is_empty());
    }

    #[test]
    fn degenerate_linear_parts_are_rejected() {
        let g = fix_b(2);
        let zero = GradedLinearMap::zero(g.space().clone(), g.space().clone(), 0);
        let f = LInftyMorphism::strict(g.clone(), g.clone(), &zero).expect("morphism");
        assert!(matches!(
            formal_inverse(&f),
            Err(Error::SingularLinearPart(_))
        ));

        let split = collapse_splitting(2);
        let include =
            LInftyMorphism::strict(split.sub.clone(), split.ambient.clone(), &split.inclusion)
                .expect("include");
        assert!(matches!(
            formal_inverse(&include),
            Err(Error::SingularLinearPart(_))
        ));
    }

    #[test]
    fn the_identity_is_its_own_homotopy_inverse() {
        let g = fix_b(3);
        let id = LInftyMorphism::identity(g.clone());
        let (inv, (fwd, bwd)) = homotopy_inverse(&id).expect("inverse");
        assert_eq!(inv.comps(), id.comps());
        fwd.verify().expect("forward certificate");
        bwd.verify().expect("backward certificate");
    }

    #[test]
    fn inverting_the_inclusion_matches_the_flow_construction() {
        let split = collapse_splitting(3);
        let include =
            LInftyMorphism::strict(split.sub.clone(), split.ambient.clone(), &split.inclusion)
                .expect("include");
        let (inv, (fwd, bwd)) = homotopy_inverse(&include).expect("inverse");
        fwd.verify().expect("forward certificate");
        bwd.verify().expect("backward certificate");

        let trace = embedding_inverse(&split).expect("trace");
        match find_homotopy(&inv, &trace.result).expect("search") {
            HomotopyOutcome::Certificate(c) => c.verify().expect("cross certificate"),
            HomotopyOutcome::NotHomotopic { arity, detail } => {
                panic!("the two inverses should be gauge equivalent: arity {arity}, {detail}")
            }
        }
    }

    #[test]
    fn rank_dropping_maps_are_rejected() {
        let g = fix_b(2);
        let zero = GradedLinearMap::zero(g.space().clone(), g.space().clone(), 0);
        let f = LInftyMorphism::strict(g.clone(), g.clone(), &zero).expect("morphism");
        assert!(matches!(homotopy_inverse(&f), Err(Error::NotQuasiIso(_))));
    }

    #[test]
    fn higher_structure_inputs_are_rejected() {
        let g = fix_d(3);
        let contraction =
            cohomology_contraction(g.space(), &g.linear_map()).expect("contraction");
        let t = transfer(&g, &contraction).expect("transfer");
        assert!(!t.transferred.is_dg_lie());
        let id = LInftyMorphism::identity(t.transferred.clone());
        assert!(matches!(
            homotopy_inverse(&id),
            Err(Error::UnsupportedStructure(_))
        ));
    }
}
