//! Homotopy transfer along a contraction: the induced operations on
//! cohomology, an embedding of the transferred algebra that splits the
//! projection, and a projection morphism that is a strict left inverse of
//! the embedding.

use crate::algebra::LInftyAlgebra;
use crate::graded::ContractionData;
use crate::morphism::{compose_morphisms, LInftyMorphism};
use crate::scalar::{lc_axpy, lc_single, sv_add_term, LinComb, Q};
use crate::solve::LinearSolver;
use crate::words::{decompositions, word_sigma};
use crate::{Error, Result};
use num_traits::One;
use std::sync::Arc;

/// Everything the transfer produces: the induced algebra on cohomology,
/// the embedding back into the ambient algebra, and a projection onto the
/// transferred algebra with `projection ∘ embedding = id` exactly.
#[derive(Debug, Clone)]
pub struct TransferResult {
    pub contraction: ContractionData,
    pub transferred: Arc<LInftyAlgebra>,
    pub embedding: LInftyMorphism,
    pub projection: LInftyMorphism,
}

fn fact(n: usize) -> Q {
    let mut out = Q::one();
    for i in 1..=n {
        out *= crate::scalar::qi(i as i64);
    }
    out
}

/// Transfer the structure of `g` onto the contracted complex.
///
/// The recursion builds, for every cohomology word w of arity k ≥ 2, the
/// ambient value
///
///   m_k(w) = Σ_{s=2}^{k} (1/s!) Σ_{w → B_1 ⊗ … ⊗ B_s} ε ·
///            l_s(M(B_1), …, M(B_s)),
///
/// the sum running over ordered block decompositions with their Koszul
/// signs; then the transferred operation is p ∘ m_k and the embedding
/// component is −h ∘ m_k, with M on a block meaning i on a single letter
/// and the already-built embedding component on longer blocks. The minus
/// sign makes the curvature of the embedding cancel exactly against the
/// homotopy identity d h + h d = 1 − i p. The
/// projection is built afterwards, arity by arity: its component at arity
/// k is the deterministic exact solution of the affine system stating
/// that the projection is a morphism and splits the embedding.
pub fn transfer(g: &Arc<LInftyAlgebra>, contraction: &ContractionData) -> Result<TransferResult> {
    contraction.verify().map_err(|e| match e {
        Error::InvalidContraction(msg) => Error::InvalidContraction(msg),
        other => other,
    })?;
    if contraction.ambient != *g.space() {
        return Err(Error::ShapeMismatch(
            "the contraction lives on a different space than the algebra".into(),
        ));
    }
    for idx in 0..g.space().dim() {
        let from_alg = g.eval_multi(&[&lc_single(idx, Q::one())]);
        let from_contraction = contraction.d.apply(&lc_single(idx, Q::one()));
        if from_alg != from_contraction {
            return Err(Error::InvalidContraction(
                "the contraction differential differs from the unary operation".into(),
            ));
        }
    }
    let n = g.truncation();
    let hspace = contraction.cohomology.clone();
    // Words over the cohomology space, per arity. The transferred algebra
    // is built once the operation table is complete, so the embedding
    // recursion works on raw word lists.
    let hwords = crate::words::SymWords::build(hspace.clone(), n);
    let mut emb: Vec<Vec<LinComb>> = Vec::new();
    let mut ops: Vec<Vec<LinComb>> = Vec::new();
    for k in 1..=n {
        let words = hwords.words(k);
        let mut emb_k = Vec::with_capacity(words.len());
        let mut ops_k = Vec::with_capacity(words.len());
        for w in words {
            if k == 1 {
                emb_k.push(contraction.i.apply(&lc_single(w[0], Q::one())));
                ops_k.push(LinComb::new());
                continue;
            }
            let mut m_value = LinComb::new();
            for s in 2..=k {
                let weight = fact(s).recip();
                for (blocks, eps) in decompositions(&hspace, w, s) {
                    let mut values: Vec<&LinComb> = Vec::with_capacity(s);
                    let mut ok = true;
                    for block in &blocks {
                        let bpos = hwords.pos(block.len(), block).expect("canonical word");
                        let v = &emb[block.len() - 1][bpos];
                        if v.is_empty() {
                            ok = false;
                            break;
                        }
                        values.push(v);
                    }
                    if !ok {
                        continue;
                    }
                    let term = g.eval_multi(&values);
                    let signed = weight.clone() * crate::scalar::qi(eps as i64);
                    lc_axpy(&mut m_value, &signed, &term);
                }
            }
            let mut minus_h = contraction.h.apply(&m_value);
            crate::scalar::lc_scale(&mut minus_h, &-Q::one());
            emb_k.push(minus_h);
            ops_k.push(contraction.p.apply(&m_value));
        }
        emb.push(emb_k);
        ops.push(ops_k);
    }
    let transferred = Arc::new(LInftyAlgebra::new_sform(hspace.clone(), n, ops)?);
    let embedding = LInftyMorphism::new_sform(transferred.clone(), g.clone(), emb)?;
    let projection = build_projection(g, contraction, &transferred, &embedding)?;
    Ok(TransferResult {
        contraction: contraction.clone(),
        transferred,
        embedding,
        projection,
    })
}

/// Extend p to an L∞ morphism that splits the embedding, arity by arity.
/// At arity k both requirements are affine in the unknown component: the
/// curvature of the candidate (its arity-k part is linear in P_k because
/// every higher bracket pairs P_k with blocks of total arity ≥ 1), and
/// the arity-k component of P ∘ M. The joint system is solved by the
/// deterministic eliminator; free coordinates are zero.
fn build_projection(
    g: &Arc<LInftyAlgebra>,
    contraction: &ContractionData,
    transferred: &Arc<LInftyAlgebra>,
    embedding: &LInftyMorphism,
) -> Result<LInftyMorphism> {
    let n = g.truncation();
    let hdim = transferred.space().dim();
    let conv = crate::conv::Convolution::new(g.clone(), transferred.clone())?;
    let mut comps: Vec<Vec<LinComb>> = (1..=n)
        .map(|k| vec![LinComb::new(); g.words().words(k).len()])
        .collect();
    for (idx, col) in comps[0].iter_mut().enumerate() {
        *col = contraction.p.apply(&lc_single(idx, Q::one()));
    }
    let identity = LInftyMorphism::identity(transferred.clone());
    for k in 2..=n {
        let words = g.words().words(k);
        let hwords_k = transferred.words().words(k);
        let candidate = LInftyMorphism::new_sform(g.clone(), transferred.clone(), comps.clone())?;
        let cand_el = crate::conv::element_of_morphism(&candidate);
        let base_curv = conv.mc_curvature(&cand_el)?;
        let base_comp = compose_morphisms(embedding, &candidate)?;
        // Row layout: curvature rows over ambient words at arity k, then
        // composition rows over cohomology words at arity k.
        let curv_rows = words.len() * hdim;
        let flatten = |curv: &crate::conv::ConvolutionElement,
                       comp: &LInftyMorphism|
         -> LinComb {
            let mut out = LinComb::new();
            for pos in 0..words.len() {
                for (tv, c) in curv.comp(k, pos) {
                    sv_add_term(&mut out, pos * hdim + tv, c.clone());
                }
            }
            for pos in 0..hwords_k.len() {
                for (tv, c) in &comp.comps()[k - 1][pos] {
                    sv_add_term(&mut out, curv_rows + pos * hdim + tv, c.clone());
                }
            }
            out
        };
        let base_rows = flatten(&base_curv, &base_comp);
        let mut unknowns: Vec<(usize, usize)> = Vec::new();
        let mut cols: Vec<LinComb> = Vec::new();
        for (pos, w) in words.iter().enumerate() {
            let want = word_sigma(g.space(), w) + 1;
            for tv in 0..hdim {
                if transferred.space().degree(tv) != want {
                    continue;
                }
                let mut shifted = comps.clone();
                sv_add_term(&mut shifted[k - 1][pos], tv, Q::one());
                let trial =
                    LInftyMorphism::new_sform(g.clone(), transferred.clone(), shifted)?;
                let trial_el = crate::conv::element_of_morphism(&trial);
                let trial_curv = conv.mc_curvature(&trial_el)?;
                let trial_comp = compose_morphisms(embedding, &trial)?;
                let mut col = flatten(&trial_curv, &trial_comp);
                lc_axpy(&mut col, &-Q::one(), &base_rows);
                unknowns.push((pos, tv));
                cols.push(col);
            }
        }
        let mut rhs = LinComb::new();
        for pos in 0..hwords_k.len() {
            for (tv, c) in &identity.comps()[k - 1][pos] {
                sv_add_term(&mut rhs, curv_rows + pos * hdim + tv, c.clone());
            }
        }
        lc_axpy(&mut rhs, &-Q::one(), &base_rows);
        let Some(x) = LinearSolver::new(cols.iter()).solve(&rhs) else {
            return Err(Error::InvalidStructure(format!(
                "no projection component exists at arity {k}"
            )));
        };
        for (j, c) in &x {
            let (pos, tv) = unknowns[*j];
            sv_add_term(&mut comps[k - 1][pos], tv, c.clone());
        }
    }
    LInftyMorphism::new_sform(g.clone(), transferred.clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_structure;
    use crate::conv::{check_morphism, find_homotopy, HomotopyOutcome};
    use crate::fixtures;
    use crate::graded::cohomology_contraction;
    use crate::scalar::qi;

    fn transfer_of(g: &Arc<LInftyAlgebra>) -> TransferResult {
        let d = g.linear_map();
        let contraction = cohomology_contraction(g.space(), &d).unwrap();
        transfer(g, &contraction).unwrap()
    }

    #[test]
    fn acyclic_input_transfers_to_nothing() {
        let a = fixtures::fix_a(2);
        let t = transfer_of(&a);
        assert_eq!(t.transferred.space().dim(), 0);
        assert!(check_structure(&t.transferred).is_empty());
        assert!(check_morphism(&t.embedding).unwrap().is_empty());
        assert!(check_morphism(&t.projection).unwrap().is_empty());
    }

    #[test]
    fn zero_differential_transfers_identically() {
        let b = fixtures::fix_b(2);
        let t = transfer_of(&b);
        assert_eq!(t.transferred.space().dim(), 3);
        // With h = 0 every tree with an internal edge dies, so the
        // operations agree with the ambient ones under relabelling.
        let za = t
            .transferred
            .space()
            .index_of("[z]")
            .and_then(|z| t.transferred.space().index_of("[a]").map(|a| vec![z, a]))
            .unwrap();
        let lb = t.transferred.eval_letters(&za);
        let bi = t.transferred.space().index_of("[b]").unwrap();
        assert_eq!(lb, lc_single(bi, qi(1)));
        assert!(check_morphism(&t.embedding).unwrap().is_empty());
        assert!(check_morphism(&t.projection).unwrap().is_empty());
        let round = compose_morphisms(&t.embedding, &t.projection).unwrap();
        assert_eq!(round, LInftyMorphism::identity(t.transferred.clone()));
    }

    #[test]
    fn the_induced_ternary_bracket_appears_on_cohomology() {
        let d = fixtures::fix_d(3);
        let t = transfer_of(&d);
        let space = t.transferred.space();
        assert_eq!(space.dim(), 3);
        let (a, b, w) = (
            space.index_of("[a]").unwrap(),
            space.index_of("[b]").unwrap(),
            space.index_of("[w]").unwrap(),
        );
        // Every binary operation vanishes: the only ambient bracket value
        // [a, b] = c is exact.
        for word in t.transferred.words().words(2) {
            assert!(t.transferred.eval_letters(word).is_empty());
        }
        // The secondary operation survives: two trees pair a leaf with
        // -h([a, b]) = -h through [a, h] = w, each in two leaf orders,
        // weighted by 1/2!.
        assert_eq!(t.transferred.eval_letters(&[a, a, b]), lc_single(w, qi(-2)));
        assert!(check_structure(&t.transferred).is_empty());
        assert!(check_morphism(&t.embedding).unwrap().is_empty());
        assert!(check_morphism(&t.projection).unwrap().is_empty());
        let round = compose_morphisms(&t.embedding, &t.projection).unwrap();
        assert_eq!(round, LInftyMorphism::identity(t.transferred.clone()));
    }

    #[test]
    fn the_other_round_trip_is_homotopic_to_the_identity() {
        let d = fixtures::fix_d(3);
        let t = transfer_of(&d);
        let other = compose_morphisms(&t.projection, &t.embedding).unwrap();
        let id = LInftyMorphism::identity(d.clone());
        match find_homotopy(&other, &id).unwrap() {
            HomotopyOutcome::Certificate(cert) => cert.verify().unwrap(),
            HomotopyOutcome::NotHomotopic { arity, detail } => {
                panic!("round trip not homotopic to the identity at arity {arity}: {detail}")
            }
        }
    }

    #[test]
    fn foreign_contractions_are_rejected() {
        let b = fixtures::fix_b(2);
        let a = fixtures::fix_a(2);
        let contraction = cohomology_contraction(a.space(), &a.linear_map()).unwrap();
        match transfer(&b, &contraction) {
            Err(Error::ShapeMismatch(_)) => {}
            other => panic!("expected ShapeMismatch, got {other:?}"),
        }
    }
}
