//! A finite-dimensional path object for dg Lie algebras.
//!
//! The cylinder over a dg Lie algebra g is g tensored with polynomial forms
//! on the interval: functions of polynomial degree at most D and 1-forms of
//! degree at most D−1. The differential combines the base differential with
//! the de Rham differential, the bracket is form-linear, and two forms always
//! bracket to zero. Capping the function degree at D and the form degree at
//! D−1 makes differentiation in t surjective onto the forms, so the cylinder
//! has the same cohomology as the base. Evaluation at any rational point and
//! the constant section are strict morphisms, and a morphism together with a
//! degree-0 gauge element yields a path morphism into the cylinder whose
//! endpoints are the morphism and its gauge transform.

use crate::algebra::{check_structure, LInftyAlgebra};
use crate::conv::{check_morphism, element_of_morphism, Convolution, ConvolutionElement};
use crate::graded::{GradedLinearMap, GradedVectorSpace};
use crate::morphism::LInftyMorphism;
use crate::scalar::{lc_scale, lc_single, qi, sv_add_term, LinComb, Q};
use crate::words::word_sigma;
use crate::{Error, Result};
use num_traits::One;
use std::sync::Arc;

fn function_label(base: &str, power: usize) -> String {
    format!("{base}@t{power}")
}

fn form_label(base: &str, power: usize) -> String {
    format!("{base}@t{power}dt")
}

/// The cylinder algebra together with the data needed to address its basis:
/// `v@tj` is the base element v times t^j, and `v@tjdt` is v times t^j dt.
#[derive(Debug, Clone)]
pub struct CylinderAlgebra {
    base: Arc<LInftyAlgebra>,
    bound: usize,
    algebra: Arc<LInftyAlgebra>,
}

impl CylinderAlgebra {
    pub fn base(&self) -> &Arc<LInftyAlgebra> {
        &self.base
    }

    /// The polynomial degree bound D for the function part.
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn algebra(&self) -> &Arc<LInftyAlgebra> {
        &self.algebra
    }

    /// Index of t^power times the given base element.
    pub fn function_index(&self, base_idx: usize, power: usize) -> usize {
        let label = function_label(self.base.space().label(base_idx), power);
        self.algebra
            .space()
            .index_of(&label)
            .expect("function basis label exists")
    }

    /// Index of t^power dt times the given base element.
    pub fn form_index(&self, base_idx: usize, power: usize) -> usize {
        let label = form_label(self.base.space().label(base_idx), power);
        self.algebra
            .space()
            .index_of(&label)
            .expect("form basis label exists")
    }

    /// The strict morphism that kills every 1-form and substitutes t = s
    /// into the function part. A left inverse of [`section`](Self::section)
    /// for every s, and always a chain map. It respects every bracket whose
    /// total polynomial degree fits under the bound; products that overflow
    /// the cap are dropped by the algebra, so only the evaluation at 0 is a
    /// dg Lie morphism on all of the cylinder. The path construction never
    /// produces overflowing products, so composing a path morphism with any
    /// evaluation is exact.
    pub fn evaluate_at(&self, s: &Q) -> Result<LInftyMorphism> {
        let csp = self.algebra.space().clone();
        let mut cols = vec![LinComb::new(); csp.dim()];
        for v in 0..self.base.space().dim() {
            let mut power = Q::one();
            for j in 0..=self.bound {
                cols[self.function_index(v, j)] = lc_single(v, power.clone());
                power *= s.clone();
            }
        }
        let map = GradedLinearMap::new(csp, self.base.space().clone(), 0, cols)?;
        LInftyMorphism::strict(self.algebra.clone(), self.base.clone(), &map)
    }

    /// The strict morphism sending a base element to itself as a constant
    /// function. A quasi-isomorphism onto the cylinder.
    pub fn section(&self) -> Result<LInftyMorphism> {
        let cols: Vec<LinComb> = (0..self.base.space().dim())
            .map(|v| lc_single(self.function_index(v, 0), Q::one()))
            .collect();
        let map = GradedLinearMap::new(
            self.base.space().clone(),
            self.algebra.space().clone(),
            0,
            cols,
        )?;
        LInftyMorphism::strict(self.base.clone(), self.algebra.clone(), &map)
    }
}

/// Builds the cylinder over a dg Lie algebra with polynomial coefficients of
/// degree at most `bound`. Products whose total t-degree overflows the cap
/// are dropped; this is a quotient by a dg Lie ideal, so the result is
/// checked to be a dg Lie algebra on the nose.
pub fn build_cylinder(g: &Arc<LInftyAlgebra>, bound: usize) -> Result<CylinderAlgebra> {
    if !g.is_dg_lie() {
        return Err(Error::UnsupportedStructure(
            "the cylinder is only defined over a dg Lie base".into(),
        ));
    }
    if bound < 1 {
        return Err(Error::InvalidStructure(
            "the polynomial degree bound must be at least 1".into(),
        ));
    }
    let bsp = g.space();
    let bdim = bsp.dim();
    let mut items = Vec::new();
    for v in 0..bdim {
        for j in 0..=bound {
            items.push((function_label(bsp.label(v), j), bsp.degree(v)));
        }
        for j in 0..bound {
            items.push((form_label(bsp.label(v), j), bsp.degree(v) + 1));
        }
    }
    let space = Arc::new(GradedVectorSpace::new(items)?);

    let d_base = g.linear_map();
    let mut d_entries: Vec<(String, String, Q)> = Vec::new();
    for v in 0..bdim {
        let dv = d_base.col(v);
        for j in 0..=bound {
            let from = function_label(bsp.label(v), j);
            for (tv, c) in dv {
                d_entries.push((from.clone(), function_label(bsp.label(*tv), j), c.clone()));
            }
            if j >= 1 {
                d_entries.push((from.clone(), form_label(bsp.label(v), j - 1), qi(j as i64)));
            }
        }
        for j in 0..bound {
            let from = form_label(bsp.label(v), j);
            for (tv, c) in dv {
                d_entries.push((from.clone(), form_label(bsp.label(*tv), j), -c.clone()));
            }
        }
    }

    // Basis items as (base element, t-power, is-form) tuples; brackets are
    // supplied once per unordered pair.
    let mut desc: Vec<(usize, usize, bool)> = Vec::new();
    for v in 0..bdim {
        for j in 0..=bound {
            desc.push((v, j, false));
        }
        for j in 0..bound {
            desc.push((v, j, true));
        }
    }
    let item_label = |&(v, j, form): &(usize, usize, bool)| {
        if form {
            form_label(bsp.label(v), j)
        } else {
            function_label(bsp.label(v), j)
        }
    };
    let mut brackets: Vec<((String, String), Vec<(String, Q)>)> = Vec::new();
    for p in 0..desc.len() {
        let (u, i, uform) = desc[p];
        for q in p..desc.len() {
            let (v, j, vform) = desc[q];
            if uform && vform {
                continue;
            }
            let out_form = uform || vform;
            let power = i + j;
            if power > bound || (out_form && power + 1 > bound) {
                continue;
            }
            let mut value = g.eval_multi(&[&lc_single(u, Q::one()), &lc_single(v, Q::one())]);
            if value.is_empty() {
                continue;
            }
            // Moving the bracket's first base element past the second
            // factor's form picks up the usual sign.
            if vform && bsp.degree(u).rem_euclid(2) == 1 {
                lc_scale(&mut value, &-Q::one());
            }
            let entries: Vec<(String, Q)> = value
                .iter()
                .map(|(tv, c)| {
                    let label = if out_form {
                        form_label(bsp.label(*tv), power)
                    } else {
                        function_label(bsp.label(*tv), power)
                    };
                    (label, c.clone())
                })
                .collect();
            brackets.push(((item_label(&desc[p]), item_label(&desc[q])), entries));
        }
    }

    let d_view: Vec<(&str, &str, Q)> = d_entries
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.clone()))
        .collect();
    let br_view: Vec<((&str, &str), Vec<(&str, Q)>)> = brackets
        .iter()
        .map(|((x, y), val)| {
            (
                (x.as_str(), y.as_str()),
                val.iter().map(|(l, c)| (l.as_str(), c.clone())).collect(),
            )
        })
        .collect();
    let algebra = Arc::new(LInftyAlgebra::dg_lie(
        space,
        g.truncation(),
        &d_view,
        &br_view,
    )?);
    let bad = check_structure(&algebra);
    if !bad.is_empty() {
        return Err(Error::InvalidStructure(format!(
            "the cylinder fails its structure identities on {}",
            bad.join(", ")
        )));
    }
    Ok(CylinderAlgebra {
        base: g.clone(),
        bound,
        algebra,
    })
}

/// The path morphism into the cylinder attached to a morphism and a gauge
/// element: the function part is the polynomial gauge flow of the morphism
/// along t times the gauge, and the form part is the gauge itself times dt.
/// Evaluating at 0 returns the input morphism; evaluating at 1 returns its
/// gauge transform. The cylinder bound must be at least the truncation so
/// the flow polynomial fits.
pub fn cylinder_morphism(
    cyl: &CylinderAlgebra,
    u0: &LInftyMorphism,
    h: &ConvolutionElement,
) -> Result<LInftyMorphism> {
    if *u0.target() != cyl.base {
        return Err(Error::ShapeMismatch(
            "the morphism must land in the cylinder's base algebra".into(),
        ));
    }
    let source = u0.source().clone();
    let n = source.truncation();
    if cyl.bound < n {
        return Err(Error::TDegreeTooSmall {
            given: cyl.bound,
            needed: n,
        });
    }
    let report = check_morphism(u0)?;
    if !report.is_empty() {
        return Err(Error::NotAMorphism(report.join("; ")));
    }
    if h.degree() != 0 {
        return Err(Error::DegreeMismatch(format!(
            "the gauge element must have degree 0, got {}",
            h.degree()
        )));
    }
    if h.comps().len() != n {
        return Err(Error::ShapeMismatch(format!(
            "the gauge element has {} arity levels, expected {}",
            h.comps().len(),
            n
        )));
    }
    for k in 1..=n {
        let words = source.words().words(k);
        if h.comps()[k - 1].len() != words.len() {
            return Err(Error::ShapeMismatch(format!(
                "the gauge element has {} components at arity {}, expected {}",
                h.comps()[k - 1].len(),
                k,
                words.len()
            )));
        }
        for (pos, w) in words.iter().enumerate() {
            let want = word_sigma(source.space(), w);
            for (tv, _) in h.comp(k, pos) {
                if cyl.base.space().degree(*tv) != want {
                    return Err(Error::DegreeMismatch(format!(
                        "the gauge element is not homogeneous of degree 0 at arity {}",
                        k
                    )));
                }
            }
        }
    }

    let conv = Convolution::new(source.clone(), cyl.base.clone())?;
    let f0 = element_of_morphism(u0);
    let delta_h = conv.l1(h);

    // Coefficient of t^m in the flow of u0 along t times h:
    // (ad_h^m(u0) + ad_h^{m−1}(δh)) / m!.
    let mut coeffs: Vec<ConvolutionElement> = vec![f0.clone()];
    let mut ad_a = f0;
    let mut ad_b = delta_h;
    let mut factorial = Q::one();
    for m in 1..=n {
        factorial *= qi(m as i64);
        ad_a = conv.l_higher(&[h, &ad_a]);
        if m >= 2 {
            ad_b = conv.l_higher(&[h, &ad_b]);
        }
        let mut term = ad_a.clone();
        term.axpy(&Q::one(), &ad_b)?;
        let inv = factorial.recip();
        for level in term.comps_mut() {
            for v in level.iter_mut() {
                lc_scale(v, &inv);
            }
        }
        coeffs.push(term);
    }

    let mut comps = Vec::with_capacity(n);
    for k in 1..=n {
        let words = source.words().words(k);
        let mut level = Vec::with_capacity(words.len());
        for pos in 0..words.len() {
            let mut val = LinComb::new();
            for (m, fm) in coeffs.iter().enumerate() {
                for (tv, c) in fm.comp(k, pos) {
                    sv_add_term(&mut val, cyl.function_index(*tv, m), c.clone());
                }
            }
            for (tv, c) in h.comp(k, pos) {
                sv_add_term(&mut val, cyl.form_index(*tv, 0), c.clone());
            }
            level.push(val);
        }
        comps.push(level);
    }
    LInftyMorphism::new_sform(source, cyl.algebra.clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fix_a, fix_b, fix_d};
    use crate::graded::cohomology_contraction;
    use crate::morphism::compose_morphisms;
    use crate::scalar::qr;
    use crate::solve::invert;
    use crate::transfer::transfer;

    fn curvature_is_zero(
        source: &Arc<LInftyAlgebra>,
        target: &Arc<LInftyAlgebra>,
        f: &LInftyMorphism,
    ) -> bool {
        let conv = Convolution::new(source.clone(), target.clone()).expect("conv");
        let curv = conv
            .mc_curvature(&element_of_morphism(f))
            .expect("curvature");
        curv.comps()
            .iter()
            .all(|level| level.iter().all(LinComb::is_empty))
    }

    #[test]
    fn degenerate_bases_build_degenerate_cylinders() {
        let empty = Arc::new(
            LInftyAlgebra::abelian(Arc::new(GradedVectorSpace::new(vec![]).expect("space")), 2, &[])
                .expect("algebra"),
        );
        let cyl = build_cylinder(&empty, 2).expect("cylinder");
        assert_eq!(cyl.algebra().space().dim(), 0);

        let point = Arc::new(
            LInftyAlgebra::abelian(
                Arc::new(GradedVectorSpace::new(vec![("u".into(), 0)]).expect("space")),
                2,
                &[],
            )
            .expect("algebra"),
        );
        let cyl = build_cylinder(&point, 2).expect("cylinder");
        assert_eq!(cyl.algebra().space().dim(), 5);
        let h = cohomology_contraction(cyl.algebra().space(), &cyl.algebra().linear_map())
            .expect("contraction")
            .cohomology;
        assert_eq!(h.dim(), 1);
        assert_eq!(h.degree(0), 0);
    }

    #[test]
    fn the_cylinder_keeps_the_cohomology_of_the_base() {
        let g = fix_b(3);
        let cyl = build_cylinder(&g, 3).expect("cylinder");
        assert_eq!(cyl.algebra().space().dim(), 21);
        let hb = cohomology_contraction(g.space(), &g.linear_map())
            .expect("base contraction")
            .cohomology;
        let hc = cohomology_contraction(cyl.algebra().space(), &cyl.algebra().linear_map())
            .expect("cylinder contraction")
            .cohomology;
        assert_eq!(hb.dim(), hc.dim());
        for d in [-1, 0, 1, 2] {
            assert_eq!(hb.dim_in_degree(d), hc.dim_in_degree(d));
        }
    }

    #[test]
    fn evaluation_splits_the_constant_section() {
        let g = fix_b(3);
        let cyl = build_cylinder(&g, 3).expect("cylinder");
        let sigma = cyl.section().expect("section");
        assert!(check_morphism(&sigma).expect("check").is_empty());
        let p0 = cyl.evaluate_at(&qi(0)).expect("evaluation");
        assert!(
            check_morphism(&p0).expect("check").is_empty(),
            "evaluation at 0 is a dg Lie morphism everywhere"
        );
        let d_cyl = cyl.algebra().linear_map();
        let d_base = g.linear_map();
        let id = LInftyMorphism::identity(g.clone());
        for s in [qi(0), qr(1, 3), qi(1)] {
            let p = cyl.evaluate_at(&s).expect("evaluation");
            let p1 = p.linear_part();
            assert_eq!(
                d_cyl.then(&p1).expect("compose"),
                p1.then(&d_base).expect("compose"),
                "every evaluation is a chain map"
            );
            let round = compose_morphisms(&sigma, &p).expect("compose");
            assert_eq!(round.comps(), id.comps());
        }

        // Brackets whose total polynomial degree stays under the bound are
        // respected by every evaluation.
        let z = g.space().index_of("z").unwrap();
        let a = g.space().index_of("a").unwrap();
        let third = qr(1, 3);
        let p = cyl.evaluate_at(&third).expect("evaluation");
        let pm = p.linear_part();
        let z1 = lc_single(cyl.function_index(z, 1), Q::one());
        let a1 = lc_single(cyl.function_index(a, 1), Q::one());
        let inside = pm.apply(&cyl.algebra().eval_multi(&[&z1, &a1]));
        let outside = g.eval_multi(&[&pm.apply(&z1), &pm.apply(&a1)]);
        assert_eq!(inside, outside);

        let cb = cohomology_contraction(g.space(), &g.linear_map()).expect("base");
        let cc = cohomology_contraction(cyl.algebra().space(), &cyl.algebra().linear_map())
            .expect("cylinder");
        let s1 = sigma.linear_part();
        let induced: Vec<LinComb> = (0..cb.cohomology.dim())
            .map(|j| cc.p.apply(&s1.apply(cb.i.col(j))))
            .collect();
        assert!(
            invert(&induced, cb.cohomology.dim()).is_some(),
            "the constant section should be a quasi-isomorphism"
        );
    }

    #[test]
    fn the_form_part_brackets_by_the_flow_sign_rule() {
        let g = fix_d(2);
        let cyl = build_cylinder(&g, 2).expect("cylinder");
        let conv_base = Convolution::new(g.clone(), g.clone()).expect("conv");
        let conv_cyl = Convolution::new(g.clone(), cyl.algebra().clone()).expect("conv");
        let id_el = element_of_morphism(&LInftyMorphism::identity(g.clone()));
        let c_idx = g.space().index_of("c").unwrap();
        let a_idx = g.space().index_of("a").unwrap();
        let mut h = conv_base.zero_element(0);
        h.comps_mut()[0][c_idx] = lc_single(a_idx, Q::one());

        // Push a degree-0 element to its dt-part and a morphism to its
        // constant function part inside the cylinder convolution.
        let mut hdt = conv_cyl.zero_element(1);
        let mut f_fn = conv_cyl.zero_element(1);
        for k in 1..=2 {
            for pos in 0..g.words().words(k).len() {
                for (tv, c) in h.comp(k, pos) {
                    sv_add_term(
                        &mut hdt.comps_mut()[k - 1][pos],
                        cyl.form_index(*tv, 0),
                        c.clone(),
                    );
                }
                for (tv, c) in id_el.comp(k, pos) {
                    sv_add_term(
                        &mut f_fn.comps_mut()[k - 1][pos],
                        cyl.function_index(*tv, 0),
                        c.clone(),
                    );
                }
            }
        }

        // In the symmetric-word normal form the dt factor rides along with
        // no extra sign: bracketing the dt-part against the function part
        // is the base-level bracket pushed to the dt-part. The compensating
        // sign of the convention pair lives in the form differential, and
        // the Maurer-Cartan test for the interpolating path certifies the
        // pair is consistent.
        let lhs = conv_cyl.l_higher(&[&hdt, &f_fn]);
        let hf = conv_base.l_higher(&[&h, &id_el]);
        let mut rhs = conv_cyl.zero_element(2);
        let mut saw_nonzero = false;
        for k in 1..=2 {
            for pos in 0..g.words().words(k).len() {
                for (tv, c) in hf.comp(k, pos) {
                    saw_nonzero = true;
                    sv_add_term(
                        &mut rhs.comps_mut()[k - 1][pos],
                        cyl.form_index(*tv, 0),
                        c.clone(),
                    );
                }
            }
        }
        assert!(saw_nonzero, "the probe bracket must be nonzero");
        assert_eq!(lhs.comps(), rhs.comps());
    }

    #[test]
    fn the_form_differential_carries_the_crossing_sign() {
        let g = fix_a(2);
        let cyl = build_cylinder(&g, 2).expect("cylinder");
        let alg = cyl.algebra();
        let d = alg.linear_map();
        let x = g.space().index_of("x").unwrap();
        let y = g.space().index_of("y").unwrap();

        // On the function part the internal differential keeps its sign and
        // the de Rham part differentiates the power of t.
        let mut df = lc_single(cyl.form_index(x, 0), Q::one());
        sv_add_term(&mut df, cyl.function_index(y, 1), qi(1));
        assert_eq!(d.apply(&lc_single(cyl.function_index(x, 1), Q::one())), df);

        // On the dt-part the internal differential crosses the form, which
        // flips its sign; a constant coefficient has no de Rham term.
        assert_eq!(
            d.apply(&lc_single(cyl.form_index(x, 0), Q::one())),
            lc_single(cyl.form_index(y, 0), -Q::one())
        );
    }

    #[test]
    fn a_zero_gauge_gives_the_constant_path() {
        let g = fix_b(3);
        let cyl = build_cylinder(&g, 3).expect("cylinder");
        let id = LInftyMorphism::identity(g.clone());
        let conv = Convolution::new(g.clone(), g.clone()).expect("conv");
        let path = cylinder_morphism(&cyl, &id, &conv.zero_element(0)).expect("path");
        for s in [qi(0), qr(1, 2), qi(1)] {
            let p = cyl.evaluate_at(&s).expect("evaluation");
            let end = compose_morphisms(&path, &p).expect("compose");
            assert_eq!(end.comps(), id.comps());
        }
    }

    #[test]
    fn an_abelian_target_gives_a_path_linear_in_t() {
        let g = fix_a(3);
        let cyl = build_cylinder(&g, 3).expect("cylinder");
        let id = LInftyMorphism::identity(g.clone());
        let conv = Convolution::new(g.clone(), g.clone()).expect("conv");
        let y = g.space().index_of("y").unwrap();
        let x = g.space().index_of("x").unwrap();
        let mut h = conv.zero_element(0);
        h.comps_mut()[0][y] = lc_single(x, Q::one());
        let delta_h = conv.l1(&h);

        let path = cylinder_morphism(&cyl, &id, &h).expect("path");
        assert!(curvature_is_zero(&g, cyl.algebra(), &path));
        for k in 1..=3 {
            for pos in 0..g.words().words(k).len() {
                let val = path.comp(k, pos);
                for v in 0..g.space().dim() {
                    for m in 2..=3 {
                        assert!(
                            !val.contains_key(&cyl.function_index(v, m)),
                            "an abelian flow must be linear in t"
                        );
                    }
                    let lin = val.get(&cyl.function_index(v, 1)).cloned().unwrap_or_else(|| qi(0));
                    let want = delta_h.comp(k, pos).get(&v).cloned().unwrap_or_else(|| qi(0));
                    assert_eq!(lin, want, "the t-linear part is the differential of the gauge");
                }
            }
        }
        let p1 = cyl.evaluate_at(&qi(1)).expect("evaluation");
        let end = compose_morphisms(&path, &p1).expect("compose");
        let flowed = conv.gauge_morphism(&id, &h).expect("flow");
        assert_eq!(end.comps(), flowed.comps());
    }

    #[test]
    fn the_path_morphism_is_a_morphism_with_the_right_endpoints() {
        let g = fix_b(3);
        let cyl = build_cylinder(&g, 3).expect("cylinder");
        let id = LInftyMorphism::identity(g.clone());
        let conv = Convolution::new(g.clone(), g.clone()).expect("conv");
        let a = g.space().index_of("a").unwrap();
        let z = g.space().index_of("z").unwrap();
        let mut h = conv.zero_element(0);
        h.comps_mut()[0][a] = lc_single(z, Q::one());

        let path = cylinder_morphism(&cyl, &id, &h).expect("path");
        assert!(check_morphism(&path).expect("check").is_empty());
        assert!(curvature_is_zero(&g, cyl.algebra(), &path));

        let p0 = cyl.evaluate_at(&qi(0)).expect("evaluation");
        let start = compose_morphisms(&path, &p0).expect("compose");
        assert_eq!(start.comps(), id.comps());

        let p1 = cyl.evaluate_at(&qi(1)).expect("evaluation");
        let end = compose_morphisms(&path, &p1).expect("compose");
        let flowed = conv.gauge_morphism(&id, &h).expect("flow");
        assert_eq!(end.comps(), flowed.comps());
    }

    #[test]
    fn underpowered_or_foreign_inputs_are_rejected() {
        let g = fix_b(3);
        assert!(matches!(
            build_cylinder(&g, 0),
            Err(Error::InvalidStructure(_))
        ));
        let d = fix_d(3);
        let contraction =
            cohomology_contraction(d.space(), &d.linear_map()).expect("contraction");
        let t = transfer(&d, &contraction).expect("transfer");
        assert!(matches!(
            build_cylinder(&t.transferred, 3),
            Err(Error::UnsupportedStructure(_))
        ));

        let cyl = build_cylinder(&g, 2).expect("cylinder");
        let id = LInftyMorphism::identity(g.clone());
        let conv = Convolution::new(g.clone(), g.clone()).expect("conv");
        assert!(matches!(
            cylinder_morphism(&cyl, &id, &conv.zero_element(0)),
            Err(Error::TDegreeTooSmall { given: 2, needed: 3 })
        ));

        let cyl = build_cylinder(&g, 3).expect("cylinder");
        let sp = g.space();
        let bad_cols: Vec<LinComb> = vec![
            lc_single(sp.index_of("z").unwrap(), Q::one()),
            lc_single(sp.index_of("a").unwrap(), Q::one()),
            lc_single(sp.index_of("b").unwrap(), qi(2)),
        ];
        let bad_map =
            GradedLinearMap::new(sp.clone(), sp.clone(), 0, bad_cols).expect("map");
        let bad = LInftyMorphism::strict(g.clone(), g.clone(), &bad_map).expect("morphism");
        assert!(matches!(
            cylinder_morphism(&cyl, &bad, &conv.zero_element(0)),
            Err(Error::NotAMorphism(_))
        ));
        assert!(matches!(
            cylinder_morphism(&cyl, &id, &conv.zero_element(1)),
            Err(Error::DegreeMismatch(_))
        ));
    }
}
