//! The convolution L∞ algebra Hom(C₊(g1), g2): Maurer-Cartan curvature of
//! morphism candidates, gauge flows by degree-0 elements, flow composition
//! through Baker-Campbell-Hausdorff, and the staged search for a gauge
//! connecting two morphisms.

use crate::algebra::{check_structure, ChainCoalgebra, LInftyAlgebra, WordVec};
use crate::graded::GradedVectorSpace;
use crate::morphism::LInftyMorphism;
use crate::scalar::{lc_axpy, lc_scale, lc_single, qi, sv_add_term, LinComb, Q};
use crate::solve::LinearSolver;
use crate::words::word_sigma;
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Hom(C₊(g1), g2) for two algebras at a common truncation. Construction
/// validates both structures.
#[derive(Debug, Clone)]
pub struct Convolution {
    coalgebra: ChainCoalgebra,
    target: Arc<LInftyAlgebra>,
}

/// A homogeneous element: one value in g2 per word of C₊(g1), graded so
/// that a degree-r element sends a word of shifted degree d to g2-degree
/// d + r. Morphism candidates live in degree 1, gauges in degree 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionElement {
    degree: i32,
    comps: Vec<Vec<LinComb>>,
}

impl ConvolutionElement {
    pub fn degree(&self) -> i32 {
        self.degree
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

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|level| level.iter().all(LinComb::is_empty))
    }

    pub fn scaled(&self, c: &Q) -> Self {
        use num_traits::Zero;
        let mut out = self.clone();
        for level in &mut out.comps {
            for v in level.iter_mut() {
                if c.is_zero() {
                    v.clear();
                } else {
                    lc_scale(v, c);
                }
            }
        }
        out
    }

    /// In-place self += c · other; shapes and degrees must agree.
    pub fn axpy(&mut self, c: &Q, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot combine degrees {} and {}",
                self.degree, other.degree
            )));
        }
        if self.comps.len() != other.comps.len() {
            return Err(Error::ShapeMismatch("element shapes differ".into()));
        }
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            if a.len() != b.len() {
                return Err(Error::ShapeMismatch("element shapes differ".into()));
            }
            for (va, vb) in a.iter_mut().zip(b) {
                lc_axpy(va, c, vb);
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(&Q::one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(&-Q::one(), other)?;
        Ok(out)
    }
}

/// View a morphism's Taylor components as the corresponding degree-1
/// element.
pub fn element_of_morphism(f: &LInftyMorphism) -> ConvolutionElement {
    ConvolutionElement { degree: 1, comps: f.comps().clone() }
}

fn factorial(m: usize) -> Q {
    let mut out = Q::one();
    for i in 2..=m {
        out *= Q::from_integer((i as i64).into());
    }
    out
}

fn parity_sign(s: i32) -> i32 {
    if s.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Convolution {
    pub fn new(source: Arc<LInftyAlgebra>, target: Arc<LInftyAlgebra>) -> Result<Self> {
        if source.truncation() != target.truncation() {
            return Err(Error::TruncationMismatch {
                left: source.truncation(),
                right: target.truncation(),
            });
        }
        let coalgebra = ChainCoalgebra::new(source)?;
        let bad = check_structure(&target);
        if !bad.is_empty() {
            return Err(Error::InvalidStructure(format!(
                "target coderivation does not square to zero on {}",
                bad.join(", ")
            )));
        }
        Ok(Self { coalgebra, target })
    }

    pub fn source(&self) -> &Arc<LInftyAlgebra> {
        self.coalgebra.base()
    }

    pub fn target(&self) -> &Arc<LInftyAlgebra> {
        &self.target
    }

    pub fn truncation(&self) -> usize {
        self.target.truncation()
    }

    pub fn zero_element(&self, degree: i32) -> ConvolutionElement {
        let src = self.source();
        let comps = (1..=self.truncation())
            .map(|k| vec![LinComb::new(); src.words().words(k).len()])
            .collect();
        ConvolutionElement { degree, comps }
    }

    /// The element supported on a single word with a single basis value.
    pub fn unit_element(&self, k: usize, pos: usize, tgt: usize) -> ConvolutionElement {
        let w = &self.source().words().words(k)[pos];
        let degree = self.target.space().degree(tgt) - word_sigma(self.source().space(), w);
        let mut e = self.zero_element(degree);
        e.comps[k - 1][pos] = lc_single(tgt, Q::one());
        e
    }

    pub fn validate_element(&self, e: &ConvolutionElement) -> Result<()> {
        let src = self.source();
        if e.comps.len() != self.truncation() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} arity levels, got {}",
                self.truncation(),
                e.comps.len()
            )));
        }
        for (ki, level) in e.comps.iter().enumerate() {
            let k = ki + 1;
            let words = src.words().words(k);
            if level.len() != words.len() {
                return Err(Error::ShapeMismatch(format!(
                    "arity {k}: expected {} components, got {}",
                    words.len(),
                    level.len()
                )));
            }
            for (pos, v) in level.iter().enumerate() {
                let want = word_sigma(src.space(), &words[pos]) + e.degree;
                for idx in v.keys() {
                    if *idx >= self.target.space().dim()
                        || self.target.space().degree(*idx) != want
                    {
                        return Err(Error::DegreeMismatch(format!(
                            "value on {} must be homogeneous of degree {want}",
                            src.words().label(&words[pos])
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Linear extension of an element to coalgebra vectors.
    pub fn apply_element(&self, e: &ConvolutionElement, v: &WordVec) -> LinComb {
        let mut out = LinComb::new();
        for ((k, pos), c) in v {
            lc_axpy(&mut out, c, &e.comps[*k - 1][*pos]);
        }
        out
    }

    fn apply_target_d(&self, v: &LinComb) -> LinComb {
        let mut out = LinComb::new();
        for (idx, c) in v {
            lc_axpy(&mut out, c, self.target.d_col(*idx));
        }
        out
    }

    /// The convolution differential: l₁ ∘ θ − (−1)^{s} θ ∘ D with
    /// s = deg θ − 1, so degree-0 elements satisfy δθ = l₁∘θ + θ∘D.
    pub fn l1(&self, e: &ConvolutionElement) -> ConvolutionElement {
        let src = self.source();
        let s = parity_sign(e.degree - 1);
        let mut out = self.zero_element(e.degree + 1);
        for k in 1..=self.truncation() {
            for pos in 0..src.words().words(k).len() {
                let mut v = self.apply_target_d(&e.comps[k - 1][pos]);
                let pulled = self.apply_element(e, self.coalgebra.d(k, pos));
                let c = -Q::from_integer((s as i64).into());
                lc_axpy(&mut v, &c, &pulled);
                out.comps[k - 1][pos] = v;
            }
        }
        out
    }

    /// The higher bracket λ_m(θ_1, …, θ_m) for m ≥ 2: target operations
    /// composed with the iterated coproduct, with the sign of moving each
    /// θ_j past the earlier blocks.
    pub fn l_higher(&self, args: &[&ConvolutionElement]) -> ConvolutionElement {
        let m = args.len();
        assert!(m >= 2, "l_higher needs at least two arguments");
        let src = self.source();
        let degree = args.iter().map(|a| a.degree).sum::<i32>() + 2 - m as i32;
        let mut out = self.zero_element(degree);
        for k in m..=self.truncation() {
            for (pos, w) in src.words().words(k).iter().enumerate() {
                let mut acc = LinComb::new();
                for (blocks, eps) in crate::words::decompositions(src.space(), w, m) {
                    let mut values: Vec<&LinComb> = Vec::with_capacity(m);
                    let mut ok = true;
                    for (slot, block) in blocks.iter().enumerate() {
                        let bpos = src.words().pos(block.len(), block).expect("canonical");
                        let v = &args[slot].comps[block.len() - 1][bpos];
                        if v.is_empty() {
                            ok = false;
                            break;
                        }
                        values.push(v);
                    }
                    if !ok {
                        continue;
                    }
                    let mut exponent = 0i32;
                    for (j, arg) in args.iter().enumerate().skip(1) {
                        let s_j = arg.degree - 1;
                        let before: i32 =
                            blocks[..j].iter().map(|b| word_sigma(src.space(), b)).sum();
                        exponent += s_j * before;
                    }
                    let sign = eps * parity_sign(exponent);
                    let value = self.target.eval_multi(&values);
                    lc_axpy(&mut acc, &Q::from_integer((sign as i64).into()), &value);
                }
                out.comps[k - 1][pos] = acc;
            }
        }
        out
    }

    /// Curvature of a degree-1 element: δφ + Σ_{m≥2} λ_m(φ,…,φ)/m!.
    /// Zero exactly when φ is an L∞ morphism.
    pub fn mc_curvature(&self, e: &ConvolutionElement) -> Result<ConvolutionElement> {
        self.validate_element(e)?;
        if e.degree != 1 {
            return Err(Error::DegreeMismatch(format!(
                "curvature needs a degree-1 element, got degree {}",
                e.degree
            )));
        }
        let mut r = self.l1(e);
        for m in 2..=self.truncation() {
            let args = vec![e; m];
            let term = self.l_higher(&args);
            r.axpy(&(Q::one() / factorial(m)), &term)?;
        }
        Ok(r)
    }

    /// Labels of the (arity, word) slots where an element is nonzero.
    pub fn support_report(&self, e: &ConvolutionElement) -> Vec<String> {
        let src = self.source();
        let mut out = Vec::new();
        for k in 1..=self.truncation() {
            for (pos, w) in src.words().words(k).iter().enumerate() {
                let v = &e.comps[k - 1][pos];
                if !v.is_empty() {
                    out.push(format!(
                        "arity {k} on {}: {}",
                        src.words().label(w),
                        self.target.describe(v)
                    ));
                }
            }
        }
        out
    }

    pub fn morphism_of_element(&self, e: &ConvolutionElement) -> Result<LInftyMorphism> {
        self.validate_element(e)?;
        if e.degree != 1 {
            return Err(Error::DegreeMismatch(format!(
                "a morphism element must have degree 1, got {}",
                e.degree
            )));
        }
        LInftyMorphism::new_sform(self.source().clone(), self.target.clone(), e.comps.clone())
    }

    fn ad(&self, h: &ConvolutionElement, x: &ConvolutionElement) -> ConvolutionElement {
        self.l_higher(&[h, x])
    }

    fn gauge_pre(&self, f: &ConvolutionElement, h: &ConvolutionElement) -> Result<()> {
        self.validate_element(h)?;
        if h.degree != 0 {
            return Err(Error::DegreeMismatch(format!(
                "a gauge element must have degree 0, got {}",
                h.degree
            )));
        }
        let r = self.mc_curvature(f)?;
        if !r.is_zero() {
            return Err(Error::NotAMorphism(format!(
                "gauge flow needs a Maurer-Cartan start point; curvature is nonzero: {}",
                self.support_report(&r).join("; ")
            )));
        }
        Ok(())
    }

    /// Time-1 gauge flow of a Maurer-Cartan element along a degree-0
    /// element. For a dg Lie target this is the closed form
    /// e^{ad_H}(φ) + f(ad_H)(δH) with f(z) = (e^z − 1)/z; otherwise the
    /// flow equation φ' = Σ_k λ_{k+1}(H, φ^k)/k! is integrated exactly,
    /// its polynomial solution evaluated at 1. Both paths agree where both
    /// apply.
    pub fn gauge_action(
        &self,
        f: &ConvolutionElement,
        h: &ConvolutionElement,
    ) -> Result<ConvolutionElement> {
        self.gauge_pre(f, h)?;
        if self.target.is_dg_lie() {
            let mut out = f.clone();
            let delta_h = self.l1(h);
            out.axpy(&Q::one(), &delta_h)?;
            let mut ad_f = f.clone();
            let mut ad_d = delta_h;
            for k in 1..=self.truncation() {
                ad_f = self.ad(h, &ad_f);
                ad_d = self.ad(h, &ad_d);
                if ad_f.is_zero() && ad_d.is_zero() {
                    break;
                }
                out.axpy(&(Q::one() / factorial(k)), &ad_f)?;
                out.axpy(&(Q::one() / factorial(k + 1)), &ad_d)?;
            }
            Ok(out)
        } else {
            let path = self.flow_path(f, h)?;
            let mut out = self.zero_element(1);
            for coeff in &path {
                out.axpy(&Q::one(), coeff)?;
            }
            Ok(out)
        }
    }

    /// Polynomial solution of the gauge flow as coefficients of powers of
    /// the flow parameter; the fixed point of exact Picard iteration.
    pub fn gauge_flow_path(
        &self,
        f: &ConvolutionElement,
        h: &ConvolutionElement,
    ) -> Result<Vec<ConvolutionElement>> {
        self.gauge_pre(f, h)?;
        self.flow_path(f, h)
    }

    fn flow_path(
        &self,
        f: &ConvolutionElement,
        h: &ConvolutionElement,
    ) -> Result<Vec<ConvolutionElement>> {
        let n = self.truncation();
        let mut path = vec![f.clone()];
        for _ in 0..=n + 1 {
            let velocity = self.flow_velocity(h, &path)?;
            let mut next = vec![f.clone()];
            for (p, v) in velocity.iter().enumerate() {
                next.push(v.scaled(&(Q::one() / Q::from_integer(((p + 1) as i64).into()))));
            }
            while next.len() > 1 && next.last().map(ConvolutionElement::is_zero) == Some(true) {
                next.pop();
            }
            if next == path {
                return Ok(path);
            }
            path = next;
        }
        unreachable!("gauge flow stabilizes within the truncation bound");
    }

    /// Coefficients of Σ_k λ_{k+1}(H, α(t)^k)/k! for a polynomial path α.
    fn flow_velocity(
        &self,
        h: &ConvolutionElement,
        path: &[ConvolutionElement],
    ) -> Result<Vec<ConvolutionElement>> {
        let n = self.truncation();
        let len = path.len();
        let max_p = (n - 1) * (len - 1);
        let mut out = vec![self.zero_element(1); max_p + 1];
        // k = 0 term: δH, constant in t.
        out[0].axpy(&Q::one(), &self.l1(h))?;
        for k in 1..n {
            let scale = Q::one() / factorial(k);
            let mut tuple = vec![0usize; k];
            loop {
                let p: usize = tuple.iter().sum();
                let mut args: Vec<&ConvolutionElement> = Vec::with_capacity(k + 1);
                args.push(h);
                for &j in &tuple {
                    args.push(&path[j]);
                }
                let term = self.l_higher(&args);
                out[p].axpy(&scale, &term)?;
                // Advance the odometer over path indices.
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < len {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
        while out.len() > 1 && out.last().map(ConvolutionElement::is_zero) == Some(true) {
            out.pop();
        }
        Ok(out)
    }

    /// Single gauge element whose flow equals doing `first` then `second`:
    /// log(e^{second} e^{first}) in the degree-0 Lie algebra. Needs a dg
    /// Lie target.
    pub fn bch_compose(
        &self,
        second: &ConvolutionElement,
        first: &ConvolutionElement,
    ) -> Result<ConvolutionElement> {
        self.validate_element(second)?;
        self.validate_element(first)?;
        if second.degree != 0 || first.degree != 0 {
            return Err(Error::DegreeMismatch(format!(
                "flow composition needs degree-0 elements, got {} and {}",
                second.degree, first.degree
            )));
        }
        if !self.target.is_dg_lie() {
            return Err(Error::UnsupportedStructure(
                "flow composition by Baker-Campbell-Hausdorff needs a dg Lie target".into(),
            ));
        }
        let table = crate::freelie::bch_table(self.truncation());
        let mut out = self.zero_element(0);
        for (word, c) in table.iter() {
            let letter = |l: u8| if l == 0 { second } else { first };
            let mut acc = letter(word[word.len() - 1]).clone();
            for &l in word[..word.len() - 1].iter().rev() {
                acc = self.ad(letter(l), &acc);
            }
            out.axpy(c, &acc)?;
        }
        Ok(out)
    }

    /// Gauge flow at the level of morphisms.
    pub fn gauge_morphism(
        &self,
        f: &LInftyMorphism,
        h: &ConvolutionElement,
    ) -> Result<LInftyMorphism> {
        let out = self.gauge_action(&element_of_morphism(f), h)?;
        self.morphism_of_element(&out)
    }

    /// Realize the convolution as an L∞ algebra on the basis of single-word
    /// single-value elements, labelled "word#value". Intended for small
    /// inputs; the result can be fed back to `check_structure`.
    pub fn as_algebra(&self) -> Result<LInftyAlgebra> {
        let src = self.source();
        let n = self.truncation();
        let mut labels: Vec<(String, i32)> = Vec::new();
        let mut basis: Vec<(usize, usize, usize)> = Vec::new();
        for k in 1..=n {
            for (pos, w) in src.words().words(k).iter().enumerate() {
                for tgt in 0..self.target.space().dim() {
                    let degree =
                        self.target.space().degree(tgt) - word_sigma(src.space(), w);
                    labels.push((
                        format!("{}#{}", src.words().label(w), self.target.space().label(tgt)),
                        degree,
                    ));
                    basis.push((k, pos, tgt));
                }
            }
        }
        let space = Arc::new(GradedVectorSpace::new(labels.clone())?);
        // The space resorts by (degree, label); track where each element
        // landed.
        let mut where_is: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for (i, (l, _)) in labels.iter().enumerate() {
            where_is.insert(basis[i], space.index_of(l).expect("label registered"));
        }
        let units: Vec<ConvolutionElement> = {
            let mut inv: Vec<(usize, usize, usize)> = vec![(0, 0, 0); basis.len()];
            for (trip, idx) in &where_is {
                inv[*idx] = *trip;
            }
            inv.iter().map(|(k, pos, tgt)| self.unit_element(*k, *pos, *tgt)).collect()
        };
        let flatten = |e: &ConvolutionElement| -> LinComb {
            let mut out = LinComb::new();
            for k in 1..=n {
                for pos in 0..src.words().words(k).len() {
                    for (tgt, c) in &e.comps[k - 1][pos] {
                        sv_add_term(&mut out, where_is[&(k, pos, *tgt)], c.clone());
                    }
                }
            }
            out
        };
        let bwords = crate::words::SymWords::build(space.clone(), n);
        let mut ops: Vec<Vec<LinComb>> = Vec::with_capacity(n);
        for k in 1..=n {
            let mut level = Vec::with_capacity(bwords.words(k).len());
            for w in bwords.words(k) {
                let value = if k == 1 {
                    self.l1(&units[w[0]])
                } else {
                    let args: Vec<&ConvolutionElement> =
                        w.iter().map(|&i| &units[i]).collect();
                    self.l_higher(&args)
                };
                level.push(flatten(&value));
            }
            ops.push(level);
        }
        LInftyAlgebra::new_sform(space, n, ops)
    }
}

/// Curvature report of a morphism candidate: one line per nonzero slot,
/// empty exactly when the components satisfy the morphism equations.
pub fn check_morphism(f: &LInftyMorphism) -> Result<Vec<String>> {
    let conv = Convolution::new(f.source().clone(), f.target().clone())?;
    let r = conv.mc_curvature(&element_of_morphism(f))?;
    Ok(conv.support_report(&r))
}

/// A verified gauge between two morphisms.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyCertificate {
    pub from: LInftyMorphism,
    pub to: LInftyMorphism,
    pub gauge: ConvolutionElement,
}

impl HomotopyCertificate {
    /// Re-run the flow and compare against the stored endpoint.
    pub fn verify(&self) -> Result<()> {
        let conv = Convolution::new(self.from.source().clone(), self.from.target().clone())?;
        let flowed = conv.gauge_action(&element_of_morphism(&self.from), &self.gauge)?;
        if flowed == element_of_morphism(&self.to) {
            Ok(())
        } else {
            Err(Error::InvalidStructure(
                "certificate does not flow onto its endpoint".into(),
            ))
        }
    }
}

/// Outcome of the gauge search between two morphisms.
#[derive(Debug, Clone, PartialEq)]
pub enum HomotopyOutcome {
    Certificate(HomotopyCertificate),
    NotHomotopic { arity: usize, detail: String },
}

/// Number of linearization rounds before the search gives up.
const HOMOTOPY_ROUNDS: usize = 12;

/// One arity level of the search: the unit gauge directions at this arity,
/// their images under the differential-linearization, and a basis of the
/// directions that this arity's equation cannot see (they matter at higher
/// arities through nonlinear terms).
struct StageData {
    unknowns: Vec<(usize, usize)>,
    lin_cols: Vec<LinComb>,
    kernel: Vec<ConvolutionElement>,
}

fn stage_data(conv: &Convolution, k: usize) -> StageData {
    let src = conv.source();
    let tgt_dim = conv.target().space().dim();
    let words = src.words().words(k);
    let mut unknowns = Vec::new();
    let mut lin_cols = Vec::new();
    for (pos, w) in words.iter().enumerate() {
        let want = word_sigma(src.space(), w);
        for tgt in 0..tgt_dim {
            if conv.target().space().degree(tgt) != want {
                continue;
            }
            let e = conv.unit_element(k, pos, tgt);
            let lin = conv.l1(&e);
            let mut col = LinComb::new();
            for pos2 in 0..words.len() {
                for (tv, c) in lin.comp(k, pos2) {
                    sv_add_term(&mut col, pos2 * tgt_dim + tv, c.clone());
                }
            }
            unknowns.push((pos, tgt));
            lin_cols.push(col);
        }
    }
    let kernel = crate::solve::kernel_basis(&lin_cols)
        .into_iter()
        .map(|combo| {
            let mut e = conv.zero_element(0);
            for (j, c) in &combo {
                let (pos, tgt) = unknowns[*j];
                sv_add_term(&mut e.comps_mut()[k - 1][pos], tgt, c.clone());
            }
            e
        })
        .collect();
    StageData { unknowns, lin_cols, kernel }
}

fn flatten_arity(e: &ConvolutionElement, k: usize, tgt_dim: usize) -> LinComb {
    let mut out = LinComb::new();
    for (pos, v) in e.comps()[k - 1].iter().enumerate() {
        for (tv, c) in v {
            sv_add_term(&mut out, pos * tgt_dim + tv, c.clone());
        }
    }
    out
}

/// Exact rational roots of a polynomial with rational coefficients,
/// `poly[m]` holding the coefficient of t^m.
fn rational_roots(poly: &[Q]) -> Vec<Q> {
    let mut coeffs: Vec<Q> = poly.to_vec();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let mut scale = num_bigint::BigInt::from(1);
    for c in &coeffs {
        scale = num_integer::lcm(scale, c.denom().clone());
    }
    let ints: Vec<num_bigint::BigInt> =
        coeffs.iter().map(|c| c.numer() * (&scale / c.denom())).collect();
    let mut low = 0;
    while ints[low].is_zero() {
        low += 1;
    }
    let head = ints[low].magnitude().clone();
    let lead = ints.last().unwrap().magnitude().clone();
    let divisors = |v: &num_bigint::BigUint| -> Vec<num_bigint::BigInt> {
        let mut out = Vec::new();
        let mut d = num_bigint::BigUint::from(1u32);
        while &d * &d <= *v {
            if (v % &d).is_zero() {
                out.push(num_bigint::BigInt::from(d.clone()));
                out.push(num_bigint::BigInt::from(v / &d));
            }
            d += 1u32;
        }
        out
    };
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Q::zero());
    }
    for p in divisors(&head) {
        for q in divisors(&lead) {
            for cand in [Q::new(p.clone(), q.clone()), Q::new(-p.clone(), q.clone())] {
                let mut val = Q::zero();
                for c in coeffs.iter().rev() {
                    val = val * &cand + c;
                }
                if val.is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Search for a gauge carrying `f1` to `f2`. The flow endpoint is affine in
/// the arity-k part of the gauge given the lower parts, with linear part
/// H_k ↦ l₁∘H_k + H_k∘D restricted to arity-preserving terms, so the gauge
/// is built arity by arity through exact linear solves. Each stage leaves
/// its kernel directions free, and a later stage's obstruction can depend
/// on those earlier free coefficients polynomially; when a stage becomes
/// unsolvable the search reconstructs that dependence exactly, one free
/// direction at a time, and steers by an exact rational root. A certificate
/// is only ever returned when the flow reproduces `f2` exactly.
pub fn find_homotopy(f1: &LInftyMorphism, f2: &LInftyMorphism) -> Result<HomotopyOutcome> {
    if f1.source() != f2.source() || f1.target() != f2.target() {
        return Err(Error::ShapeMismatch(
            "gauge search needs two morphisms between the same algebras".into(),
        ));
    }
    let conv = Convolution::new(f1.source().clone(), f1.target().clone())?;
    let e1 = element_of_morphism(f1);
    let e2 = element_of_morphism(f2);
    for (name, e) in [("first", &e1), ("second", &e2)] {
        let r = conv.mc_curvature(e)?;
        if !r.is_zero() {
            return Err(Error::NotAMorphism(format!(
                "{name} input is not a morphism: {}",
                conv.support_report(&r).join("; ")
            )));
        }
    }
    let n = conv.truncation();
    let tgt_dim = conv.target().space().dim();
    let stages: Vec<StageData> = (1..=n).map(|k| stage_data(&conv, k)).collect();
    let residual_at = |h: &ConvolutionElement, k: usize| -> Result<LinComb> {
        let base = conv.gauge_action(&e1, h)?;
        let mut r = flatten_arity(&e2, k, tgt_dim);
        lc_axpy(&mut r, &-Q::one(), &flatten_arity(&base, k, tgt_dim));
        Ok(r)
    };
    let mut h = conv.zero_element(0);
    let mut stuck = 1;
    for _ in 0..HOMOTOPY_ROUNDS {
        let mut clean = true;
        'stages: for k in 1..=n {
            let residual = residual_at(&h, k)?;
            if residual.is_empty() {
                continue;
            }
            clean = false;
            stuck = k;
            let stage = &stages[k - 1];
            if let Some(x) = LinearSolver::new(stage.lin_cols.iter()).solve(&residual) {
                for (j, c) in &x {
                    let (pos, tgt) = stage.unknowns[*j];
                    sv_add_term(&mut h.comps_mut()[k - 1][pos], tgt, c.clone());
                }
                continue;
            }
            // The obstruction lies outside this stage's image, but it may
            // still vanish for the right choice of an earlier stage's free
            // coefficient. After re-solving the intermediate stages, the
            // residual here is a polynomial of degree at most k in that
            // coefficient, so k + 1 exact evaluations pin it down; a
            // rational root that restores solvability is applied and the
            // pass restarts.
            let repaired = |shift: &Q, dir: &ConvolutionElement| -> Result<Option<LinComb>> {
                let mut trial = h.clone();
                trial.axpy(shift, dir)?;
                for m in 1..k {
                    let r = residual_at(&trial, m)?;
                    if r.is_empty() {
                        continue;
                    }
                    let Some(x) = LinearSolver::new(stages[m - 1].lin_cols.iter()).solve(&r)
                    else {
                        return Ok(None);
                    };
                    for (j, c) in &x {
                        let (pos, tgt) = stages[m - 1].unknowns[*j];
                        sv_add_term(&mut trial.comps_mut()[m - 1][pos], tgt, c.clone());
                    }
                }
                residual_at(&trial, k).map(Some)
            };
            for lower in stages.iter().take(k - 1) {
                for dir in &lower.kernel {
                    let mut points: Vec<(Q, LinComb)> = Vec::new();
                    let mut t = 0i64;
                    while points.len() <= k && t <= 4 * (k as i64 + 1) {
                        if let Some(r) = repaired(&qi(t), dir)? {
                            points.push((qi(t), r));
                        }
                        t += 1;
                    }
                    if points.len() <= k {
                        continue;
                    }
                    let mut elim = crate::solve::Eliminator::new();
                    for col in &stage.lin_cols {
                        let _ = elim.insert(col.clone(), LinComb::new());
                    }
                    let reduced: Vec<LinComb> = points
                        .iter()
                        .map(|(_, s)| elim.reduce(s.clone(), LinComb::new()).0)
                        .collect();
                    let Some(row) = reduced.iter().flat_map(|r| r.keys()).next().copied()
                    else {
                        continue;
                    };
                    let graph: Vec<(Q, Q)> = points
                        .iter()
                        .zip(&reduced)
                        .map(|((t, _), r)| {
                            (t.clone(), r.get(&row).cloned().unwrap_or_else(Q::zero))
                        })
                        .collect();
                    let poly = interpolate(&graph);
                    for t in rational_roots(&poly) {
                        if let Some(probe) = repaired(&t, dir)? {
                            if LinearSolver::new(stage.lin_cols.iter())
                                .solve(&probe)
                                .is_some()
                            {
                                h.axpy(&t, dir)?;
                                continue 'stages;
                            }
                        }
                    }
                }
            }
            return Ok(HomotopyOutcome::NotHomotopic {
                arity: k,
                detail: format!(
                    "the arity-{k} obstruction is outside the reachable directions"
                ),
            });
        }
        if clean {
            return Ok(HomotopyOutcome::Certificate(HomotopyCertificate {
                from: f1.clone(),
                to: f2.clone(),
                gauge: h,
            }));
        }
    }
    Ok(HomotopyOutcome::NotHomotopic {
        arity: stuck,
        detail: format!(
            "the search did not converge within {HOMOTOPY_ROUNDS} linearization rounds"
        ),
    })
}

/// Coefficients of the unique degree < m polynomial through m points with
/// pairwise distinct nodes.
fn interpolate(points: &[(Q, Q)]) -> Vec<Q> {
    let m = points.len();
    let mut coeffs = vec![Q::zero(); m];
    for (i, (node, v)) in points.iter().enumerate() {
        // Lagrange basis polynomial for node i, expanded into monomials.
        let mut basis = vec![Q::one()];
        let mut denom = Q::one();
        for (j, (other, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![Q::zero(); basis.len() + 1];
            for (p, c) in basis.iter().enumerate() {
                next[p + 1] += c;
                next[p] += c * -other;
            }
            basis = next;
            denom *= node - other;
        }
        for (p, c) in basis.iter().enumerate() {
            coeffs[p] += v * c / &denom;
        }
    }
    coeffs
}
