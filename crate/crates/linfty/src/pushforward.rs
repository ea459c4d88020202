//! Pushing Maurer-Cartan elements and their gauge parameters through an
//! L∞ morphism, with a caller-supplied termination bound, plus the
//! element-level gauge flow used to state compatibility.

use crate::algebra::LInftyAlgebra;
use crate::morphism::LInftyMorphism;
use crate::scalar::{lc_axpy, qi, LinComb, Q};
use crate::{Error, Result};
use num_traits::{One, Zero};

fn fact(n: usize) -> Q {
    let mut out = Q::one();
    for i in 1..=n {
        out *= qi(i as i64);
    }
    out
}

fn check_homogeneous(g: &LInftyAlgebra, v: &LinComb, degree: i32, what: &str) -> Result<()> {
    for (idx, c) in v {
        if *idx >= g.space().dim() {
            return Err(Error::ShapeMismatch(format!(
                "{what} refers to basis index {idx} outside the space"
            )));
        }
        if !c.is_zero() && g.space().degree(*idx) != degree {
            return Err(Error::DegreeMismatch(format!(
                "{what} must be homogeneous of degree {degree}, found a component on {}",
                g.space().label(*idx)
            )));
        }
    }
    Ok(())
}

/// Curvature of a degree-1 element: Σ_k (1/k!) l_k(γ, ..., γ). Zero exactly
/// when γ solves the Maurer-Cartan equation of `g`.
pub fn element_curvature(g: &LInftyAlgebra, gamma: &LinComb) -> Result<LinComb> {
    check_homogeneous(g, gamma, 1, "a Maurer-Cartan candidate")?;
    let mut out = LinComb::new();
    if gamma.is_empty() {
        return Ok(out);
    }
    for k in 1..=g.truncation() {
        let args: Vec<&LinComb> = std::iter::repeat_n(gamma, k).collect();
        let term = g.eval_multi(&args);
        lc_axpy(&mut out, &fact(k).recip(), &term);
    }
    Ok(out)
}

fn require_mc(g: &LInftyAlgebra, gamma: &LinComb, what: &str) -> Result<()> {
    let r = element_curvature(g, gamma)?;
    if !r.is_empty() {
        return Err(Error::NotAMorphism(format!(
            "{what} does not solve the Maurer-Cartan equation"
        )));
    }
    Ok(())
}

/// Push an MC element and a gauge parameter through `u`:
///
///   u_*(γ) = Σ_{m≥1} (1/m!)     F_m(γ, ..., γ)
///   u_*(x) = Σ_{m≥1} (1/(m-1)!) F_m(x, γ, ..., γ)
///
/// Each series is summed through its first `bound` terms, and the run
/// succeeds only when the `bound`-th term of both is exactly zero, so the
/// bound certifies that the series terminated. Any bound above the
/// truncation works, since components above the truncation vanish. The
/// pushed element is re-checked against the Maurer-Cartan equation of the
/// target, which rejects a bound that a vanishing middle term would
/// otherwise certify spuriously.
pub fn pushforward(
    u: &LInftyMorphism,
    gamma: &LinComb,
    x: &LinComb,
    bound: usize,
) -> Result<(LinComb, LinComb)> {
    if bound == 0 {
        return Err(Error::NonNilpotent(
            "a positive termination bound is required".into(),
        ));
    }
    let g1 = u.source();
    check_homogeneous(g1, x, 0, "a gauge parameter")?;
    require_mc(g1, gamma, "the input")?;
    let mut out_gamma = LinComb::new();
    let mut out_x = LinComb::new();
    for m in 1..=bound {
        let mut gamma_term = LinComb::new();
        if !gamma.is_empty() {
            let args: Vec<&LinComb> = std::iter::repeat_n(gamma, m).collect();
            gamma_term = u.eval_multi(&args);
        }
        let mut x_term = LinComb::new();
        if !x.is_empty() {
            let mut args: Vec<&LinComb> = vec![x];
            args.extend(std::iter::repeat_n(gamma, m - 1));
            if args.iter().all(|a| !a.is_empty()) {
                x_term = u.eval_multi(&args);
            }
        }
        if m == bound && !(gamma_term.is_empty() && x_term.is_empty()) {
            return Err(Error::NonNilpotent(format!(
                "the term of order {bound} is still nonzero"
            )));
        }
        lc_axpy(&mut out_gamma, &fact(m).recip(), &gamma_term);
        lc_axpy(&mut out_x, &fact(m - 1).recip(), &x_term);
    }
    let check = element_curvature(u.target(), &out_gamma)?;
    if !check.is_empty() {
        return Err(Error::NonNilpotent(
            "the bound certified termination spuriously: the pushed element is not Maurer-Cartan"
                .into(),
        ));
    }
    Ok((out_gamma, out_x))
}

/// Time-1 gauge flow of a degree-1 element along a degree-0 parameter:
/// the solution of dγ/dt = l_1(x) + Σ_k (1/k!) l_{k+1}(x, γ, ..., γ),
/// integrated as a polynomial path. Unlike flows in the convolution
/// algebra, nothing forces this series to terminate, so the path must
/// stabilize within `bound` rounds of Picard iteration.
pub fn flow_element(
    g: &LInftyAlgebra,
    gamma: &LinComb,
    x: &LinComb,
    bound: usize,
) -> Result<LinComb> {
    check_homogeneous(g, gamma, 1, "the flowed element")?;
    check_homogeneous(g, x, 0, "a gauge parameter")?;
    let mut path: Vec<LinComb> = vec![gamma.clone()];
    for _ in 0..=bound {
        let velocity = flow_element_velocity(g, x, &path);
        let mut next = vec![gamma.clone()];
        for (p, v) in velocity.iter().enumerate() {
            let mut c = v.clone();
            crate::scalar::lc_scale(&mut c, &qi(p as i64 + 1).recip());
            next.push(c);
        }
        while next.len() > 1 && next.last().is_some_and(LinComb::is_empty) {
            next.pop();
        }
        if next == path {
            let mut out = LinComb::new();
            for c in &path {
                lc_axpy(&mut out, &Q::one(), c);
            }
            return Ok(out);
        }
        path = next;
    }
    Err(Error::NonNilpotent(format!(
        "the gauge flow did not stabilize within {bound} rounds"
    )))
}

fn flow_element_velocity(g: &LInftyAlgebra, x: &LinComb, path: &[LinComb]) -> Vec<LinComb> {
    let mut out: Vec<LinComb> = vec![LinComb::new()];
    if !x.is_empty() {
        out[0] = g.eval_multi(&[x]);
        for k in 1..g.truncation() {
            // Ordered k-tuples of path coefficients, indexed by an odometer.
            let mut digits = vec![0usize; k];
            loop {
                let t_degree: usize = digits.iter().sum();
                let mut args: Vec<&LinComb> = vec![x];
                args.extend(digits.iter().map(|d| &path[*d]));
                if args.iter().all(|a| !a.is_empty()) {
                    let term = g.eval_multi(&args);
                    while out.len() <= t_degree {
                        out.push(LinComb::new());
                    }
                    lc_axpy(&mut out[t_degree], &fact(k).recip(), &term);
                }
                let mut slot = 0;
                loop {
                    if slot == k {
                        break;
                    }
                    digits[slot] += 1;
                    if digits[slot] < path.len() {
                        break;
                    }
                    digits[slot] = 0;
                    slot += 1;
                }
                if slot == k {
                    break;
                }
            }
        }
    }
    while out.len() > 1 && out.last().is_some_and(LinComb::is_empty) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::{self, Convolution};
    use crate::fixtures;
    use crate::scalar::{qr, sv_add_term};

    fn by_label(g: &LInftyAlgebra, entries: &[(&str, Q)]) -> LinComb {
        let mut out = LinComb::new();
        for (label, c) in entries {
            let idx = g.space().index_of(label).expect("known label");
            sv_add_term(&mut out, idx, c.clone());
        }
        out
    }

    /// The identity of FIX-B flowed by the gauge a ↦ z, a morphism with a
    /// genuine quadratic component.
    fn curved_morphism() -> LInftyMorphism {
        let b = fixtures::fix_b(2);
        let conv = Convolution::new(b.clone(), b.clone()).unwrap();
        let id = LInftyMorphism::identity(b.clone());
        let mut h = conv.zero_element(0);
        let ai = b.space().index_of("a").unwrap();
        let zi = b.space().index_of("z").unwrap();
        sv_add_term(&mut h.comps_mut()[0][ai], zi, Q::one());
        conv.gauge_morphism(&id, &h).unwrap()
    }

    #[test]
    fn zero_input_reduces_to_the_linear_term() {
        let u = curved_morphism();
        let b = u.source().clone();
        let x = by_label(&b, &[("z", qi(3))]);
        let (pg, px) = pushforward(&u, &LinComb::new(), &x, 3).unwrap();
        assert!(pg.is_empty());
        assert_eq!(px, u.apply_linear(&x));
    }

    #[test]
    fn strict_morphisms_push_by_the_linear_part() {
        let b = fixtures::fix_b(2);
        let u = LInftyMorphism::identity(b.clone());
        let gamma = by_label(&b, &[("a", qi(1))]);
        let x = by_label(&b, &[("z", qi(1))]);
        let (pg, px) = pushforward(&u, &gamma, &x, 3).unwrap();
        assert_eq!(pg, gamma);
        assert_eq!(px, x);
    }

    #[test]
    fn quadratic_terms_enter_the_pushforward() {
        let u = curved_morphism();
        let b = u.source().clone();
        let gamma = by_label(&b, &[("a", qi(1))]);
        let x = by_label(&b, &[("z", qi(1))]);
        let (pg, px) = pushforward(&u, &gamma, &x, 3).unwrap();
        assert_eq!(pg, by_label(&b, &[("a", qi(1)), ("b", qi(1))]));
        assert_eq!(px, x);
    }

    #[test]
    fn pushforward_intertwines_the_gauge_flows() {
        let u = curved_morphism();
        let b = u.source().clone();
        let gamma = by_label(&b, &[("a", qi(1))]);
        let x = by_label(&b, &[("z", qr(1, 2))]);
        let (pg, px) = pushforward(&u, &gamma, &x, 3).unwrap();
        let flowed_then_pushed =
            pushforward(&u, &flow_element(&b, &gamma, &x, 6).unwrap(), &x, 3)
                .unwrap()
                .0;
        let pushed_then_flowed = flow_element(u.target(), &pg, &px, 6).unwrap();
        assert_eq!(flowed_then_pushed, pushed_then_flowed);
    }

    #[test]
    fn flow_preserves_solutions_of_the_structure_equation() {
        let b = fixtures::fix_b(2);
        let gamma = by_label(&b, &[("a", qi(1))]);
        assert!(element_curvature(&b, &gamma).unwrap().is_empty());
        let x = by_label(&b, &[("z", qi(1))]);
        let flowed = flow_element(&b, &gamma, &x, 4).unwrap();
        assert_eq!(flowed, by_label(&b, &[("a", qi(1)), ("b", qi(1))]));
        assert!(element_curvature(&b, &flowed).unwrap().is_empty());
        let d = fixtures::fix_d(3);
        let stationary = by_label(&d, &[("b", qi(3))]);
        assert_eq!(
            flow_element(&d, &stationary, &LinComb::new(), 4).unwrap(),
            stationary
        );
    }

    #[test]
    fn a_small_bound_is_rejected() {
        let u = curved_morphism();
        let b = u.source().clone();
        let gamma = by_label(&b, &[("a", qi(1))]);
        match pushforward(&u, &gamma, &LinComb::new(), 2) {
            Err(Error::NonNilpotent(_)) => {}
            other => panic!("expected NonNilpotent, got {other:?}"),
        }
    }

    #[test]
    fn inputs_must_be_homogeneous_of_the_right_degree() {
        let b = fixtures::fix_b(2);
        let u = LInftyMorphism::identity(b.clone());
        let bad_gamma = by_label(&b, &[("z", qi(1))]);
        match pushforward(&u, &bad_gamma, &LinComb::new(), 3) {
            Err(Error::DegreeMismatch(_)) => {}
            other => panic!("expected DegreeMismatch, got {other:?}"),
        }
        let gamma = by_label(&b, &[("a", qi(1))]);
        let bad_x = by_label(&b, &[("a", qi(1))]);
        match pushforward(&u, &gamma, &bad_x, 3) {
            Err(Error::DegreeMismatch(_)) => {}
            other => panic!("expected DegreeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn curved_inputs_are_rejected() {
        let d = fixtures::fix_d(3);
        let u = LInftyMorphism::identity(d.clone());
        // dh = c, so h alone is not Maurer-Cartan.
        let gamma = by_label(&d, &[("h", qi(1))]);
        match pushforward(&u, &gamma, &LinComb::new(), 4) {
            Err(Error::NotAMorphism(_)) => {}
            other => panic!("expected NotAMorphism, got {other:?}"),
        }
    }

    #[test]
    fn morphism_validity_survives_a_gauge_flow() {
        let u = curved_morphism();
        assert!(conv::check_morphism(&u).unwrap().is_empty());
    }
}
