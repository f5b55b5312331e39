use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::rational::{int, rat};

fn f1() -> Arc<Frame> {
    Arc::new(Frame::rank_one())
}

fn q(frame: &Arc<Frame>, alpha: u16, level: u16, m: usize, d: usize) -> FormalSeries {
    FormalSeries::variable(frame.clone(), m, d, Var::q(alpha, level)).unwrap()
}

fn c(frame: &Arc<Frame>, m: usize, d: usize, v: Rational) -> FormalSeries {
    FormalSeries::constant(frame.clone(), m, d, v)
}

#[test]
fn mul_monomials() {
    let fr = f1();
    let q0 = q(&fr, 1, 0, 4, 6);
    let sq = q0.mul(&q0);
    assert_eq!(sq.len(), 1);
    assert_eq!(sq.coeff(0, &Monomial::from_factors([(VarId::new(1, 0), 2)])), int(1));
}

#[test]
fn mul_laurent_exponents_cancel() {
    let fr = f1();
    let x = q(&fr, 1, 1, 4, 6);
    let a = q(&fr, 1, 0, 4, 6).pow(3).shift_laurent(-1);
    let p = a.mul(&x);
    assert_eq!(p, q(&fr, 1, 0, 4, 6).pow(3));
}

#[test]
fn mul_matches_distributive_expansion() {
    // brute-force oracle: expand (q0 + q2)^2 term by term
    let fr = f1();
    let q0 = q(&fr, 1, 0, 4, 6);
    let q2 = q(&fr, 1, 2, 4, 6);
    let s = &q0 + &q2;
    let got = s.mul(&s);
    let mut expect = FormalSeries::zero(fr.clone(), 4, 6);
    for a in [&q0, &q2] {
        for b in [&q0, &q2] {
            expect = &expect + &a.mul(b);
        }
    }
    assert_eq!(got, expect);
    assert_eq!(got.coeff(0, &Monomial::from_factors([(VarId::new(1, 0), 1), (VarId::new(1, 2), 1)])), int(2));
}

#[test]
fn mul_respects_degcap_and_reliability() {
    let fr = f1();
    let q0 = q(&fr, 1, 0, 2, 3);
    let p = q0.pow(5);
    assert!(p.is_zero());
    let partial = q0.pow(3).partial(Var::q(1, 0)).unwrap();
    assert_eq!(partial.reliable(), 2);
    // low degree of q0^2 is 2, so the product with a reliable-2 factor stays exact to 3
    let prod = partial.mul(&q(&fr, 1, 2, 2, 3));
    assert_eq!(prod.reliable(), 3);
}

#[test]
fn partial_derivatives() {
    let fr = f1();
    let q0 = q(&fr, 1, 0, 4, 6);
    // d/dx of x^-1 q0^3 is -x^-2 q0^3
    let a = q0.pow(3).shift_laurent(-1);
    let d = a.partial(Var::Dist).unwrap();
    assert_eq!(d, q0.pow(3).shift_laurent(-2).scale(&int(-1)));
    assert_eq!(d.reliable(), a.reliable());
    // d/dq0 of -q0^3/6 is -q0^2/2
    let b = q0.pow(3).scale(&rat(-1, 6));
    let db = b.partial(Var::q(1, 0)).unwrap();
    assert_eq!(db.raw_terms(), q0.pow(2).scale(&rat(-1, 2)).raw_terms());
    assert_eq!(db.reliable(), 5);
    // independent variable
    assert!(b.partial(Var::q(1, 3)).unwrap().is_zero());
    assert!(b.partial(Var::q(1, 5)).is_err());
    assert!(b.partial(Var::q(2, 0)).is_err());
}

#[test]
fn identity_substitution_is_identity() {
    let fr = f1();
    let a = &q(&fr, 1, 0, 4, 6).pow(3).shift_laurent(-1) + &q(&fr, 1, 2, 4, 6).pow(2);
    let sub = Substitution::new(fr.clone(), 4);
    assert_eq!(sub.apply(&a).unwrap(), a);
}

#[test]
fn polynomial_composition() {
    let fr = f1();
    let cst = rat(3, 2);
    let q0 = q(&fr, 1, 0, 4, 6);
    let q2 = q(&fr, 1, 2, 4, 6);
    let a = q0.pow(3).scale(&rat(-1, 6));
    let mut sub = Substitution::new(fr.clone(), 4);
    let mut img = LinearImage::var(Var::q(1, 0));
    img.add(Var::q(1, 2), &cst);
    sub.set(Var::q(1, 0), img).unwrap();
    let got = sub.apply(&a).unwrap();
    let lin = &q0 + &q2.scale(&cst);
    let expect = lin.pow(3).scale(&rat(-1, 6));
    assert_eq!(got, expect);
}

#[test]
fn laurent_shift_matches_long_division() {
    // oracle: (x + u) * result must be 1 up to the degree cap
    let fr = f1();
    let (m, d) = (4, 6);
    let u = &q(&fr, 1, 2, m, d).scale(&rat(2, 3)) + &q(&fr, 1, 4, m, d).scale(&int(-5));
    let inv_x = c(&fr, m, d, int(1)).shift_laurent(-1);
    let mut sub = Substitution::new(fr.clone(), m);
    let mut img = LinearImage::var(Var::Dist);
    for (_, mono, coef) in u.terms() {
        img.add(Var::Plain(mono.factors()[0].0), coef);
    }
    sub.set(Var::Dist, img).unwrap();
    let got = sub.apply(&inv_x).unwrap();
    assert_eq!(got.reliable(), d as i64);
    let x_plus_u = &q(&fr, 1, 1, m, d) + &u;
    let back = got.mul(&x_plus_u);
    assert_eq!(back.truncated(d as i64 - 1), c(&fr, m, d, int(1)).truncated(d as i64 - 1));
    // the alternating geometric pattern
    for (j, (_, mono, coef)) in got.terms().filter(|t| t.1.degree() == 0).enumerate() {
        assert_eq!(j, 0);
        assert!(mono.is_one());
        assert_eq!(*coef, int(1));
    }
    let deg1 = got.degree_part(1);
    assert_eq!(deg1, u.shift_laurent(-2).scale(&int(-1)).with_reliable(deg1.reliable()).degree_part(1));
}

#[test]
fn substitution_rejects_bad_images() {
    let fr = f1();
    let q0 = q(&fr, 1, 0, 4, 6);
    let quad = q0.mul(&q0);
    assert!(Substitution::from_series(fr.clone(), 4, [(Var::q(1, 0), quad)]).is_err());
    // distinguished variable must map to x + u
    let bad = q(&fr, 1, 1, 4, 6).scale(&int(2));
    assert!(Substitution::from_series(fr.clone(), 4, [(Var::Dist, bad)]).is_err());
    let ok = &q(&fr, 1, 1, 4, 6) + &q(&fr, 1, 3, 4, 6);
    assert!(Substitution::from_series(fr.clone(), 4, [(Var::Dist, ok)]).is_ok());
}

#[test]
fn distinguished_variable_in_images_degrades_reliability() {
    let fr = f1();
    let a = q(&fr, 1, 0, 4, 6).pow(3).shift_laurent(-1);
    let img = &q(&fr, 1, 0, 4, 6) + &q(&fr, 1, 1, 4, 6);
    let sub = Substitution::from_series(fr.clone(), 4, [(Var::q(1, 0), img)]).unwrap();
    assert_eq!(sub.apply(&a).unwrap().reliable(), -1);
    assert_eq!(sub.clone().with_fallback_reliable(2).apply(&a).unwrap().reliable(), 2);
    assert_eq!(sub.certify_complete().apply(&a).unwrap().reliable(), 6);
}

#[test]
fn laurent_component_of_absent_stratum_is_zero() {
    let fr = f1();
    let a = q(&fr, 1, 0, 4, 6).pow(3).shift_laurent(-1);
    assert!(a.laurent_component(7).is_zero());
    assert_eq!(a.laurent_component(3).raw_terms(), q(&fr, 1, 0, 4, 6).pow(3).raw_terms());
}

#[test]
fn json_forbids_distinguished_factor() {
    let doc = r#"{"frame":{"dim":1,"metric":[["1/1"]]},"zmax":3,"degcap":4,"reliable":4,
        "terms":[{"e":0,"mono":[[1,1,2]],"coeff":"1/1"}]}"#;
    assert!(serde_json::from_str::<FormalSeries>(doc).is_err());
}

// Random small series over a rank-two frame.

fn frame2() -> Arc<Frame> {
    Arc::new(Frame::new(crate::matrix::Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap()).unwrap())
}

const M: usize = 2;
const D: usize = 4;

fn plain_vars() -> Vec<VarId> {
    let mut v = Vec::new();
    for level in 0..=M as u16 {
        for alpha in 1..=2u16 {
            if !(alpha == 1 && level == 1) {
                v.push(VarId::new(alpha, level));
            }
        }
    }
    v
}

fn arb_series(max_terms: usize, dcap: usize) -> impl Strategy<Value = FormalSeries> {
    let nv = plain_vars().len();
    prop::collection::vec(
        (-2i64..3, prop::collection::vec((0..nv, 1u32..3), 0..3), -4i64..5, 1i64..4),
        0..max_terms,
    )
    .prop_map(move |raw| {
        let vars = plain_vars();
        let mut s = FormalSeries::zero(frame2(), M, dcap);
        for (e, fs, n, d) in raw {
            let mono = Monomial::from_factors(fs.into_iter().map(|(i, k)| (vars[i], k)));
            s.add_term(e, mono, rat(n, d)).unwrap();
        }
        s
    })
}

fn arb_image() -> impl Strategy<Value = LinearImage> {
    let nv = plain_vars().len();
    prop::collection::vec((0..nv, -3i64..4), 0..3).prop_map(|raw| {
        let vars = plain_vars();
        let mut img = LinearImage::default();
        for (i, n) in raw {
            img.add(Var::Plain(vars[i]), &int(n));
        }
        img
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in arb_series(6, D), b in arb_series(6, D), c in arb_series(6, D)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        let left = a.mul(&b).mul(&c);
        let right = a.mul(&b.mul(&c));
        prop_assert!(left.compare_reliable(&right).equal);
        let dist_l = a.mul(&(&b + &c));
        let dist_r = &a.mul(&b) + &a.mul(&c);
        prop_assert_eq!(dist_l.raw_terms(), dist_r.raw_terms());
    }

    #[test]
    fn substitution_is_linear(a in arb_series(6, D), b in arb_series(6, D),
                              i0 in arb_image(), ishift in arb_image()) {
        let fr = frame2();
        let mut sub = Substitution::new(fr.clone(), M);
        let mut img0 = i0.clone();
        img0.add(Var::q(1, 0), &int(1));
        sub.set(Var::q(1, 0), img0).unwrap();
        let mut dimg = ishift.clone();
        dimg.dist = int(1);
        sub.set(Var::Dist, dimg).unwrap();
        let lhs = sub.apply(&(&a + &b)).unwrap();
        let rhs = &sub.apply(&a).unwrap() + &sub.apply(&b).unwrap();
        prop_assert!(lhs.compare_reliable(&rhs).equal);
    }

    #[test]
    fn reliability_is_sound(a in arb_series(6, 6), b in arb_series(6, 6), ishift in arb_image()) {
        // compute at a low cap, recompute at a high cap, compare on the declared region
        let low = 3i64;
        let a_lo = a.with_degcap(low as usize);
        let b_lo = b.with_degcap(low as usize);
        let da = a_lo.partial(Var::q(2, 0)).unwrap();
        let db = a.partial(Var::q(2, 0)).unwrap();
        let p_lo = da.mul(&b_lo);
        let p_hi = db.mul(&b);
        let r = p_lo.reliable();
        prop_assert_eq!(p_lo.truncated(r).raw_terms().clone(), p_hi.truncated(r).raw_terms().clone());

        let fr = frame2();
        let mut sub = Substitution::new(fr.clone(), M);
        let mut dimg = ishift.clone();
        dimg.dist = int(1);
        sub.set(Var::Dist, dimg).unwrap();
        let s_lo = sub.apply(&a_lo).unwrap();
        let s_hi = sub.apply(&a).unwrap();
        let r = s_lo.reliable();
        prop_assert_eq!(s_lo.truncated(r).raw_terms().clone(), s_hi.truncated(r).raw_terms().clone());
    }

    #[test]
    fn json_round_trip(a in arb_series(8, D)) {
        let text = serde_json::to_string(&a).unwrap();
        let back: FormalSeries = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
