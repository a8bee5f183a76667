use ks_core::blending::BlendContext;
use ks_core::exact::{dot, int, mat_solve, rat, Solution};
use ks_core::grassmann::{unblend_point, wk_point, ScalarBasis};
use ks_core::ks::{kp_flow_apply, FlowTimes, ScalarOperator};
use ks_core::{AlgebraData, LieType, RatMatrix, Rational, ScalarSeries};
use proptest::prelude::*;

fn q() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, d)| rat(p, d))
}

fn negative_series(max_len: usize) -> impl Strategy<Value = ScalarSeries> {
    prop::collection::vec(q(), 1..=max_len).prop_map(|cs| {
        ScalarSeries::from_rational_terms(cs.into_iter().enumerate().map(|(i, c)| (-(i as i64) - 1, c)), None).unwrap()
    })
}

fn laurent(lo: i64, hi: i64, floor: Option<i64>) -> impl Strategy<Value = ScalarSeries> {
    prop::collection::vec(q(), (hi - lo + 1) as usize).prop_map(move |cs| {
        ScalarSeries::from_rational_terms((lo..=hi).zip(cs), floor).unwrap()
    })
}

// 1/(1 + d_1 x + d_2 x^2) by the recursion b_k = −d_1 b_{k−1} − d_2 b_{k−2}.
fn geometric_inverse(d1: &Rational, d2: &Rational, len: usize) -> Vec<Rational> {
    let mut b = vec![int(1)];
    for k in 1..len {
        let mut v = -(d1 * &b[k - 1]);
        if k >= 2 {
            v -= d2 * &b[k - 2];
        }
        b.push(v);
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_matches_recursion(d1 in q(), d2 in q()) {
        let g = ScalarSeries::from_rational_terms([(0, int(1)), (-1, d1.clone()), (-2, d2.clone())], None).unwrap();
        let inv = g.invert_to(-14).unwrap();
        for (k, b) in geometric_inverse(&d1, &d2, 15).iter().enumerate() {
            prop_assert_eq!(&inv.coeff(-(k as i64)).unwrap(), b);
        }
        let one = g.mul(&inv).unwrap();
        prop_assert!(one.agrees_with(&ScalarSeries::constant(int(1))));
    }

    #[test]
    fn conjugation_is_a_right_action(a in negative_series(3), b in negative_series(3), f in laurent(-4, 1, None)) {
        let op = ScalarOperator::reduced(2, f);
        let g1 = a.exp_neg_to(-14).unwrap();
        let g2 = b.exp_neg_to(-14).unwrap();
        let stepwise = op.conjugate_to(&g1, -14).unwrap().conjugate_to(&g2, -14).unwrap();
        let joint = op.conjugate_to(&g1.mul(&g2).unwrap(), -14).unwrap();
        prop_assert!(stepwise.potential.agrees_with(&joint.potential));
        prop_assert!(stepwise.potential.floor().unwrap() <= -8);
    }

    #[test]
    fn exp_log_inverse(a in negative_series(4)) {
        let back = a.exp_neg_to(-12).unwrap().log_neg_to(-12).unwrap();
        prop_assert!(back.agrees_with(&a));
    }

    #[test]
    fn blend_round_trip(h in 2i64..=5, f in laurent(-13, 9, Some(-13))) {
        let ctx = BlendContext::new(h).unwrap();
        prop_assert_eq!(ctx.unblend(&ctx.blend(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn zeta_acts_as_lambda(h in 2i64..=4, f in laurent(-9, 6, None)) {
        let ctx = BlendContext::new(h).unwrap();
        let alg = AlgebraData::build(LieType::A, (h - 1) as usize).unwrap();
        let lhs = ctx.blend_column(&f.shift(1)).unwrap();
        let rhs = alg.lambda.mul(&ctx.blend_column(&f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kp_flows_add(t1 in q(), t2 in q(), s1 in q(), s3 in q(), f in laurent(-4, 1, None)) {
        let op = ScalarOperator::reduced(3, f);
        let t: FlowTimes = [(1, t1.clone()), (2, t2.clone())].into_iter().collect();
        let s: FlowTimes = [(1, s1.clone()), (3, s3.clone())].into_iter().collect();
        let ts: FlowTimes = [(1, &t1 + &s1), (2, t2), (3, s3)].into_iter().collect();
        let twice = kp_flow_apply(&kp_flow_apply(&op, &t, 3).unwrap(), &s, 3).unwrap();
        prop_assert_eq!(twice, kp_flow_apply(&op, &ts, 3).unwrap());
    }

    #[test]
    fn solver_certificates(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..=4), b in prop::collection::vec(-3i64..=3, 4)) {
        let a = RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap();
        let rhs: Vec<Rational> = b[..a.rows()].iter().map(|&x| int(x)).collect();
        match mat_solve(&a, &rhs).unwrap() {
            Solution::Solved { x, kernel } => {
                prop_assert_eq!(a.mul_vec(&x), rhs);
                for k in kernel {
                    prop_assert!(a.mul_vec(&k).iter().all(|v| *v == int(0)));
                }
            }
            Solution::Unsolvable { witness } => {
                let at = a.transpose();
                prop_assert!(at.mul_vec(&witness).iter().all(|v| *v == int(0)));
                prop_assert!(dot(&witness, &rhs) != int(0));
            }
        }
    }
}

#[test]
fn reduction_ignores_generator_order() {
    let a1 = AlgebraData::build(LieType::A, 1).unwrap();
    let wk = wk_point(&a1, -1, 8).unwrap();
    let ctx = BlendContext::new(2).unwrap();
    let basis = unblend_point(&wk.dressing.point, &ctx).unwrap();
    let mut swapped = basis.generators.clone();
    swapped.reverse();
    let other = ScalarBasis { period: basis.period, generators: swapped };
    for j in -3..=7 {
        let w = ScalarSeries::term(int(1), j);
        assert_eq!(basis.reduce(&w).unwrap(), other.reduce(&w).unwrap(), "zeta^{j}");
    }
}
