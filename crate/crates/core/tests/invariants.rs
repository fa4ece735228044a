use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use extremal::envelope::PbwElement;
use extremal::projector::{compare, Mode, OpExpr, Realization};
use extremal::ratfield::RatFunc;
use extremal::registry::{self, Check};
use extremal::rootsys::{
    dot_action, is_normal_order, kostant_partition_count, normal_order_from_word, positive_roots, reduced_words_of_w0, word_from_normal_order, MultiIndex, Permutation, Q64, Root,
    RootDatum, SubalgebraSpec, Weight,
};
use extremal::solver::{solve, SolveOptions, Status};
use extremal::verma::TruncatedVerma;

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `c0 + c1 x1 + c2 x2 + c3 x3`.
fn affine() -> impl Strategy<Value = RatFunc> {
    prop::collection::vec(-4i64..=4, 4).prop_map(|c| {
        (1..=3).fold(RatFunc::from_int(c[0]), |acc, i| acc.checked_add(&RatFunc::x(i).checked_mul(&RatFunc::from_int(c[i]))))
    })
}

/// A quotient of products of affine forms.
fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (prop::collection::vec(affine(), 1..3), prop::collection::vec(affine(), 0..2)).prop_filter_map("zero denominator", |(num, den)| {
        let n = num.iter().fold(RatFunc::one(), |a, b| a.checked_mul(b));
        den.iter().try_fold(n, |a, b| a.checked_div(b).ok())
    })
}

fn weight3() -> impl Strategy<Value = Weight> {
    prop::collection::vec((-20i64..20, 1i64..6), 3).prop_map(|v| Weight { coords: v.into_iter().map(|(a, b)| Q64::new(a, b)).collect() })
}

fn perm3() -> impl Strategy<Value = Permutation> {
    (0..6usize).prop_map(|i| Permutation::all(3).swap_remove(i))
}

fn point3() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(-1000i64..1000, 3).prop_map(|v| v.into_iter().map(big).collect())
}

fn pbw(n: usize) -> impl Strategy<Value = PbwElement> {
    let roots = positive_roots(n).unwrap();
    prop::collection::vec((0..3u8, 0..roots.len(), 1..=n), 1..4).prop_map(move |gens| {
        gens.into_iter().fold(PbwElement::one(), |e, (kind, r, i)| match kind {
            0 => e.mul(&PbwElement::f(roots[r])),
            1 => e.mul(&PbwElement::e(roots[r])),
            _ => e.mul(&PbwElement::cartan(RatFunc::x(i))),
        })
    })
}

fn spec(s: &str) -> SubalgebraSpec {
    SubalgebraSpec::parse(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ratfunc_field_laws(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(a.checked_add(&b).checked_sub(&b), a.clone());
        prop_assert_eq!(a.checked_mul(&b.checked_add(&c)), a.checked_mul(&b).checked_add(&a.checked_mul(&c)));
        if !b.is_zero() {
            prop_assert_eq!(a.checked_mul(&b).checked_div(&b).unwrap(), a.clone());
        }
        prop_assert!(a.checked_sub(&a).is_zero());
        prop_assert_eq!(RatFunc::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn ratfunc_agrees_with_evaluation(a in ratfunc(), b in ratfunc(), p in point3()) {
        if let (Ok(x), Ok(y), Ok(xy)) = (a.eval(&p), b.eval(&p), a.checked_mul(&b).eval(&p)) {
            prop_assert_eq!(xy, &x * &y);
            prop_assert_eq!(a.checked_add(&b).eval(&p).unwrap(), x + y);
        }
    }

    #[test]
    fn shift_is_an_automorphism(a in ratfunc(), b in ratfunc(), nu in weight3()) {
        prop_assert_eq!(a.checked_mul(&b).shift(&nu), a.shift(&nu).checked_mul(&b.shift(&nu)));
        prop_assert_eq!(a.checked_add(&b).shift(&nu), a.shift(&nu).checked_add(&b.shift(&nu)));
        prop_assert_eq!(a.shift(&nu).shift(&nu.neg()), a);
    }

    #[test]
    fn dot_action_is_a_group_action(v in perm3(), w in perm3(), mu in weight3()) {
        let d = RootDatum::new(3).unwrap();
        prop_assert_eq!(dot_action(&v.compose(&w), &mu, &d), dot_action(&v, &dot_action(&w, &mu, &d), &d));
        prop_assert_eq!(dot_action(&w.inverse(), &dot_action(&w, &mu, &d), &d), mu);
    }

    #[test]
    fn dot_act_on_functions_matches_weights(a in ratfunc(), w in perm3(), p in point3()) {
        // (w . h)(mu) = h(w^-1 . mu)
        let d = RootDatum::new(3).unwrap();
        let mu = Weight { coords: p.iter().map(|x| Q64::from_integer(x.to_integer().try_into().unwrap())).collect() };
        let moved = dot_action(&w.inverse(), &mu, &d);
        let q: Vec<BigRational> = moved.coords.iter().map(|c| big(c.to_integer())).collect();
        if let (Ok(lhs), Ok(rhs)) = (a.dot_act(&w, &d.rho).eval(&p), a.eval(&q)) {
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pbw_product_laws(a in pbw(3), b in pbw(3), c in pbw(3)) {
        let ab = a.mul(&b);
        prop_assert_eq!(ab.mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(ab.star(), b.star().mul(&a.star()));
        prop_assert_eq!(a.star().star(), a.clone());
        if let (Some(wa), Some(wb), false) = (a.weight(3), b.weight(3), ab.is_zero()) {
            prop_assert_eq!(ab.weight(3).unwrap(), wa.add(&wb));
        }
    }

    #[test]
    fn kostant_counts_match_window(coeffs in prop::collection::vec(0i64..3, 3)) {
        let nu = Weight::from_ints(&[coeffs[0], coeffs[1] - coeffs[0], coeffs[2] - coeffs[1], -coeffs[2]]);
        let v = TruncatedVerma::new(4, 6).unwrap();
        prop_assert_eq!(v.dim(&nu) as u64, kostant_partition_count(4, &nu).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn normal_orders_agree_at_any_tau(tau in weight3()) {
        let v = Arc::new(TruncatedVerma::new(3, 3).unwrap());
        let ops: Vec<OpExpr> = reduced_words_of_w0(3).unwrap().iter().map(|w| OpExpr::Ast { order: normal_order_from_word(3, w).unwrap(), tau: tau.clone() }).collect();
        prop_assert!(compare(&v, &ops[0], &ops[1], &Mode::Symbolic).unwrap().equal);
    }

    #[test]
    fn projectors_are_idempotent(l in prop::sample::select(vec!["", "12", "23", "123"]), m in prop::sample::select(vec!["12", "23", "13", "123"])) {
        let real = Realization::<RatFunc>::new(Arc::new(TruncatedVerma::new(3, 3).unwrap()), ());
        let l = if l.is_empty() { SubalgebraSpec::cartan() } else { spec(l) };
        prop_assert!(real.operator(&OpExpr::Direct(l)).unwrap().is_idempotent());
        prop_assert!(real.operator(&OpExpr::Extremal(spec(m))).unwrap().is_idempotent());
    }

    #[test]
    fn solver_round_trip(c1 in -5i64..=5, c2 in -5i64..=5, shift in 1i64..4) {
        // Any profile of the warm-up shape is recovered from its own target.
        let e = registry::lookup_at("warm-up-sl3", None, Some(5)).unwrap();
        let Check::Solve { mut problem, .. } = e.check else { unreachable!() };
        let f13 = |k| MultiIndex::from_pairs([(Root::new(1, 3), k)]);
        let mut q = BTreeMap::from([(MultiIndex::empty(), RatFunc::one())]);
        let q1 = RatFunc::from_int(c1).checked_div(&RatFunc::parse(&format!("x1 - x3 + {shift}")).unwrap()).unwrap();
        for (k, v) in [(1, q1), (2, RatFunc::from_int(c2))] {
            if !v.is_zero() {
                q.insert(f13(k), v);
            }
        }
        problem.target = Some(problem.equation(OpExpr::Induce { m: spec("13"), l: SubalgebraSpec::cartan(), q: q.clone() }));
        let r = solve(&problem, &SolveOptions::default()).unwrap();
        prop_assert_eq!(r.status.clone(), Status::Unique);
        prop_assert!(r.pivots.iter().all(|p| p.pivot != "0"));
        prop_assert_eq!(r.nonzero_q(), q);
    }
}

#[test]
fn normal_orders_round_trip() {
    for n in 2..=4 {
        let words = reduced_words_of_w0(n).unwrap();
        for w in &words {
            let order = normal_order_from_word(n, w).unwrap();
            assert!(is_normal_order(n, &order).unwrap());
            assert_eq!(&word_from_normal_order(n, &order).unwrap(), w);
        }
    }
}

#[test]
fn rho_pairs_to_positive_integers() {
    for n in 2..=5 {
        let d = RootDatum::new(n).unwrap();
        for r in positive_roots(n).unwrap() {
            let t = d.rho.pair(r);
            assert!(t.is_integer() && t > Q64::from_integer(0));
        }
    }
}
