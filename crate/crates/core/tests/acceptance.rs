//! One line per acceptance criterion, printed by a plain `main` so the
//! report shows up in `cargo test` output. Clauses listed in `KNOWN_FAILURES`
//! are printed as FAIL with the reason and must keep failing; everything
//! else must pass.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extremal::envelope::{casimir_omega2, casimir_omega3, PbwElement};
use extremal::error::Result;
use extremal::projector::lattice::{check_denominators, linear_function, DenominatorLattice, LatticeKind, PtPolynomial};
use extremal::projector::{compare, nu_on_t, Mode, OpExpr, Realization, WeightOperator};
use extremal::ratfield::RatFunc;
use extremal::registry::{self, defining_problem, Check};
use extremal::rootsys::{kostant_partition_count, normal_order_from_word, positive_roots, reduced_words_of_w0, MultiIndex, Q64, Root, RootDatum, SubalgebraSpec, Weight};
use extremal::solver::{conjecture_report, solve, SolveOptions, Status};
use extremal::verma::{TruncatedVerma, VermaVector};

const KNOWN_FAILURES: &[(u32, &str, &str)] = &[(
    3,
    "adjoint(Q_t) != Q_t for t > 1",
    "Q_t is a sum of F^k E^k times Cartan factors, each term is fixed by the Shapovalov adjoint, so Q_t is Hermitian for every t",
)];

struct Clause {
    name: String,
    ok: bool,
    detail: String,
}

fn clause(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Clause {
    Clause { name: name.into(), ok, detail: detail.into() }
}

fn rf(s: &str) -> RatFunc {
    RatFunc::parse(s).unwrap()
}

fn spec(s: &str) -> SubalgebraSpec {
    SubalgebraSpec::parse(s).unwrap()
}

fn verma(n: usize, depth: usize) -> Arc<TruncatedVerma> {
    Arc::new(TruncatedVerma::new(n, depth).unwrap())
}

fn generic(seed: u64) -> Mode {
    Mode::Generic { seed, trials: 3 }
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-100_000i64..=100_000)))).collect()
}

/// Identity on the weight 0 block, zero on every other block.
fn top_indicator<S: extremal::linalg::Field>(op: &WeightOperator<S>) -> bool {
    op.blocks.iter().enumerate().all(|(b, m)| if op.verma.block(b).weight.is_zero() { m.is_identity() } else { m.is_zero() })
}

fn registry_clause(id: &str, depth: Option<usize>) -> Clause {
    let t = Instant::now();
    let entry = registry::lookup_at(id, None, depth).unwrap();
    let out = registry::run(&entry).unwrap();
    clause(format!("{id} (depth {}, {})", out.depth, out.mode), out.passed, format!("{:.2?}", t.elapsed()))
}

fn timed(limit: Duration, name: &str, f: impl FnOnce() -> Result<bool>) -> Clause {
    let t = Instant::now();
    let ok = f().unwrap();
    let el = t.elapsed();
    clause(name, ok && el < limit, format!("{el:.2?}"))
}

fn criterion_1() -> Vec<Clause> {
    let mut out = Vec::new();
    for (n, d) in [(2, 4), (3, 4), (4, 3)] {
        out.push(timed(Duration::from_secs(60), &format!("AST at rho is the top indicator, n = {n}, depth {d}"), || {
            let v = verma(n, d);
            let ast = OpExpr::Ast { order: positive_roots(n)?, tau: RootDatum::new(n)?.rho };
            if n <= 3 {
                return Ok(top_indicator(&Realization::<RatFunc>::new(v, ()).operator(&ast)?));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(41);
            for _ in 0..3 {
                let real = Realization::<BigRational>::new(v.clone(), random_point(&mut rng, n));
                if !top_indicator(&real.operator(&ast)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        }));
    }
    for id in ["fin-fac-sl2", "fin-fac-sl3", "fin-fac-sl4"] {
        out.push(registry_clause(id, None));
    }
    out
}

fn criterion_2() -> Vec<Clause> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tau = Weight { coords: (0..3).map(|_| Q64::new(rng.gen_range(-50..50), rng.gen_range(1..20))).collect() };
    let words = reduced_words_of_w0(3).unwrap();
    let v = verma(3, 4);
    let ops: Vec<OpExpr> = words.iter().map(|w| OpExpr::Ast { order: normal_order_from_word(3, w).unwrap(), tau: tau.clone() }).collect();
    let eq = compare(&v, &ops[0], &ops[1], &Mode::Symbolic).unwrap().equal;
    vec![
        clause("sl3 has 2 normal orders, sl4 has 16", words.len() == 2 && reduced_words_of_w0(4).unwrap().len() == 16, ""),
        clause(format!("sl3 orders agree at tau = {tau}"), eq, "symbolic, depth 4"),
        registry_clause("normal-orders-sl3", None),
        registry_clause("normal-orders-sl4", None),
    ]
}

fn criterion_3() -> Vec<Clause> {
    let v = verma(2, 8);
    let real = Realization::<RatFunc>::new(v.clone(), ());
    let a = Root::new(1, 2);
    let mut out = vec![registry_clause("qt-image-sl2", None)];
    let mut image_ok = true;
    let mut sum_ok = true;
    for t in 1..=3i64 {
        let q = real.operator(&OpExpr::qt(a, t)).unwrap();
        // F^k survives exactly when k < t.
        for k in 0..v.blocks().len() {
            image_ok &= q.blocks[k].is_zero() == (k >= t as usize);
        }
        // The defining sum on F^k, evaluated by hand: the right coefficient of
        // F^j E^j F^k is k!/(k-j)! prod_{i<j} (h - k + 1 + i) with h = x1 - x2.
        for k in 0..v.blocks().len() as i64 {
            let hk = rf(&format!("x1 - x2 - {}", 2 * k));
            let mut total = RatFunc::zero();
            let mut term = RatFunc::one();
            for j in 0..=k {
                if j > 0 {
                    let ef = rf(&format!("({k} - {j} + 1) * (x1 - x2 - {k} + {j})"));
                    let den = hk.checked_add(&RatFunc::from_int(t + j));
                    term = term.checked_mul(&ef).checked_div(&den).unwrap().scale(&BigRational::new((-1).into(), j.into()));
                }
                total = total.checked_add(&term);
            }
            sum_ok &= q.blocks[k as usize].get(0, 0) == &total;
        }
        let tel = compare(&v, &OpExpr::TelescopedQt { root: a, t: t as u32 }, &OpExpr::qt(a, t), &Mode::Symbolic).unwrap();
        sum_ok &= tel.equal;
    }
    out.push(clause("image of Q_t is the top t blocks, t = 1..3", image_ok, "depth 8"));
    out.push(clause("telescoped product and the defining sum agree blockwise", sum_ok, "depth 8"));
    let q1 = OpExpr::qt(a, 1);
    let self_adj_1 = compare(&v, &q1.clone().adjoint(), &q1, &Mode::Symbolic).unwrap().equal;
    out.push(clause("adjoint(Q_1) = Q_1", self_adj_1, ""));
    let differs = (2..=3).all(|t| {
        let q = OpExpr::qt(a, t);
        !compare(&v, &q.clone().adjoint(), &q, &Mode::Symbolic).unwrap().equal
    });
    out.push(clause("adjoint(Q_t) != Q_t for t > 1", differs, "t = 2, 3"));
    out
}

fn criterion_4() -> Vec<Clause> {
    let mut out = vec![registry_clause("inf-comm-fac-sl2", None), registry_clause("inf-comm-fac-sl3", None)];
    for n in [2, 3] {
        // Sum of e_ab e_ba over all a, b, built here from matrix units.
        let mut om = PbwElement::zero();
        for a in 1..=n {
            for b in 1..=n {
                om.add_assign(&PbwElement::unit(a, b).mul(&PbwElement::unit(b, a)));
            }
        }
        let v = verma(n, 4);
        let hc = om.hc_project(n).unwrap();
        let lib = casimir_omega2(n).unwrap();
        let central = compare(&v, &OpExpr::Central { p: hc.clone(), extra: RatFunc::one() }, &OpExpr::Explicit(om), &Mode::Symbolic).unwrap().equal;
        let lib_eq = compare(&v, &OpExpr::Central { p: lib.hc_image, extra: RatFunc::one() }, &OpExpr::Explicit(lib.expression), &Mode::Symbolic).unwrap().equal;
        out.push(clause(format!("central action of HC(Omega2) is Omega2 on every block, n = {n}"), central && lib_eq, "depth 4"));
    }
    out
}

fn criterion_5() -> Vec<Clause> {
    ["successive-sl3-l23", "successive-sl4-l23", "any-omega-sl3-l23", "any-omega-sl3-l12", "hermitian-sl3-l23", "pglpl-sl3"]
        .into_iter()
        .map(|id| registry_clause(id, None))
        .collect()
}

fn criterion_6() -> Vec<Clause> {
    let v = verma(3, 2);
    let real = Realization::<RatFunc>::new(v.clone(), ());
    let f13 = MultiIndex::parse("F13").unwrap();
    let a13 = Root::new(1, 3);
    let direct = real.operator(&OpExpr::Direct(spec("23"))).unwrap();
    let prod = real.operator(&OpExpr::compose([OpExpr::Extremal(spec("12")), OpExpr::qt(a13, 2)])).unwrap();
    let q = real.operator(&OpExpr::qt(a13, 2)).unwrap();
    // Q_2 on F13: 1 - (E13 F13 coefficient) / (h13 at the weight of F13 + 3).
    let ef = v.apply(&PbwElement::e(a13), &VermaVector::basis(f13.clone())).unwrap().coefficient(&MultiIndex::empty());
    let want = RatFunc::one().checked_sub(&ef.checked_div(&rf("x1 - x3 - 2 + 3")).unwrap());
    vec![
        clause("P(g,l23)(F13) = 0", direct.apply_monomial(&f13).unwrap().is_empty(), ""),
        clause("P12 Q2(a13)(F13) != 0", !prod.apply_monomial(&f13).unwrap().is_empty(), ""),
        clause("Q2(a13)(F13) = F13/(x1 - x3 + 1)", q.apply_monomial(&f13).unwrap() == vec![(f13, want.clone())] && want == rf("1/(x1 - x3 + 1)"), want.to_string()),
        registry_clause("counterexample-sl3", None),
    ]
}

fn solve_entry(id: &str, depth: Option<usize>) -> extremal::solver::FactorizationResult {
    let e = registry::lookup_at(id, None, depth).unwrap();
    let Check::Solve { problem, .. } = &e.check else { panic!("{id} is not a solve entry") };
    solve(problem, &SolveOptions { mode: e.mode.clone(), verify: true }).unwrap()
}

fn criterion_7() -> Vec<Clause> {
    let r = solve_entry("warm-up-sl3", Some(8));
    let f13 = |k: u32| MultiIndex::from_pairs([(Root::new(1, 3), k)]);
    let q = |k: u32| r.q.get(&f13(k)).cloned().unwrap_or_else(RatFunc::zero);
    let profile = q(0).is_one() && q(1) == rf("1/(x1 - x3 + 1)") && (2..=4).all(|k| q(k).is_zero());
    let v = verma(3, 8);
    let same = compare(&v, &r.solved_operator(), &OpExpr::qt(Root::new(1, 3), 2), &Mode::Symbolic).unwrap().equal;
    let r2 = solve_entry("sl4-ii", None);
    let mut want = BTreeMap::new();
    want.insert(MultiIndex::empty(), RatFunc::one());
    let q14 = r2.nonzero_q();
    let expect_q14 = rf("2/(x1 - x4 + 2)");
    let v4 = verma(4, 3);
    let sl4_same = compare(&v4, &r2.solved_operator(), &OpExpr::qt(Root::new(1, 4), 3), &Mode::Symbolic).unwrap().equal;
    vec![
        clause("warm-up q profile", r.status == Status::Unique && profile, format!("q1 = {}", q(1))),
        clause("warm-up solved operator = Q2(a13)", same, "symbolic, depth 8"),
        clause(
            "sl4(ii) middle = Q3(a14)",
            r2.status == Status::Unique && sl4_same && q14.get(&MultiIndex::parse("F14").unwrap()) == Some(&expect_q14),
            "symbolic, depth 3",
        ),
    ]
}

fn criterion_8() -> Vec<Clause> {
    let mut out = vec![registry_clause("sl4-i", Some(3))];
    for d in [2, 4] {
        for id in ["sl5r1-i-short", "sl5r1-i-long", "sl5r1-ii", "sl5r2-i", "sl5r2-ii", "sl5r2-iii"] {
            out.push(registry_clause(id, Some(d)));
        }
    }
    // Every solved middle factor, solved in the rank of its index span.
    for (m, l, n) in [("124", "12", 4), ("125", "12", 5), ("1235", "123", 5)] {
        let p = defining_problem(&spec(m), &spec(l), n, 2).unwrap();
        let r = solve(&p, &SolveOptions { mode: generic(1), verify: true }).unwrap();
        let pivots = r.pivots.iter().all(|p| p.pivot != "0" && p.nonzero_at_points == 3);
        let verified = r.verification.as_ref().is_some_and(|v| v.equal);
        out.push(clause(format!("Q{m}^{l} solves uniquely with nonzero pivots"), r.status == Status::Unique && pivots && verified, format!("{} pivots", r.pivots.len())));
    }
    out
}

fn criterion_9() -> Vec<Clause> {
    vec![registry_clause("ambiguity-sl5-12-45", None)]
}

fn criterion_10() -> Vec<Clause> {
    let mut out = Vec::new();
    for (n, d) in [(2, 5), (3, 4)] {
        let v = verma(n, d);
        let real = Realization::<RatFunc>::new(v, ());
        let lat = DenominatorLattice::new(n, LatticeKind::Absolute, d + 2).unwrap();
        let roots = positive_roots(n).unwrap();
        let rho = RootDatum::new(n).unwrap().rho;
        let mut ok = true;
        let mut checked = 0;
        // Every factor and every partial product of the AST product.
        for k in 1..=roots.len() {
            let factors: Vec<OpExpr> = roots[..k].iter().map(|r| OpExpr::Qt { root: *r, t: rho.pair(*r) }).collect();
            for op in [factors[k - 1].clone(), OpExpr::Compose(factors)] {
                let m = real.operator(&op).unwrap();
                let rep = check_denominators(&lat, m.entries_with_weights());
                ok &= rep.holds();
                checked += rep.checked;
            }
        }
        // P(sl2) itself has constant entries on the window.
        out.push(clause(format!("P(sl{n}) poles lie in the absolute lattice"), ok && (n == 2 || checked > 0), format!("{checked} entries with poles")));
    }
    out.push(registry_clause("pt-product-sl3-l12", None));
    // Block entries of P(g,l12) are constant on the window; the p_T product
    // divides by p_T(T + nu(T)) for every weight nu of U(u-) it meets.
    let t = Weight::from_ints(&[1, 1, -2]);
    let l12 = spec("12");
    let v = verma(3, 3);
    let lat = DenominatorLattice::new(3, LatticeKind::RelativeT(l12.clone(), t.clone()), 3).unwrap();
    let pt = PtPolynomial::new(&t, &v.datum);
    let real = Realization::<RatFunc>::new(v, ());
    let cs: BTreeSet<Q64> = real.u_plus_weights(&l12).iter().map(|nu| nu_on_t(nu, &t)).collect();
    let dens: Vec<RatFunc> = cs.iter().map(|c| pt.eval_at(&linear_function(&t).checked_add(&RatFunc::from_q64(*c))).unwrap()).collect();
    let ok = !dens.is_empty() && dens.iter().all(|d| d.is_polynomial() && lat.accounts_for(d.numerator()));
    out.push(clause("p_T product denominators lie in D(g,l12,T)", ok, format!("{} values of nu(T)", dens.len())));
    let r = solve_entry("warm-up-sl3", Some(6));
    let c = conjecture_report(&r, 6).unwrap();
    out.push(clause("warm-up conjecture report has no extra factors", c.extra_factors.is_empty(), c.lattice));
    out
}

fn random_pbw(rng: &mut ChaCha8Rng, n: usize) -> PbwElement {
    let roots = positive_roots(n).unwrap();
    let mut e = PbwElement::one();
    for _ in 0..rng.gen_range(1..=3) {
        let r = roots[rng.gen_range(0..roots.len())];
        e = match rng.gen_range(0..3) {
            0 => e.mul(&PbwElement::f(r)),
            1 => e.mul(&PbwElement::e(r)),
            _ => e.mul(&PbwElement::cartan(RatFunc::x(rng.gen_range(1..=n)))),
        };
    }
    e
}

fn criterion_11() -> Vec<Clause> {
    let limit = Duration::from_secs(120);
    let mut out = Vec::new();
    out.push(timed(limit, "PBW associativity, star anti-automorphism, weight additivity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=3);
            let (a, b, c) = (random_pbw(&mut rng, n), random_pbw(&mut rng, n), random_pbw(&mut rng, n));
            let ab = a.mul(&b);
            if ab.mul(&c) != a.mul(&b.mul(&c)) || ab.star() != b.star().mul(&a.star()) {
                return Ok(false);
            }
            if let (Some(wa), Some(wb), Some(wab)) = (a.weight(n), b.weight(n), ab.weight(n)) {
                if !ab.is_zero() && wab != wa.add(&wb) {
                    return Ok(false);
                }
            }
        }
        let (z, w) = (casimir_omega2(3)?, casimir_omega3(3)?);
        Ok(z.expression.mul(&w.expression).hc_project(3)? == z.hc_image.checked_mul(&w.hc_image))
    }));
    out.push(timed(limit, "Shapovalov symmetry and adjointness", || {
        let v = verma(3, 5);
        for blk in v.blocks() {
            let g = v.gram_matrix(&blk.weight)?;
            if g != g.transpose() {
                return Ok(false);
            }
        }
        let mut gens = Vec::new();
        for r in positive_roots(3)? {
            gens.push(PbwElement::e(r));
            gens.push(PbwElement::f(r));
        }
        let pairs: Vec<PbwElement> = gens.iter().flat_map(|a| gens.iter().map(move |b| a.mul(b))).collect();
        gens.extend(pairs);
        let low: Vec<&MultiIndex> = v.blocks().iter().filter(|b| b.height <= 1).flat_map(|b| &b.basis).collect();
        for a in &gens {
            for u in &low {
                for w in &low {
                    let (u, w) = (VermaVector::basis((*u).clone()), VermaVector::basis((*w).clone()));
                    let lhs = v.shapovalov(&v.apply(&a.star(), &u)?, &w)?;
                    let rhs = v.shapovalov(&u, &v.apply(a, &w)?)?;
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }));
    out.push(timed(limit, "apply is a module action", || {
        let v = verma(3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let low: Vec<MultiIndex> = v.blocks().iter().filter(|b| b.height <= 1).flat_map(|b| b.basis.clone()).collect();
        let mut checked = 0;
        for _ in 0..100 {
            let (a, b) = (random_pbw(&mut rng, 3), random_pbw(&mut rng, 3));
            let x = VermaVector::basis(low[rng.gen_range(0..low.len())].clone());
            // Products that leave the window are skipped.
            let (Ok(lhs), Ok(inner)) = (v.apply(&a.mul(&b), &x), v.apply(&b, &x)) else { continue };
            let Ok(rhs) = v.apply(&a, &inner) else { continue };
            if lhs != rhs {
                return Ok(false);
            }
            checked += 1;
        }
        Ok(checked >= 50)
    }));
    out.push(timed(limit, "weight space dimensions are Kostant partition counts", || {
        for (n, d) in [(2, 6), (3, 5), (4, 4)] {
            let v = verma(n, d);
            for blk in v.blocks() {
                if blk.dim() as u64 != kostant_partition_count(n, &blk.weight)? || blk.dim() as u64 != count_partitions(n, &blk.weight) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }));
    out.push(timed(limit, "copy bookkeeping for l13 in sl3 and l124 in sl4", || Ok(bookkeeping(3, "13", 4)? && bookkeeping(4, "124", 3)?)));
    out
}

/// Partitions into positive roots, counted by height-first recursion on
/// the simple-root coefficients.
fn count_partitions(n: usize, nu: &Weight) -> u64 {
    fn rec(c: &mut Vec<i64>, roots: &[(usize, usize)]) -> u64 {
        if c.iter().all(|x| *x == 0) {
            return 1;
        }
        let Some((&(i, j), rest)) = roots.split_first() else { return 0 };
        let mut total = rec(c, rest);
        let mut k = 0;
        while (i..j).all(|s| c[s] > 0) {
            (i..j).for_each(|s| c[s] -= 1);
            k += 1;
            total += rec(c, rest);
        }
        (i..j).for_each(|s| c[s] += k);
        total
    }
    let mut c: Vec<i64> = nu.simple_coefficients().iter().map(|q| q.to_integer()).collect();
    let roots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    rec(&mut c, &roots)
}

/// Per weight, the monomials `F^I` off `m` times `U(m-)` at the remaining
/// weight account for the whole weight space, and the vectors
/// `F^k P(m)(F^I)` are a basis of it.
fn bookkeeping(n: usize, m: &str, depth: usize) -> Result<bool> {
    let m = spec(m);
    let v = verma(n, depth);
    let m_roots = m.roots();
    let off: Vec<Root> = positive_roots(n)?.into_iter().filter(|r| !m.contains_root(*r)).collect();
    for blk in v.blocks() {
        let mut count = 0;
        for other in v.blocks() {
            let gens = other.basis.iter().filter(|x| x.is_supported_on(&off)).count();
            let rest = blk.weight.sub(&other.weight);
            if gens > 0 && rest.is_in_positive_cone() {
                count += gens * monomials_on(&m_roots, &rest, n);
            }
        }
        if count != blk.dim() {
            return Ok(false);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let real = Realization::<BigRational>::new(v.clone(), random_point(&mut rng, n));
    for b in 0..v.blocks().len() {
        let dec = real.decomposition(&m, &SubalgebraSpec::cartan(), b)?;
        if dec.basis.rank() != v.block(b).dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn monomials_on(roots: &[Root], nu: &Weight, n: usize) -> usize {
    if nu.is_zero() {
        return 1;
    }
    let Some((&r, rest)) = roots.split_first() else { return 0 };
    let mut total = 0;
    let mut cur = nu.clone();
    while cur.is_in_positive_cone() {
        total += monomials_on(rest, &cur, n);
        cur = cur.sub(&r.weight(n));
    }
    total
}

fn main() {
    let criteria: Vec<(u32, fn() -> Vec<Clause>)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    println!();
    let mut unexpected = Vec::new();
    for (num, f) in criteria {
        let t = Instant::now();
        let clauses = f();
        let known = |c: &Clause| KNOWN_FAILURES.iter().find(|(k, name, _)| *k == num && *name == c.name);
        let failed: Vec<&Clause> = clauses.iter().filter(|c| !c.ok).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {num:>2}: {status} ({} clauses, {:.2?})", clauses.len(), t.elapsed());
        for c in &clauses {
            let mark = if c.ok { "ok  " } else { "FAIL" };
            println!("    {mark} {} [{}]", c.name, c.detail);
            if let Some((_, _, why)) = known(c) {
                println!("         known: {why}");
            }
            if c.ok == known(c).is_some() {
                unexpected.push(format!("{num}: {}", c.name));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
