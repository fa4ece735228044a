//! Named identities, and parsing of factor names such as `P123^12`,
//! `P12,34`, `Q35` or `Q124^12`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::envelope::casimir_omega2;
use crate::error::{Error, Result};
use crate::projector::{compare, Mode, OpExpr, Realization};
use crate::ratfield::RatFunc;
use crate::rootsys::{normal_order_from_word, MultiIndex, Permutation, parse_q64, positive_roots, reduced_words_of_w0, Root, RootDatum, SubalgebraSpec, Weight};
use crate::solver::{analyze_ambiguity, factorization_properties, solve, FactorizationProblem, SolveOptions, Status};
use crate::verma::TruncatedVerma;

/// Symbolic up to rank 3, otherwise three seeded generic points.
pub fn default_mode(n: usize, seed: u64) -> Mode {
    if n <= 3 {
        Mode::Symbolic
    } else {
        Mode::Generic { seed, trials: 3 }
    }
}

fn spec(s: &str) -> Result<SubalgebraSpec> {
    SubalgebraSpec::parse(s)
}

fn full_label(n: usize) -> String {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Splits `P123^12` into (`123`, Some(`12`)).
fn split_name(body: &str) -> (&str, Option<&str>) {
    match body.split_once('^') {
        Some((a, b)) => (a, Some(b)),
        None => (body, None),
    }
}

/// The problem whose solution defines the solved factor `Q{m}^{l'}`:
/// `P^{l'}_{a..b} = P^{l'}_{a..b-1} Q P_{rest}` inside the block `a..b`
/// spanned by `m`, where `rest` is `m` without its first index (and `l'`
/// blocks there).
pub fn defining_problem(m: &SubalgebraSpec, lower: &SubalgebraSpec, n: usize, depth: usize) -> Result<FactorizationProblem> {
    if m.blocks.len() != 1 {
        return Err(Error::Config(format!("solved factor over {} needs a single block", m.label())));
    }
    let idx = &m.blocks[0];
    let (a, b) = (idx[0], *idx.last().expect("nonempty"));
    let span = SubalgebraSpec::single(&(a..=b).collect::<Vec<u8>>())?;
    let head = SubalgebraSpec::single(&(a..b).collect::<Vec<u8>>())?;
    // The tail starts at the first index of the span missing from m.
    let missing: Vec<u8> = (a..=b).filter(|i| !idx.contains(i)).collect();
    let tail_first = missing.first().copied().unwrap_or(b);
    let tail: Vec<u8> = (tail_first..=b).collect();
    let lower_in = |s: &SubalgebraSpec| -> Result<SubalgebraSpec> {
        SubalgebraSpec::new(lower.blocks.iter().filter(|blk| blk.iter().all(|i| s.blocks[0].contains(i))).cloned().collect())
    };
    let head_lower = lower_in(&head)?;
    let tail_spec = SubalgebraSpec::single(&tail)?;
    let tail_lower = lower_in(&tail_spec)?;
    let rel = |m: SubalgebraSpec, l: SubalgebraSpec| if m == l { OpExpr::Extremal(m) } else { OpExpr::Relative { m, l } };
    let target = if span.roots().len() == positive_roots(n)?.len() { OpExpr::Direct(lower.clone()) } else { rel(span.clone(), lower.clone()) };
    let right = if tail_lower.blocks.is_empty() { OpExpr::Extremal(tail_spec) } else { rel(tail_spec, tail_lower) };
    Ok(FactorizationProblem {
        n,
        l: lower.clone(),
        left: vec![rel(head, head_lower)],
        middle: m.clone(),
        middle_lower: lower.clone(),
        right: vec![right],
        target: Some(target),
        depth,
    })
}

/// Resolves factor names against rank `n`; solved factors are cached.
pub struct FactorParser {
    pub n: usize,
    pub depth: usize,
    solved: BTreeMap<String, OpExpr>,
}

impl FactorParser {
    pub fn new(n: usize, depth: usize) -> Self {
        FactorParser { n, depth, solved: BTreeMap::new() }
    }

    pub fn parse_list(&mut self, names: &str) -> Result<Vec<OpExpr>> {
        names.split_whitespace().map(|s| self.parse(s)).collect()
    }

    pub fn parse(&mut self, name: &str) -> Result<OpExpr> {
        let bad = || Error::Parse(format!("factor name {name:?}"));
        let (kind, body) = name.split_at(name.char_indices().nth(1).map(|(i, _)| i).ok_or_else(bad)?);
        let (upper, lower) = split_name(body);
        let n = self.n;
        match (kind, lower) {
            ("P", None) => {
                let u = spec(upper)?;
                u.validate_for(n)?;
                Ok(OpExpr::Extremal(u))
            }
            ("P", Some(lo)) => {
                let (u, l) = (spec(upper)?, spec(lo)?);
                u.validate_for(n)?;
                l.validate_for(n)?;
                if upper == full_label(n) {
                    Ok(OpExpr::Direct(l))
                } else if u == l {
                    Ok(OpExpr::Extremal(u))
                } else {
                    Ok(OpExpr::Relative { m: u, l })
                }
            }
            ("Q", None) => {
                let digits: Vec<u8> = upper.bytes().map(|c| c.wrapping_sub(b'0')).collect();
                if digits.len() != 2 || digits[0] >= digits[1] || digits[1] as usize > n || digits[0] == 0 {
                    return Err(bad());
                }
                Ok(OpExpr::qt(Root::new(digits[0] as usize, digits[1] as usize), i64::from(digits[1] - digits[0])))
            }
            ("Q", Some(lo)) => {
                if let Some(op) = self.solved.get(name) {
                    return Ok(op.clone());
                }
                let (m, l) = (spec(upper)?, spec(lo)?);
                m.validate_for(n)?;
                let op = solve_factor(&m, &l, n, self.depth)?;
                self.solved.insert(name.to_string(), op.clone());
                Ok(op)
            }
            _ => Err(bad()),
        }
    }
}

fn relabel(s: &SubalgebraSpec, by: i32) -> Result<SubalgebraSpec> {
    SubalgebraSpec::new(s.blocks.iter().map(|b| b.iter().map(|&i| (i as i32 + by) as u8).collect()).collect())
}

/// Solves `Q{m}^{l}` in the rank of the index span of `m`, so that indices
/// outside the span cannot add copies, then relabels it into rank `n`.
pub fn solve_factor(m: &SubalgebraSpec, l: &SubalgebraSpec, n: usize, depth: usize) -> Result<OpExpr> {
    let idx = m.blocks.first().ok_or_else(|| Error::Config("solved factor over the Cartan subalgebra".into()))?;
    let (a, b) = (idx[0] as usize, *idx.last().expect("nonempty") as usize);
    let (k, s) = (b - a + 1, a - 1);
    let problem = defining_problem(&relabel(m, -(s as i32))?, &relabel(l, -(s as i32))?, k, depth)?;
    let res = solve(&problem, &SolveOptions { mode: default_mode(k, 1), verify: false })?;
    if res.status != Status::Unique {
        return Err(Error::Config(format!("Q{}^{} is not uniquely determined: {:?}", m.label(), l.label(), res.status)));
    }
    let mut perm: Vec<usize> = (s..s + k).collect();
    perm.extend((0..n).filter(|i| *i < s || *i >= s + k));
    let perm = Permutation(perm);
    let q = res
        .nonzero_q()
        .into_iter()
        .map(|(mi, f)| (MultiIndex::from_pairs(mi.terms().iter().map(|(r, e)| (Root::new(r.i as usize + s, r.j as usize + s), *e))), f.weyl_act(&perm)))
        .collect();
    Ok(OpExpr::Induce { m: m.clone(), l: l.clone(), q })
}

#[derive(Clone, Debug)]
pub enum Check {
    Compare { lhs: OpExpr, rhs: OpExpr, expect_equal: bool },
    /// All operators agree.
    AllEqual(Vec<OpExpr>),
    /// A solve that must be unique with nonzero pivots and verify; when
    /// `matches` is given the solved factor must also equal it.
    Solve { problem: FactorizationProblem, matches: Option<OpExpr> },
    Ambiguity { problem: FactorizationProblem, weight: Weight, dimension: usize, witnesses: Vec<String> },
    /// `Q_t` on sl2 is nonzero exactly on the top `t` blocks.
    QtImage { t_max: u32 },
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub id: &'static str,
    pub description: &'static str,
    pub n: usize,
    pub depth: usize,
    pub mode: Mode,
    pub check: Check,
}

pub const IDS: &[&str] = &[
    "fin-fac-sl2",
    "fin-fac-sl3",
    "fin-fac-sl4",
    "normal-orders-sl3",
    "normal-orders-sl4",
    "inf-comm-fac-sl2",
    "inf-comm-fac-sl3",
    "any-omega-sl3-l23",
    "any-omega-sl3-l12",
    "pt-product-sl3-l12",
    "successive-sl3-l23",
    "successive-sl4-l23",
    "pglpl-sl3",
    "hermitian-sl3-l23",
    "qt-image-sl2",
    "counterexample-sl3",
    "warm-up-sl3",
    "sl4-i",
    "sl4-ii",
    "sl5r1-i-short",
    "sl5r1-i-long",
    "sl5r1-ii",
    "sl5r2-i",
    "sl5r2-ii",
    "sl5r2-iii",
    "lemma-1n-sl5-23",
    "ambiguity-sl5-12-45",
];

fn ast(n: usize, tau: Weight) -> Result<OpExpr> {
    Ok(OpExpr::Ast { order: positive_roots(n)?, tau })
}

fn rational_tau(n: usize) -> Result<Weight> {
    let c: Vec<_> = ["7/3", "-2/5", "11/7", "1/2"].iter().take(n).map(|s| parse_q64(s)).collect::<Result<_>>()?;
    Ok(Weight { coords: c })
}

fn all_orders(n: usize, tau: &Weight) -> Result<Vec<OpExpr>> {
    reduced_words_of_w0(n)?.iter().map(|w| Ok(OpExpr::Ast { order: normal_order_from_word(n, w)?, tau: tau.clone() })).collect()
}

/// Builds the entry `id`; `seed` overrides the generic-point seed.
pub fn lookup(id: &str, seed: Option<u64>) -> Result<Entry> {
    lookup_at(id, seed, None)
}

/// As [`lookup`], with the window depth overridden.
pub fn lookup_at(id: &str, seed: Option<u64>, depth: Option<usize>) -> Result<Entry> {
    let dd = |default: usize| depth.unwrap_or(default);
    let seed = seed.unwrap_or(1);
    let h = SubalgebraSpec::cartan();
    let cmp = |lhs: OpExpr, rhs: OpExpr| Check::Compare { lhs, rhs, expect_equal: true };
    let (n, depth, description, check): (usize, usize, &'static str, Check) = match id {
        "fin-fac-sl2" | "fin-fac-sl3" | "fin-fac-sl4" => {
            let n = id.as_bytes()[id.len() - 1] as usize - b'0' as usize;
            let d = dd(if n == 4 { 3 } else { 4 });
            (n, d, "AST product at rho over the lex normal order is the extremal projector", cmp(ast(n, RootDatum::new(n)?.rho)?, OpExpr::Direct(h)))
        }
        "normal-orders-sl3" => (3, dd(4), "AST products agree for both normal orders at a rational tau", Check::AllEqual(all_orders(3, &rational_tau(3)?)?)),
        "normal-orders-sl4" => (4, dd(3), "AST products agree for all 16 normal orders", Check::AllEqual(all_orders(4, &rational_tau(4)?)?)),
        "inf-comm-fac-sl2" => (2, dd(5), "Casimir product equals the extremal projector", cmp(OpExpr::Zhelobenko(casimir_omega2(2)?.hc_image), OpExpr::Direct(h))),
        "inf-comm-fac-sl3" => (3, dd(4), "Casimir product equals the extremal projector", cmp(OpExpr::Zhelobenko(casimir_omega2(3)?.hc_image), OpExpr::Direct(h))),
        "any-omega-sl3-l23" | "any-omega-sl3-l12" => {
            let l = spec(&id[id.len() - 2..])?;
            (3, dd(4), "relative Casimir product equals the relative projector", cmp(OpExpr::RelativeCasimir { p: casimir_omega2(3)?.hc_image, l: l.clone() }, OpExpr::Direct(l)))
        }
        "pt-product-sl3-l12" => (
            3,
            dd(3),
            "p_T product for T in z+(l12) equals the relative projector",
            cmp(OpExpr::TPolynomial { t: Weight::from_ints(&[1, 1, -2]), l: spec("12")? }, OpExpr::Direct(spec("12")?)),
        ),
        "successive-sl3-l23" | "successive-sl4-l23" => {
            let n = if id.contains("sl3") { 3 } else { 4 };
            let l = spec("23")?;
            let a = OpExpr::compose([OpExpr::Direct(l.clone()), OpExpr::Extremal(l.clone())]);
            let b = OpExpr::compose([OpExpr::Extremal(l.clone()), OpExpr::Direct(l)]);
            (n, dd(if n == 3 { 4 } else { 3 }), "P(g) = P(g,l23) P(l23) = P(l23) P(g,l23)", Check::AllEqual(vec![OpExpr::Direct(h), a, b]))
        }
        "pglpl-sl3" => {
            let l = spec("12")?;
            let problem = FactorizationProblem {
                n: 3,
                l: l.clone(),
                left: vec![],
                middle: SubalgebraSpec::full(3),
                middle_lower: l.clone(),
                right: vec![OpExpr::Extremal(l.clone())],
                target: Some(OpExpr::Direct(h)),
                depth: dd(4),
            };
            (3, dd(4), "the unique l12-invariant Q with Q P(l12) = P(g) is P(g,l12)", Check::Solve { problem, matches: Some(OpExpr::Direct(l)) })
        }
        "hermitian-sl3-l23" => {
            let p = OpExpr::Direct(spec("23")?);
            (3, dd(4), "the relative projector is self-adjoint for the Shapovalov form", cmp(p.clone().adjoint(), p))
        }
        "qt-image-sl2" => (2, dd(8), "Q_t is nonzero exactly on the top t weight blocks", Check::QtImage { t_max: 3 }),
        "counterexample-sl3" => (
            3,
            dd(4),
            "P12 Q2(a13) differs from P(g,l23)",
            Check::Compare { lhs: OpExpr::compose([OpExpr::Extremal(spec("12")?), OpExpr::qt(Root::new(1, 3), 2)]), rhs: OpExpr::Direct(spec("23")?), expect_equal: false },
        ),
        "warm-up-sl3" => {
            let problem = FactorizationProblem {
                n: 3,
                l: h.clone(),
                left: vec![OpExpr::Extremal(spec("12")?)],
                middle: spec("13")?,
                middle_lower: h.clone(),
                right: vec![OpExpr::Extremal(spec("23")?)],
                target: None,
                depth: dd(8),
            };
            (3, dd(8), "P12 Q P23 = P(g) is solved by Q = Q2(a13)", Check::Solve { problem, matches: Some(OpExpr::qt(Root::new(1, 3), 2)) })
        }
        "sl4-i" => (4, dd(3), "P^12_1234 = P^12_123 Q^12_124 P34", Check::Solve { problem: defining_problem(&spec("124")?, &spec("12")?, 4, dd(3))?, matches: None }),
        "sl4-ii" => {
            let l = spec("23")?;
            let problem = FactorizationProblem {
                n: 4,
                l: l.clone(),
                left: vec![OpExpr::Relative { m: spec("123")?, l: l.clone() }],
                middle: spec("14")?,
                middle_lower: h.clone(),
                right: vec![OpExpr::Relative { m: spec("234")?, l }],
                target: None,
                depth: dd(3),
            };
            (4, dd(3), "P^23_1234 = P^23_123 Q14 P^23_234 with Q14 = Q3(a14)", Check::Solve { problem, matches: Some(OpExpr::qt(Root::new(1, 4), 3)) })
        }
        "sl5r1-i-short" => (5, dd(2), "P^12_12345 = P^12_1234 Q^12_125 P345", Check::Solve { problem: defining_problem(&spec("125")?, &spec("12")?, 5, dd(2))?, matches: None }),
        "sl5r1-i-long" => return named_product(id, "P^12_12345 = P^12_123 Q^12_124 P34 Q^12_125 Q35 P45", 5, dd(2), seed, "P123^12 Q124^12 P34 Q125^12 Q35 P45", "P12345^12"),
        "sl5r1-ii" => return named_product(id, "P^23_12345 = P^23_123 Q14 P^23_234 Q15 Q^23_235 P45", 5, dd(2), seed, "P123^23 Q14 P234^23 Q15 Q235^23 P45", "P12345^23"),
        "sl5r2-i" => (5, dd(2), "P^123_12345 = P^123_1234 Q^123_1235 P45", Check::Solve { problem: defining_problem(&spec("1235")?, &spec("123")?, 5, dd(2))?, matches: None }),
        "sl5r2-ii" => return named_product(id, "P^234_12345 = P^234_1234 Q15 P^234_2345", 5, dd(2), seed, "P1234^234 Q15 P2345^234", "P12345^234"),
        "sl5r2-iii" => return named_product(id, "P^{12,34}_12345 = P^{12,34}_1234 Q^12_125 P^34_345", 5, dd(2), seed, "P1234^12,34 Q125^12 P345^34", "P12345^12,34"),
        "lemma-1n-sl5-23" => return named_product(id, "P^23_12345 = P^23_1234 Q15 P^23_2345", 5, dd(2), seed, "P1234^23 Q15 P2345^23", "P12345^23"),
        "ambiguity-sl5-12-45" => {
            let l = spec("12,45")?;
            let problem = FactorizationProblem {
                n: 5,
                l: l.clone(),
                left: vec![OpExpr::Relative { m: spec("123")?, l: spec("12")? }],
                middle: spec("1245")?,
                middle_lower: l,
                right: vec![OpExpr::Relative { m: spec("345")?, l: spec("45")? }],
                target: None,
                depth: dd(6),
            };
            (
                5,
                dd(6),
                "the l_{12,45} problem has a 2-dimensional image at a14 + a25",
                Check::Ambiguity { problem, weight: Weight::from_ints(&[1, 1, 0, -1, -1]), dimension: 2, witnesses: vec!["F14*F25".into(), "F15*F24".into()] },
            )
        }
        _ => return Err(Error::Config(format!("unknown registry id {id:?}"))),
    };
    let id = IDS.iter().find(|x| **x == id).expect("listed id");
    Ok(Entry { id, description, n, depth, mode: default_mode(n, seed), check })
}

fn named_product(id: &str, description: &'static str, n: usize, depth: usize, seed: u64, lhs: &str, rhs: &str) -> Result<Entry> {
    let mut p = FactorParser::new(n, depth);
    let lhs = OpExpr::Compose(p.parse_list(lhs)?);
    let rhs = p.parse(rhs)?;
    let id = IDS.iter().find(|x| **x == id).expect("listed id");
    Ok(Entry { id, description, n, depth, mode: default_mode(n, seed), check: Check::Compare { lhs, rhs, expect_equal: true } })
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: String,
    pub description: String,
    pub n: usize,
    pub depth: usize,
    pub mode: String,
    pub passed: bool,
    pub detail: Value,
}

pub fn run(entry: &Entry) -> Result<Outcome> {
    let verma = Arc::new(TruncatedVerma::new(entry.n, entry.depth)?);
    let (passed, detail) = match &entry.check {
        Check::Compare { lhs, rhs, expect_equal } => {
            let v = compare(&verma, lhs, rhs, &entry.mode)?;
            (v.equal == *expect_equal, json!({ "expect_equal": expect_equal, "verdict": v }))
        }
        Check::AllEqual(ops) => {
            let mut verdicts = Vec::new();
            for op in &ops[1..] {
                verdicts.push(compare(&verma, &ops[0], op, &entry.mode)?);
            }
            (verdicts.iter().all(|v| v.equal), json!({ "compared": ops.len(), "verdicts": verdicts }))
        }
        Check::Solve { problem, matches } => {
            let r = solve(problem, &SolveOptions { mode: entry.mode.clone(), verify: true })?;
            let pivots_ok = r.pivots.iter().all(|p| p.pivot != "0" && (entry.n < 4 || p.nonzero_at_points == 3));
            let verified = r.verification.as_ref().is_some_and(|v| v.equal);
            let matched = match matches {
                Some(op) => Some(compare(&verma, &r.solved_operator(), op, &entry.mode)?.equal),
                None => None,
            };
            let mut factors = problem.left.clone();
            factors.push(r.solved_operator());
            factors.extend(problem.right.iter().cloned());
            let props = factorization_properties(&factors, entry.n, &problem.l, 1)?;
            let passed = r.status == Status::Unique && pivots_ok && verified && matched != Some(false);
            (passed, json!({ "solve": crate::report::result_json(&r), "matches_expected": matched, "properties": props }))
        }
        Check::Ambiguity { problem, weight, dimension, witnesses } => {
            let rep = match &entry.mode {
                Mode::Symbolic => analyze_ambiguity(&Realization::<RatFunc>::new(verma.clone(), ()), problem)?,
                Mode::Generic { seed, .. } => {
                    crate::projector::compare::for_generic_points(&verma, *seed, 1, |real| analyze_ambiguity(real, problem).map(Some))?.1.expect("one trial").0
                }
            };
            let ok = rep.ambiguous && rep.weight.as_deref() == Some(weight.to_string().as_str()) && rep.dimension == *dimension && rep.witnesses == *witnesses;
            (ok, json!({ "report": rep }))
        }
        Check::QtImage { t_max } => {
            let real = Realization::<RatFunc>::new(verma.clone(), ());
            let a = Root::new(1, 2);
            let mut rows = Vec::new();
            let mut ok = true;
            for t in 1..=*t_max {
                let op = real.operator(&OpExpr::qt(a, i64::from(t)))?;
                let nonzero: Vec<bool> = op.blocks.iter().map(|b| !b.is_zero()).collect();
                let want: Vec<bool> = (0..nonzero.len()).map(|k| k < t as usize).collect();
                let tel = compare(&verma, &OpExpr::TelescopedQt { root: a, t }, &OpExpr::qt(a, i64::from(t)), &Mode::Symbolic)?;
                ok &= nonzero == want && tel.equal;
                rows.push(json!({ "t": t, "nonzero_blocks": nonzero, "telescoped_equal": tel.equal }));
            }
            (ok, json!({ "rows": rows }))
        }
    };
    Ok(Outcome {
        id: entry.id.to_string(),
        description: entry.description.to_string(),
        n: entry.n,
        depth: entry.depth,
        mode: entry.mode.name().to_string(),
        passed,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_names() {
        let mut p = FactorParser::new(4, 2);
        assert_eq!(p.parse("P34").unwrap(), OpExpr::Extremal(spec("34").unwrap()));
        assert_eq!(p.parse("P1234^12").unwrap(), OpExpr::Direct(spec("12").unwrap()));
        assert_eq!(p.parse("P123^12").unwrap(), OpExpr::Relative { m: spec("123").unwrap(), l: spec("12").unwrap() });
        assert_eq!(p.parse("Q14").unwrap(), OpExpr::qt(Root::new(1, 4), 3));
        assert!(matches!(p.parse("Q124^12").unwrap(), OpExpr::Induce { .. }));
        assert!(p.parse("Q41").is_err());
        assert!(p.parse("X12").is_err());
        assert!(p.parse("P").is_err());
    }

    #[test]
    fn defining_problems() {
        let p = defining_problem(&spec("235").unwrap(), &spec("23").unwrap(), 5, 2).unwrap();
        assert_eq!(p.target, Some(OpExpr::Relative { m: spec("2345").unwrap(), l: spec("23").unwrap() }));
        assert_eq!(p.left, vec![OpExpr::Relative { m: spec("234").unwrap(), l: spec("23").unwrap() }]);
        assert_eq!(p.right, vec![OpExpr::Extremal(spec("45").unwrap())]);
        let p = defining_problem(&spec("124").unwrap(), &spec("12").unwrap(), 4, 2).unwrap();
        assert_eq!(p.target, Some(OpExpr::Direct(spec("12").unwrap())));
        assert_eq!(p.right, vec![OpExpr::Extremal(spec("34").unwrap())]);
    }

    #[test]
    fn unknown_id() {
        assert!(lookup("no-such-identity", None).is_err());
    }

    #[test]
    fn every_id_builds() {
        for id in IDS.iter().filter(|id| !id.starts_with("sl5r1-i-long") && !id.starts_with("sl5r1-ii")) {
            assert_eq!(lookup(id, None).unwrap().id, *id);
        }
    }
}
