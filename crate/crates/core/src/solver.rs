//! Solving `left . Q(m, l') . right = target` for the coefficients of the
//! middle factor, weight by weight.
//!
//! `Q` is the induced operator of [`OpExpr::Induce`] with unknown `q_k`,
//! one for each monomial `F^k` on the roots of `m` outside `l'`. At the
//! weight `|k|` the coefficient `q_k` enters the block equation linearly
//! (through the top copy only) while every `q_j` with `|j| < |k|` is
//! already known, so the system is triangular.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::projector::compare::{for_generic_points, random_point};
use crate::projector::lattice::{u_plus_orbits, DenominatorLattice, LatticeFactor, LatticeKind};
use crate::projector::{compare, Mode, OpExpr, Realization, Verdict};
use crate::ratfield::{Poly, RatFunc};
use crate::rootsys::{positive_roots, MultiIndex, Root, SubalgebraSpec, Weight};
use crate::verma::{TruncatedVerma, VermaVector};

#[derive(Clone, Debug)]
pub struct FactorizationProblem {
    pub n: usize,
    /// The `l` of the target `P(g, l)`.
    pub l: SubalgebraSpec,
    pub left: Vec<OpExpr>,
    /// `m`, carrying the unknown factor.
    pub middle: SubalgebraSpec,
    /// `l' ⊆ m`: the unknown factor commutes with `l'`.
    pub middle_lower: SubalgebraSpec,
    pub right: Vec<OpExpr>,
    /// Defaults to `P(g, l)`.
    pub target: Option<OpExpr>,
    pub depth: usize,
}

impl FactorizationProblem {
    pub fn target(&self) -> OpExpr {
        self.target.clone().unwrap_or_else(|| OpExpr::Direct(self.l.clone()))
    }

    pub fn validate(&self) -> Result<()> {
        for s in [&self.l, &self.middle, &self.middle_lower] {
            s.validate_for(self.n)?;
        }
        if !self.l.is_standard() {
            return Err(Error::NotStandard(self.l.label()));
        }
        if !self.middle_lower.is_subalgebra_of(&self.middle) {
            return Err(Error::Config(format!("{} is not contained in {}", self.middle_lower.label(), self.middle.label())));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        Ok(())
    }

    /// `left . P(l)` and `P(l) . right`.
    pub fn reduced_sides(&self) -> (OpExpr, OpExpr) {
        let pl = OpExpr::Extremal(self.l.clone());
        let mut left = self.left.clone();
        left.push(pl.clone());
        let mut right = vec![pl];
        right.extend(self.right.iter().cloned());
        (OpExpr::Compose(left), OpExpr::Compose(right))
    }

    pub fn equation(&self, middle: OpExpr) -> OpExpr {
        let mut v = self.left.clone();
        v.push(middle);
        v.extend(self.right.iter().cloned());
        OpExpr::Compose(v)
    }

    /// Roots of `m` outside `l'`.
    pub fn k_roots(&self) -> Vec<Root> {
        self.middle.roots().into_iter().filter(|r| !self.middle_lower.contains_root(*r)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Unique,
    Ambiguous { weight: String, dimension: usize, witnesses: Vec<String> },
    Obstructed { weight: String, reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Pivot {
    pub weight: String,
    pub k: String,
    pub pivot: String,
    /// Generic points at which the pivot was evaluated and found nonzero.
    pub nonzero_at_points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmbiguityReport {
    pub ambiguous: bool,
    pub weight: Option<String>,
    pub dimension: usize,
    pub side: Option<String>,
    pub witnesses: Vec<String>,
    pub cone: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub n: usize,
    pub status: Status,
    pub middle: SubalgebraSpec,
    pub middle_lower: SubalgebraSpec,
    pub q: BTreeMap<MultiIndex, RatFunc>,
    pub pivots: Vec<Pivot>,
    pub cone: Vec<Weight>,
    pub verification: Option<Verdict>,
}

impl FactorizationResult {
    pub fn solved_operator(&self) -> OpExpr {
        OpExpr::Induce { m: self.middle.clone(), l: self.middle_lower.clone(), q: self.nonzero_q() }
    }

    pub fn nonzero_q(&self) -> BTreeMap<MultiIndex, RatFunc> {
        self.q.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// Monomials `k` with `q_k != 0`.
    pub fn sparsity(&self) -> Vec<String> {
        self.nonzero_q().keys().map(|k| k.to_string()).collect()
    }

    pub fn max_nonzero_height(&self) -> i64 {
        self.nonzero_q().keys().map(|k| k.height()).max().unwrap_or(0)
    }

    /// Whether every `q_k` is a function on `h ∩ m_ss` only: invariant
    /// under translation along each block of `m` and each index outside
    /// the blocks. A rational function invariant under a unit translation
    /// is constant along it.
    pub fn in_semisimple_part(&self) -> bool {
        let n = self.n;
        let mut dirs: Vec<Vec<u8>> = self.middle.blocks.clone();
        for i in 1..=n as u8 {
            if !self.middle.blocks.iter().flatten().any(|&j| j == i) {
                dirs.push(vec![i]);
            }
        }
        self.q.values().all(|q| {
            dirs.iter().all(|d| {
                let w = Weight::from_ints(&(1..=n as u8).map(|i| i64::from(d.contains(&i))).collect::<Vec<_>>());
                q.shift(&w) == *q
            })
        })
    }

    /// Denominators of `q_k`, moved to the left Cartan side.
    pub fn formula_denominators(&self) -> Vec<Poly> {
        let n = self.n;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (k, q) in &self.q {
            let d = RatFunc::from_poly(q.denominator().clone()).shift(&k.weight(n));
            if !d.is_constant() && seen.insert(d.to_string()) {
                out.push(d.numerator().clone());
            }
        }
        out
    }
}

/// Weights whose blocks survive both reduced sides.
pub fn admissible_cone<S: Field>(real: &Realization<S>, problem: &FactorizationProblem) -> Result<Vec<Weight>> {
    let (left, right) = problem.reduced_sides();
    let mut out = Vec::new();
    for b in 0..real.num_blocks() {
        if !real.block(&left, b)?.is_zero() && !real.block(&right, b)?.is_zero() {
            out.push(real.verma.block(b).weight.clone());
        }
    }
    Ok(out)
}

/// Basis monomials of block `b` whose images under `op` are independent,
/// trying monomials on `preferred` roots first.
fn independent_images<S: Field>(real: &Realization<S>, op: &OpExpr, b: usize, preferred: &[Root]) -> Result<Vec<MultiIndex>> {
    let m = real.block(op, b)?;
    let basis = &real.verma.block(b).basis;
    let mut order: Vec<usize> = (0..basis.len()).filter(|&j| basis[j].is_supported_on(preferred)).collect();
    order.extend((0..basis.len()).filter(|&j| !basis[j].is_supported_on(preferred)));
    let mut cols: Vec<Vec<S>> = Vec::new();
    let mut chosen = Vec::new();
    for j in order {
        cols.push(m.column(j));
        let mat = Matrix::from_rows((0..m.rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect());
        if mat.rank() == cols.len() {
            chosen.push(basis[j].clone());
        } else {
            cols.pop();
        }
    }
    Ok(chosen)
}

/// First cone weight where a reduced side has an image of dimension
/// greater than one.
pub fn analyze_ambiguity<S: Field>(real: &Realization<S>, problem: &FactorizationProblem) -> Result<AmbiguityReport> {
    let cone = admissible_cone(real, problem)?;
    let (left, right) = problem.reduced_sides();
    let preferred = problem.k_roots();
    let mut rep = AmbiguityReport {
        ambiguous: false,
        weight: None,
        dimension: 1,
        side: None,
        witnesses: Vec::new(),
        cone: cone.iter().map(|w| w.to_string()).collect(),
    };
    for nu in &cone {
        let b = real.verma.block_index(nu).expect("cone weight in window");
        for (name, side) in [("right", &right), ("left", &left)] {
            let rank = real.block(side, b)?.rank();
            if rank > 1 {
                rep.ambiguous = true;
                rep.weight = Some(nu.to_string());
                rep.dimension = rank;
                rep.side = Some(name.into());
                rep.witnesses = independent_images(real, side, b, &preferred)?.iter().map(|m| m.to_string()).collect();
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

/// `P_right(F^n)` for a cone weight: the image of the first basis monomial
/// with nonzero image, after checking the image is one-dimensional.
pub fn right_image_generator(real: &Realization<RatFunc>, problem: &FactorizationProblem, nu: &Weight) -> Result<VermaVector> {
    let (_, right) = problem.reduced_sides();
    let b = real.verma.block_index(nu).ok_or_else(|| Error::Config(format!("weight {nu} outside the window")))?;
    let m = real.block(&right, b)?;
    let rank = m.rank();
    if rank != 1 {
        return Err(Error::DecompositionFailure(format!("right image at {nu} has dimension {rank}")));
    }
    let j = (0..m.cols).find(|&j| m.column(j).iter().any(|x| !x.is_zero())).expect("rank one");
    Ok(real.verma.vector_from_column(b, &m.column(j)))
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    pub verify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: Mode::Symbolic, verify: true }
    }
}

fn first_nonzero(m: &Matrix<RatFunc>) -> Option<RatFunc> {
    m.entries().find(|x| !x.is_zero()).cloned()
}

fn ambiguity_prepass(verma: &Arc<TruncatedVerma>, problem: &FactorizationProblem, mode: &Mode) -> Result<AmbiguityReport> {
    match mode {
        Mode::Symbolic => analyze_ambiguity(&Realization::<RatFunc>::new(verma.clone(), ()), problem),
        Mode::Generic { seed, .. } => {
            let (_, found) = for_generic_points(verma, *seed, 1, |real| analyze_ambiguity(real, problem).map(Some))?;
            Ok(found.expect("one trial").0)
        }
    }
}

/// Number of seeded generic points at which `h` is nonzero (poles skipped).
fn nonzero_at_points(h: &RatFunc, n: usize, seed: u64, points: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    let mut tries = 0;
    while hits < points && tries < 8 * points {
        tries += 1;
        let p: Vec<BigRational> = random_point(&mut rng, n);
        match h.eval(&p) {
            Ok(v) if v != BigRational::from_integer(0.into()) => hits += 1,
            Ok(_) => return hits,
            Err(_) => continue,
        }
    }
    hits
}

pub fn solve(problem: &FactorizationProblem, opts: &SolveOptions) -> Result<FactorizationResult> {
    problem.validate()?;
    let n = problem.n;
    let verma = Arc::new(TruncatedVerma::new(n, problem.depth)?);
    let mut result = FactorizationResult {
        n,
        status: Status::Unique,
        middle: problem.middle.clone(),
        middle_lower: problem.middle_lower.clone(),
        q: BTreeMap::new(),
        pivots: Vec::new(),
        cone: Vec::new(),
        verification: None,
    };
    let amb = ambiguity_prepass(&verma, problem, &opts.mode)?;
    result.cone = amb.cone.iter().map(|s| Weight::parse(s)).collect::<Result<_>>()?;
    if amb.ambiguous {
        result.status = Status::Ambiguous { weight: amb.weight.unwrap_or_default(), dimension: amb.dimension, witnesses: amb.witnesses };
        return Ok(result);
    }
    let real = Realization::<RatFunc>::new(verma.clone(), ());
    let target = problem.target();
    let k_roots = problem.k_roots();
    let seed = match opts.mode {
        Mode::Generic { seed, .. } => seed,
        Mode::Symbolic => 0,
    };
    for b in 0..real.num_blocks() {
        let blk = verma.block(b);
        let new_ks: Vec<MultiIndex> = blk.basis.iter().filter(|m| m.is_supported_on(&k_roots)).cloned().collect();
        if new_ks.is_empty() {
            continue;
        }
        let known = real.block(&problem.equation(OpExpr::Induce { m: problem.middle.clone(), l: problem.middle_lower.clone(), q: result.nonzero_q() }), b)?;
        let rhs = real.block(&target, b)?.sub(&known);
        let ns: Vec<Arc<Matrix<RatFunc>>> = new_ks
            .iter()
            .map(|k| {
                let q = BTreeMap::from([(k.clone(), RatFunc::one())]);
                real.block(&problem.equation(OpExpr::Induce { m: problem.middle.clone(), l: problem.middle_lower.clone(), q }), b)
            })
            .collect::<Result<_>>()?;
        // One row per matrix entry: sum_c s_c N_c[i][j] = rhs[i][j].
        let cols = new_ks.len();
        let mut rows = Vec::new();
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                let mut row: Vec<RatFunc> = ns.iter().map(|m| m.get(i, j).clone()).collect();
                row.push(rhs.get(i, j).clone());
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let weight = blk.weight.to_string();
        if rows.is_empty() {
            result.status = Status::Obstructed { weight, reason: "every pivot vanishes".into() };
            return Ok(result);
        }
        let (rr, pivots) = Matrix::from_rows(rows).rref()?;
        if pivots.contains(&cols) {
            result.status = Status::Obstructed { weight, reason: "inconsistent block equation".into() };
            return Ok(result);
        }
        if pivots.len() < cols {
            result.status = Status::Obstructed { weight, reason: "zero pivot".into() };
            return Ok(result);
        }
        for (c, k) in new_ks.iter().enumerate() {
            let r = pivots.iter().position(|&p| p == c).expect("full rank");
            let pivot = first_nonzero(&ns[c]).expect("nonzero pivot");
            let hits = if n >= 4 { nonzero_at_points(&pivot, n, seed ^ 0x9e37, 3) } else { 0 };
            result.pivots.push(Pivot { weight: weight.clone(), k: k.to_string(), pivot: pivot.to_string(), nonzero_at_points: hits });
            result.q.insert(k.clone(), rr.get(r, cols).clone());
        }
    }
    if opts.verify {
        let eq = problem.equation(result.solved_operator());
        result.verification = Some(compare(&verma, &eq, &target, &opts.mode)?);
    }
    Ok(result)
}

/// The two expectations on a factorization `P(g,l) = prod_m Q(m, l)`.
#[derive(Clone, Debug, Serialize)]
pub struct FactorizationProperties {
    /// The sets `Δ(m+) \ Δ(l+)` partition `Δ(n+) \ Δ(l+)`.
    pub partition: bool,
    pub overlaps: Vec<String>,
    pub missing: Vec<String>,
    /// Per factor: is `m` standard, and does the factor equal `P(m, l)`.
    pub standard_vs_projector: Vec<(String, bool, Option<bool>)>,
}

/// The roots a factor contributes: those of its upper algebra not in `l`.
pub fn factor_roots(op: &OpExpr, n: usize, l: &SubalgebraSpec) -> Vec<Root> {
    let upper: Vec<Root> = match op {
        OpExpr::Qt { root, .. } => vec![*root],
        OpExpr::Extremal(m) | OpExpr::Relative { m, .. } | OpExpr::Induce { m, .. } | OpExpr::Component { m, .. } => m.roots(),
        OpExpr::Direct(_) => positive_roots(n).unwrap_or_default(),
        OpExpr::Compose(v) => v.iter().flat_map(|x| factor_roots(x, n, l)).collect(),
        _ => Vec::new(),
    };
    upper.into_iter().filter(|r| !l.contains_root(*r)).collect()
}

fn upper_algebra(op: &OpExpr) -> Option<SubalgebraSpec> {
    match op {
        OpExpr::Extremal(m) | OpExpr::Relative { m, .. } | OpExpr::Induce { m, .. } => Some(m.clone()),
        OpExpr::Qt { root, .. } => SubalgebraSpec::single(&[root.i, root.j]).ok(),
        _ => None,
    }
}

pub fn factorization_properties(factors: &[OpExpr], n: usize, l: &SubalgebraSpec, depth: usize) -> Result<FactorizationProperties> {
    let mut count: BTreeMap<Root, usize> = BTreeMap::new();
    for f in factors {
        for r in factor_roots(f, n, l) {
            *count.entry(r).or_default() += 1;
        }
    }
    let want: BTreeSet<Root> = l.complement_roots(n).into_iter().collect();
    let overlaps: Vec<String> = count.iter().filter(|(_, &c)| c > 1).map(|(r, _)| r.to_string()).collect();
    let missing: Vec<String> = want.iter().filter(|r| !count.contains_key(r)).map(|r| r.to_string()).collect();
    let extra = count.keys().any(|r| !want.contains(r));
    let verma = Arc::new(TruncatedVerma::new(n, depth)?);
    let mut rows = Vec::new();
    for f in factors {
        let Some(m) = upper_algebra(f) else { continue };
        let lm = SubalgebraSpec::new(
            l.blocks.iter().filter(|b| b.iter().all(|i| m.blocks.iter().flatten().any(|j| j == i))).cloned().collect(),
        )?;
        let standard = m.is_standard();
        let same = if matches!(f, OpExpr::Induce { .. } | OpExpr::Qt { .. }) {
            Some(compare(&verma, f, &OpExpr::Relative { m: m.clone(), l: lm }, &Mode::Generic { seed: 11, trials: 1 })?.equal)
        } else {
            None
        };
        rows.push((f.to_string(), standard, same));
    }
    Ok(FactorizationProperties { partition: overlaps.is_empty() && missing.is_empty() && !extra, overlaps, missing, standard_vs_projector: rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub properties: FactorizationProperties,
}

pub fn verify_factorization(n: usize, l: &SubalgebraSpec, factors: &[OpExpr], target: &OpExpr, depth: usize, mode: &Mode) -> Result<VerificationReport> {
    let verma = Arc::new(TruncatedVerma::new(n, depth)?);
    let verdict = compare(&verma, &OpExpr::Compose(factors.to_vec()), target, mode)?;
    let properties = factorization_properties(factors, n, l, depth.min(2))?;
    Ok(VerificationReport { verdict, properties })
}

/// `D(m, l)`: per `W(l)` orbit in `Δ(m+) \ Δ(l+)` and shift `i`, the product
/// of `(H_a + i)^rho_g`.
pub fn factor_lattice(n: usize, m: &SubalgebraSpec, l: &SubalgebraSpec, bound: usize) -> Result<DenominatorLattice> {
    let mut factors = Vec::new();
    for i in 1..=bound as i64 {
        for orbit in u_plus_orbits(n, l) {
            let orbit: Vec<Root> = orbit.into_iter().filter(|r| m.contains_root(*r)).collect();
            if orbit.is_empty() {
                continue;
            }
            let p = orbit.iter().fold(Poly::one(), |a, r| {
                a.mul(RatFunc::h(r.i as usize, r.j as usize).checked_add(&RatFunc::from_int(r.height() + i)).numerator())
            });
            let label = orbit.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
            factors.push(LatticeFactor { label: format!("{{{label}}}"), shift: i.to_string(), factor: p });
        }
    }
    Ok(DenominatorLattice { n, kind: LatticeKind::Relative(l.clone()), bound, factors })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub lattice: String,
    pub q_denominators: Vec<String>,
    pub extra_factors: Vec<String>,
    pub sparsity: Vec<String>,
    pub max_nonzero_height: i64,
    pub in_semisimple_part: bool,
}

/// Which denominators of the `q_k` (moved to the left side) divide the
/// truncated `D(m, l')`. Operator entries are not compared: on non-highest
/// copies they pick up shifts by weights of `l'`.
pub fn conjecture_report(result: &FactorizationResult, depth: usize) -> Result<ConjectureReport> {
    if result.status != Status::Unique {
        return Err(Error::Config("conjecture report needs a unique solution".into()));
    }
    let lat = factor_lattice(result.n, &result.middle, &result.middle_lower, depth + 2)?;
    let q_dens = result.formula_denominators();
    let extra: Vec<String> = q_dens.iter().map(|d| lat.residual(d)).filter(|r| !r.is_constant()).map(|r| r.to_string()).collect();
    Ok(ConjectureReport {
        lattice: format!("D({},{}) up to shift {}", result.middle.label(), result.middle_lower.label(), depth + 2),
        q_denominators: q_dens.iter().map(|d| d.to_string()).collect(),
        extra_factors: extra,
        sparsity: result.sparsity(),
        max_nonzero_height: result.max_nonzero_height(),
        in_semisimple_part: result.in_semisimple_part(),
    })
}
