//! Weight operators on the truncated universal Verma module and every
//! projector construction built from them.
//!
//! An operator commuting with the right Cartan action is block diagonal by
//! weight, so it is stored as one square matrix per weight block. Entries
//! live in a [`Field`]: exact rational functions for symbolic work, or
//! rationals after specializing the universal highest weight to a point.

pub mod compare;
pub mod lattice;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::envelope::PbwElement;
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::ratfield::RatFunc;
use crate::rootsys::{is_normal_order, MultiIndex, Permutation, Q64, Root, SubalgebraSpec, Weight};
use crate::verma::TruncatedVerma;

pub use compare::{compare, Mode, Verdict, Witness};

/// A symbolic description of a weight-zero operator on `M(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpExpr {
    Identity,
    /// `Q_t(a)`: `sum_k (-1)^k/k! F^k E^k prod_{i<=k} (H_a + t + i)^-1`.
    Qt { root: Root, t: Q64 },
    /// Product of `Q_{tau(H_a)}(a)` over `order`, left to right.
    Ast { order: Vec<Root>, tau: Weight },
    /// `P(m)`: the AST product over the roots of `m` at `rho_m`.
    Extremal(SubalgebraSpec),
    /// `P(g, l)` for standard `l`, solved from its image and kernel.
    Direct(SubalgebraSpec),
    /// `P(m, l)` inside every `m`-copy, i.e. the projection keeping the
    /// top `l`-copy of each copy.
    Relative { m: SubalgebraSpec, l: SubalgebraSpec },
    /// `P(g, m, F^I)`: projection onto the copy generated by `P(m)(F^I)`.
    Component { m: SubalgebraSpec, i0: MultiIndex },
    /// Acts on the `l`-copy generated by `P(l)(F^k w)` inside the `m`-copy
    /// with highest weight vector `w`. `q_k` is the right coefficient picked
    /// up by `F^k` in the top copy; in other copies it is shifted by the
    /// copy weight, so the element of `F(h)` multiplying `P[k]` on the left
    /// is `q_k^{|k|}`. Missing `q_k` are zero.
    Induce { m: SubalgebraSpec, l: SubalgebraSpec, q: BTreeMap<MultiIndex, RatFunc> },
    /// Right multiplication by the central image `p` combined with the
    /// left Cartan factor `extra`.
    Central { p: RatFunc, extra: RatFunc },
    /// Truncated commutative product `prod_nu (Omega - p^nu)/(p - p^nu)`.
    Zhelobenko(RatFunc),
    /// Commutative product with `Z(l)` denominators acting per `l`-copy.
    RelativeCasimir { p: RatFunc, l: SubalgebraSpec },
    /// The `p_T` product for `T` in `z+(l)`.
    TPolynomial { t: Weight, l: SubalgebraSpec },
    /// `prod_{i=start}^{stop} (1 - F E / (i (H + 1 + i)))` for one root.
    Sl2Product { root: Root, start: u32, stop: u32 },
    /// `Sl2Product` from `t` over the window, times its exact tail.
    TelescopedQt { root: Root, t: u32 },
    /// Left multiplication by a weight-zero element of `U(g)`.
    Explicit(PbwElement),
    /// Shapovalov adjoint.
    Adjoint(Box<OpExpr>),
    /// `A_1 A_2 ... A_k`.
    Compose(Vec<OpExpr>),
    Sum(Vec<OpExpr>),
}

impl OpExpr {
    pub fn compose(ops: impl IntoIterator<Item = OpExpr>) -> OpExpr {
        OpExpr::Compose(ops.into_iter().collect())
    }

    pub fn qt(root: Root, t: i64) -> OpExpr {
        OpExpr::Qt { root, t: Q64::from_integer(t) }
    }

    pub fn adjoint(self) -> OpExpr {
        OpExpr::Adjoint(Box::new(self))
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpExpr::Identity => write!(f, "1"),
            OpExpr::Qt { root, t } => write!(f, "Q_{t}({root})"),
            OpExpr::Ast { order, tau } => {
                write!(f, "Q_[{tau}](")?;
                for (x, r) in order.iter().enumerate() {
                    write!(f, "{}{r}", if x > 0 { " " } else { "" })?;
                }
                write!(f, ")")
            }
            OpExpr::Extremal(m) => write!(f, "P({})", m.label()),
            OpExpr::Direct(l) => write!(f, "P(g,{})", l.label()),
            OpExpr::Relative { m, l } => write!(f, "P({},{})", m.label(), l.label()),
            OpExpr::Component { m, i0 } => write!(f, "P(g,{},{})", m.label(), i0),
            OpExpr::Induce { m, l, .. } => write!(f, "Q({},{})", m.label(), l.label()),
            OpExpr::Central { p, extra } => write!(f, "central[{p}; {extra}]"),
            OpExpr::Zhelobenko(p) => write!(f, "zhelobenko[{p}]"),
            OpExpr::RelativeCasimir { p, l } => write!(f, "casimir[{p}; {}]", l.label()),
            OpExpr::TPolynomial { t, l } => write!(f, "pT[{t}; {}]", l.label()),
            OpExpr::Sl2Product { root, start, stop } => write!(f, "prod_{start}^{stop}({root})"),
            OpExpr::TelescopedQt { root, t } => write!(f, "prod_{t}^inf({root})"),
            OpExpr::Explicit(x) => write!(f, "[{x}]"),
            OpExpr::Adjoint(a) => write!(f, "({a})*"),
            OpExpr::Compose(v) => {
                if v.is_empty() {
                    return write!(f, "1");
                }
                for (x, a) in v.iter().enumerate() {
                    write!(f, "{}{a}", if x > 0 { " . " } else { "" })?;
                }
                Ok(())
            }
            OpExpr::Sum(v) => {
                if v.is_empty() {
                    return write!(f, "0");
                }
                for (x, a) in v.iter().enumerate() {
                    write!(f, "{}{a}", if x > 0 { " + " } else { "" })?;
                }
                Ok(())
            }
        }
    }
}

/// Columns of a copy decomposition of one weight block, labelled by the
/// exponent split `(I, k, L)` of the basis monomial they replace.
#[derive(Clone, Debug)]
pub struct Decomposition<S> {
    pub labels: Vec<(MultiIndex, MultiIndex, MultiIndex)>,
    pub basis: Matrix<S>,
    pub inverse: Matrix<S>,
}

impl<S: Field> Decomposition<S> {
    /// `B diag(d) B^-1`.
    pub fn conjugate_diagonal(&self, d: &[S]) -> Matrix<S> {
        let mut bd = self.basis.clone();
        for j in 0..bd.cols {
            for i in 0..bd.rows {
                let v = bd.get(i, j).mul(&d[j]);
                bd.set(i, j, v);
            }
        }
        bd.mul(&self.inverse)
    }
}

/// Restrict a monomial's exponents to the roots selected by `keep`.
fn restrict(mi: &MultiIndex, keep: impl Fn(Root) -> bool) -> MultiIndex {
    MultiIndex::from_pairs(mi.terms().iter().copied().filter(|(r, _)| keep(*r)))
}

/// Split a monomial into its parts off `m`, on `m` but off `l`, and on `l`.
pub fn split_monomial(mi: &MultiIndex, m: &SubalgebraSpec, l: &SubalgebraSpec) -> (MultiIndex, MultiIndex, MultiIndex) {
    (
        restrict(mi, |r| !m.contains_root(r)),
        restrict(mi, |r| m.contains_root(r) && !l.contains_root(r)),
        restrict(mi, |r| l.contains_root(r)),
    )
}

type DecKey = (SubalgebraSpec, SubalgebraSpec, usize);
type ColKey = (SubalgebraSpec, SubalgebraSpec, MultiIndex, MultiIndex);

/// Evaluates [`OpExpr`]s block by block over a field `S`.
pub struct Realization<S: Field> {
    pub verma: Arc<TruncatedVerma>,
    pub ctx: S::Ctx,
    ops: Mutex<HashMap<(OpExpr, usize), Arc<Matrix<S>>>>,
    fe: Mutex<HashMap<(Root, u32, usize), Option<Arc<Matrix<S>>>>>,
    e_lift: Mutex<HashMap<(Root, usize), Option<Arc<Matrix<S>>>>>,
    f_lift: Mutex<HashMap<(Root, usize), Arc<Matrix<S>>>>,
    decomps: Mutex<HashMap<DecKey, Arc<Decomposition<S>>>>,
    hwv: Mutex<HashMap<ColKey, Arc<Vec<S>>>>,
    gram: Mutex<HashMap<usize, Arc<(Matrix<S>, Matrix<S>)>>>,
}

fn cached<K: Eq + Hash + Clone, V: Clone>(map: &Mutex<HashMap<K, V>>, key: &K, f: impl FnOnce() -> Result<V>) -> Result<V> {
    if let Some(v) = map.lock().expect("cache").get(key) {
        return Ok(v.clone());
    }
    let v = f()?;
    map.lock().expect("cache").insert(key.clone(), v.clone());
    Ok(v)
}

fn q64_int(k: i64) -> Q64 {
    Q64::from_integer(k)
}

impl<S: Field> Realization<S> {
    pub fn new(verma: Arc<TruncatedVerma>, ctx: S::Ctx) -> Self {
        Realization {
            verma,
            ctx,
            ops: Mutex::default(),
            fe: Mutex::default(),
            e_lift: Mutex::default(),
            f_lift: Mutex::default(),
            decomps: Mutex::default(),
            hwv: Mutex::default(),
            gram: Mutex::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.verma.n()
    }

    pub fn num_blocks(&self) -> usize {
        self.verma.blocks().len()
    }

    fn weight(&self, b: usize) -> &Weight {
        &self.verma.block(b).weight
    }

    fn dim(&self, b: usize) -> usize {
        self.verma.block(b).dim()
    }

    /// `h^nu` specialized into `S`.
    pub fn lift(&self, h: &RatFunc, nu: &Weight) -> Result<S> {
        S::lift(&self.ctx, h, nu)
    }

    /// A left Cartan factor `h` on block `b`: the scalar `h^{-nu}`.
    pub fn cartan_scalar(&self, h: &RatFunc, b: usize) -> Result<S> {
        self.lift(h, &self.weight(b).neg())
    }

    fn block_of(&self, nu: &Weight) -> Result<usize> {
        self.verma.block_index(nu).ok_or_else(|| Error::TruncationOverflow { height: nu.height().to_integer(), depth: self.verma.depth })
    }

    /// `E_r` from block `b` to the block of `nu - r`; `None` outside the cone.
    pub fn e_block(&self, r: Root, b: usize) -> Result<Option<Arc<Matrix<S>>>> {
        cached(&self.e_lift, &(r, b), || match self.verma.e_matrix(r, b) {
            None => Ok(None),
            Some(m) => Ok(Some(Arc::new(m.try_map(|h| self.lift(h, &Weight::zero(self.n())))?))),
        })
    }

    /// `F_r` from block `b` to the block of `nu + r`.
    pub fn f_block(&self, r: Root, b: usize) -> Result<Arc<Matrix<S>>> {
        cached(&self.f_lift, &(r, b), || Ok(Arc::new(self.verma.f_matrix(r, b)?.map(S::from_big))))
    }

    fn target_of_e(&self, r: Root, b: usize) -> Option<usize> {
        self.verma.block_index(&self.weight(b).sub(&r.weight(self.n())))
    }

    /// `F^k E^k` on block `b`, `None` once `E^k` leaves the cone.
    pub fn fe_power(&self, r: Root, k: u32, b: usize) -> Result<Option<Arc<Matrix<S>>>> {
        if k == 0 {
            return Ok(Some(Arc::new(Matrix::identity(self.dim(b)))));
        }
        cached(&self.fe, &(r, k, b), || {
            let Some(e) = self.e_block(r, b)? else { return Ok(None) };
            let b2 = self.target_of_e(r, b).expect("E target exists");
            let Some(inner) = self.fe_power(r, k - 1, b2)? else { return Ok(None) };
            let f = self.f_block(r, b2)?;
            Ok(Some(Arc::new(f.mul(&inner.mul(&e)))))
        })
    }

    /// Applies the monomial `F^mono` (reference order) to a column of block `b`.
    pub fn apply_f_monomial(&self, mono: &MultiIndex, b: usize, v: Vec<S>) -> Result<(usize, Vec<S>)> {
        let mut cur = b;
        let mut v = v;
        for r in mono.factors().into_iter().rev() {
            let f = self.f_block(r, cur)?;
            v = f.apply(&v);
            cur = self.block_of(&self.weight(cur).add(&r.weight(self.n())))?;
        }
        Ok((cur, v))
    }

    /// The full operator: one matrix per weight block.
    pub fn operator(&self, op: &OpExpr) -> Result<WeightOperator<S>> {
        let blocks = (0..self.num_blocks()).map(|b| self.block(op, b)).collect::<Result<Vec<_>>>()?;
        Ok(WeightOperator { verma: self.verma.clone(), blocks })
    }

    pub fn block(&self, op: &OpExpr, b: usize) -> Result<Arc<Matrix<S>>> {
        let key = (op.clone(), b);
        if let Some(m) = self.ops.lock().expect("cache").get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.eval_block(op, b)?);
        self.ops.lock().expect("cache").insert(key, m.clone());
        Ok(m)
    }

    fn scalar_block(&self, b: usize, s: S) -> Matrix<S> {
        Matrix::diagonal(vec![s; self.dim(b)])
    }

    fn eval_block(&self, op: &OpExpr, b: usize) -> Result<Matrix<S>> {
        let d = self.dim(b);
        let n = self.n();
        match op {
            OpExpr::Identity => Ok(Matrix::identity(d)),
            OpExpr::Qt { root, t } => self.qt_block(*root, *t, b),
            OpExpr::Ast { order, tau } => {
                if !is_normal_order(n, order)? {
                    return Err(Error::InvalidOrder(crate::rootsys::render_order(order)));
                }
                let ops: Vec<OpExpr> = order.iter().map(|&r| OpExpr::Qt { root: r, t: tau.pair(r) }).collect();
                self.product(&ops, b)
            }
            OpExpr::Extremal(m) => {
                m.validate_for(n)?;
                let ops: Vec<OpExpr> = m
                    .roots()
                    .into_iter()
                    .map(|r| OpExpr::Qt { root: r, t: q64_int(m.rho_pairing(r).expect("root of m")) })
                    .collect();
                self.product(&ops, b)
            }
            OpExpr::Direct(l) => self.direct_block(l, b),
            OpExpr::Relative { m, l } => {
                let dec = self.decomposition(m, l, b)?;
                let diag: Vec<S> = dec.labels.iter().map(|(_, k, _)| if k.is_empty() { S::one() } else { S::zero() }).collect();
                Ok(dec.conjugate_diagonal(&diag))
            }
            OpExpr::Component { m, i0 } => {
                let dec = self.decomposition(m, &SubalgebraSpec::cartan(), b)?;
                let diag: Vec<S> = dec.labels.iter().map(|(i, _, _)| if i == i0 { S::one() } else { S::zero() }).collect();
                Ok(dec.conjugate_diagonal(&diag))
            }
            OpExpr::Induce { m, l, q } => {
                let dec = self.decomposition(m, l, b)?;
                let diag = dec
                    .labels
                    .iter()
                    .map(|(i, k, _)| match q.get(k) {
                        None => Ok(S::zero()),
                        Some(qk) => self.lift(qk, &i.weight(n).neg()),
                    })
                    .collect::<Result<Vec<S>>>()?;
                Ok(dec.conjugate_diagonal(&diag))
            }
            OpExpr::Central { p, extra } => {
                if !p.is_dot_invariant(&self.verma.datum, None) {
                    return Err(Error::NotCentral(p.to_string()));
                }
                let s = self.lift(p, &Weight::zero(n))?.mul(&self.cartan_scalar(extra, b)?);
                Ok(self.scalar_block(b, s))
            }
            OpExpr::Zhelobenko(p) => self.zhelobenko_block(p, b),
            OpExpr::RelativeCasimir { p, l } => self.relative_casimir_block(p, l, b),
            OpExpr::TPolynomial { t, l } => self.t_polynomial_block(t, l, b),
            OpExpr::Sl2Product { root, start, stop } => self.sl2_product_block(*root, *start, *stop, b),
            OpExpr::TelescopedQt { root, t } => self.telescoped_block(*root, *t, b),
            OpExpr::Explicit(x) => self.explicit_block(x, b),
            OpExpr::Adjoint(a) => {
                let m = self.block(a, b)?;
                let g = self.gram(b)?;
                Ok(g.1.mul(&m.transpose()).mul(&g.0))
            }
            OpExpr::Compose(v) => self.product(v, b),
            OpExpr::Sum(v) => {
                let mut acc = Matrix::zeros(d, d);
                for a in v {
                    acc = acc.add(&*self.block(a, b)?);
                }
                Ok(acc)
            }
        }
    }

    fn product(&self, ops: &[OpExpr], b: usize) -> Result<Matrix<S>> {
        let mut acc: Option<Matrix<S>> = None;
        for a in ops.iter().rev() {
            let m = self.block(a, b)?;
            acc = Some(match acc {
                None => (*m).clone(),
                Some(x) => m.mul(&x),
            });
        }
        Ok(acc.unwrap_or_else(|| Matrix::identity(self.dim(b))))
    }

    fn qt_block(&self, root: Root, t: Q64, b: usize) -> Result<Matrix<S>> {
        let d = self.dim(b);
        let mut acc = Matrix::identity(d);
        let h = RatFunc::h(root.i as usize, root.j as usize);
        let mut coeff = RatFunc::one();
        let mut k = 1u32;
        loop {
            let Some(fe) = self.fe_power(root, k, b)? else { break };
            let shift = RatFunc::from_q64(t + q64_int(k as i64));
            coeff = coeff.checked_div(&h.checked_add(&shift))?;
            let sign_fact = BigRational::new(if k.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() }, factorial(k));
            let s = self.cartan_scalar(&coeff.scale(&sign_fact), b)?;
            acc = acc.add(&fe.scale(&s));
            k += 1;
        }
        Ok(acc)
    }

    /// The copy decomposition of block `b` for `l` inside `m`: column
    /// `(I, k, L)` is `F^L P(l)(F^k P(m)(F^I))`.
    pub fn decomposition(&self, m: &SubalgebraSpec, l: &SubalgebraSpec, b: usize) -> Result<Arc<Decomposition<S>>> {
        if !l.is_subalgebra_of(m) {
            return Err(Error::Config(format!("{} is not contained in {}", l.label(), m.label())));
        }
        m.validate_for(self.n())?;
        cached(&self.decomps, &(m.clone(), l.clone(), b), || {
            let blk = self.verma.block(b);
            let d = blk.dim();
            let mut labels = Vec::with_capacity(d);
            let mut basis = Matrix::zeros(d, d);
            for (j, mono) in blk.basis.iter().enumerate() {
                let (i, k, big_l) = split_monomial(mono, m, l);
                let w = self.copy_generator(m, l, &i, &k)?;
                let src = self.block_of(&i.plus(&k).weight(self.n()))?;
                let (tb, col) = self.apply_f_monomial(&big_l, src, (*w).clone())?;
                debug_assert_eq!(tb, b);
                for (r, v) in col.into_iter().enumerate() {
                    basis.set(r, j, v);
                }
                labels.push((i, k, big_l));
            }
            let inverse = basis
                .inverse()
                .map_err(|_| Error::DecompositionFailure(format!("copy basis for {} in {} is singular at weight {}", l.label(), m.label(), blk.weight)))?;
            Ok(Arc::new(Decomposition { labels, basis, inverse }))
        })
    }

    /// `P(l)(F^k P(m)(F^I))` as a column of the block of `|I| + |k|`.
    pub fn copy_generator(&self, m: &SubalgebraSpec, l: &SubalgebraSpec, i: &MultiIndex, k: &MultiIndex) -> Result<Arc<Vec<S>>> {
        cached(&self.hwv, &(m.clone(), l.clone(), i.clone(), k.clone()), || {
            let n = self.n();
            let bi = self.block_of(&i.weight(n))?;
            let pos = self.verma.block(bi).position(i).expect("monomial in its block");
            let w = self.block(&OpExpr::Extremal(m.clone()), bi)?.column(pos);
            let (bk, v) = self.apply_f_monomial(k, bi, w)?;
            let v = if l.is_cartan() { v } else { self.block(&OpExpr::Extremal(l.clone()), bk)?.apply(&v) };
            Ok(Arc::new(v))
        })
    }

    fn direct_block(&self, l: &SubalgebraSpec, b: usize) -> Result<Matrix<S>> {
        let n = self.n();
        l.validate_for(n)?;
        if !l.is_standard() {
            return Err(Error::NotStandard(l.label()));
        }
        let blk = self.verma.block(b);
        let d = blk.dim();
        let lroots = l.roots();
        let mut cols: Vec<Vec<BigRational>> = Vec::new();
        let mut image = 0;
        for (j, mono) in blk.basis.iter().enumerate() {
            if mono.is_supported_on(&lroots) {
                let mut e = vec![<BigRational as Zero>::zero(); d];
                e[j] = <BigRational as One>::one();
                cols.push(e);
                image += 1;
            }
        }
        let mut rank = cols.len();
        'outer: for beta in l.complement_roots(n) {
            let Some(src) = self.verma.block_index(&blk.weight.sub(&beta.weight(n))) else { continue };
            let f = self.verma.f_matrix(beta, src)?;
            for j in 0..f.cols {
                if rank == d {
                    break 'outer;
                }
                cols.push(f.column(j));
                let m = Matrix::from_rows((0..d).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect());
                let new_rank = m.rank();
                if new_rank > rank {
                    rank = new_rank;
                } else {
                    cols.pop();
                }
            }
        }
        if rank != d {
            return Err(Error::DecompositionFailure(format!("image and kernel of P(g,{}) do not span weight {}", l.label(), blk.weight)));
        }
        let bm = Matrix::from_rows((0..d).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect());
        let mut diag = vec![<BigRational as Zero>::zero(); d];
        for x in diag.iter_mut().take(image) {
            *x = <BigRational as One>::one();
        }
        let dec = Decomposition { labels: Vec::new(), inverse: bm.inverse()?, basis: bm };
        Ok(dec.conjugate_diagonal(&diag).map(S::from_big))
    }

    /// Weights of nonzero monomials in `F^I`, `I` avoiding the roots of
    /// `l`, inside the window.
    pub fn u_plus_weights(&self, l: &SubalgebraSpec) -> Vec<Weight> {
        let mut out = BTreeSet::new();
        for blk in self.verma.blocks() {
            if blk.weight.is_zero() {
                continue;
            }
            if blk.basis.iter().any(|m| m.terms().iter().all(|(r, _)| !l.contains_root(*r))) {
                out.insert(blk.weight.clone());
            }
        }
        out.into_iter().collect()
    }

    fn zhelobenko_block(&self, p: &RatFunc, b: usize) -> Result<Matrix<S>> {
        if !p.is_dot_invariant(&self.verma.datum, None) {
            return Err(Error::NotCentral(p.to_string()));
        }
        let mu = self.weight(b).clone();
        let mut factors = Vec::new();
        for nu in self.u_plus_weights(&SubalgebraSpec::cartan()) {
            let pn = p.shift(&nu);
            if p.checked_sub(&pn).is_zero() {
                return Err(Error::DegenerateCenter(format!("p - p^nu vanishes at nu = {nu}")));
            }
            let num = self.lift(p, &Weight::zero(self.n()))?.sub(&self.lift(&pn, &mu.neg())?);
            let den = self.lift(p, &mu.neg())?.sub(&self.lift(&pn, &mu.neg())?);
            factors.push((num, den));
        }
        // A vanishing factor makes the whole block zero; skip the product.
        if factors.iter().any(|(num, _)| num.is_zero()) {
            return Ok(self.scalar_block(b, S::zero()));
        }
        let mut s = S::one();
        for (num, den) in factors {
            s = s.mul(&num.div(&den)?);
        }
        Ok(self.scalar_block(b, s))
    }

    fn relative_casimir_block(&self, p: &RatFunc, l: &SubalgebraSpec, b: usize) -> Result<Matrix<S>> {
        if !l.is_standard() {
            return Err(Error::NotStandard(l.label()));
        }
        if !p.is_dot_invariant(&self.verma.datum, None) {
            return Err(Error::NotCentral(p.to_string()));
        }
        let n = self.n();
        let nus = self.u_plus_weights(l);
        for nu in &nus {
            if p.checked_sub(&p.shift(nu)).is_zero() {
                return Err(Error::DegenerateCenter(format!("p - p^nu vanishes at nu = {nu}")));
            }
        }
        let dec = self.decomposition(l, l, b)?;
        let central = self.lift(p, &Weight::zero(n))?;
        let diag = dec
            .labels
            .iter()
            .map(|(i, _, _)| {
                let w = i.weight(n).neg();
                let mut factors = Vec::new();
                for nu in &nus {
                    let pn = self.lift(&p.shift(nu), &w)?;
                    factors.push((central.sub(&pn), self.lift(p, &w)?.sub(&pn)));
                }
                if factors.iter().any(|(num, _)| num.is_zero()) {
                    return Ok(S::zero());
                }
                let mut s = S::one();
                for (num, den) in factors {
                    s = s.mul(&num.div(&den)?);
                }
                Ok(s)
            })
            .collect::<Result<Vec<S>>>()?;
        Ok(dec.conjugate_diagonal(&diag))
    }

    fn t_polynomial_block(&self, t: &Weight, l: &SubalgebraSpec, b: usize) -> Result<Matrix<S>> {
        let n = self.n();
        if !crate::rootsys::in_z_plus(t, l)? {
            return Err(Error::InvalidT(format!("{t} is not in z+({})", l.label())));
        }
        let pt = lattice::PtPolynomial::new(t, &self.verma.datum);
        let tf = pt.t_function.clone();
        let cs: BTreeSet<Q64> = self.u_plus_weights(l).iter().map(|nu| nu_on_t(nu, t)).collect();
        // Numerators: sum_k a_k (T + c)^k with a_k central, acting on the
        // block by a_k times the shifted Cartan part.
        let mut num = S::one();
        for c in &cs {
            let tc = tf.checked_add(&RatFunc::from_q64(*c));
            let mut acc = S::zero();
            let mut pow = RatFunc::one();
            for a in &pt.coefficients {
                acc = acc.add(&self.lift(a, &Weight::zero(n))?.mul(&self.cartan_scalar(&pow, b)?));
                pow = pow.checked_mul(&tc);
            }
            num = num.mul(&acc);
        }
        let dec = self.decomposition(l, l, b)?;
        let diag = dec
            .labels
            .iter()
            .map(|(i, _, _)| {
                let w = i.weight(n).neg();
                let mut s = S::one();
                for c in &cs {
                    let den = pt.eval_at(&tf.checked_add(&RatFunc::from_q64(*c)))?;
                    s = s.mul(&self.lift(&den, &w)?);
                }
                s.inv().map_err(|_| Error::InvalidT(format!("denominator vanishes on copy {i}")))
            })
            .collect::<Result<Vec<S>>>()?;
        Ok(dec.conjugate_diagonal(&diag).scale(&num))
    }

    fn sl2_factor(&self, root: Root, i: u32, b: usize) -> Result<Matrix<S>> {
        let d = self.dim(b);
        let Some(fe) = self.fe_power(root, 1, b)? else { return Ok(Matrix::identity(d)) };
        let h = RatFunc::h(root.i as usize, root.j as usize);
        let i = i as i64;
        let c = h.checked_add(&RatFunc::from_int(1 + i)).scale(&BigRational::from_integer(i.into())).inverse()?;
        Ok(Matrix::identity(d).sub(&fe.scale(&self.cartan_scalar(&c, b)?)))
    }

    fn sl2_product_block(&self, root: Root, start: u32, stop: u32, b: usize) -> Result<Matrix<S>> {
        let mut acc = Matrix::identity(self.dim(b));
        for i in start.max(1)..=stop {
            acc = acc.mul(&self.sl2_factor(root, i, b)?);
        }
        Ok(acc)
    }

    /// The finite product over the window, times the exact remainder
    /// `prod_{i>N} (i + a1)(i + a2) / (i (i + s))`, evaluated through the
    /// Gamma-ratio identity with an integer root `a1`.
    fn telescoped_block(&self, root: Root, t: u32, b: usize) -> Result<Matrix<S>> {
        if self.n() != 2 {
            return Err(Error::UnsupportedType("the telescoped form is realized for sl2 only".into()));
        }
        let stop = t + self.verma.depth as u32;
        let head = self.sl2_product_block(root, t, stop, b)?;
        let nu = self.weight(b).clone();
        let h = RatFunc::h(root.i as usize, root.j as usize);
        let s = h.shift(&nu.neg()).checked_add(&RatFunc::one());
        let c = match self.verma.e_matrix(root, b) {
            None => RatFunc::zero(),
            Some(e) => {
                let b2 = self.target_of_e(root, b).expect("E target exists");
                let f = self.verma.f_matrix(root, b2)?;
                let fe = f.map(|q| RatFunc::constant(q.clone())).mul(&e);
                fe.get(0, 0).clone()
            }
        };
        let bound = self.verma.depth as i64 + 2;
        let a1 = (-bound..=bound)
            .find(|&a| {
                let a = RatFunc::from_int(a);
                a.checked_mul(&a).checked_sub(&a.checked_mul(&s)).checked_sub(&c).is_zero()
            })
            .ok_or_else(|| Error::Internal(format!("no integer root for the tail at weight {nu}")))?;
        let big_n = RatFunc::from_int(stop as i64);
        let mut tail = RatFunc::one();
        if a1 >= 0 {
            for j in 1..=a1 {
                let num = big_n.checked_add(&s).checked_add(&RatFunc::from_int(j - a1));
                tail = tail.checked_mul(&num).checked_div(&big_n.checked_add(&RatFunc::from_int(j)))?;
            }
        } else {
            for j in 0..-a1 {
                let den = big_n.checked_add(&s).checked_add(&RatFunc::from_int(j + 1));
                tail = tail.checked_mul(&big_n.checked_add(&RatFunc::from_int(-j))).checked_div(&den)?;
            }
        }
        Ok(head.scale(&self.lift(&tail, &Weight::zero(self.n()))?))
    }

    fn explicit_block(&self, x: &PbwElement, b: usize) -> Result<Matrix<S>> {
        let n = self.n();
        if !x.is_zero() && x.weight(n) != Some(Weight::zero(n)) {
            return Err(Error::NotWeightZero);
        }
        let blk = self.verma.block(b);
        let d = blk.dim();
        let mut m = Matrix::zeros(d, d);
        for (j, mono) in blk.basis.iter().enumerate() {
            let v = self.verma.apply(x, &crate::verma::VermaVector::basis(mono.clone()))?;
            let col = self.verma.column_from_vector(b, &v)?;
            for (r, c) in col.iter().enumerate() {
                m.set(r, j, self.lift(c, &Weight::zero(n))?);
            }
        }
        Ok(m)
    }

    /// Gram matrix of the Shapovalov form on block `b` and its inverse.
    pub fn gram(&self, b: usize) -> Result<Arc<(Matrix<S>, Matrix<S>)>> {
        cached(&self.gram, &b, || {
            let g = self.verma.gram_matrix(self.weight(b))?;
            let g = g.try_map(|h| self.lift(h, &Weight::zero(self.n())))?;
            let gi = g.inverse().map_err(|_| Error::DegenerateForm(format!("Gram matrix singular at weight {}", self.weight(b))))?;
            Ok(Arc::new((g, gi)))
        })
    }
}

/// `nu(T)` for a weight `nu` in epsilon coordinates.
pub fn nu_on_t(nu: &Weight, t: &Weight) -> Q64 {
    nu.coords.iter().zip(&t.coords).fold(q64_int(0), |a, (x, y)| a + x * y)
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, x| a * BigInt::from(x))
}

/// An evaluated operator.
#[derive(Clone, Debug)]
pub struct WeightOperator<S: Field> {
    pub verma: Arc<TruncatedVerma>,
    pub blocks: Vec<Arc<Matrix<S>>>,
}

#[derive(Serialize)]
pub struct BlockJson {
    pub weight: Vec<String>,
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

impl<S: Field> WeightOperator<S> {
    pub fn depth(&self) -> usize {
        self.verma.depth
    }

    pub fn is_idempotent(&self) -> bool {
        self.blocks.iter().all(|m| m.mul(m) == **m)
    }

    pub fn compose(&self, o: &WeightOperator<S>) -> WeightOperator<S> {
        WeightOperator { verma: self.verma.clone(), blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| Arc::new(a.mul(b))).collect() }
    }

    /// Column `F^mono` of the operator, as `(basis monomial, entry)` pairs.
    pub fn apply_monomial(&self, mono: &MultiIndex) -> Result<Vec<(MultiIndex, S)>> {
        let nu = mono.weight(self.verma.n());
        let b = self.verma.block_index(&nu).ok_or(Error::TruncationOverflow { height: mono.height(), depth: self.depth() })?;
        let blk = self.verma.block(b);
        let j = blk.position(mono).expect("monomial in its block");
        Ok(blk.basis.iter().cloned().zip(self.blocks[b].column(j)).filter(|(_, v)| !v.is_zero()).collect())
    }

    /// Every entry with the weight `nu` of its block `-nu`.
    pub fn entries_with_weights(&self) -> Vec<(&S, &Weight)> {
        let mut out = Vec::new();
        for (b, m) in self.blocks.iter().enumerate() {
            let w = &self.verma.block(b).weight;
            out.extend(m.entries().map(|e| (e, w)));
        }
        out
    }

    /// Weights whose block is not identically zero.
    pub fn support(&self) -> Vec<Weight> {
        self.blocks.iter().enumerate().filter(|(_, m)| !m.is_zero()).map(|(b, _)| self.verma.block(b).weight.clone()).collect()
    }

    pub fn to_json(&self) -> Vec<BlockJson> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(b, m)| {
                let blk = self.verma.block(b);
                BlockJson {
                    weight: blk.weight.coords.iter().map(|c| c.to_string()).collect(),
                    basis: blk.basis.iter().map(|m| m.to_string()).collect(),
                    matrix: (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j).to_string()).collect()).collect(),
                }
            })
            .collect()
    }
}

/// A permutation action helper used by callers building dot orbits.
pub fn dot_orbit(h: &RatFunc, group: &[Permutation], rho: &Weight) -> Vec<RatFunc> {
    let mut out: Vec<RatFunc> = Vec::new();
    for w in group {
        let x = h.dot_act(w, rho);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}
