//! The universal Verma module truncated by weight height, with vectors
//! written `sum F^I c_I` (coefficients on the right).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;

use crate::envelope::PbwElement;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ratfield::RatFunc;
use crate::rootsys::{MultiIndex, Root, RootDatum, Weight};

#[derive(Clone, Debug)]
pub struct Block {
    pub weight: Weight,
    pub height: i64,
    pub basis: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.index.get(m).copied()
    }
}

type EKey = (Root, usize);

/// `M(g)` restricted to weights `-nu` with `height(nu) <= depth`.
#[derive(Debug)]
pub struct TruncatedVerma {
    pub datum: RootDatum,
    pub depth: usize,
    blocks: Vec<Block>,
    by_weight: BTreeMap<Weight, usize>,
    e_cache: Mutex<HashMap<EKey, Arc<Matrix<RatFunc>>>>,
    f_cache: Mutex<HashMap<EKey, Arc<Matrix<BigRational>>>>,
}

impl TruncatedVerma {
    pub fn new(n: usize, depth: usize) -> Result<Self> {
        let datum = RootDatum::new(n)?;
        let mut groups: BTreeMap<(i64, Weight), Vec<MultiIndex>> = BTreeMap::new();
        fn rec(roots: &[Root], cur: &MultiIndex, budget: i64, n: usize, out: &mut BTreeMap<(i64, Weight), Vec<MultiIndex>>) {
            let Some((&r, rest)) = roots.split_first() else {
                out.entry((cur.height(), cur.weight(n))).or_default().push(cur.clone());
                return;
            };
            let mut m = cur.clone();
            let mut b = budget;
            loop {
                rec(rest, &m, b, n, out);
                b -= r.height();
                if b < 0 {
                    break;
                }
                m.add_power(r, 1);
            }
        }
        rec(&datum.positive_roots, &MultiIndex::empty(), depth as i64, n, &mut groups);
        let mut blocks = Vec::new();
        let mut by_weight = BTreeMap::new();
        for ((height, weight), mut basis) in groups {
            basis.sort();
            let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            by_weight.insert(weight.clone(), blocks.len());
            blocks.push(Block { weight, height, basis, index });
        }
        Ok(TruncatedVerma { datum, depth, blocks, by_weight, e_cache: Mutex::default(), f_cache: Mutex::default() })
    }

    pub fn n(&self) -> usize {
        self.datum.n
    }

    /// Blocks in (height, weight) order.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, idx: usize) -> &Block {
        &self.blocks[idx]
    }

    pub fn block_index(&self, nu: &Weight) -> Option<usize> {
        self.by_weight.get(nu).copied()
    }

    pub fn dim(&self, nu: &Weight) -> usize {
        self.block_index(nu).map_or(0, |b| self.blocks[b].dim())
    }

    fn check_height(&self, m: &MultiIndex) -> Result<()> {
        if m.height() > self.depth as i64 {
            return Err(Error::TruncationOverflow { height: m.height(), depth: self.depth });
        }
        Ok(())
    }

    /// Matrix of `E_r` from block `b` to the block of weight `nu - r`;
    /// `None` when that weight lies outside the positive cone.
    pub fn e_matrix(&self, r: Root, b: usize) -> Option<Arc<Matrix<RatFunc>>> {
        if let Some(m) = self.e_cache.lock().expect("cache").get(&(r, b)) {
            return Some(m.clone());
        }
        let src = &self.blocks[b];
        let tgt_w = src.weight.sub(&r.weight(self.n()));
        let tb = self.block_index(&tgt_w)?;
        let tgt = &self.blocks[tb];
        let mut m = Matrix::zeros(tgt.dim(), src.dim());
        for (j, mi) in src.basis.iter().enumerate() {
            let prod = PbwElement::f_mono(mi.clone()).left_e(r);
            for (f, e, h) in prod.terms() {
                if e.is_empty() {
                    let i = tgt.position(f).expect("E lowers the weight inside the cone");
                    m.set(i, j, h.clone());
                }
            }
        }
        let m = Arc::new(m);
        self.e_cache.lock().expect("cache").insert((r, b), m.clone());
        Some(m)
    }

    /// Matrix of `F_r` from block `b` to the block of weight `nu + r`.
    pub fn f_matrix(&self, r: Root, b: usize) -> Result<Arc<Matrix<BigRational>>> {
        if let Some(m) = self.f_cache.lock().expect("cache").get(&(r, b)) {
            return Ok(m.clone());
        }
        let src = &self.blocks[b];
        let tgt_w = src.weight.add(&r.weight(self.n()));
        let Some(tb) = self.block_index(&tgt_w) else {
            return Err(Error::TruncationOverflow { height: src.height + r.height(), depth: self.depth });
        };
        let tgt = &self.blocks[tb];
        let mut m = Matrix::zeros(tgt.dim(), src.dim());
        for (j, mi) in src.basis.iter().enumerate() {
            let prod = PbwElement::f_mono(mi.clone()).left_f(r);
            for (f, _, h) in prod.terms() {
                let i = tgt.position(f).expect("F raises the weight inside the window");
                m.set(i, j, h.constant_value().expect("F acts by constants"));
            }
        }
        let m = Arc::new(m);
        self.f_cache.lock().expect("cache").insert((r, b), m.clone());
        Ok(m)
    }

    /// Left action of `elem` followed by reduction modulo `F(g) n+`.
    pub fn apply(&self, elem: &PbwElement, v: &VermaVector) -> Result<VermaVector> {
        let mut out = VermaVector::zero();
        for (k, c) in &v.coeffs {
            self.check_height(k)?;
            let prod = elem.mul(&PbwElement::f_mono(k.clone()));
            for (f, e, h) in prod.terms() {
                if !e.is_empty() {
                    continue;
                }
                self.check_height(f)?;
                out.add_term(f.clone(), h.checked_mul(c));
            }
        }
        Ok(out)
    }

    /// `<F^I, F^J>`: the coefficient of `1` in `star(F^I) F^J 1`.
    pub fn shapovalov_basis(&self, i: &MultiIndex, j: &MultiIndex) -> Result<RatFunc> {
        let n = self.n();
        if i.weight(n) != j.weight(n) {
            return Ok(RatFunc::zero());
        }
        let s = PbwElement::f_mono(i.clone()).star();
        let v = self.apply(&s, &VermaVector::basis(j.clone()))?;
        Ok(v.coefficient(&MultiIndex::empty()))
    }

    pub fn shapovalov(&self, u: &VermaVector, v: &VermaVector) -> Result<RatFunc> {
        let mut total = RatFunc::zero();
        for (i, a) in &u.coeffs {
            for (j, b) in &v.coeffs {
                let g = self.shapovalov_basis(i, j)?;
                if !g.is_zero() {
                    total = total.checked_add(&g.checked_mul(a).checked_mul(b));
                }
            }
        }
        Ok(total)
    }

    pub fn gram_matrix(&self, nu: &Weight) -> Result<Matrix<RatFunc>> {
        let b = self.block_index(nu).ok_or_else(|| Error::Config(format!("weight {nu} outside the window")))?;
        let basis = &self.blocks[b].basis;
        let d = basis.len();
        let mut g = Matrix::zeros(d, d);
        for x in 0..d {
            for y in x..d {
                let v = self.shapovalov_basis(&basis[x], &basis[y])?;
                g.set(y, x, v.clone());
                g.set(x, y, v);
            }
        }
        Ok(g)
    }

    /// Vector with coefficients taken from column `col` of a block matrix.
    pub fn vector_from_column(&self, b: usize, col: &[RatFunc]) -> VermaVector {
        let mut v = VermaVector::zero();
        for (m, c) in self.blocks[b].basis.iter().zip(col) {
            v.add_term(m.clone(), c.clone());
        }
        v
    }

    pub fn column_from_vector(&self, b: usize, v: &VermaVector) -> Result<Vec<RatFunc>> {
        let blk = &self.blocks[b];
        let mut col = vec![RatFunc::zero(); blk.dim()];
        for (m, c) in &v.coeffs {
            let i = blk.position(m).ok_or_else(|| Error::Internal(format!("{m} is not in block {}", blk.weight)))?;
            col[i] = c.clone();
        }
        Ok(col)
    }
}

/// `sum_I F^I c_I`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VermaVector {
    pub coeffs: BTreeMap<MultiIndex, RatFunc>,
}

impl VermaVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(m: MultiIndex) -> Self {
        let mut v = Self::zero();
        v.add_term(m, RatFunc::one());
        v
    }

    pub fn highest() -> Self {
        Self::basis(MultiIndex::empty())
    }

    pub fn add_term(&mut self, m: MultiIndex, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let sum = self.coefficient(&m).checked_add(&c);
        if sum.is_zero() {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, sum);
        }
    }

    pub fn coefficient(&self, m: &MultiIndex) -> RatFunc {
        self.coeffs.get(m).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &VermaVector) -> VermaVector {
        let mut v = self.clone();
        for (m, c) in &o.coeffs {
            v.add_term(m.clone(), c.clone());
        }
        v
    }

    pub fn scale(&self, c: &RatFunc) -> VermaVector {
        let mut v = Self::zero();
        for (m, x) in &self.coeffs {
            v.add_term(m.clone(), x.checked_mul(c));
        }
        v
    }

    pub fn weight(&self, n: usize) -> Option<Weight> {
        let ws: Vec<Weight> = self.coeffs.keys().map(|m| m.weight(n)).collect();
        match ws.first() {
            None => None,
            Some(w) if ws.iter().all(|x| x == w) => Some(w.clone()),
            Some(_) => None,
        }
    }
}

impl fmt::Display for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(m, c)| format!("{m}*({c})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::kostant_partition_count;

    fn rf(s: &str) -> RatFunc {
        RatFunc::parse(s).unwrap()
    }

    #[test]
    fn sl2_action_and_form() {
        let m = TruncatedVerma::new(2, 3).unwrap();
        let a = Root::new(1, 2);
        let v = m.apply(&PbwElement::e(a), &VermaVector::basis(MultiIndex::single(a))).unwrap();
        assert_eq!(v, VermaVector::highest().scale(&rf("x1 - x2")));
        assert!(m.apply(&PbwElement::e(a), &VermaVector::highest()).unwrap().is_zero());
        let h = rf("x1^2 - 3*x2");
        let f = MultiIndex::single(a);
        let v = m.apply(&PbwElement::cartan(h.clone()), &VermaVector::basis(f.clone())).unwrap();
        assert_eq!(v, VermaVector::basis(f.clone()).scale(&h.shift(&a.weight(2).neg())));
        assert_eq!(m.shapovalov_basis(&f, &f).unwrap(), rf("x1 - x2"));
        assert!(m.shapovalov_basis(&MultiIndex::empty(), &MultiIndex::empty()).unwrap().is_one());
        assert!(m.shapovalov_basis(&f, &MultiIndex::parse("F12^2").unwrap()).unwrap().is_zero());
    }

    #[test]
    fn block_dimensions_match_kostant() {
        let m = TruncatedVerma::new(4, 4).unwrap();
        for b in m.blocks() {
            assert_eq!(b.dim() as u64, kostant_partition_count(4, &b.weight).unwrap());
        }
        assert_eq!(m.blocks()[0].dim(), 1);
    }

    #[test]
    fn overflow_is_an_error() {
        let m = TruncatedVerma::new(2, 1).unwrap();
        let a = Root::new(1, 2);
        let r = m.apply(&PbwElement::f(a), &VermaVector::basis(MultiIndex::single(a)));
        assert!(matches!(r, Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn sl3_gram_is_symmetric_and_nondegenerate() {
        let m = TruncatedVerma::new(3, 3).unwrap();
        for b in m.blocks() {
            let g = m.gram_matrix(&b.weight).unwrap();
            assert_eq!(g, g.transpose());
            assert!(!g.determinant().unwrap().is_zero());
        }
    }
}
