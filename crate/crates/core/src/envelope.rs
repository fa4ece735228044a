//! Finite elements `sum F^I h_IJ E^J` of the extended enveloping algebra of
//! gl_n, normal ordered in the reference root order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ratfield::{RatFunc, MAXV};
use crate::rootsys::{MultiIndex, Root, Weight};

/// Weight of a multi-index padded to `MAXV` coordinates, so that shifts do not
/// depend on the rank.
fn full_weight(m: &MultiIndex) -> Weight {
    m.weight(MAXV)
}

fn shift_padded(h: &RatFunc, nu: &Weight) -> RatFunc {
    h.shift(nu)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PbwElement {
    terms: BTreeMap<(MultiIndex, MultiIndex), RatFunc>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Memo {
    FF(Root),
    EE(Root),
    EF(Root),
}

type MemoTable = HashMap<(Memo, MultiIndex), PbwElement>;

fn memo() -> &'static Mutex<MemoTable> {
    static M: OnceLock<Mutex<MemoTable>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

fn memo_get(k: &(Memo, MultiIndex)) -> Option<PbwElement> {
    memo().lock().expect("memo lock").get(k).cloned()
}

fn memo_put(k: (Memo, MultiIndex), v: PbwElement) {
    memo().lock().expect("memo lock").insert(k, v);
}

impl PbwElement {
    pub fn zero() -> Self {
        PbwElement { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::cartan(RatFunc::one())
    }

    pub fn cartan(h: RatFunc) -> Self {
        Self::term(MultiIndex::empty(), h, MultiIndex::empty())
    }

    pub fn term(f: MultiIndex, h: RatFunc, e: MultiIndex) -> Self {
        let mut p = Self::zero();
        p.add_term(f, e, h);
        p
    }

    pub fn f_mono(f: MultiIndex) -> Self {
        Self::term(f, RatFunc::one(), MultiIndex::empty())
    }

    pub fn e_mono(e: MultiIndex) -> Self {
        Self::term(MultiIndex::empty(), RatFunc::one(), e)
    }

    pub fn f(r: Root) -> Self {
        Self::f_mono(MultiIndex::single(r))
    }

    pub fn e(r: Root) -> Self {
        Self::e_mono(MultiIndex::single(r))
    }

    /// The matrix unit `e_ab` (1-based).
    pub fn unit(a: usize, b: usize) -> Self {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Self::e(Root::new(a, b)),
            std::cmp::Ordering::Greater => Self::f(Root::new(b, a)),
            std::cmp::Ordering::Equal => Self::cartan(RatFunc::x(a)),
        }
    }

    pub fn add_term(&mut self, f: MultiIndex, e: MultiIndex, h: RatFunc) {
        if h.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((f, e)) {
            Entry::Vacant(v) => {
                v.insert(h);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().checked_add(&h);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &RatFunc)> {
        self.terms.iter().map(|((f, e), h)| (f, e, h))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, f: &MultiIndex, e: &MultiIndex) -> RatFunc {
        self.terms.get(&(f.clone(), e.clone())).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn add(&self, o: &PbwElement) -> PbwElement {
        let mut p = self.clone();
        p.add_assign(o);
        p
    }

    pub fn add_assign(&mut self, o: &PbwElement) {
        for ((f, e), h) in &o.terms {
            self.add_term(f.clone(), e.clone(), h.clone());
        }
    }

    pub fn sub(&self, o: &PbwElement) -> PbwElement {
        self.add(&o.scale(&BigRational::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &BigRational) -> PbwElement {
        if c.is_zero() {
            return Self::zero();
        }
        PbwElement { terms: self.terms.iter().map(|(k, h)| (k.clone(), h.scale(c))).collect() }
    }

    /// Right multiplication of every coefficient by a Cartan element placed
    /// between the F and E parts: `F^I h E^J -> F^I (h g) E^J`.
    pub fn mul_middle(&self, g: &RatFunc) -> PbwElement {
        let mut p = Self::zero();
        for ((f, e), h) in &self.terms {
            p.add_term(f.clone(), e.clone(), h.checked_mul(g));
        }
        p
    }

    /// ad-h weight of every term; `None` if the element is not homogeneous.
    pub fn weight(&self, n: usize) -> Option<Weight> {
        let mut w: Option<Weight> = None;
        for (f, e) in self.terms.keys() {
            let t = e.weight(n).sub(&f.weight(n));
            match &w {
                None => w = Some(t),
                Some(x) if *x == t => {}
                Some(_) => return None,
            }
        }
        Some(w.unwrap_or_else(|| Weight::zero(n)))
    }

    pub fn mul(&self, o: &PbwElement) -> PbwElement {
        let mut out = Self::zero();
        for ((fi, ej), h) in &self.terms {
            // h * (E^J * o), then F^I on the left
            let mut x = o.clone();
            for r in ej.factors().into_iter().rev() {
                x = x.left_e(r);
            }
            let mut y = Self::zero();
            for ((fa, eb), g) in &x.terms {
                let hs = shift_padded(h, &full_weight(fa).neg());
                y.add_term(fa.clone(), eb.clone(), hs.checked_mul(g));
            }
            for r in fi.factors().into_iter().rev() {
                y = y.left_f(r);
            }
            out.add_assign(&y);
        }
        out
    }

    /// `F_r * self`.
    pub fn left_f(&self, r: Root) -> PbwElement {
        let mut out = Self::zero();
        for ((fa, eb), h) in &self.terms {
            for ((fc, _), c) in &ff(r, fa).terms {
                out.add_term(fc.clone(), eb.clone(), c.checked_mul(h));
            }
        }
        out
    }

    /// `E_r * self`.
    pub fn left_e(&self, r: Root) -> PbwElement {
        let mut out = Self::zero();
        for ((fa, eb), h) in &self.terms {
            for ((fc, ed), g) in &ef(r, fa).terms {
                let hs = shift_padded(h, &full_weight(ed).neg());
                let coeff = g.checked_mul(&hs);
                if ed.is_empty() {
                    out.add_term(fc.clone(), eb.clone(), coeff);
                } else {
                    let mut ee_prod = PbwElement::e_mono(eb.clone());
                    for s in ed.factors().into_iter().rev() {
                        ee_prod = ee_prod.left_e_pure(s);
                    }
                    for ((_, ef2), c) in &ee_prod.terms {
                        out.add_term(fc.clone(), ef2.clone(), coeff.checked_mul(c));
                    }
                }
            }
        }
        out
    }

    /// `E_r * self` for an element with only E parts and constant coefficients.
    fn left_e_pure(&self, r: Root) -> PbwElement {
        let mut out = Self::zero();
        for ((_, eb), h) in &self.terms {
            for ((_, ed), c) in &ee(r, eb).terms {
                out.add_term(MultiIndex::empty(), ed.clone(), c.checked_mul(h));
            }
        }
        out
    }

    /// `e_ab * self` for an arbitrary matrix unit.
    pub fn left_unit(&self, a: usize, b: usize) -> PbwElement {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.left_e(Root::new(a, b)),
            std::cmp::Ordering::Greater => self.left_f(Root::new(b, a)),
            std::cmp::Ordering::Equal => PbwElement::cartan(RatFunc::x(a)).mul(self),
        }
    }

    /// Hermitian anti-involution: `E_a <-> F_a` on simple roots, identity on h.
    pub fn star(&self) -> PbwElement {
        let mut out = Self::zero();
        for ((fi, ej), h) in &self.terms {
            let mut acc = PbwElement::one();
            for r in ej.factors().into_iter().rev() {
                acc = acc.mul(&star_e(r));
            }
            acc = acc.mul(&PbwElement::cartan(h.clone()));
            for r in fi.factors().into_iter().rev() {
                acc = acc.mul(&star_e(r).star_swap());
            }
            out.add_assign(&acc);
        }
        out
    }

    // star(F_r) is obtained from star(E_r) by exchanging E and F parts, which
    // is valid for the single root vectors produced by `star_e`.
    fn star_swap(&self) -> PbwElement {
        let mut out = Self::zero();
        for ((f, e), h) in &self.terms {
            out.add_term(e.clone(), f.clone(), h.clone());
        }
        out
    }

    /// Harish-Chandra projection along `(n- U n+)_0`.
    pub fn hc_project(&self, n: usize) -> Result<RatFunc> {
        if self.terms.keys().any(|(f, e)| f.weight(n) != e.weight(n)) {
            return Err(Error::NotWeightZero);
        }
        Ok(self.coefficient(&MultiIndex::empty(), &MultiIndex::empty()))
    }

    pub fn commutator(&self, o: &PbwElement) -> PbwElement {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn parse(s: &str) -> Result<PbwElement> {
        let mut out = Self::zero();
        for (sign, term) in split_sum(s)? {
            let mut acc = PbwElement::one();
            for factor in split_top(&term, '*') {
                acc = acc.mul(&parse_factor(&factor)?);
            }
            if sign < 0 {
                acc = acc.scale(&BigRational::from_integer((-1).into()));
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }
}

fn star_e(r: Root) -> PbwElement {
    // star(E_ij) = [star(E_{i+1,j}), star(E_{i,i+1})]
    if r.is_simple() {
        return PbwElement::f(r);
    }
    let a = Root::new(r.i as usize, r.i as usize + 1);
    let b = Root::new(r.i as usize + 1, r.j as usize);
    star_e(b).commutator(&star_e(a))
}

/// `F_r F^A` as a combination of normal-ordered F monomials.
fn ff(r: Root, a: &MultiIndex) -> PbwElement {
    let key = (Memo::FF(r), a.clone());
    if let Some(v) = memo_get(&key) {
        return v;
    }
    let res = match a.split_first() {
        Some((s, rest)) if s < r => {
            // F_r F_s A' = F_s (F_r A') + [F_r, F_s] A'
            let mut out = ff(r, &rest).left_f(s);
            if let Some((c, t)) = bracket_ff(r, s) {
                out.add_assign(&ff(t, &rest).scale(&BigRational::from_integer(c.into())));
            }
            out
        }
        _ => PbwElement::f_mono(a.with_root(r)),
    };
    memo_put(key, res.clone());
    res
}

/// `E_r E^B` in normal order.
fn ee(r: Root, b: &MultiIndex) -> PbwElement {
    let key = (Memo::EE(r), b.clone());
    if let Some(v) = memo_get(&key) {
        return v;
    }
    let res = match b.split_first() {
        Some((s, rest)) if s < r => {
            let mut out = ee(r, &rest).left_e_pure(s);
            if let Some((c, t)) = bracket_ee(r, s) {
                out.add_assign(&ee(t, &rest).scale(&BigRational::from_integer(c.into())));
            }
            out
        }
        _ => PbwElement::e_mono(b.with_root(r)),
    };
    memo_put(key, res.clone());
    res
}

/// `E_r F^A` in normal order.
fn ef(r: Root, a: &MultiIndex) -> PbwElement {
    let key = (Memo::EF(r), a.clone());
    if let Some(v) = memo_get(&key) {
        return v;
    }
    let res = match a.split_first() {
        None => PbwElement::e(r),
        Some((s, rest)) => {
            // E_r F_s A' = F_s (E_r A') + [E_r, F_s] A'
            let mut out = ef(r, &rest).left_f(s);
            let rest_el = PbwElement::f_mono(rest.clone());
            let (i, j) = (r.i as usize, r.j as usize);
            let (k, l) = (s.i as usize, s.j as usize);
            // [e_ij, e_lk] = d_jl e_ik - d_ki e_lj
            if j == l {
                out.add_assign(&rest_el.left_unit(i, k));
            }
            if k == i {
                out.add_assign(&rest_el.left_unit(l, j).scale(&BigRational::from_integer((-1).into())));
            }
            out
        }
    };
    memo_put(key, res.clone());
    res
}

/// `[F_r, F_s] = c F_t`.
fn bracket_ff(r: Root, s: Root) -> Option<(i64, Root)> {
    // F_r = e_{j_r i_r}; [e_ab, e_cd] = d_bc e_ad - d_da e_cb
    let (a, b) = (r.j, r.i);
    let (c, d) = (s.j, s.i);
    if b == c {
        Some((1, Root::new(d as usize, a as usize)))
    } else if d == a {
        Some((-1, Root::new(b as usize, c as usize)))
    } else {
        None
    }
}

/// `[E_r, E_s] = c E_t`.
fn bracket_ee(r: Root, s: Root) -> Option<(i64, Root)> {
    let (a, b) = (r.i, r.j);
    let (c, d) = (s.i, s.j);
    if b == c {
        Some((1, Root::new(a as usize, d as usize)))
    } else if d == a {
        Some((-1, Root::new(c as usize, b as usize)))
    } else {
        None
    }
}

fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    out.push(cur.trim().to_string());
    out
}

fn split_sum(s: &str) -> Result<Vec<(i32, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign = 1;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let is_split = (ch == '+' || ch == '-') && depth == 0 && !matches!(prev, Some('^') | Some('*') | None);
        if is_split {
            if !cur.trim().is_empty() {
                out.push((sign, cur.trim().to_string()));
            }
            cur.clear();
            sign = if ch == '-' { -1 } else { 1 };
            prev = None;
            continue;
        }
        if ch == '-' && prev.is_none() && depth == 0 && cur.trim().is_empty() {
            sign = -sign;
            continue;
        }
        cur.push(ch);
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    if !cur.trim().is_empty() {
        out.push((sign, cur.trim().to_string()));
    }
    if out.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    Ok(out)
}

fn parse_factor(t: &str) -> Result<PbwElement> {
    let t = t.trim();
    let (base, exp) = match t.rsplit_once('^') {
        Some((b, e)) if !b.ends_with(')') && (b.starts_with('F') || b.starts_with('E') || b.starts_with('H')) => {
            (b.trim(), e.trim().parse::<u32>().map_err(|_| Error::Parse(t.into()))?)
        }
        _ => (t, 1),
    };
    let gen = if let Some(d) = base.strip_prefix('F') {
        Some(PbwElement::f(Root::parse(d)?))
    } else if let Some(d) = base.strip_prefix('E') {
        Some(PbwElement::e(Root::parse(d)?))
    } else if let Some(d) = base.strip_prefix('H') {
        let r = Root::parse(d)?;
        Some(PbwElement::cartan(RatFunc::h(r.i as usize, r.j as usize)))
    } else {
        None
    };
    match gen {
        Some(g) => Ok((0..exp).fold(PbwElement::one(), |acc, _| acc.mul(&g))),
        None => Ok(PbwElement::cartan(RatFunc::parse(t)?)),
    }
}

impl fmt::Display for PbwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((fi, ej), h)| {
                let mut fs = Vec::new();
                if !fi.is_empty() {
                    fs.push(fi.monomial_string('F').replace('*', " * "));
                }
                if !h.is_one() || (fi.is_empty() && ej.is_empty()) {
                    fs.push(format!("({h})"));
                }
                if !ej.is_empty() {
                    fs.push(ej.monomial_string('E').replace('*', " * "));
                }
                fs.join(" * ")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A central element with its cached Harish-Chandra image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralElement {
    pub expression: PbwElement,
    pub hc_image: RatFunc,
}

impl CentralElement {
    pub fn from_expression(n: usize, expression: PbwElement) -> Result<Self> {
        let hc_image = expression.hc_project(n)?;
        Ok(CentralElement { expression, hc_image })
    }
}

/// `Omega_2 = sum_ab e_ab e_ba`.
pub fn casimir_omega2(n: usize) -> Result<CentralElement> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    let mut z = PbwElement::zero();
    for a in 1..=n {
        for b in 1..=n {
            z.add_assign(&PbwElement::unit(b, a).left_unit(a, b));
        }
    }
    CentralElement::from_expression(n, z)
}

/// `Omega_3 = sum_abc e_ab e_bc e_ca`.
pub fn casimir_omega3(n: usize) -> Result<CentralElement> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    let mut z = PbwElement::zero();
    for a in 1..=n {
        for b in 1..=n {
            for c in 1..=n {
                z.add_assign(&PbwElement::unit(c, a).left_unit(b, c).left_unit(a, b));
            }
        }
    }
    CentralElement::from_expression(n, z)
}

/// `sum_a x_a^2 + sum_{a<b} (x_a - x_b)`.
pub fn omega2_hc_formula(n: usize) -> RatFunc {
    let mut h = RatFunc::zero();
    for a in 1..=n {
        h = h.checked_add(&RatFunc::x(a).checked_mul(&RatFunc::x(a)));
        for b in a + 1..=n {
            h = h.checked_add(&RatFunc::h(a, b));
        }
    }
    h
}

pub fn one_rational() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PbwElement {
        PbwElement::parse(s).unwrap()
    }

    #[test]
    fn sl2_commutation() {
        assert_eq!(p("E12 * F12"), p("F12 * E12 + (x1 - x2)"));
        assert_eq!(p("E12 * F12").hc_project(2).unwrap(), RatFunc::parse("x1 - x2").unwrap());
        assert!(p("F12 * E12").hc_project(2).unwrap().is_zero());
        assert_eq!(p("E12").hc_project(2), Err(Error::NotWeightZero));
    }

    #[test]
    fn sl3_structure_constants() {
        assert_eq!(p("E12 * E23 - E23 * E12"), p("E13"));
        assert_eq!(p("F23 * F12 - F12 * F23"), p("F13"));
        let h = RatFunc::parse("x1^2 + 3*x3").unwrap();
        let lhs = PbwElement::cartan(h.clone()).mul(&p("F12"));
        let nu = Root::new(1, 2).weight(3).neg();
        assert_eq!(lhs, PbwElement::term(MultiIndex::parse("F12").unwrap(), h.shift(&nu), MultiIndex::empty()));
    }

    #[test]
    fn star_examples() {
        assert_eq!(p("E12").star(), p("F12"));
        assert_eq!(p("F12 * E23").star(), p("F23 * E12"));
        assert_eq!(p("E13").star(), p("F13"));
        let a = p("F12 * (x1 + 1/x2) * E13 + F23^2");
        assert_eq!(a.star().star(), a);
    }

    #[test]
    fn casimir_hc_images() {
        for n in 2..=3 {
            let z = casimir_omega2(n).unwrap();
            assert_eq!(z.hc_image, omega2_hc_formula(n));
            for r in crate::rootsys::positive_roots(n).unwrap() {
                assert!(z.expression.commutator(&PbwElement::e(r)).is_zero());
                assert!(z.expression.commutator(&PbwElement::f(r)).is_zero());
            }
        }
        assert_eq!(casimir_omega2(2).unwrap().hc_image, RatFunc::parse("x1^2 + x2^2 + x1 - x2").unwrap());
    }

    #[test]
    fn display_round_trip() {
        let a = p("F12^2 * (x1-x2)^-1 * E13 + 3");
        assert_eq!(p(&a.to_string()), a);
    }
}
