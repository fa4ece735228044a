//! Sparse multivariate polynomials over Q with graded-lex monomial order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const MAXV: usize = 8;

/// Exponent vector; variable `k` is `x_{k+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct Mono(pub [u16; MAXV]);

impl Mono {
    pub fn one() -> Self {
        Mono([0; MAXV])
    }

    pub fn var(v: usize) -> Self {
        let mut m = Mono::one();
        m.0[v] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut m = *self;
        for k in 0..MAXV {
            m.0[k] += o.0[k];
        }
        m
    }

    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut m = *self;
        for k in 0..MAXV {
            m.0[k] = m.0[k].checked_sub(o.0[k])?;
        }
        Some(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    terms: BTreeMap<Mono, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    /// The variable `x_{v+1}`.
    pub fn var(v: usize) -> Self {
        assert!(v < MAXV, "at most {MAXV} variables");
        let mut p = Poly::zero();
        p.terms.insert(Mono::var(v), BigRational::one());
        p
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Mono::one()).is_some_and(|c| c.is_one())
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Mono::one()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn var_mask(&self) -> u32 {
        let mut mask = 0;
        for m in self.terms.keys() {
            for k in 0..MAXV {
                if m.0[k] > 0 {
                    mask |= 1 << k;
                }
            }
        }
        mask
    }

    pub fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(*m, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(*m, -c.clone());
        }
        p
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if self.is_constant() {
            return o.scale(&self.constant_term());
        }
        if o.is_constant() {
            return self.scale(&o.constant_term());
        }
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(m1.mul(m2), c1 * c2);
            }
        }
        p
    }

    pub fn mul_term(&self, m: &Mono, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m1, c1)| (m1.mul(m), c1 * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[k].clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Substitutes `x_{k+1} -> x_{perm[k]+1} + shift[k]` for `k < perm.len()`.
    pub fn substitute_affine(&self, perm: &[usize], shift: &[BigRational]) -> Poly {
        let n = perm.len();
        if perm.iter().enumerate().all(|(k, &p)| k == p) && shift.iter().all(|s| s.is_zero()) {
            return self.clone();
        }
        let mut cache: Vec<Vec<Poly>> = vec![Vec::new(); n];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for k in 0..n {
                let e = m.0[k] as usize;
                if e == 0 {
                    continue;
                }
                let powers = &mut cache[k];
                if powers.is_empty() {
                    powers.push(Poly::one());
                }
                while powers.len() <= e {
                    let lin = Poly::var(perm[k]).add(&Poly::constant(shift[k].clone()));
                    let next = powers.last().unwrap().mul(&lin);
                    powers.push(next);
                }
                t = t.mul(&powers[e]);
            }
            for k in n..MAXV {
                assert_eq!(m.0[k], 0, "variable outside substitution range");
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if d.is_constant() {
            return Some(self.scale(&d.constant_term().recip()));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (*m, c.clone()))?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// `(self / lc, lc)` with `lc` the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.leading().map_or_else(BigRational::zero, |(_, c)| c.clone())
    }

    /// Coefficients as a polynomial in `x_{v+1}`, lowest degree first.
    pub fn to_univariate(&self, v: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let mut m2 = *m;
            let e = m2.0[v] as usize;
            m2.0[v] = 0;
            out[e].terms.insert(m2, c.clone());
        }
        out
    }

    pub fn from_univariate(v: usize, coeffs: &[Poly]) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, k) in &c.terms {
                let mut m2 = *m;
                m2.0[v] += e as u16;
                p.add_term(m2, k.clone());
            }
        }
        p
    }

    /// Divides out the rational content so that coefficients are coprime
    /// integers with positive leading coefficient.
    pub fn primitive_integer(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut k = rational_content(self.terms.values()).recip();
        if self.leading_coefficient().is_negative() {
            k = -k;
        }
        self.scale(&k)
    }

    pub fn max_abs_coefficient_bits(&self) -> u64 {
        self.terms.values().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
    }

    pub fn to_f64_constant(&self) -> Option<f64> {
        if self.is_constant() {
            self.constant_term().to_f64()
        } else {
            None
        }
    }
}

/// Positive rational `c` such that the given coefficients divided by `c` are
/// coprime integers.
pub fn rational_content<'a>(coeffs: impl Iterator<Item = &'a BigRational> + Clone) -> BigRational {
    let mut den_lcm = BigInt::one();
    for c in coeffs.clone() {
        den_lcm = num_integer::Integer::lcm(&den_lcm, c.denom());
    }
    let mut num_gcd = BigInt::zero();
    for c in coeffs {
        let v = c.numer() * (&den_lcm / c.denom());
        num_gcd = num_integer::Integer::gcd(&num_gcd, &v);
    }
    if num_gcd.is_zero() {
        return BigRational::one();
    }
    BigRational::new(num_gcd, den_lcm)
}

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().is_some_and(|p| p.is_zero()) {
        v.pop();
    }
}

fn uni_is_zero(v: &[Poly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    let lb_const = lb.is_constant();
    while r.len() > db && !uni_is_zero(&r) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lb_const {
            let k = lr.scale(&lb.constant_term().recip());
            for (i, bc) in b.iter().enumerate() {
                r[i + dr - db] = r[i + dr - db].sub(&k.mul(bc));
            }
        } else {
            for c in r.iter_mut() {
                *c = c.mul(lb);
            }
            for (i, bc) in b.iter().enumerate() {
                r[i + dr - db] = r[i + dr - db].sub(&lr.mul(bc));
            }
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        trim(&mut r);
    }
    r
}

fn primitive_part(v: &[Poly]) -> Vec<Poly> {
    let c = content(v);
    let scaled: Vec<Poly> = if c.is_constant() {
        v.to_vec()
    } else {
        v.iter().map(|p| p.div_exact(&c).expect("content divides coefficients")).collect()
    };
    let k = rational_content(scaled.iter().flat_map(|p| p.terms.values())).recip();
    scaled.iter().map(|p| p.scale(&k)).collect()
}

/// Greatest common divisor, normalized to leading coefficient 1.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let (big, small) = if a.total_degree() >= b.total_degree() { (a, b) } else { (b, a) };
    if big.div_exact(small).is_some() {
        return small.monic();
    }
    let ma = a.var_mask();
    let mb = b.var_mask();
    let v = 31 - (ma | mb).leading_zeros() as usize;
    if ma & (1 << v) == 0 {
        return gcd(a, &content(&b.to_univariate(v)));
    }
    if mb & (1 << v) == 0 {
        return gcd(&content(&a.to_univariate(v)), b);
    }
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = content(&ua);
    let cb = content(&ub);
    let gc = gcd(&ca, &cb);
    let div_all = |u: &[Poly], c: &Poly| -> Vec<Poly> {
        if c.is_constant() {
            u.to_vec()
        } else {
            u.iter().map(|p| p.div_exact(c).expect("content divides")).collect()
        }
    };
    let mut p = div_all(&ua, &ca);
    let mut q = div_all(&ub, &cb);
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = pseudo_rem(&p, &q);
        if uni_is_zero(&r) {
            break;
        }
        if r.len() == 1 {
            return gc.monic();
        }
        p = q;
        q = primitive_part(&r);
    }
    let g = Poly::from_univariate(v, &primitive_part(&q));
    g.mul(&gc).monic()
}

fn fmt_coeff_mono(f: &mut fmt::Formatter<'_>, c: &BigRational, m: &Mono, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let mut parts = Vec::new();
    if m.is_one() || !a.is_one() {
        parts.push(a.to_string());
    }
    for (k, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", k + 1)),
            _ => parts.push(format!("x{}^{}", k + 1, e)),
        }
    }
    write!(f, "{}", parts.join("*"))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            fmt_coeff_mono(f, c, m, idx == 0)?;
        }
        Ok(())
    }
}
