//! Exact rational functions in the Cartan coordinates `x1..xn`.

mod parse;
pub mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rootsys::{Permutation, Q64, RootDatum, SubalgebraSpec, Weight};
pub use poly::{gcd, Mono, Poly, MAXV};

pub fn q64_to_big(q: Q64) -> BigRational {
    BigRational::new((*q.numer()).into(), (*q.denom()).into())
}

/// A reduced fraction with monic denominator; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::from_int(c))
    }

    pub fn from_q64(c: Q64) -> Self {
        Self::constant(q64_to_big(c))
    }

    /// The coordinate `x_k` (1-based).
    pub fn x(k: usize) -> Self {
        Self::from_poly(Poly::var(k - 1))
    }

    /// `H_ij = x_i - x_j`.
    pub fn h(i: usize, j: usize) -> Self {
        Self::from_poly(Poly::var(i - 1).sub(&Poly::var(j - 1)))
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            return RatFunc { num: num.scale(&den.constant_term().recip()), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Self::normalized(num, den)
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let k = lc.recip();
            RatFunc { num: num.scale(&k), den: den.scale(&k) }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        self.is_constant().then(|| self.num.constant_term())
    }

    pub fn checked_add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
            return Self::normalized_checked(num, self.den.mul(&o.den));
        }
        let b_g = self.den.div_exact(&g).expect("gcd divides");
        let d_g = o.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d_g).add(&o.num.mul(&b_g));
        if num.is_zero() {
            return Self::zero();
        }
        let g2 = gcd(&num, &g);
        if g2.is_one() {
            Self::normalized(num, self.den.mul(&d_g))
        } else {
            let num = num.div_exact(&g2).expect("gcd divides");
            let den = self.den.div_exact(&g2).expect("gcd divides").mul(&d_g);
            Self::normalized(num, den)
        }
    }

    // coprime denominators: num/(bd) is already reduced
    fn normalized_checked(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            Self::zero()
        } else {
            Self::normalized(num, den)
        }
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn checked_sub(&self, o: &RatFunc) -> RatFunc {
        self.checked_add(&o.neg())
    }

    pub fn checked_mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let split = |p: &Poly, g: &Poly| if g.is_one() { p.clone() } else { p.div_exact(g).expect("gcd divides") };
        let num = split(&self.num, &g1).mul(&split(&o.num, &g2));
        let den = split(&self.den, &g2).mul(&split(&o.den, &g1));
        Self::normalized(num, den)
    }

    pub fn scale(&self, c: &BigRational) -> RatFunc {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inverse(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self.checked_mul(&o.inverse()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFunc> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// `h^nu`: substitute `x_i -> x_i + nu_i`.
    pub fn shift(&self, nu: &Weight) -> RatFunc {
        if nu.is_zero() || self.is_constant() {
            return self.clone();
        }
        let n = nu.n();
        let perm: Vec<usize> = (0..n).collect();
        let s: Vec<BigRational> = nu.coords.iter().map(|c| q64_to_big(*c)).collect();
        self.substitute(&perm, &s)
    }

    fn substitute(&self, perm: &[usize], s: &[BigRational]) -> RatFunc {
        let num = self.num.substitute_affine(perm, s);
        let den = self.den.substitute_affine(perm, s);
        Self::normalized(num, den)
    }

    /// `(w h)(mu) = h(w^{-1} mu)`: substitute `x_i -> x_{w(i)}`.
    pub fn weyl_act(&self, w: &Permutation) -> RatFunc {
        let zeros = vec![BigRational::zero(); w.n()];
        self.substitute(&w.0, &zeros)
    }

    /// `(w . h)(mu) = h(w^{-1} . mu)`.
    pub fn dot_act(&self, w: &Permutation, rho: &Weight) -> RatFunc {
        let s: Vec<BigRational> = (0..w.n()).map(|i| q64_to_big(rho.coords[w.0[i]] - rho.coords[i])).collect();
        self.substitute(&w.0, &s)
    }

    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Evaluates `h^nu` at `point`, i.e. `h` at `point + nu`.
    pub fn eval_shifted(&self, point: &[BigRational], nu: &Weight) -> Result<BigRational> {
        let p: Vec<BigRational> = point.iter().zip(&nu.coords).map(|(a, b)| a + q64_to_big(*b)).collect();
        self.eval(&p)
    }

    pub fn is_dot_invariant_under(&self, gens: &[Permutation], rho: &Weight) -> bool {
        gens.iter().all(|w| self.dot_act(w, rho) == *self)
    }

    /// Dot invariance under `W(l)`, or under all of `W(g)` when `l` is `None`.
    pub fn is_dot_invariant(&self, datum: &RootDatum, l: Option<&SubalgebraSpec>) -> bool {
        let gens: Vec<Permutation> = match l {
            None => (1..datum.n).map(|k| Permutation::simple(datum.n, k)).collect(),
            Some(l) => l.weyl_generators(datum.n),
        };
        self.is_dot_invariant_under(&gens, &datum.rho)
    }

    pub fn parse(s: &str) -> Result<RatFunc> {
        parse::parse(s)
    }

    pub fn num_vars_used(&self) -> usize {
        let m = self.num.var_mask() | self.den.var_mask();
        32 - m.leading_zeros() as usize
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})^-1 * ({})", self.den, self.num)
        }
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RatFunc::parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                self.$f(o)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$f(&o)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Div<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    /// Panics on a zero divisor; use [`RatFunc::checked_div`] otherwise.
    fn div(self, o: &RatFunc) -> RatFunc {
        self.checked_div(o).expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(self)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> RatFunc {
        RatFunc::parse(s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(rf("x1 - x2") + RatFunc::zero(), rf("x1 - x2"));
        assert_eq!(rf("(x1^2 - x2^2)/(x1 - x2)"), rf("x1 + x2"));
        let a = rf("x1 - x2 + 2");
        assert!((a.inverse().unwrap() * a).is_one());
        assert_eq!(RatFunc::zero().inverse(), Err(Error::ZeroDivisor));
        let s = rf("1/(x1-x2) - 1/(x1-x2+1)");
        assert_eq!(s, rf("1/((x1-x2)*(x1-x2+1))"));
    }

    #[test]
    fn shift_examples() {
        let a12 = Weight::from_ints(&[1, -1, 0]);
        assert_eq!(rf("x1 - x2").shift(&a12), rf("x1 - x2 + 2"));
        let h = rf("(x1*x3 + 1)/(x2 - x3 + 5)");
        assert_eq!(h.shift(&Weight::zero(3)), h);
        let nu = Weight::from_ints(&[2, 0, -1]);
        assert_eq!(h.shift(&a12).shift(&nu), h.shift(&a12.add(&nu)));
    }

    #[test]
    fn weyl_and_dot_examples() {
        let s1 = Permutation::simple(2, 1);
        assert_eq!(rf("x1").weyl_act(&s1), rf("x2"));
        let d = RootDatum::new(2).unwrap();
        assert_eq!(rf("x1 - x2").dot_act(&s1, &d.rho), rf("x2 - x1 - 2"));
        let hc = rf("x1^2 + x2^2 + x1 - x2");
        assert!(hc.is_dot_invariant(&d, None));
        assert!(!rf("x1").is_dot_invariant(&d, None));
        let d3 = RootDatum::new(3).unwrap();
        let sym = rf("(x1+2)*(x2+1)*x3 + (x1+2)^2 + (x2+1)^2 + x3^2");
        assert!(sym.is_dot_invariant(&d3, None));
    }

    #[test]
    fn eval_examples() {
        let p = |v: &[i64]| v.iter().map(|&x| BigRational::from_integer(x.into())).collect::<Vec<_>>();
        assert_eq!(rf("x1 - x2").eval(&p(&[3, 1, 0])).unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(rf("1/(x1 - x2)").eval(&p(&[1, 1, 0])), Err(Error::PoleAtPoint));
    }

    #[test]
    fn string_round_trip() {
        let h = rf("(x1 - x2 + 2)^-1 * (x1 - x2)");
        assert_eq!(h.to_string(), "(x1 - x2 + 2)^-1 * (x1 - x2)");
        assert_eq!(rf(&h.to_string()), h);
        assert_eq!(rf("3/2*x1 - 1/3").to_string(), "3/2*x1 - 1/3");
    }
}
