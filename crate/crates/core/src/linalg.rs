//! Dense matrices over an exact field: symbolic `RatFunc` entries or
//! rationals at a fixed generic point.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ratfield::{q64_to_big, RatFunc};
use crate::rootsys::Weight;

/// Exact scalar field together with the specialization map from `Frac U(h)`.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Data needed to specialize a rational function (a point, or nothing).
    type Ctx: Clone + fmt::Debug + Send + Sync;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn from_big(q: &BigRational) -> Self;

    /// The image of `h^nu`.
    fn lift(ctx: &Self::Ctx, h: &RatFunc, nu: &Weight) -> Result<Self>;

    /// Rough size used for pivot choice.
    fn complexity(&self) -> usize {
        0
    }

    fn from_int(k: i64) -> Self {
        Self::from_big(&BigRational::from_integer(k.into()))
    }

    fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Field for RatFunc {
    type Ctx = ();

    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        self.inverse()
    }
    fn from_big(q: &BigRational) -> Self {
        RatFunc::constant(q.clone())
    }
    fn lift(_: &(), h: &RatFunc, nu: &Weight) -> Result<Self> {
        Ok(h.shift(nu))
    }
    fn complexity(&self) -> usize {
        self.numerator().num_terms() + self.denominator().num_terms()
    }
}

impl Field for BigRational {
    type Ctx = Vec<BigRational>;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::ZeroDivisor)
        } else {
            Ok(self.recip())
        }
    }
    fn from_big(q: &BigRational) -> Self {
        q.clone()
    }
    fn lift(point: &Vec<BigRational>, h: &RatFunc, nu: &Weight) -> Result<Self> {
        if let Some(c) = h.constant_value() {
            return Ok(c);
        }
        let p: Vec<BigRational> = point.iter().zip(&nu.coords).map(|(a, b)| a + q64_to_big(*b)).collect();
        h.eval(&p)
    }
    fn complexity(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Field> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn diagonal(d: Vec<S>) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<S> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        Matrix { rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }

    pub fn map<T: Field>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<T: Field>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Matrix<T>> {
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn mul(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, k: &S) -> Matrix<S> {
        self.map(|x| x.mul(k))
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.get(i, j).is_zero() {
                        acc = acc.add(&self.get(i, j).mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    /// Row echelon reduction in place of `[self | rhs]`; returns pivot columns.
    fn reduce(&mut self, rhs: &mut Option<&mut Matrix<S>>) -> Result<Vec<usize>> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !self.get(i, c).is_zero())
                .min_by_key(|&i| self.get(i, c).complexity());
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            if let Some(b) = rhs.as_deref_mut() {
                b.swap_rows(r, p);
            }
            let inv = self.get(r, c).inv()?;
            for j in 0..self.cols {
                let v = self.get(r, j).mul(&inv);
                self.set(r, j, v);
            }
            if let Some(b) = rhs.as_deref_mut() {
                for j in 0..b.cols {
                    let v = b.get(r, j).mul(&inv);
                    b.set(r, j, v);
                }
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let x = self.get(r, j);
                    if x.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j).sub(&f.mul(x));
                    self.set(i, j, v);
                }
                if let Some(b) = rhs.as_deref_mut() {
                    for j in 0..b.cols {
                        let x = b.get(r, j);
                        if x.is_zero() {
                            continue;
                        }
                        let v = b.get(i, j).sub(&f.mul(x));
                        b.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok(pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.reduce(&mut None).map(|p| p.len()).unwrap_or(0)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> Result<(Matrix<S>, Vec<usize>)> {
        let mut m = self.clone();
        let p = m.reduce(&mut None)?;
        Ok((m, p))
    }

    pub fn inverse(&self) -> Result<Matrix<S>> {
        if self.rows != self.cols {
            return Err(Error::DecompositionFailure("inverse of a non-square matrix".into()));
        }
        let mut a = self.clone();
        let mut b = Self::identity(self.rows);
        let pivots = a.reduce(&mut Some(&mut b))?;
        if pivots.len() != self.rows {
            return Err(Error::DecompositionFailure(format!("singular {}x{} matrix", self.rows, self.cols)));
        }
        Ok(b)
    }

    /// Solves `self * x = rhs` for square invertible `self`.
    pub fn solve(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        let mut a = self.clone();
        let mut b = rhs.clone();
        let pivots = a.reduce(&mut Some(&mut b))?;
        if pivots.len() != self.cols || self.rows != self.cols {
            return Err(Error::DecompositionFailure("singular system".into()));
        }
        Ok(b)
    }

    /// Basis of the right null space.
    pub fn kernel(&self) -> Result<Vec<Vec<S>>> {
        let (r, pivots) = self.rref()?;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        Ok(free
            .iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = r.get(row, f).neg();
                }
                v
            })
            .collect())
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<S> {
        if self.rows != self.cols {
            return Err(Error::DecompositionFailure("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(S::one());
        }
        let mut m = self.clone();
        let mut sign = S::one();
        let mut prev = S::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return Ok(S::zero());
                };
                m.swap_rows(k, p);
                sign = sign.neg();
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m.get(i, j).mul(m.get(k, k)).sub(&m.get(i, k).mul(m.get(k, j))).div(&prev)?;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        Ok(m.get(n - 1, n - 1).mul(&sign))
    }
}

impl<S: Field> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(a.into())
    }

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(7), q(4)]]);
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        assert_eq!(m.determinant().unwrap(), q(1));
        let s = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert_eq!(s.rank(), 1);
        assert!(s.inverse().is_err());
        assert_eq!(s.kernel().unwrap(), vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn symbolic_determinant() {
        let x = |s: &str| RatFunc::parse(s).unwrap();
        let m = Matrix::from_rows(vec![vec![x("x1"), x("1")], vec![x("x2"), x("x1 + 1")], ]);
        assert_eq!(m.determinant().unwrap(), x("x1^2 + x1 - x2"));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
    }
}
