//! Denominator lattices and the `p_T` polynomial.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfield::{gcd, Poly, RatFunc};
use crate::rootsys::{positive_roots, Root, RootDatum, SubalgebraSpec, Weight, Q64};

use super::nu_on_t;

/// `p_T(t) = prod (t - w.T)` over the distinct dot images of `T`.
#[derive(Clone, Debug)]
pub struct PtPolynomial {
    /// `T` as the linear function `sum T_i x_i`.
    pub t_function: RatFunc,
    pub images: Vec<RatFunc>,
    /// Coefficients of `t^0, t^1, ...`.
    pub coefficients: Vec<RatFunc>,
}

pub fn linear_function(t: &Weight) -> RatFunc {
    t.coords
        .iter()
        .enumerate()
        .fold(RatFunc::zero(), |a, (i, c)| a.checked_add(&RatFunc::x(i + 1).checked_mul(&RatFunc::from_q64(*c))))
}

impl PtPolynomial {
    pub fn new(t: &Weight, datum: &RootDatum) -> Self {
        let tf = linear_function(t);
        let mut images: Vec<RatFunc> = Vec::new();
        for w in SubalgebraSpec::full(datum.n).weyl_group(datum.n) {
            let x = tf.dot_act(&w, &datum.rho);
            if !images.contains(&x) {
                images.push(x);
            }
        }
        let mut coefficients = vec![RatFunc::one()];
        for r in &images {
            let mut next = vec![RatFunc::zero(); coefficients.len() + 1];
            for (k, a) in coefficients.iter().enumerate() {
                next[k + 1] = next[k + 1].checked_add(a);
                next[k] = next[k].checked_sub(&a.checked_mul(r));
            }
            coefficients = next;
        }
        PtPolynomial { t_function: tf, images, coefficients }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// `p_T(x) = prod (x - w.T)`.
    pub fn eval_at(&self, x: &RatFunc) -> Result<RatFunc> {
        Ok(self.images.iter().fold(RatFunc::one(), |a, r| a.checked_mul(&x.checked_sub(r))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeKind {
    Absolute,
    Relative(SubalgebraSpec),
    RelativeT(SubalgebraSpec, Weight),
}

/// One emitted factor with its index.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeFactor {
    pub label: String,
    pub shift: String,
    #[serde(serialize_with = "ser_poly")]
    pub factor: Poly,
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct DenominatorLattice {
    pub n: usize,
    pub kind: LatticeKind,
    pub bound: usize,
    pub factors: Vec<LatticeFactor>,
}

/// Only type A data is handled; anything else is rejected.
pub fn check_type(cartan_type: &str) -> Result<()> {
    match cartan_type {
        "A" | "a" => Ok(()),
        other => Err(Error::UnsupportedType(format!("root system of type {other}"))),
    }
}

/// `(H_a + i)^rho = H_a + rho(H_a) + i`.
fn rho_shifted(r: Root, i: i64) -> Poly {
    let h = RatFunc::h(r.i as usize, r.j as usize).checked_add(&RatFunc::from_int(r.height() + i));
    h.numerator().clone()
}

/// Orbits of `W(l)` on the roots of `u+`.
pub fn u_plus_orbits(n: usize, l: &SubalgebraSpec) -> Vec<Vec<Root>> {
    let group = l.weyl_group(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in l.complement_roots(n) {
        if seen.contains(&r) {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for w in &group {
            let (a, b) = (w.0[r.i as usize - 1] + 1, w.0[r.j as usize - 1] + 1);
            if a < b {
                orbit.insert(Root::new(a, b));
            }
        }
        seen.extend(orbit.iter().copied());
        out.push(orbit.into_iter().collect());
    }
    out
}

impl DenominatorLattice {
    /// Factors with shift index `1..=bound`, or for the `T` kind the
    /// values `c` coming from weights of height at most `bound`.
    pub fn new(n: usize, kind: LatticeKind, bound: usize) -> Result<Self> {
        let datum = RootDatum::new(n)?;
        let mut factors = Vec::new();
        match &kind {
            LatticeKind::Absolute => {
                for i in 1..=bound as i64 {
                    for r in positive_roots(n)? {
                        factors.push(LatticeFactor { label: r.to_string(), shift: i.to_string(), factor: rho_shifted(r, i) });
                    }
                }
            }
            LatticeKind::Relative(l) => {
                l.validate_for(n)?;
                if !l.is_standard() {
                    return Err(Error::NotStandard(l.label()));
                }
                for i in 1..=bound as i64 {
                    for orbit in u_plus_orbits(n, l) {
                        let p = orbit.iter().fold(Poly::one(), |a, r| a.mul(&rho_shifted(*r, i)));
                        let label = orbit.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
                        factors.push(LatticeFactor { label: format!("{{{label}}}"), shift: i.to_string(), factor: p });
                    }
                }
            }
            LatticeKind::RelativeT(l, t) => {
                l.validate_for(n)?;
                if !l.is_standard() {
                    return Err(Error::NotStandard(l.label()));
                }
                if !crate::rootsys::in_z_plus(t, l)? {
                    return Err(Error::InvalidT(t.to_string()));
                }
                let verma = crate::verma::TruncatedVerma::new(n, bound)?;
                let cs: BTreeSet<Q64> = verma
                    .blocks()
                    .iter()
                    .filter(|b| !b.weight.is_zero() && b.basis.iter().any(|m| m.terms().iter().all(|(r, _)| !l.contains_root(*r))))
                    .map(|b| nu_on_t(&b.weight, t))
                    .collect();
                let tf = linear_function(t);
                let mut images: Vec<RatFunc> = Vec::new();
                for w in SubalgebraSpec::full(n).weyl_group(n) {
                    let x = tf.weyl_act(&w);
                    if !images.contains(&x) {
                        images.push(x);
                    }
                }
                for c in cs {
                    let mut p = Poly::one();
                    for wt in &images {
                        // (T - wT + c)^rho
                        let f = tf.checked_sub(wt).checked_add(&RatFunc::from_q64(c)).shift(&datum.rho);
                        if !f.is_constant() {
                            p = p.mul(f.numerator());
                        }
                    }
                    factors.push(LatticeFactor { label: format!("c={c}"), shift: c.to_string(), factor: p });
                }
            }
        }
        Ok(DenominatorLattice { n, kind, bound, factors })
    }

    /// Strips from `den` every common factor with the lattice; what remains
    /// is the part not accounted for (a constant when `den` divides).
    pub fn residual(&self, den: &Poly) -> Poly {
        let mut d = den.clone();
        for f in &self.factors {
            loop {
                if d.is_constant() {
                    return d;
                }
                let g = gcd(&d, &f.factor);
                if g.is_constant() {
                    break;
                }
                d = d.div_exact(&g).expect("gcd divides");
            }
        }
        d
    }

    pub fn accounts_for(&self, den: &Poly) -> bool {
        self.residual(den).is_constant()
    }
}

/// Result of checking a collection of denominators against a lattice.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DivisibilityReport {
    pub checked: usize,
    pub extra: Vec<String>,
}

impl DivisibilityReport {
    pub fn holds(&self) -> bool {
        self.extra.is_empty()
    }
}

/// Block entries are right coefficients; an entry of the block of weight
/// `-nu` is shifted by `nu` back to the left Cartan side the lattice lives on.
pub fn check_denominators<'a>(lattice: &DenominatorLattice, entries: impl IntoIterator<Item = (&'a RatFunc, &'a Weight)>) -> DivisibilityReport {
    let mut rep = DivisibilityReport::default();
    let mut seen = BTreeSet::new();
    for (e, nu) in entries {
        if e.denominator().is_constant() {
            continue;
        }
        let den = RatFunc::from_poly(e.denominator().clone()).shift(nu);
        let den = den.numerator();
        if !seen.insert(den.to_string()) {
            continue;
        }
        rep.checked += 1;
        let r = lattice.residual(den);
        if !r.is_constant() {
            rep.extra.push(r.to_string());
        }
    }
    rep
}
