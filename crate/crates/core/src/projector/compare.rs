//! Operator equality, exactly or at random specializations.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::ratfield::RatFunc;
use crate::verma::TruncatedVerma;

use super::{OpExpr, Realization};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Symbolic,
    Generic { seed: u64, trials: usize },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Generic { .. } => "generic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub weight: String,
    pub row: String,
    pub col: String,
    pub lhs: String,
    pub rhs: String,
    pub point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub equal: bool,
    pub mode: String,
    pub depth: usize,
    pub points: usize,
    pub witness: Option<Witness>,
}

/// Coordinates are drawn from `[-10^6, 10^6]`; a point where some
/// construction hits a pole is discarded and redrawn.
const RANGE: i64 = 1_000_000;
const MAX_REDRAWS: usize = 32;

pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-RANGE..=RANGE)))).collect()
}

fn is_special_point(e: &Error) -> bool {
    matches!(e, Error::PoleAtPoint | Error::ZeroDivisor | Error::DecompositionFailure(_) | Error::DegenerateForm(_))
}

/// Runs `f` on realizations at `trials` random points, redrawing points
/// where evaluation fails because the point is special. Stops at the first
/// trial for which `f` reports a witness.
pub fn for_generic_points<T>(
    verma: &Arc<TruncatedVerma>,
    seed: u64,
    trials: usize,
    mut f: impl FnMut(&Realization<BigRational>) -> Result<Option<T>>,
) -> Result<(usize, Option<(T, Vec<BigRational>)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = verma.n();
    for trial in 0..trials {
        let mut last = None;
        let mut done = false;
        for _ in 0..MAX_REDRAWS {
            let point = random_point(&mut rng, n);
            let real = Realization::<BigRational>::new(verma.clone(), point.clone());
            match f(&real) {
                Ok(Some(w)) => return Ok((trial + 1, Some((w, point)))),
                Ok(None) => {
                    done = true;
                    break;
                }
                Err(e) if is_special_point(&e) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(last.map_or(Error::NoGenericPoint(MAX_REDRAWS), |e| match e {
                Error::DecompositionFailure(_) | Error::DegenerateForm(_) => e,
                _ => Error::NoGenericPoint(MAX_REDRAWS),
            }));
        }
    }
    Ok((trials, None))
}

fn first_difference<S: Field>(real: &Realization<S>, a: &[Arc<Matrix<S>>], b: &[Arc<Matrix<S>>]) -> Option<Witness> {
    for (x, (ma, mb)) in a.iter().zip(b).enumerate() {
        if ma == mb {
            continue;
        }
        let blk = real.verma.block(x);
        for i in 0..ma.rows {
            for j in 0..ma.cols {
                if ma.get(i, j) != mb.get(i, j) {
                    return Some(Witness {
                        weight: blk.weight.to_string(),
                        row: blk.basis[i].to_string(),
                        col: blk.basis[j].to_string(),
                        lhs: ma.get(i, j).to_string(),
                        rhs: mb.get(i, j).to_string(),
                        point: None,
                    });
                }
            }
        }
    }
    None
}

/// Symbolic: entrywise equality of rational functions. Generic: equality
/// at `trials` random points; a difference at any point certifies
/// inequality, agreement certifies equality with high probability.
pub fn compare(verma: &Arc<TruncatedVerma>, a: &OpExpr, b: &OpExpr, mode: &Mode) -> Result<Verdict> {
    let depth = verma.depth;
    match mode {
        Mode::Symbolic => {
            let real = Realization::<RatFunc>::new(verma.clone(), ());
            let x = real.operator(a)?;
            let y = real.operator(b)?;
            let witness = first_difference(&real, &x.blocks, &y.blocks);
            Ok(Verdict { equal: witness.is_none(), mode: "symbolic".into(), depth, points: 0, witness })
        }
        Mode::Generic { seed, trials } => {
            let (points, found) = for_generic_points(verma, *seed, *trials, |real| {
                let x = real.operator(a)?;
                let y = real.operator(b)?;
                Ok(first_difference(real, &x.blocks, &y.blocks))
            })?;
            let witness = found.map(|(mut w, p)| {
                w.point = Some(p.iter().map(|c| c.to_string()).collect());
                w
            });
            Ok(Verdict { equal: witness.is_none(), mode: "generic".into(), depth, points, witness })
        }
    }
}
