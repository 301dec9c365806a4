//! Exact maximization of `g(a) = min_m ||m * a||` over the circle.
//!
//! Each `||m * a||` is a sawtooth, linear between consecutive points of
//! `{t/(2m)}` with slopes `+-m`. Their lower envelope `g` is piecewise linear;
//! on every gap between consecutive sawtooth breakpoints it is a minimum of
//! linear functions, hence concave, so its maximum there is attained at an
//! endpoint or at the crossing of a rising and a falling piece. The sweep
//! below visits every gap once and is fully exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::torus::{circle_dist, torus_reduce};

/// Exact maximum of the envelope together with its smallest argmax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct EnvelopeMax {
    pub value: BigRational,
    pub argmax: BigRational,
}

/// Refuse sweeps whose sawtooth breakpoint count would exceed this.
const MAX_BREAKPOINTS: u64 = 4_000_000;

/// Direct evaluation of `min_m ||m * alpha||`.
pub(crate) fn eval_min(ms: &[BigInt], alpha: &BigRational) -> BigRational {
    let zero = BigRational::zero();
    ms.iter()
        .map(|m| circle_dist(&torus_reduce(&(BigRational::from(m.clone()) * alpha)), &zero))
        .min()
        .expect("nonempty frequency set")
}

/// Sorted, deduplicated sawtooth breakpoints `t/(2m)` for the given moduli.
pub(crate) fn base_breakpoints(ms: &[BigInt]) -> Result<Vec<BigRational>> {
    let mut points: BTreeSet<BigRational> = BTreeSet::new();
    let mut budget = 0u64;
    for m in ms {
        let two_m: BigInt = m * 2;
        budget = budget.saturating_add(two_m.to_u64().unwrap_or(u64::MAX));
        if budget > MAX_BREAKPOINTS {
            return Err(Error::InvalidArgument(format!(
                "sawtooth breakpoint count exceeds {MAX_BREAKPOINTS}; prefix too large for an exhaustive sweep"
            )));
        }
        let mut t = BigInt::zero();
        while t < two_m {
            points.insert(BigRational::new(t.clone(), two_m.clone()));
            t += 1;
        }
    }
    Ok(points.into_iter().collect())
}

/// Exact `max_{a in [0,1)} min_m ||m * a||` with the smallest maximizer.
pub(crate) fn supmin(ms: &[BigInt]) -> Result<EnvelopeMax> {
    let mut ms: Vec<BigInt> = ms.to_vec();
    ms.sort();
    ms.dedup();
    if ms.is_empty() {
        return Err(Error::EmptySet("supmin"));
    }
    if !ms[0].is_positive() {
        return Err(Error::InvalidArgument("supmin moduli must be >= 1".into()));
    }
    // Scaling: min_m ||k*m*a|| traces the same envelope in the variable k*a,
    // so divide out the gcd and rescale the argmax.
    let g = ms.iter().fold(BigInt::zero(), |acc, m| acc.gcd(m));
    let reduced: Vec<BigInt> = ms.iter().map(|m| m / &g).collect();
    let res = supmin_coprime(&reduced)?;
    Ok(EnvelopeMax { value: res.value, argmax: res.argmax / BigRational::from(g) })
}

/// A linear piece `a + b*x` valid on one gap of the sweep.
struct Line {
    a: BigRational,
    b: BigRational,
}

impl Line {
    fn at(&self, x: &BigRational) -> BigRational {
        &self.a + &self.b * x
    }
}

fn supmin_coprime(ms: &[BigInt]) -> Result<EnvelopeMax> {
    let points = base_breakpoints(ms)?;
    let one = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    let mut best = EnvelopeMax { value: BigRational::zero(), argmax: BigRational::zero() };
    let mut consider = |value: BigRational, argmax: BigRational| {
        if value > best.value || (value == best.value && argmax < best.argmax) {
            best = EnvelopeMax { value, argmax };
        }
    };

    for (i, u) in points.iter().enumerate() {
        let v = if i + 1 < points.len() { points[i + 1].clone() } else { one.clone() };
        let mid = (u + &v) * &half;

        // On (u, v) no sawtooth changes slope, so classify each by its value
        // at the midpoint: below 1/2 means a rising branch m*x - k, above
        // means a falling branch (k+1) - m*x. Exactly 1/2 or 0 would make the
        // midpoint itself a breakpoint, which it is not.
        let lines: Vec<Line> = ms
            .iter()
            .map(|m| {
                let mr = BigRational::from(m.clone());
                let prod = &mr * &mid;
                let k = prod.floor();
                let frac = &prod - &k;
                debug_assert!(!frac.is_zero() && frac != half);
                if frac < half {
                    Line { a: -k, b: mr }
                } else {
                    Line { a: k + &one, b: -mr }
                }
            })
            .collect();

        let vals_u: Vec<BigRational> = lines.iter().map(|l| l.at(u)).collect();
        let phi_u = vals_u.iter().min().unwrap().clone();
        consider(phi_u, u.clone());

        if lines.len() < 2 {
            continue;
        }
        let vals_v: Vec<BigRational> = lines.iter().map(|l| l.at(&v)).collect();

        // Any single line bounds the envelope max on [u, v] by its own max;
        // lines staying strictly above the best such bound can never bind.
        let cap = vals_u
            .iter()
            .zip(&vals_v)
            .map(|(a, b)| a.max(b))
            .min()
            .unwrap()
            .clone();
        let kept: Vec<usize> = (0..lines.len())
            .filter(|&j| *std::cmp::min(&vals_u[j], &vals_v[j]) <= cap)
            .collect();

        for (pos, &j1) in kept.iter().enumerate() {
            for &j2 in kept.iter().skip(pos + 1) {
                let (r, f) = if lines[j1].b.is_positive() && lines[j2].b.is_negative() {
                    (j1, j2)
                } else if lines[j2].b.is_positive() && lines[j1].b.is_negative() {
                    (j2, j1)
                } else {
                    continue;
                };
                let x = (&lines[f].a - &lines[r].a) / (&lines[r].b - &lines[f].b);
                if &x > u && x < v {
                    let value = kept.iter().map(|&j| lines[j].at(&x)).min().unwrap();
                    consider(value, x);
                }
            }
        }
    }
    Ok(best)
}
