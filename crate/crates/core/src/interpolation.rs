//! Constructive interpolation of bounded targets: peel the target into
//! two-valued binary levels, separate each level's supports by a rotation,
//! and synthesize the interpolant as a sum of normalized-distance bumps
//! composed with the rotations. All node evaluations are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::rat::{rat_str, serde_rat, serde_rat_vec};
use crate::separability::{
    separability_1d, separability_nd, NdOutcome, NdSearch, SeparabilityOutcome,
};
use crate::torus::{scalar_orbit, set_dist, TorusPoint};

/// A bounded target aligned with an index set: `0 <= b(n) <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TargetSequence {
    #[serde(with = "serde_rat_vec")]
    values: Vec<BigRational>,
}

impl TargetSequence {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        for v in &values {
            if v.is_negative() || v > &BigRational::one() {
                return Err(Error::InvalidArgument(format!(
                    "target values must lie in [0, 1], got {}",
                    rat_str(v)
                )));
            }
        }
        Ok(TargetSequence { values })
    }

    pub fn constant(value: BigRational, len: usize) -> Result<Self> {
        Self::new(vec![value; len])
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Greedy binary expansion truncated to `depth` bits. Bit `k` (1-based)
/// carries weight `2^-k`; dyadic values terminate, so `depth`-bit dyadic
/// targets decompose exactly.
pub fn binary_decompose(b: &TargetSequence, depth: u32) -> Result<Vec<Vec<bool>>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("decomposition depth must be >= 1".into()));
    }
    let mut levels = vec![vec![false; b.len()]; depth as usize];
    for (n, v) in b.values().iter().enumerate() {
        let mut x = v.clone();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut w = half.clone();
        for level in levels.iter_mut() {
            if x >= w {
                level[n] = true;
                x -= &w;
            }
            w *= &half;
        }
    }
    Ok(levels)
}

/// A continuous level function on the torus: zero on one node set, the full
/// amplitude on the other, in between elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bump {
    Constant {
        dim: usize,
        #[serde(with = "serde_rat")]
        value: BigRational,
    },
    Urysohn {
        s_a: Vec<TorusPoint>,
        s_b: Vec<TorusPoint>,
        #[serde(with = "serde_rat")]
        amplitude: BigRational,
    },
}

impl Bump {
    pub fn urysohn(
        mut s_a: Vec<TorusPoint>,
        mut s_b: Vec<TorusPoint>,
        amplitude: BigRational,
    ) -> Result<Self> {
        s_a.sort();
        s_a.dedup();
        s_b.sort();
        s_b.dedup();
        if s_a.is_empty() || s_b.is_empty() {
            return Err(Error::EmptySet("urysohn bump node set"));
        }
        if !amplitude.is_positive() {
            return Err(Error::InvalidArgument("bump amplitude must be positive".into()));
        }
        let gap = set_dist(&s_a, &s_b)?;
        if gap.is_zero() {
            return Err(Error::InvariantViolation(
                "bump node sets must have positive separation".into(),
            ));
        }
        Ok(Bump::Urysohn { s_a, s_b, amplitude })
    }

    pub fn dim(&self) -> usize {
        match self {
            Bump::Constant { dim, .. } => *dim,
            Bump::Urysohn { s_a, .. } => s_a[0].dim(),
        }
    }

    pub fn amplitude(&self) -> BigRational {
        match self {
            Bump::Constant { value, .. } => value.clone(),
            Bump::Urysohn { amplitude, .. } => amplitude.clone(),
        }
    }
}

/// Evaluates the bump at a torus point:
/// `amplitude * d(x, S_A) / (d(x, S_A) + d(x, S_B))`.
///
/// Continuous, exactly 0 on `S_A`, exactly the amplitude on `S_B`, and within
/// `[0, amplitude]` everywhere; rational at rational points.
pub fn urysohn_eval(bump: &Bump, x: &TorusPoint) -> Result<BigRational> {
    match bump {
        Bump::Constant { dim, value } => {
            if x.dim() != *dim {
                return Err(Error::DimensionMismatch(x.dim(), *dim));
            }
            Ok(value.clone())
        }
        Bump::Urysohn { s_a, s_b, amplitude } => {
            let xs = std::slice::from_ref(x);
            let da = set_dist(xs, s_a)?;
            let db = set_dist(xs, s_b)?;
            let denom = &da + &db;
            if denom.is_zero() {
                return Err(Error::InvariantViolation(
                    "point at distance zero from both node sets".into(),
                ));
            }
            Ok(amplitude * da / denom)
        }
    }
}

/// One built level: rotation, bump, and how the separation was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub k: u32,
    pub alpha: TorusPoint,
    pub bump: Bump,
    /// Achieved separation of the two orbit node sets (0 for constant levels).
    #[serde(with = "serde_rat")]
    pub separation: BigRational,
    /// Set when the separation fell below the requested floor.
    pub fragile: bool,
}

/// A leveled sum of bumps composed with rotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpolant {
    pub depth: u32,
    pub levels: Vec<Level>,
}

impl Interpolant {
    /// Exact evaluation `psi(n) = sum_k bump_k(n * alpha_k)`.
    pub fn eval_at(&self, n: &BigInt) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for level in &self.levels {
            acc += urysohn_eval(&level.bump, &scalar_orbit(n, &level.alpha))?;
        }
        Ok(acc)
    }
}

/// Separation search configuration for interpolant construction.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Levels must achieve at least this much separation unless
    /// `allow_fragile` is set. Default `1/256`.
    pub eps_floor: BigRational,
    /// Largest torus dimension tried by the certificate search.
    pub max_dim: usize,
    pub budget: u64,
    pub seed: u64,
    /// Accept a level whose exact 1-D separation is positive but below the
    /// floor, marking it fragile, instead of failing.
    pub allow_fragile: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            eps_floor: BigRational::new(BigInt::one(), BigInt::from(256)),
            max_dim: 2,
            budget: 2_000,
            seed: 0,
            allow_fragile: false,
        }
    }
}

/// Builds an interpolant hitting the `depth`-bit truncation of `b` on the
/// nodes of `e`: for each level, splits the nodes by the level bit, finds a
/// separating rotation, and lays a bump over the two orbit sets.
///
/// Fails with [`Error::SeparationFailed`] when some level's support pair
/// cannot be separated within the floor, dimensions, and budget.
pub fn build_interpolant(
    e: &IndexSet,
    b: &TargetSequence,
    depth: u32,
    opts: &BuildOptions,
) -> Result<Interpolant> {
    if e.len() != b.len() {
        return Err(Error::DimensionMismatch(e.len(), b.len()));
    }
    if e.is_empty() {
        return Err(Error::EmptySet("build_interpolant"));
    }
    if !opts.eps_floor.is_positive() {
        return Err(Error::InvalidArgument("eps_floor must be positive".into()));
    }
    let bits = binary_decompose(b, depth)?;
    let mut levels = Vec::with_capacity(depth as usize);
    for (idx, level_bits) in bits.iter().enumerate() {
        let k = idx as u32 + 1;
        let amplitude = BigRational::new(BigInt::one(), BigInt::one() << k);
        let mut a_nodes = Vec::new();
        let mut b_nodes = Vec::new();
        for (r, bit) in e.iter().zip(level_bits) {
            if *bit {
                b_nodes.push(r.clone());
            } else {
                a_nodes.push(r.clone());
            }
        }
        let level = if b_nodes.is_empty() {
            Level {
                k,
                alpha: TorusPoint::origin(1),
                bump: Bump::Constant { dim: 1, value: BigRational::zero() },
                separation: BigRational::zero(),
                fragile: false,
            }
        } else if a_nodes.is_empty() {
            Level {
                k,
                alpha: TorusPoint::origin(1),
                bump: Bump::Constant { dim: 1, value: amplitude },
                separation: BigRational::zero(),
                fragile: false,
            }
        } else {
            let a_set = IndexSet::new(a_nodes, None)?;
            let b_set = IndexSet::new(b_nodes, None)?;
            let (alpha, separation, fragile) = find_separation(&a_set, &b_set, k, opts)?;
            let s_a: Vec<TorusPoint> = a_set.iter().map(|r| scalar_orbit(r, &alpha)).collect();
            let s_b: Vec<TorusPoint> = b_set.iter().map(|r| scalar_orbit(r, &alpha)).collect();
            Level { k, alpha, bump: Bump::urysohn(s_a, s_b, amplitude)?, separation, fragile }
        };
        levels.push(level);
    }
    Ok(Interpolant { depth, levels })
}

fn find_separation(
    a: &IndexSet,
    b: &IndexSet,
    level: u32,
    opts: &BuildOptions,
) -> Result<(TorusPoint, BigRational, bool)> {
    let verdict = match separability_1d(a, b, &opts.eps_floor)? {
        SeparabilityOutcome::Separable(cert) => {
            return Ok((cert.alpha, cert.achieved, false));
        }
        SeparabilityOutcome::NotSeparable(v) => v,
    };
    for dim in 2..=opts.max_dim {
        let search = NdSearch { dim, budget: opts.budget, seed: opts.seed ^ (level as u64) };
        if let NdOutcome::Certificate(cert) = separability_nd(a, b, &opts.eps_floor, &search)? {
            return Ok((cert.alpha, cert.achieved, false));
        }
    }
    if opts.allow_fragile && verdict.sup_achieved.is_positive() {
        return Ok((TorusPoint::one_dim(verdict.argsup), verdict.sup_achieved, true));
    }
    Err(Error::SeparationFailed { level, best: rat_str(&verdict.sup_achieved) })
}

/// Exact node-by-node audit of a built interpolant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterpolationReport {
    #[serde(with = "serde_rat_vec")]
    pub node_errors: Vec<BigRational>,
    #[serde(with = "serde_rat")]
    pub max_error: BigRational,
    /// Truncation contract `2^-depth`.
    #[serde(with = "serde_rat")]
    pub bound: BigRational,
    pub ok: bool,
}

pub fn verify_interpolation(
    psi: &Interpolant,
    e: &IndexSet,
    b: &TargetSequence,
) -> Result<InterpolationReport> {
    if e.len() != b.len() {
        return Err(Error::DimensionMismatch(e.len(), b.len()));
    }
    let mut node_errors = Vec::with_capacity(e.len());
    let mut max_error = BigRational::zero();
    for (r, target) in e.iter().zip(b.values()) {
        let err = (psi.eval_at(r)? - target).abs();
        if err > max_error {
            max_error = err.clone();
        }
        node_errors.push(err);
    }
    let bound = BigRational::new(BigInt::one(), BigInt::one() << psi.depth);
    let ok = max_error <= bound;
    Ok(InterpolationReport { node_errors, max_error, bound, ok })
}

/// Finite-evidence syndeticity scan: shifts `T <= t_max` that move the
/// sequence by less than `eps` uniformly over `n <= n_range`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodReport {
    pub periods: Vec<u64>,
    /// Largest gap between consecutive members (counting from 0).
    pub max_gap: Option<u64>,
}

fn gaps(periods: &[u64]) -> Option<u64> {
    if periods.is_empty() {
        return None;
    }
    let mut max_gap = periods[0];
    for w in periods.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    Some(max_gap)
}

/// Exact variant for rational-valued sequences.
pub fn epsilon_periods_exact(
    psi: &Interpolant,
    eps: &BigRational,
    n_range: u64,
    t_max: u64,
) -> Result<PeriodReport> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut values = Vec::with_capacity((n_range + t_max) as usize);
    for n in 1..=(n_range + t_max) {
        values.push(psi.eval_at(&BigInt::from(n))?);
    }
    let mut periods = Vec::new();
    for t in 1..=t_max {
        let ok = (1..=n_range)
            .all(|n| (&values[(n + t - 1) as usize] - &values[(n - 1) as usize]).abs() < *eps);
        if ok {
            periods.push(t);
        }
    }
    Ok(PeriodReport { max_gap: gaps(&periods), periods })
}

/// Double-precision variant for complex-valued sequences.
pub fn epsilon_periods_f64(
    psi: impl Fn(u64) -> num_complex::Complex64,
    eps: f64,
    n_range: u64,
    t_max: u64,
) -> PeriodReport {
    let values: Vec<num_complex::Complex64> = (1..=(n_range + t_max)).map(psi).collect();
    let mut periods = Vec::new();
    for t in 1..=t_max {
        let ok = (1..=n_range)
            .all(|n| (values[(n + t - 1) as usize] - values[(n - 1) as usize]).norm() < eps);
        if ok {
            periods.push(t);
        }
    }
    PeriodReport { max_gap: gaps(&periods), periods }
}
