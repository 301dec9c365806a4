//! Balanced-ternary digit arithmetic, product-measure Fourier coefficients,
//! and the correlation-gap computation they support.
//!
//! The coefficient at frequency `n` of the weak-* limit of
//! `prod (1 + c_j cos(2 pi 3^j t))` factors over the balanced-ternary digits
//! of `n` as `prod c_j / 2`. The closed form is checked against a symbolic
//! expansion of the finite products; both sides are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::nilseq::{ComplexSeq, ExactSeq};
use crate::rat::{rat_str, serde_rat, serde_rat_vec};

/// Balanced-ternary digits, least significant first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedTernary {
    pub digits: Vec<i8>,
}

/// Unique representation `n = sum_j eps_j 3^j` with `eps_j in {-1, 0, 1}`.
pub fn to_balanced_ternary(n: &BigInt) -> Result<BalancedTernary> {
    if !n.is_positive() {
        return Err(Error::InvalidArgument(format!("need n >= 1, got {n}")));
    }
    let three = BigInt::from(3);
    let mut digits = Vec::new();
    let mut x = n.clone();
    while !x.is_zero() {
        let r = (&x % &three).to_i8().unwrap();
        match r {
            0 => digits.push(0),
            1 => {
                digits.push(1);
                x -= 1;
            }
            2 => {
                digits.push(-1);
                x += 1;
            }
            _ => unreachable!(),
        }
        x /= &three;
    }
    Ok(BalancedTernary { digits })
}

impl BalancedTernary {
    /// Reconstructs the integer `sum eps_j 3^j`.
    pub fn value(&self) -> BigInt {
        let three = BigInt::from(3);
        let mut acc = BigInt::zero();
        for &d in self.digits.iter().rev() {
            acc = acc * &three + BigInt::from(d);
        }
        acc
    }

    pub fn nonzero_count(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    /// Largest digit position carrying a nonzero digit.
    pub fn top_position(&self) -> Option<usize> {
        self.digits.iter().rposition(|&d| d != 0)
    }
}

/// Coefficients `c_j` of the product, each with `|c_j| <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RieszSpec {
    #[serde(with = "serde_rat_vec")]
    pub coeffs: Vec<BigRational>,
}

impl RieszSpec {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        for c in &coeffs {
            if c.abs() > BigRational::one() {
                return Err(Error::InvalidArgument(format!(
                    "|c_j| <= 1 required, got {}",
                    rat_str(c)
                )));
            }
        }
        Ok(RieszSpec { coeffs })
    }

    /// The all-ones spec of the given length.
    pub fn ones(len: usize) -> Self {
        RieszSpec { coeffs: vec![BigRational::one(); len] }
    }
}

/// Closed-form coefficient: `prod over nonzero digits j of c_j / 2`.
pub fn sigma_hat(n: &BigInt, spec: &RieszSpec) -> Result<BigRational> {
    let digits = to_balanced_ternary(n)?;
    let top = digits.top_position().expect("n >= 1 has a nonzero digit");
    if top >= spec.coeffs.len() {
        return Err(Error::InvalidArgument(format!(
            "spec covers {} digit positions but {n} uses position {top}",
            spec.coeffs.len()
        )));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut acc = BigRational::one();
    for (j, &d) in digits.digits.iter().enumerate() {
        if d != 0 {
            acc *= &spec.coeffs[j] * &half;
        }
    }
    Ok(acc)
}

const MAX_ORACLE_FACTORS: usize = 14;

/// Coefficient of `e^{2 pi i m t}` in `prod_{j<n_factors} (1 + c_j cos(2 pi 3^j t))`,
/// by symbolic expansion: each factor contributes `1` or `(c_j/2) e^{+-2 pi i 3^j t}`,
/// and every signed digit pattern summing to `m` adds its product of halves.
pub fn partial_product_oracle(
    n_factors: usize,
    spec: &RieszSpec,
    m: &BigInt,
) -> Result<BigRational> {
    let table = partial_product_table(n_factors, spec)?;
    if m.is_negative() || *m >= BigInt::from(3).pow(n_factors as u32) {
        return Err(Error::InvalidArgument(format!("need 0 <= m < 3^{n_factors}, got {m}")));
    }
    Ok(table[m.to_usize().expect("m < 3^14 fits")].clone())
}

/// All coefficients of the expanded product at frequencies `0..3^n_factors`,
/// via one pass over the `3^n_factors` digit patterns.
pub fn partial_product_table(n_factors: usize, spec: &RieszSpec) -> Result<Vec<BigRational>> {
    if n_factors == 0 || n_factors > MAX_ORACLE_FACTORS {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_factors <= {MAX_ORACLE_FACTORS}"
        )));
    }
    if spec.coeffs.len() < n_factors {
        return Err(Error::InvalidArgument(format!(
            "spec has {} coefficients, oracle needs {n_factors}",
            spec.coeffs.len()
        )));
    }
    let size = 3usize.pow(n_factors as u32);
    let mut table = vec![BigRational::zero(); size];
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    // Depth-first over digit patterns with a running frequency and weight.
    let mut stack: Vec<(usize, i64, BigRational)> = vec![(0, 0, BigRational::one())];
    let powers: Vec<i64> = (0..n_factors).map(|j| 3i64.pow(j as u32)).collect();
    while let Some((j, freq, weight)) = stack.pop() {
        if j == n_factors {
            if freq >= 0 {
                table[freq as usize] += weight;
            }
            continue;
        }
        let c_half = &spec.coeffs[j] * &half;
        stack.push((j + 1, freq, weight.clone()));
        if !c_half.is_zero() {
            stack.push((j + 1, freq + powers[j], &weight * &c_half));
            stack.push((j + 1, freq - powers[j], weight * c_half));
        }
    }
    Ok(table)
}

/// A correlation model `a(n) = sigma_hat(n) + perturbation(n)` with
/// `|perturbation| < delta`, deterministic in the seed and in `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationModel {
    pub spec: RieszSpec,
    #[serde(with = "serde_rat")]
    pub delta: BigRational,
    pub seed: u64,
}

impl CorrelationModel {
    pub fn new(spec: RieszSpec, delta: BigRational, seed: u64) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::InvalidArgument("delta must be >= 0".into()));
        }
        Ok(CorrelationModel { spec, delta, seed })
    }

    /// Exactly zero perturbation.
    pub fn unperturbed(spec: RieszSpec) -> Self {
        CorrelationModel { spec, delta: BigRational::zero(), seed: 0 }
    }

    /// Order-independent perturbation: a hash of `(seed, n)` scaled into
    /// `(-delta, delta)` as an exact rational.
    pub fn perturbation(&self, n: &BigInt) -> BigRational {
        if self.delta.is_zero() {
            return BigRational::zero();
        }
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(n.to_string().as_bytes());
        let word = u64::from_le_bytes(h.finalize()[..8].try_into().unwrap());
        const M: u64 = 1 << 20;
        let k = (word % (2 * M - 1)) as i64 - (M as i64 - 1);
        &self.delta * BigRational::new(BigInt::from(k), BigInt::from(M))
    }

    pub fn a(&self, n: &BigInt) -> Result<BigRational> {
        Ok(sigma_hat(n, &self.spec)? + self.perturbation(n))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapRow {
    pub n: u32,
    #[serde(with = "serde_rat")]
    pub sigma_power: BigRational,
    #[serde(with = "serde_rat")]
    pub sigma_shifted: BigRational,
    #[serde(with = "serde_rat")]
    pub a_power: BigRational,
    #[serde(with = "serde_rat")]
    pub a_shifted: BigRational,
    #[serde(with = "serde_rat")]
    pub gap: BigRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub delta_seed: u64,
    #[serde(with = "serde_rat")]
    pub delta: BigRational,
    pub rows: Vec<GapRow>,
    #[serde(with = "serde_rat")]
    pub min_gap: BigRational,
    /// Guaranteed lower bound `1/4 - 2 delta`.
    #[serde(with = "serde_rat")]
    pub bound: BigRational,
}

/// For the all-ones spec: checks `|a(3^n + n) - a(3^n)| >= 1/4 - 2 delta`
/// exactly for all `n <= n_max` under a seeded perturbation of size `< delta`.
pub fn correlation_gap_check(n_max: u32, delta: &BigRational, seed: u64) -> Result<GapReport> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let eighth = BigRational::new(BigInt::one(), BigInt::from(8));
    if delta >= &eighth {
        return Err(Error::InvalidArgument(format!(
            "delta must be < 1/8 (the gap bound degenerates), got {}",
            rat_str(delta)
        )));
    }
    let spec = RieszSpec::ones(n_max as usize + 2);
    let model = CorrelationModel::new(spec, delta.clone(), seed)?;
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let bound = quarter - BigRational::from(BigInt::from(2)) * delta;
    let three = BigInt::from(3);
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut min_gap: Option<BigRational> = None;
    for n in 1..=n_max {
        let power = three.pow(n);
        let shifted = &power + BigInt::from(n);
        let sigma_power = sigma_hat(&power, &model.spec)?;
        let sigma_shifted = sigma_hat(&shifted, &model.spec)?;
        let a_power = model.a(&power)?;
        let a_shifted = model.a(&shifted)?;
        let gap = (&a_shifted - &a_power).abs();
        if min_gap.as_ref().is_none_or(|g| gap < *g) {
            min_gap = Some(gap.clone());
        }
        rows.push(GapRow { n, sigma_power, sigma_shifted, a_power, a_shifted, gap });
    }
    let min_gap = min_gap.unwrap();
    if min_gap < bound {
        return Err(Error::InvariantViolation(format!(
            "gap {} fell below the guaranteed bound {}",
            rat_str(&min_gap),
            rat_str(&bound)
        )));
    }
    Ok(GapReport { delta_seed: seed, delta: delta.clone(), rows, min_gap, bound })
}

/// Almost periodic models the gap experiment can test against.
pub enum ApModel {
    Constant(BigRational),
    Trig(crate::nilseq::TrigPolynomial),
    Interpolant(crate::interpolation::Interpolant),
}

impl ApModel {
    /// `|psi(x) - psi(y)|`, exact where the model permits, else in doubles.
    fn shift_gap(&self, x: &BigInt, y: &BigInt) -> Result<ShiftGap> {
        match self {
            ApModel::Constant(_) => Ok(ShiftGap::Exact(BigRational::zero())),
            ApModel::Interpolant(psi) => {
                Ok(ShiftGap::Exact((psi.eval_exact(x)? - psi.eval_exact(y)?).abs()))
            }
            ApModel::Trig(psi) => Ok(ShiftGap::Float((psi.eval_c(x) - psi.eval_c(y)).norm())),
        }
    }
}

enum ShiftGap {
    Exact(BigRational),
    Float(f64),
}

impl ShiftGap {
    fn below(&self, eps: &BigRational) -> bool {
        match self {
            ShiftGap::Exact(v) => v < eps,
            ShiftGap::Float(v) => *v < eps.to_f64().expect("finite eps"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiminfReport {
    /// Indices `n` with `|psi(3^n + n) - psi(3^n)| < eps`.
    pub qualifying: Vec<u32>,
    /// Conservative per-qualifying-pair bound `1/4 - 2 delta - eps`.
    #[serde(with = "serde_rat")]
    pub per_pair_bound: BigRational,
    /// Running lower bounds `(N, qualifying(N) * bound / (2N))`.
    pub running: Vec<(u32, String)>,
    #[serde(with = "serde_rat")]
    pub final_bound: BigRational,
}

/// Lower-bounds the running average of `|a(r_n) - psi(r_n)|` over the merged
/// sequence of powers and shifted powers: whenever the model moves little
/// between `3^n` and `3^n + n`, the model-vs-correlation mismatch across the
/// pair is at least the correlation gap minus the model's own shift.
pub fn liminf_gap_experiment(
    psi: &ApModel,
    n_max: u32,
    eps: &BigRational,
    delta: &BigRational,
    seed: u64,
) -> Result<LiminfReport> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let gaps = correlation_gap_check(n_max, delta, seed)?;
    let per_pair_bound = &gaps.bound - eps;
    if !per_pair_bound.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "eps {} swallows the correlation gap bound {}",
            rat_str(eps),
            rat_str(&gaps.bound)
        )));
    }
    let three = BigInt::from(3);
    let mut qualifying = Vec::new();
    let mut running = Vec::with_capacity(n_max as usize);
    let mut final_bound = BigRational::zero();
    for n in 1..=n_max {
        let power = three.pow(n);
        let shifted = &power + BigInt::from(n);
        if psi.shift_gap(&shifted, &power)?.below(eps) {
            qualifying.push(n);
        }
        // Average over the first 2N merged elements.
        let bound = BigRational::from(BigInt::from(qualifying.len() as u64)) * &per_pair_bound
            / BigRational::from(BigInt::from(2 * n as u64));
        final_bound = bound.clone();
        running.push((n, rat_str(&bound)));
    }
    Ok(LiminfReport { qualifying, per_pair_bound, running, final_bound })
}
