//! Model nilsequence evaluation and averaging along subsequences, plus the
//! constructive two-step witness: a fast-growing lacunary base whose shifted
//! squares are steered by a nested-interval rotation.
//!
//! Evaluation of complex sequences runs in double precision with the argument
//! reduced exactly first; all set and interval logic stays in exact rationals.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_sets::{generate, GeneratorSpec, IndexSet};
use crate::interpolation::Interpolant;
use crate::rat::{ceil_int, rat_str, serde_rat, serde_rat_vec};
use crate::torus::{torus_reduce, CircleInterval};

/// Complex-valued bounded sequence over the positive integers.
pub trait ComplexSeq {
    fn eval_c(&self, n: &BigInt) -> Complex64;
}

/// Exactly evaluable (rational-valued) bounded sequence.
pub trait ExactSeq {
    fn eval_exact(&self, n: &BigInt) -> Result<BigRational>;
}

fn unit_phase(frac: &BigRational) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * frac.to_f64().expect("finite fraction");
    Complex64::new(theta.cos(), theta.sin())
}

/// `sum_j c_j e^{2 pi i n a_j}` with rational frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub re: f64,
    pub im: f64,
    #[serde(with = "serde_rat")]
    pub freq: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    /// Single unit-coefficient term.
    pub fn single(freq: BigRational) -> Self {
        TrigPolynomial { terms: vec![TrigTerm { re: 1.0, im: 0.0, freq: torus_reduce(&freq) }] }
    }

    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| Complex64::new(t.re, t.im).norm()).sum()
    }
}

impl ComplexSeq for TrigPolynomial {
    fn eval_c(&self, n: &BigInt) -> Complex64 {
        let n = BigRational::from(n.clone());
        self.terms
            .iter()
            .map(|t| Complex64::new(t.re, t.im) * unit_phase(&torus_reduce(&(&n * &t.freq))))
            .sum()
    }
}

/// `n -> e^{2 pi i n^2 alpha}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPhase {
    #[serde(with = "serde_rat")]
    pub alpha: BigRational,
}

impl ComplexSeq for QuadraticPhase {
    fn eval_c(&self, n: &BigInt) -> Complex64 {
        unit_phase(&torus_reduce(&(BigRational::from(n * n) * &self.alpha)))
    }
}

impl ComplexSeq for Interpolant {
    fn eval_c(&self, n: &BigInt) -> Complex64 {
        let v = self.eval_at(n).expect("interpolant invariants hold");
        Complex64::new(v.to_f64().expect("finite"), 0.0)
    }
}

impl ExactSeq for Interpolant {
    fn eval_exact(&self, n: &BigInt) -> Result<BigRational> {
        self.eval_at(n)
    }
}

/// Composition with the squaring map: `psi(n) = theta(n^2)`.
#[derive(Debug, Clone)]
pub struct SquareLift<S> {
    pub inner: S,
}

pub fn square_lift<S>(inner: S) -> SquareLift<S> {
    SquareLift { inner }
}

impl<S: ComplexSeq> ComplexSeq for SquareLift<S> {
    fn eval_c(&self, n: &BigInt) -> Complex64 {
        self.inner.eval_c(&(n * n))
    }
}

impl<S: ExactSeq> ExactSeq for SquareLift<S> {
    fn eval_exact(&self, n: &BigInt) -> Result<BigRational> {
        self.inner.eval_exact(&(n * n))
    }
}

/// Half-open index window `[start, end)` (0-based positions).
pub type Window = (usize, usize);

/// Window averages with an oscillation diagnostic over the tail half.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AveragingReport {
    pub windows: Vec<Window>,
    /// Per-window `(re, im)` of the mean.
    pub averages: Vec<(f64, f64)>,
    /// Max pairwise modulus distance among the tail half of the averages.
    pub oscillation: f64,
    /// Crude double-precision error allowance for the averages.
    pub rounding_bound: f64,
}

fn tail_oscillation(averages: &[(f64, f64)]) -> f64 {
    let tail = &averages[averages.len() / 2..];
    let mut osc: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in tail.iter().skip(i + 1) {
            let d = Complex64::new(a.0 - b.0, a.1 - b.1).norm();
            osc = osc.max(d);
        }
    }
    osc
}

fn validate_windows(windows: &[Window], limit: usize, what: &str) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::EmptySet("windows"));
    }
    for &(a, b) in windows {
        if a >= b {
            return Err(Error::InvalidArgument(format!("empty window [{a}, {b})")));
        }
        if b > limit {
            return Err(Error::InvalidArgument(format!(
                "window [{a}, {b}) exceeds {what} length {limit}"
            )));
        }
    }
    Ok(())
}

fn finish_report(windows: &[Window], averages: Vec<(f64, f64)>) -> AveragingReport {
    let max_len = windows.iter().map(|&(a, b)| b - a).max().unwrap_or(0);
    AveragingReport {
        windows: windows.to_vec(),
        oscillation: tail_oscillation(&averages),
        rounding_bound: max_len as f64 * 8.0 * f64::EPSILON,
        averages,
    }
}

/// Mean of `psi(s_n)` over each index window into `s`.
pub fn average_along(
    psi: &impl ComplexSeq,
    s: &IndexSet,
    windows: &[Window],
) -> Result<AveragingReport> {
    validate_windows(windows, s.len(), "prefix")?;
    let elems = s.elements();
    let averages = windows
        .iter()
        .map(|&(a, b)| {
            let sum: Complex64 = elems[a..b].iter().map(|x| psi.eval_c(x)).sum();
            let mean = sum / (b - a) as f64;
            (mean.re, mean.im)
        })
        .collect();
    Ok(finish_report(windows, averages))
}

/// Mean of `psi(i)` over index positions `i` (1-based) in each window.
pub fn average_by_index(psi: &impl ComplexSeq, windows: &[Window]) -> Result<AveragingReport> {
    validate_windows(windows, usize::MAX, "index range")?;
    let averages = windows
        .iter()
        .map(|&(a, b)| {
            let sum: Complex64 = (a..b).map(|i| psi.eval_c(&BigInt::from(i + 1))).sum();
            let mean = sum / (b - a) as f64;
            (mean.re, mean.im)
        })
        .collect();
    Ok(finish_report(windows, averages))
}

/// 0/1 blocks with geometrically growing lengths: block `j` (0-based) has
/// length `factor^j` and value `j mod 2`. Cesàro averages at block ends
/// oscillate between accumulation points `1/(f+1)` and `f/(f+1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonconvergentTarget {
    pub factor: u64,
}

pub fn nonconvergent_target(factor: u64) -> Result<NonconvergentTarget> {
    if factor < 2 {
        return Err(Error::InvalidArgument("block growth factor must be >= 2".into()));
    }
    Ok(NonconvergentTarget { factor })
}

impl NonconvergentTarget {
    /// Block value at 1-based position `n`.
    pub fn value_at(&self, n: u64) -> u8 {
        assert!(n >= 1, "positions are 1-based");
        let mut cum: u128 = 0;
        let mut len: u128 = 1;
        let mut j: u8 = 0;
        loop {
            cum += len;
            if (n as u128) <= cum {
                return j % 2;
            }
            len *= self.factor as u128;
            j = j.wrapping_add(1);
        }
    }

    /// Exact Cesàro averages at the first `blocks` block boundaries.
    pub fn boundary_report(&self, blocks: usize) -> NonconvergentReport {
        let f = BigInt::from(self.factor);
        let mut rows = Vec::with_capacity(blocks);
        let mut total = BigInt::zero();
        let mut ones = BigInt::zero();
        let mut len = BigInt::one();
        for j in 0..blocks {
            if j % 2 == 1 {
                ones += &len;
            }
            total += &len;
            rows.push(BoundaryRow {
                block: j as u32,
                boundary: total.clone(),
                average: BigRational::new(ones.clone(), total.clone()),
            });
            len *= &f;
        }
        let fp1 = &f + BigInt::one();
        NonconvergentReport {
            factor: self.factor,
            rows,
            lower_limit: BigRational::new(BigInt::one(), fp1.clone()),
            upper_limit: BigRational::new(f, fp1),
        }
    }
}

impl ComplexSeq for NonconvergentTarget {
    fn eval_c(&self, n: &BigInt) -> Complex64 {
        let n = n.to_u64().expect("position fits in u64");
        Complex64::new(self.value_at(n) as f64, 0.0)
    }
}

impl ExactSeq for NonconvergentTarget {
    fn eval_exact(&self, n: &BigInt) -> Result<BigRational> {
        let n = n
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("position out of range".into()))?;
        Ok(BigRational::from(BigInt::from(self.value_at(n))))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub block: u32,
    #[serde(with = "crate::rat::serde_int")]
    pub boundary: BigInt,
    #[serde(with = "serde_rat")]
    pub average: BigRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonconvergentReport {
    pub factor: u64,
    pub rows: Vec<BoundaryRow>,
    #[serde(with = "serde_rat")]
    pub lower_limit: BigRational,
    #[serde(with = "serde_rat")]
    pub upper_limit: BigRational,
}

/// Per-window relative density of `F` inside `E` with a tail estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub windows: Vec<Window>,
    #[serde(with = "serde_rat_vec")]
    pub densities: Vec<BigRational>,
    /// Max density over the tail half of the windows.
    #[serde(with = "serde_rat")]
    pub upper_estimate: BigRational,
}

/// Counts, per index window, the fraction of positions of `E` occupied by
/// elements of `F`. Requires `F ⊆ E` as sets.
pub fn relative_density(f: &IndexSet, e: &IndexSet, windows: &[Window]) -> Result<DensityReport> {
    let mut positions = Vec::with_capacity(f.len());
    for x in f.iter() {
        match e.elements().binary_search(x) {
            Ok(p) => positions.push(p),
            Err(_) => {
                return Err(Error::InvalidArgument(format!("{x} is in F but not in E")));
            }
        }
    }
    validate_windows(windows, e.len(), "prefix")?;
    let densities: Vec<BigRational> = windows
        .iter()
        .map(|&(a, b)| {
            let lo = positions.partition_point(|&p| p < a);
            let hi = positions.partition_point(|&p| p < b);
            BigRational::new(BigInt::from(hi - lo), BigInt::from(b - a))
        })
        .collect();
    let upper_estimate =
        densities[densities.len() / 2..].iter().max().expect("nonempty windows").clone();
    Ok(DensityReport { windows: windows.to_vec(), densities, upper_estimate })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    All,
    EvenIndices,
    SquareIndices,
}

impl Selector {
    fn positions(&self, len: usize) -> Vec<usize> {
        match self {
            Selector::All => (0..len).collect(),
            // 1-based even indices.
            Selector::EvenIndices => (1..len).step_by(2).collect(),
            Selector::SquareIndices => {
                (1usize..).map(|i| i * i - 1).take_while(|&p| p < len).collect()
            }
        }
    }
}

/// Two-sided averaging exhibit along a polynomial-valued sequence: trig
/// phases stabilize while a block target composed on the same positions
/// keeps oscillating.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemoReport {
    pub selector: Selector,
    pub trig_oscillations: Vec<f64>,
    pub trig_max_oscillation: f64,
    pub target_oscillation: f64,
    pub density: DensityReport,
}

pub fn polynomial_non_i0_demo(
    coeffs: &[BigRational],
    e_count: usize,
    selector: Selector,
    freqs: &[BigRational],
    windows: &[Window],
) -> Result<DemoReport> {
    let e = generate(&GeneratorSpec::Polynomial { coeffs: coeffs.to_vec() }, e_count)?;
    let positions = selector.positions(e.len());
    let f = IndexSet::new(positions.iter().map(|&p| e.elements()[p].clone()).collect(), None)?;
    let mut trig_oscillations = Vec::with_capacity(freqs.len());
    for freq in freqs {
        let psi = TrigPolynomial::single(freq.clone());
        trig_oscillations.push(average_along(&psi, &f, windows)?.oscillation);
    }
    let target = nonconvergent_target(2)?;
    let target_oscillation = average_by_index(&target, windows)?.oscillation;
    let density_windows: Vec<Window> =
        windows.iter().map(|&(a, b)| (a.min(e.len() - 1), b.min(e.len()))).collect();
    let density = relative_density(&f, &e, &density_windows)?;
    let trig_max_oscillation = trig_oscillations.iter().cloned().fold(0.0f64, f64::max);
    Ok(DemoReport { selector, trig_oscillations, trig_max_oscillation, target_oscillation, density })
}

fn ratio_threshold(ell: &BigRational) -> Result<BigRational> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !ell.is_positive() || ell >= &half {
        return Err(Error::InvalidArgument(format!(
            "interval length must satisfy 0 < ell < 1/2, got {}",
            rat_str(ell)
        )));
    }
    Ok(BigRational::one() / ell + BigRational::one())
}

fn c_of(n: u64, s: &BigInt) -> BigInt {
    BigInt::from(2 * n) * s + BigInt::from(n * n)
}

/// Greedy minimal base `s_1 < s_2 < ...` with, for every n,
/// `d_n / c_n > 1/ell + 1` and `c_{n+1} / d_n > 1/ell + 1`, where
/// `c_n = 2 n s_n + n^2` and `d_n = s_n^2`. These force the interleaving
/// `c_1 < d_1 < c_2 < d_2 < ...` with gaps wide enough for the descent.
pub fn fast_lacunary(ell: &BigRational, count: usize) -> Result<IndexSet> {
    let t = ratio_threshold(ell)?;
    if count == 0 {
        return Err(Error::InvalidArgument("fast_lacunary needs count >= 1".into()));
    }
    // d_n/c_n > T, as integers: T.denom * s^2 > T.numer * c_n.
    let growth_ok = |n: u64, s: &BigInt| -> bool {
        t.denom() * s * s > t.numer() * c_of(n, s)
    };
    // c_n/d_{n-1} > T: T.denom * c_n > T.numer * d_prev.
    let jump_ok = |n: u64, s: &BigInt, d_prev: &BigInt| -> bool {
        t.denom() * c_of(n, s) > t.numer() * d_prev
    };
    let smallest_from = |lo: BigInt, pred: &dyn Fn(&BigInt) -> bool| -> BigInt {
        // Exponential bracket then bisect; predicates are monotone in s.
        let mut hi = lo.clone();
        while !pred(&hi) {
            hi = &hi * 2 + 1;
        }
        let mut lo = lo;
        while lo < hi {
            let mid: BigInt = (&lo + &hi) / 2;
            if pred(&mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    };

    let mut out: Vec<BigInt> = Vec::with_capacity(count);
    for n in 1..=count as u64 {
        let lo = out.last().map(|s| s + 1).unwrap_or_else(BigInt::one);
        let s = if n == 1 {
            smallest_from(lo, &|s| growth_ok(1, s))
        } else {
            let d_prev = out.last().unwrap() * out.last().unwrap();
            let from_jump = smallest_from(lo.clone(), &|s| jump_ok(n, s, &d_prev));
            smallest_from(from_jump.max(lo), &|s| growth_ok(n, s))
        };
        out.push(s);
    }
    IndexSet::new(out, Some(format!("fast-lacunary({})", rat_str(ell))))
}

/// One committed stage of the nested-interval descent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescentStage {
    pub label: String,
    #[serde(with = "crate::rat::serde_int")]
    pub freq: BigInt,
    #[serde(with = "crate::rat::serde_int")]
    pub t: BigInt,
    pub arc: CircleInterval,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NestedDescent {
    #[serde(with = "serde_rat")]
    pub alpha: BigRational,
    pub enclosure: CircleInterval,
    pub stages: Vec<DescentStage>,
}

/// Descends the interval chains: at stage n the current arc is intersected
/// with the left-most component of `{(base + t)/freq : t}` + `(0, ell)/freq`
/// fully contained in it, first for `freq = c_n` with base `1/2`, then for
/// `freq = d_n` with base `0`. The fast-lacunary growth guarantees a
/// component always fits; a miss is reported as a containment failure.
pub fn nested_interval_alpha(
    s: &IndexSet,
    ell: &BigRational,
    stages: usize,
) -> Result<NestedDescent> {
    ratio_threshold(ell)?;
    if stages > s.len() {
        return Err(Error::InvalidArgument(format!(
            "{stages} stages requested but base has {} elements",
            s.len()
        )));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut current: Option<(BigRational, BigRational)> = None;
    let mut trace = Vec::with_capacity(2 * stages);

    let mut descend = |current: &mut Option<(BigRational, BigRational)>,
                       label: String,
                       freq: BigInt,
                       base: &BigRational|
     -> Result<()> {
        let freq_r = BigRational::from(freq.clone());
        let t = match current {
            None => BigInt::zero(),
            Some((lo, _)) => {
                let t = ceil_int(&(&freq_r * &*lo - base));
                if t.is_negative() {
                    BigInt::zero()
                } else {
                    t
                }
            }
        };
        let left = (base + BigRational::from(t.clone())) / &freq_r;
        let right = &left + ell / &freq_r;
        if t >= freq || right > BigRational::one() {
            return Err(Error::ContainmentFailure {
                stage: label,
                detail: "no component left inside the unit interval".into(),
            });
        }
        if let Some((lo, hi)) = current {
            if &left < lo || &right > hi {
                return Err(Error::ContainmentFailure {
                    stage: label,
                    detail: format!(
                        "component ({}, {}) escapes current arc ({}, {})",
                        rat_str(&left),
                        rat_str(&right),
                        rat_str(lo),
                        rat_str(hi)
                    ),
                });
            }
        }
        trace.push(DescentStage {
            label,
            freq,
            t,
            arc: CircleInterval::open(&left, &right),
        });
        *current = Some((left, right));
        Ok(())
    };

    for (i, s_n) in s.iter().take(stages).enumerate() {
        let n = (i + 1) as u64;
        let c_n = c_of(n, s_n);
        let d_n = s_n * s_n;
        descend(&mut current, format!("C{n}"), c_n, &half)?;
        descend(&mut current, format!("D{n}"), d_n, &BigRational::zero())?;
    }

    let (alpha, enclosure) = match current {
        None => (BigRational::zero(), CircleInterval::full()),
        Some((lo, hi)) => {
            let arc = CircleInterval::open(&lo, &hi);
            (arc.midpoint(), arc)
        }
    };
    Ok(NestedDescent { alpha, enclosure, stages: trace })
}

/// Constructive witness data: base, derived families `c_n = 2 n s_n + n^2`
/// and `d_n = s_n^2`, and a rotation steering both into their target arcs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoStepWitness {
    #[serde(with = "serde_rat")]
    pub ell: BigRational,
    pub s: IndexSet,
    #[serde(with = "crate::rat::serde_int_vec")]
    pub c: Vec<BigInt>,
    #[serde(with = "crate::rat::serde_int_vec")]
    pub d: Vec<BigInt>,
    #[serde(with = "serde_rat")]
    pub alpha: BigRational,
    pub enclosure: CircleInterval,
}

/// Runs the full pipeline: greedy base, nested descent, derived families.
pub fn construct_two_step_witness(ell: &BigRational, n: usize) -> Result<TwoStepWitness> {
    let s = fast_lacunary(ell, n)?;
    let descent = nested_interval_alpha(&s, ell, n)?;
    let c = s.iter().enumerate().map(|(i, x)| c_of((i + 1) as u64, x)).collect();
    let d = s.iter().map(|x| x * x).collect();
    Ok(TwoStepWitness {
        ell: ell.clone(),
        s,
        c,
        d,
        alpha: descent.alpha,
        enclosure: descent.enclosure,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCheck {
    pub n: usize,
    pub m: usize,
    #[serde(with = "serde_rat")]
    pub value: BigRational,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub ok: bool,
    /// Memberships `c_n alpha in (1/2, 1/2 + ell)` and `d_n alpha in (0, ell)`.
    pub base_ok: bool,
    pub pair_checks: Vec<PairCheck>,
}

/// Exact check that `((s_n + n)^2 - s_m^2) * alpha mod 1` lies in
/// `(1/2 - c, 1/2 + c)` for all `n, m <= upto`, using the decomposition
/// `(s_n + n)^2 - s_m^2 = c_n + d_n - d_m`. Requires `ell = c/3`.
pub fn verify_two_step_witness(
    w: &TwoStepWitness,
    upto: usize,
    c_param: &BigRational,
) -> Result<WitnessReport> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !c_param.is_positive() || c_param >= &half {
        return Err(Error::InvalidArgument("need 0 < c < 1/2".into()));
    }
    let three = BigRational::from(BigInt::from(3));
    if w.ell != c_param / &three {
        return Err(Error::InvalidArgument(format!(
            "witness built for ell = {}, expected c/3 = {}",
            rat_str(&w.ell),
            rat_str(&(c_param / &three))
        )));
    }
    if upto > w.s.len() || upto == 0 {
        return Err(Error::InvalidArgument("pair range exceeds witness length".into()));
    }
    // Re-derive the families; a tampered witness fails here.
    for (i, s_n) in w.s.iter().take(upto).enumerate() {
        let n = (i + 1) as u64;
        if w.c.get(i) != Some(&c_of(n, s_n)) || w.d.get(i) != Some(&(s_n * s_n)) {
            return Err(Error::InvariantViolation("stored c/d family mismatch".into()));
        }
    }

    let mut base_ok = w.enclosure.contains(&w.alpha);
    for i in 0..upto {
        let cx = torus_reduce(&(BigRational::from(w.c[i].clone()) * &w.alpha));
        let dx = torus_reduce(&(BigRational::from(w.d[i].clone()) * &w.alpha));
        base_ok &= cx > half && cx < &half + &w.ell;
        base_ok &= dx.is_positive() && dx < w.ell;
    }

    let lo = &half - c_param;
    let hi = &half + c_param;
    let mut pair_checks = Vec::with_capacity(upto * upto);
    let mut ok = base_ok;
    for n in 1..=upto {
        for m in 1..=upto {
            // (s_n + n)^2 - s_m^2, signed.
            let e = &w.c[n - 1] + &w.d[n - 1] - &w.d[m - 1];
            let value = torus_reduce(&(BigRational::from(e) * &w.alpha));
            let pass = value > lo && value < hi;
            ok &= pass;
            pair_checks.push(PairCheck { n, m, value, ok: pass });
        }
    }
    Ok(WitnessReport { ok, base_ok, pair_checks })
}
