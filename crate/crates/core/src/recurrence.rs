//! Finite-evidence recurrence machinery: exact sup-min values over the
//! circle, the least prefix bound forcing a small orbit norm, the greedy
//! two-coloring of a recurrent prefix, and a certified doubling orbit.
//!
//! Recurrence itself is a property of infinite sets; everything here names
//! the finite prefix and the `(d, eps)` schedule it actually covers.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::envelope;
use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::rat::{rat_str, serde_rat};
use crate::torus::{torus_reduce, CircleInterval, TorusPoint};

/// Exact value of `sup_alpha min_{r in R} ||r * alpha||` with a maximizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupMinResult {
    pub r: IndexSet,
    pub dim: usize,
    #[serde(with = "serde_rat")]
    pub value: BigRational,
    pub argmax: TorusPoint,
}

impl SupMinResult {
    /// Recomputes the sweep from scratch and checks the stored maximizer.
    pub fn verify(&self) -> Result<()> {
        if self.dim != 1 {
            return Err(Error::InvariantViolation("exhaustive sup-min is 1-D only".into()));
        }
        let env = envelope::supmin(self.r.elements())?;
        if env.value != self.value {
            return Err(Error::InvariantViolation(format!(
                "sup-min mismatch: stored {}, recomputed {}",
                rat_str(&self.value),
                rat_str(&env.value)
            )));
        }
        if envelope::eval_min(self.r.elements(), self.argmax.coord_1d()) != self.value {
            return Err(Error::InvariantViolation("argmax does not attain the sup".into()));
        }
        Ok(())
    }
}

/// Exact maximum over the circle of the minimum orbit norm of a finite set.
pub fn supmin_1d(r: &IndexSet) -> Result<SupMinResult> {
    if r.is_empty() {
        return Err(Error::EmptySet("supmin_1d"));
    }
    let env = envelope::supmin(r.elements())?;
    Ok(SupMinResult {
        r: r.clone(),
        dim: 1,
        value: env.value,
        argmax: TorusPoint::one_dim(env.argmax),
    })
}

/// Evaluates `min_{r in R} ||r * alpha||` directly (no sweep).
pub fn eval_min_norm(r: &IndexSet, alpha: &BigRational) -> Result<BigRational> {
    if r.is_empty() {
        return Err(Error::EmptySet("eval_min_norm"));
    }
    Ok(envelope::eval_min(r.elements(), alpha))
}

/// Outcome of the threshold search: the least `N` such that every rotation
/// already has some `r <= N` in the prefix with `||r * alpha|| < eps`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ThresholdOutcome {
    Reached {
        #[serde(with = "crate::rat::serde_int")]
        n: BigInt,
        block: IndexSet,
        certificate: SupMinResult,
    },
    NotReached {
        final_sup: SupMinResult,
    },
}

/// Smallest `N` with `supmin(R ∩ [N]) < eps` (strict), scanning the available
/// prefix element by element; `NotReached` carries the exact sup over the
/// whole prefix. Accepts any `0 < eps <= 1`.
pub fn recurrence_threshold(r: &IndexSet, eps: &BigRational) -> Result<ThresholdOutcome> {
    if r.is_empty() {
        return Err(Error::EmptySet("recurrence_threshold"));
    }
    if !eps.is_positive() || eps > &BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "threshold needs 0 < eps <= 1, got {}",
            rat_str(eps)
        )));
    }
    for k in 1..=r.len() {
        let prefix = r.first_n(k);
        let cert = supmin_1d(&prefix)?;
        if &cert.value < eps {
            // The sup only drops when a new element enters, so the least
            // valid integer bound is exactly this element.
            let n = prefix.max().unwrap().clone();
            return Ok(ThresholdOutcome::Reached { n, block: prefix, certificate: cert });
        }
        if k == r.len() {
            return Ok(ThresholdOutcome::NotReached { final_sup: cert });
        }
    }
    unreachable!()
}

/// One `(dim, eps)` stage of a partition schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub dim: usize,
    #[serde(with = "serde_rat")]
    pub eps: BigRational,
}

/// The canonical schedule `eps_k = 1/k` for `k = 1..=stages`, all in d = 1.
pub fn harmonic_schedule(stages: usize) -> Vec<Stage> {
    (1..=stages)
        .map(|k| Stage { dim: 1, eps: BigRational::new(BigInt::one(), BigInt::from(k as i64)) })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: usize,
    pub dim: usize,
    #[serde(with = "serde_rat")]
    pub eps: BigRational,
    #[serde(with = "crate::rat::serde_int")]
    pub a_threshold: BigInt,
    pub a_block: IndexSet,
    pub a_certificate: SupMinResult,
    #[serde(with = "crate::rat::serde_int")]
    pub b_threshold: BigInt,
    pub b_block: IndexSet,
    pub b_certificate: SupMinResult,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageAbort {
    pub stage: usize,
    /// Which peel failed: "A" or "B".
    pub phase: String,
    pub final_sup: Option<SupMinResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionTrace {
    pub input: IndexSet,
    pub schedule: Vec<Stage>,
    pub stages: Vec<StageTrace>,
    pub a: IndexSet,
    pub b: IndexSet,
    pub residual: IndexSet,
    pub stopped: Option<StageAbort>,
}

impl PartitionTrace {
    pub fn completed_all_stages(&self) -> bool {
        self.stopped.is_none() && self.stages.len() == self.schedule.len()
    }

    /// Checks disjoint reconstruction of the input prefix and re-verifies the
    /// per-stage sup-min certificates against their epsilons.
    pub fn verify(&self) -> Result<()> {
        let rebuilt = self.a.union_with(&self.b).union_with(&self.residual);
        if rebuilt.elements() != self.input.elements() {
            return Err(Error::InvariantViolation("A ∪ B ∪ residual != input".into()));
        }
        if !self.a.is_disjoint(&self.b) {
            return Err(Error::InvariantViolation("A and B overlap".into()));
        }
        for st in &self.stages {
            st.a_certificate.verify()?;
            st.b_certificate.verify()?;
            if st.a_certificate.value >= st.eps || st.b_certificate.value >= st.eps {
                return Err(Error::InvariantViolation(format!(
                    "stage {} certificate not below eps {}",
                    st.stage,
                    rat_str(&st.eps)
                )));
            }
        }
        Ok(())
    }
}

/// Greedy two-coloring of a recurrent prefix: each stage peels
/// `A_k = residual ∩ [N(residual, eps_k)]` and then `B_k` from what is left,
/// recursing on the remainder. Stops (reporting completed stages and an
/// untouched residual) as soon as a threshold is out of reach.
pub fn partition_bohr(r: &IndexSet, schedule: &[Stage]) -> Result<PartitionTrace> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty partition schedule".into()));
    }
    if let Some(bad) = schedule.iter().find(|s| s.dim != 1) {
        return Err(Error::InvalidArgument(format!(
            "only 1-D stages are exhaustively decidable, got dim {}",
            bad.dim
        )));
    }
    if r.is_empty() {
        return Err(Error::EmptySet("partition_bohr"));
    }
    let mut residual = r.clone();
    let mut stages = Vec::new();
    let mut a_all = IndexSet::empty();
    let mut b_all = IndexSet::empty();
    let mut stopped = None;

    for (idx, stage) in schedule.iter().enumerate() {
        let k = idx + 1;
        if residual.is_empty() {
            stopped = Some(StageAbort { stage: k, phase: "A".into(), final_sup: None });
            break;
        }
        let (a_threshold, a_block, a_certificate) =
            match recurrence_threshold(&residual, &stage.eps)? {
                ThresholdOutcome::Reached { n, block, certificate } => (n, block, certificate),
                ThresholdOutcome::NotReached { final_sup } => {
                    stopped = Some(StageAbort {
                        stage: k,
                        phase: "A".into(),
                        final_sup: Some(final_sup),
                    });
                    break;
                }
            };
        let after_a = residual.minus(&a_block);
        if after_a.is_empty() {
            stopped = Some(StageAbort { stage: k, phase: "B".into(), final_sup: None });
            break;
        }
        let (b_threshold, b_block, b_certificate) =
            match recurrence_threshold(&after_a, &stage.eps)? {
                ThresholdOutcome::Reached { n, block, certificate } => (n, block, certificate),
                ThresholdOutcome::NotReached { final_sup } => {
                    stopped = Some(StageAbort {
                        stage: k,
                        phase: "B".into(),
                        final_sup: Some(final_sup),
                    });
                    break;
                }
            };
        residual = after_a.minus(&b_block);
        a_all = a_all.union_with(&a_block);
        b_all = b_all.union_with(&b_block);
        stages.push(StageTrace {
            stage: k,
            dim: stage.dim,
            eps: stage.eps.clone(),
            a_threshold,
            a_block,
            a_certificate,
            b_threshold,
            b_block,
            b_certificate,
        });
    }

    let trace = PartitionTrace {
        input: r.clone(),
        schedule: schedule.to_vec(),
        stages,
        a: a_all,
        b: b_all,
        residual,
        stopped,
    };
    trace.verify()?;
    Ok(trace)
}

/// One certified point of the doubling orbit of `alpha = sum 2^(-k^2)`.
///
/// `mantissa / 2^digits` is the exact truncation of the shifted binary digit
/// stream; the true orbit point lies in `[value, value + 2^(-digits)]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DyadicOrbitPoint {
    pub n: u32,
    #[serde(with = "crate::rat::serde_int")]
    pub mantissa: BigInt,
    pub digits: u64,
    pub verdict: OrbitVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitVerdict {
    Outside,
    Inside,
}

impl DyadicOrbitPoint {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.digits)
    }

    pub fn enclosure_upper(&self) -> BigRational {
        BigRational::new(&self.mantissa + 1, BigInt::one() << self.digits)
    }

    /// Unreduced `"p/2^k"` rendering of the truncation.
    pub fn value_str(&self) -> String {
        format!("{}/2^{}", self.mantissa, self.digits)
    }
}

/// Digit-stream truncation of `2^n * alpha mod 1` for `alpha = sum 2^(-k^2)`:
/// bit `p` of the shifted stream is set iff `p + n` is a perfect square.
fn shifted_mantissa(n: u32, digits: u64) -> BigInt {
    let mut mantissa = BigInt::zero();
    let mut k = 1u64;
    loop {
        let sq = k * k;
        if sq <= n as u64 {
            k += 1;
            continue;
        }
        let p = sq - n as u64; // bit position in the fractional expansion
        if p > digits {
            break;
        }
        mantissa |= BigInt::one() << (digits - p);
        k += 1;
    }
    mantissa
}

/// Exact truncation of `alpha = sum 2^(-k^2)` itself to `digits` bits.
pub fn doubling_alpha_truncated(digits: u64) -> BigRational {
    BigRational::new(shifted_mantissa(0, digits), BigInt::one() << digits)
}

/// Tracks the orbit `2^n * alpha mod 1` for `n = 0..=n_max` with certified
/// membership verdicts against the forbidden arc. Starts at `n_max^2 + 64`
/// guard digits and doubles on exhaustion; a verdict is only issued when the
/// whole enclosure clears (or lands inside) the arc.
pub fn doubling_orbit(n_max: u32, forbidden: &CircleInterval) -> Result<Vec<DyadicOrbitPoint>> {
    let base_digits = (n_max as u64) * (n_max as u64) + 64;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let mut digits = base_digits;
        let mut attempts = 0;
        loop {
            let mantissa = shifted_mantissa(n, digits);
            let point = DyadicOrbitPoint { n, mantissa, digits, verdict: OrbitVerdict::Outside };
            let lo = point.value();
            let hi = point.enclosure_upper();
            if forbidden.disjoint_from_enclosure(&lo, &hi) {
                out.push(point);
                break;
            }
            let inside = forbidden.contains(&lo)
                && forbidden.contains(&hi)
                && (&hi - &lo) < forbidden.length();
            if inside {
                out.push(DyadicOrbitPoint { verdict: OrbitVerdict::Inside, ..point });
                break;
            }
            attempts += 1;
            if attempts > 4 {
                return Err(Error::GuardExhausted(n));
            }
            digits *= 2;
        }
    }
    Ok(out)
}

/// Exponential-sum diagnostics along a sequence at a fixed rotation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylReport {
    pub count: usize,
    /// `|1/N sum e^{2 pi i s_n alpha}|` in double precision.
    pub magnitude: f64,
    /// Histogram of the exact fractional parts over `bins` equal arcs.
    pub histogram: Vec<u64>,
    pub bins: usize,
}

pub fn weyl_sum(e: &IndexSet, alpha: &BigRational, bins: usize) -> Result<WeylReport> {
    if e.is_empty() {
        return Err(Error::EmptySet("weyl_sum"));
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be >= 1".into()));
    }
    let mut histogram = vec![0u64; bins];
    let mut sum = Complex64::new(0.0, 0.0);
    for s in e.iter() {
        let frac = torus_reduce(&(BigRational::from(s.clone()) * alpha));
        // Exact binning: floor(frac * bins) via integer division.
        let idx = ((frac.numer() * BigInt::from(bins)) / frac.denom())
            .to_usize()
            .expect("bin index fits");
        histogram[idx.min(bins - 1)] += 1;
        let theta = 2.0 * std::f64::consts::PI * frac.to_f64().expect("finite");
        sum += Complex64::new(theta.cos(), theta.sin());
    }
    Ok(WeylReport { count: e.len(), magnitude: sum.norm() / e.len() as f64, histogram, bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_sets::{generate, GeneratorSpec};
    use crate::rat::rat;

    fn iset(xs: &[i64]) -> IndexSet {
        IndexSet::from_i64s(xs).unwrap()
    }

    #[test]
    fn supmin_single_frequency() {
        let r = supmin_1d(&iset(&[1])).unwrap();
        assert_eq!(r.value, rat(1, 2));
        assert_eq!(r.argmax, TorusPoint::one_dim(rat(1, 2)));
        r.verify().unwrap();
    }

    #[test]
    fn supmin_pair_and_scaled_copies() {
        // Oracle-confirmed: sup for {1,2} is 1/3 at 1/3 (see envelope tests).
        let r = supmin_1d(&iset(&[1, 2])).unwrap();
        assert_eq!(r.value, rat(1, 3));
        assert_eq!(r.argmax, TorusPoint::one_dim(rat(1, 3)));
        // {k, 2k, ..., mk} matches {1..m}.
        for k in 1..=5i64 {
            for m in 1..=5i64 {
                let scaled: Vec<i64> = (1..=m).map(|j| j * k).collect();
                let plain: Vec<i64> = (1..=m).collect();
                assert_eq!(
                    supmin_1d(&iset(&scaled)).unwrap().value,
                    supmin_1d(&iset(&plain)).unwrap().value
                );
            }
        }
    }

    #[test]
    fn threshold_on_even_numbers() {
        // 2N prefix: {2} sups at 1/2, {2,4} at 1/3, {2,4,6} at 1/4 < 1/3.
        let r = generate(&GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(2, 1)] }, 50)
            .unwrap();
        match recurrence_threshold(&r, &rat(1, 3)).unwrap() {
            ThresholdOutcome::Reached { n, block, certificate } => {
                assert_eq!(n, BigInt::from(6));
                assert_eq!(block.elements(), iset(&[2, 4, 6]).elements());
                assert!(certificate.value < rat(1, 3));
            }
            other => panic!("expected a threshold, got {other:?}"),
        }
    }

    #[test]
    fn threshold_on_even_numbers_at_one_tenth() {
        // supmin({2, 4, ..., 2k}) = 1/(k + 1) drops below 1/10 first at k = 10.
        let r = generate(&GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(2, 1)] }, 50)
            .unwrap();
        match recurrence_threshold(&r, &rat(1, 10)).unwrap() {
            ThresholdOutcome::Reached { n, certificate, .. } => {
                assert_eq!(n, BigInt::from(20));
                assert_eq!(certificate.value, rat(1, 11));
            }
            other => panic!("expected a threshold, got {other:?}"),
        }
    }

    #[test]
    fn threshold_boundary_is_strict() {
        // Singleton {1} sups at exactly 1/2, which is not < 1/2.
        match recurrence_threshold(&iset(&[1]), &rat(1, 2)).unwrap() {
            ThresholdOutcome::NotReached { final_sup } => {
                assert_eq!(final_sup.value, rat(1, 2));
            }
            other => panic!("expected NotReached, got {other:?}"),
        }
        // One more element brings the sup to 1/3 and the bound to 2.
        match recurrence_threshold(&iset(&[1, 2]), &rat(1, 2)).unwrap() {
            ThresholdOutcome::Reached { n, .. } => assert_eq!(n, BigInt::from(2)),
            other => panic!("expected threshold 2, got {other:?}"),
        }
    }

    #[test]
    fn threshold_monotone_under_prefix_extension() {
        // Enlarging R never increases the threshold.
        let base = iset(&[3, 6, 9, 12, 15, 18, 21, 24]);
        let more = iset(&[2, 3, 6, 8, 9, 12, 14, 15, 18, 21, 24]);
        let eps = rat(1, 4);
        let n_base = match recurrence_threshold(&base, &eps).unwrap() {
            ThresholdOutcome::Reached { n, .. } => n,
            _ => panic!("base reaches"),
        };
        let n_more = match recurrence_threshold(&more, &eps).unwrap() {
            ThresholdOutcome::Reached { n, .. } => n,
            _ => panic!("superset reaches"),
        };
        assert!(n_more <= n_base, "{n_more} > {n_base}");
    }

    #[test]
    fn threshold_not_reached_for_powers() {
        // Lacunary powers of two: alpha = 1/3 keeps every ||2^n * alpha|| at
        // exactly 1/3, so no prefix ever pushes the sup below 1/5.
        let r = generate(&GeneratorSpec::Power { base: BigInt::from(2) }, 10).unwrap();
        match recurrence_threshold(&r, &rat(1, 5)).unwrap() {
            ThresholdOutcome::NotReached { final_sup } => {
                assert!(final_sup.value >= rat(1, 3));
                assert_eq!(eval_min_norm(&r, &rat(1, 3)).unwrap(), rat(1, 3));
            }
            other => panic!("expected NotReached, got {other:?}"),
        }
    }

    #[test]
    fn partition_even_numbers_three_stages() {
        let r = generate(&GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(2, 1)] }, 500)
            .unwrap();
        let schedule = harmonic_schedule(3);
        let trace = partition_bohr(&r, &schedule).unwrap();
        assert!(trace.completed_all_stages(), "stopped: {:?}", trace.stopped);
        assert!(!trace.a.is_empty() && !trace.b.is_empty());
        for st in &trace.stages {
            assert!(st.a_certificate.value < st.eps);
            assert!(st.b_certificate.value < st.eps);
        }
        trace.verify().unwrap();
    }

    #[test]
    fn partition_ap_blocks() {
        // Unions of blocks {b, 2b, ..., mb} recur; the greedy peel completes.
        let mut vals: Vec<i64> = Vec::new();
        for (b, m) in [(5i64, 8i64), (7, 9), (11, 10)] {
            for j in 1..=m {
                vals.push(b * j);
            }
        }
        vals.sort();
        vals.dedup();
        let r = iset(&vals);
        let trace = partition_bohr(&r, &harmonic_schedule(2)).unwrap();
        assert!(trace.completed_all_stages());
        trace.verify().unwrap();
    }

    #[test]
    fn partition_lacunary_stops_at_first_stage() {
        let r = generate(&GeneratorSpec::Power { base: BigInt::from(2) }, 10).unwrap();
        let schedule = vec![Stage { dim: 1, eps: rat(1, 5) }];
        let trace = partition_bohr(&r, &schedule).unwrap();
        assert!(trace.stages.is_empty());
        let stopped = trace.stopped.expect("must stop");
        assert_eq!(stopped.stage, 1);
        assert_eq!(stopped.phase, "A");
        // Nothing was consumed.
        assert_eq!(trace.residual.elements(), r.elements());
    }

    #[test]
    fn partition_rejects_bad_schedules() {
        let r = iset(&[2, 4, 6]);
        assert!(partition_bohr(&r, &[]).is_err());
        assert!(partition_bohr(&r, &[Stage { dim: 2, eps: rat(1, 2) }]).is_err());
    }

    #[test]
    fn doubling_orbit_first_values() {
        let forbidden = CircleInterval::half_open(&rat(3, 4), &rat(1, 1));
        let orbit = doubling_orbit(8, &forbidden).unwrap();
        assert_eq!(orbit.len(), 9);
        // n = 0: alpha itself is 0.1001000010... in binary, inside [1/2, 3/4).
        let a0 = orbit[0].value();
        assert!(a0 >= rat(9, 16) && a0 < rat(10, 16));
        // n = 3: the shifted stream starts 1000010..., value in [1/2, 9/16).
        let a3 = orbit[3].value();
        assert!(a3 >= rat(1, 2) && a3 < rat(9, 16));
        for p in &orbit {
            assert_eq!(p.verdict, OrbitVerdict::Outside, "n = {}", p.n);
        }
    }

    #[test]
    fn doubling_orbit_inside_verdict_is_also_certified() {
        // Query the arc the orbit provably lives in for n = 0.
        let arc = CircleInterval::half_open(&rat(1, 2), &rat(3, 4));
        let orbit = doubling_orbit(0, &arc).unwrap();
        assert_eq!(orbit[0].verdict, OrbitVerdict::Inside);
    }

    #[test]
    fn value_string_is_unreduced() {
        let forbidden = CircleInterval::half_open(&rat(3, 4), &rat(1, 1));
        let orbit = doubling_orbit(1, &forbidden).unwrap();
        assert!(orbit[0].value_str().ends_with(&format!("/2^{}", orbit[0].digits)));
    }

    #[test]
    fn weyl_cancellation_at_one_half() {
        let e = iset(&(1..=100).collect::<Vec<_>>());
        let report = weyl_sum(&e, &rat(1, 2), 8).unwrap();
        assert!(report.magnitude < 1e-12);
        let report = weyl_sum(&e, &rat(0, 1), 8).unwrap();
        assert!((report.magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_histogram_avoids_forbidden_arc_for_powers() {
        let e = generate(&GeneratorSpec::Power { base: BigInt::from(2) }, 12).unwrap();
        let alpha = doubling_alpha_truncated(4096);
        let report = weyl_sum(&e, &alpha, 4).unwrap();
        assert_eq!(report.histogram[3], 0, "no mass in [3/4, 1)");
        assert_eq!(report.histogram.iter().sum::<u64>(), 12);
    }
}
