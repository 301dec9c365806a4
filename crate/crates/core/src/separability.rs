//! Deciding and certifying whether two finite integer sets can be pushed at
//! least `eps` apart by a torus rotation.
//!
//! In one dimension the decision is exhaustive and exact: the distance
//! `dist(A*a, B*a)` equals `min ||(a-b) * alpha||` over the difference set, a
//! piecewise-linear function of `alpha` whose maximum the envelope sweep
//! computes exactly. In higher dimensions only sound certificate search is
//! offered; a miss is an explicit `Unknown`, never a refutation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};

use crate::envelope;
use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::rat::{ceil_int, rat_str, serde_rat, serde_rat_vec};
use crate::torus::{circle_dist, scalar_orbit, set_dist, torus_reduce, TorusPoint};

/// Exact witness that `A` and `B` are `(eps, d)`-separable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub a: IndexSet,
    pub b: IndexSet,
    pub dim: usize,
    #[serde(with = "serde_rat")]
    pub epsilon: BigRational,
    pub alpha: TorusPoint,
    /// `dist(A*alpha, B*alpha)`, stored exactly; always `>= epsilon`.
    #[serde(with = "serde_rat")]
    pub achieved: BigRational,
}

impl SeparabilityCertificate {
    /// Re-runs the exact evaluation the certificate claims.
    pub fn verify(&self) -> Result<()> {
        if self.alpha.dim() != self.dim {
            return Err(Error::InvariantViolation("certificate dim mismatch".into()));
        }
        let d = set_dist(&orbit(&self.a, &self.alpha), &orbit(&self.b, &self.alpha))?;
        if d != self.achieved {
            return Err(Error::InvariantViolation(format!(
                "achieved distance mismatch: stored {}, recomputed {}",
                rat_str(&self.achieved),
                rat_str(&d)
            )));
        }
        if self.achieved < self.epsilon {
            return Err(Error::InvariantViolation(format!(
                "achieved {} below epsilon {}",
                rat_str(&self.achieved),
                rat_str(&self.epsilon)
            )));
        }
        Ok(())
    }
}

/// Breakpoint inventory of a 1-D refutation; large lists are digested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BreakpointList {
    Full {
        #[serde(with = "serde_rat_vec")]
        points: Vec<BigRational>,
    },
    Digest {
        count: usize,
        sha256: String,
    },
}

const BREAKPOINT_LIST_LIMIT: usize = 10_000;

fn breakpoint_digest(points: &[BigRational]) -> String {
    let mut h = Sha256::new();
    for p in points {
        h.update(rat_str(p).as_bytes());
        h.update(b"\n");
    }
    format!("{:x}", h.finalize())
}

impl BreakpointList {
    fn from_points(points: Vec<BigRational>) -> Self {
        if points.len() <= BREAKPOINT_LIST_LIMIT {
            BreakpointList::Full { points }
        } else {
            BreakpointList::Digest { count: points.len(), sha256: breakpoint_digest(&points) }
        }
    }
}

/// Exhaustive 1-D refutation: the exact supremum over the whole circle stays
/// below `epsilon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonSeparabilityVerdict {
    pub a: IndexSet,
    pub b: IndexSet,
    pub dim: usize,
    #[serde(with = "serde_rat")]
    pub epsilon: BigRational,
    /// Exact `sup_alpha dist(A*alpha, B*alpha)`; always `< epsilon`.
    #[serde(with = "serde_rat")]
    pub sup_achieved: BigRational,
    /// A maximizer attaining the supremum.
    #[serde(with = "serde_rat")]
    pub argsup: BigRational,
    pub breakpoints: BreakpointList,
}

impl NonSeparabilityVerdict {
    /// Recomputes the exact supremum from scratch and compares.
    pub fn verify(&self) -> Result<()> {
        if self.dim != 1 {
            return Err(Error::InvariantViolation("exhaustive verdicts are 1-D only".into()));
        }
        let diffs = difference_moduli(&self.a, &self.b)?;
        let env = envelope::supmin(&diffs)?;
        if env.value != self.sup_achieved {
            return Err(Error::InvariantViolation(format!(
                "sup mismatch: stored {}, recomputed {}",
                rat_str(&self.sup_achieved),
                rat_str(&env.value)
            )));
        }
        if envelope::eval_min(&diffs, &self.argsup) != self.sup_achieved {
            return Err(Error::InvariantViolation("argsup does not attain the supremum".into()));
        }
        if self.sup_achieved >= self.epsilon {
            return Err(Error::InvariantViolation("stored sup is not below epsilon".into()));
        }
        if let BreakpointList::Full { points } = &self.breakpoints {
            let expect = envelope::base_breakpoints(&diffs)?;
            if *points != expect {
                return Err(Error::InvariantViolation("breakpoint list mismatch".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SeparabilityOutcome {
    Separable(SeparabilityCertificate),
    NotSeparable(NonSeparabilityVerdict),
}

fn orbit(set: &IndexSet, alpha: &TorusPoint) -> Vec<TorusPoint> {
    set.iter().map(|r| scalar_orbit(r, alpha)).collect()
}

fn validate_pair(a: &IndexSet, b: &IndexSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("separability"));
    }
    if !a.is_disjoint(b) {
        let witness = a.iter().find(|x| b.contains(x)).unwrap();
        return Err(Error::Overlap(format!("element {witness} lies in both sets")));
    }
    Ok(())
}

fn validate_eps(eps: &BigRational) -> Result<()> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !eps.is_positive() || eps > &half {
        return Err(Error::InvalidArgument(format!(
            "epsilon must satisfy 0 < eps <= 1/2, got {}",
            rat_str(eps)
        )));
    }
    Ok(())
}

/// Distinct positive difference moduli `|a - b|`.
fn difference_moduli(a: &IndexSet, b: &IndexSet) -> Result<Vec<BigInt>> {
    validate_pair(a, b)?;
    let mut out: BTreeSet<BigInt> = BTreeSet::new();
    for x in a.iter() {
        for y in b.iter() {
            out.insert((x - y).abs());
        }
    }
    Ok(out.into_iter().collect())
}

/// Exhaustive decision in d = 1: certificate at an exact argmax when the
/// supremum reaches `eps`, otherwise a refutation carrying the exact sup.
pub fn separability_1d(
    a: &IndexSet,
    b: &IndexSet,
    eps: &BigRational,
) -> Result<SeparabilityOutcome> {
    validate_eps(eps)?;
    let diffs = difference_moduli(a, b)?;
    let env = envelope::supmin(&diffs)?;
    let alpha = TorusPoint::one_dim(env.argmax.clone());
    let achieved = set_dist(&orbit(a, &alpha), &orbit(b, &alpha))?;
    debug_assert_eq!(achieved, env.value, "difference-set reduction must be exact");
    if &achieved >= eps {
        let cert = SeparabilityCertificate {
            a: a.clone(),
            b: b.clone(),
            dim: 1,
            epsilon: eps.clone(),
            alpha,
            achieved,
        };
        cert.verify()?;
        Ok(SeparabilityOutcome::Separable(cert))
    } else {
        let verdict = NonSeparabilityVerdict {
            a: a.clone(),
            b: b.clone(),
            dim: 1,
            epsilon: eps.clone(),
            sup_achieved: env.value,
            argsup: env.argmax,
            breakpoints: BreakpointList::from_points(envelope::base_breakpoints(&diffs)?),
        };
        Ok(SeparabilityOutcome::NotSeparable(verdict))
    }
}

/// Higher-dimensional certificate search. Sound but incomplete: an `Unknown`
/// says only that the budget ran out.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum NdOutcome {
    Certificate(SeparabilityCertificate),
    Unknown { candidates_tried: u64 },
}

pub struct NdSearch {
    pub dim: usize,
    pub budget: u64,
    pub seed: u64,
}

impl Default for NdSearch {
    fn default() -> Self {
        NdSearch { dim: 2, budget: 2_000, seed: 0 }
    }
}

/// Concatenates two 1-D witnesses into a product witness: if `beta` keeps
/// `A` away from `B1` and `gamma` keeps `A` away from `B2`, then `(beta,
/// gamma)` keeps `A` away from `B1 ∪ B2` under the max-coordinate metric.
pub fn concat_witnesses(
    a: &IndexSet,
    b1: &IndexSet,
    beta: &TorusPoint,
    b2: &IndexSet,
    gamma: &TorusPoint,
    eps: &BigRational,
) -> Result<SeparabilityCertificate> {
    let alpha = beta.concat(gamma);
    let b = b1.union_with(b2);
    let achieved = set_dist(&orbit(a, &alpha), &orbit(&b, &alpha))?;
    let cert = SeparabilityCertificate {
        a: a.clone(),
        b,
        dim: alpha.dim(),
        epsilon: eps.clone(),
        alpha,
        achieved,
    };
    cert.verify()?;
    Ok(cert)
}

pub fn separability_nd(
    a: &IndexSet,
    b: &IndexSet,
    eps: &BigRational,
    search: &NdSearch,
) -> Result<NdOutcome> {
    validate_eps(eps)?;
    validate_pair(a, b)?;
    if search.dim < 1 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut tried = 0u64;

    let certify = |alpha: TorusPoint| -> Result<Option<SeparabilityCertificate>> {
        let achieved = set_dist(&orbit(a, &alpha), &orbit(b, &alpha))?;
        if &achieved >= eps {
            let cert = SeparabilityCertificate {
                a: a.clone(),
                b: b.clone(),
                dim: alpha.dim(),
                epsilon: eps.clone(),
                alpha,
                achieved,
            };
            cert.verify()?;
            Ok(Some(cert))
        } else {
            Ok(None)
        }
    };

    // The exact 1-D maximizer, padded with zero coordinates, is the cheapest
    // candidate and is decisive whenever one dimension suffices.
    let diffs = difference_moduli(a, b)?;
    let env = envelope::supmin(&diffs)?;
    tried += 1;
    if &env.value >= eps {
        let alpha = TorusPoint::one_dim(env.argmax).pad_to(search.dim);
        if let Some(cert) = certify(alpha)? {
            return Ok(NdOutcome::Certificate(cert));
        }
    }

    // Product construction: split one side into k groups, separate each in
    // 1-D, and concatenate the witnesses coordinate-wise.
    for k in 2..=search.dim {
        for (fixed, split) in [(a, b), (b, a)] {
            if split.len() < k {
                continue;
            }
            let mut groups: Vec<Vec<BigInt>> = vec![Vec::new(); k];
            for (i, x) in split.iter().enumerate() {
                groups[i % k].push(x.clone());
            }
            let mut coords: Vec<BigRational> = Vec::with_capacity(k);
            let mut all_ok = true;
            for g in &groups {
                let g = IndexSet::new(g.clone(), None)?;
                let d = difference_moduli(fixed, &g)?;
                let e = envelope::supmin(&d)?;
                tried += 1;
                if &e.value < eps {
                    all_ok = false;
                    break;
                }
                coords.push(e.argmax);
            }
            if all_ok {
                let alpha = TorusPoint::new(coords)?.pad_to(search.dim);
                if let Some(cert) = certify(alpha)? {
                    return Ok(NdOutcome::Certificate(cert));
                }
            }
        }
    }

    // Seeded random rational candidates, plus local denominator refinement
    // around the best near miss.
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut best: Option<(BigRational, TorusPoint)> = None;
    while tried < search.budget {
        tried += 1;
        let q = rng.random_range(2u64..=199);
        let coords: Vec<BigRational> = (0..search.dim)
            .map(|_| BigRational::new(BigInt::from(rng.random_range(0..q)), BigInt::from(q)))
            .collect();
        let alpha = TorusPoint::new(coords)?;
        let achieved = set_dist(&orbit(a, &alpha), &orbit(b, &alpha))?;
        if &achieved >= eps {
            if let Some(cert) = certify(alpha.clone())? {
                return Ok(NdOutcome::Certificate(cert));
            }
        }
        if best.as_ref().is_none_or(|(v, _)| achieved > *v) {
            best = Some((achieved, alpha));
        }
    }
    if let Some((_, base)) = best {
        let mut extra = 0u32;
        'refine: for denom in 2u64..=16 {
            for coord in 0..search.dim {
                for sign in [1i64, -1] {
                    if extra >= 64 {
                        break 'refine;
                    }
                    extra += 1;
                    tried += 1;
                    let mut coords = base.coords().to_vec();
                    let step = BigRational::new(BigInt::from(sign), BigInt::from(denom * 64));
                    coords[coord] = torus_reduce(&(&coords[coord] + step));
                    let alpha = TorusPoint::new(coords)?;
                    if let Some(cert) = certify(alpha)? {
                        return Ok(NdOutcome::Certificate(cert));
                    }
                }
            }
        }
    }
    Ok(NdOutcome::Unknown { candidates_tried: tried })
}

/// All points `beta` where some pairwise orbit distance equals `eps` exactly,
/// sorted and deduplicated, together with the pre-deduplication count
/// `sum over pairs of 2 * (r_j - r_i)`.
pub fn critical_points_with_count(
    f: &IndexSet,
    eps: &BigRational,
) -> Result<(Vec<BigRational>, BigInt)> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !eps.is_positive() || eps >= &half {
        return Err(Error::InvalidArgument(format!(
            "critical points need 0 < eps < 1/2, got {}",
            rat_str(eps)
        )));
    }
    if f.len() < 2 {
        return Err(Error::InvalidArgument("critical points need |F| >= 2".into()));
    }
    let xs = f.elements();
    let mut points: BTreeSet<BigRational> = BTreeSet::new();
    let mut pre_dedup = BigInt::zero();
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let m = &xs[j] - &xs[i];
            pre_dedup += 2 * &m;
            let mr = BigRational::from(m.clone());
            let mut t = BigInt::zero();
            while t < m {
                let tr = BigRational::from(t.clone());
                points.insert(torus_reduce(&((&tr + eps) / &mr)));
                points.insert(torus_reduce(&((&tr - eps) / &mr)));
                t += 1;
            }
        }
    }
    Ok((points.into_iter().collect(), pre_dedup))
}

pub fn critical_points(f: &IndexSet, eps: &BigRational) -> Result<Vec<BigRational>> {
    Ok(critical_points_with_count(f, eps)?.0)
}

/// Component structure of one region between consecutive critical points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionStructure {
    /// Exact midpoint representative of the open region.
    #[serde(with = "serde_rat")]
    pub representative: BigRational,
    /// Connected components of the orbit graph as bitmasks over F's indices,
    /// sorted ascending.
    pub components: Vec<u64>,
}

/// Census of nice-set collections across all critical regions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NiceReport {
    pub f: IndexSet,
    #[serde(with = "serde_rat")]
    pub epsilon: BigRational,
    #[serde(with = "serde_rat_vec")]
    pub critical_points: Vec<BigRational>,
    #[serde(with = "crate::rat::serde_int")]
    pub pre_dedup_count: BigInt,
    pub regions: Vec<RegionStructure>,
    /// Number of distinct component partitions across regions.
    pub distinct_collections: usize,
    /// Number of distinct nice sets (unions of components) across regions.
    pub distinct_nice_sets: usize,
    /// `2^ceil(1/eps) * N(N-1) * r_N`.
    #[serde(with = "crate::rat::serde_int")]
    pub bound: BigInt,
}

const MAX_COMPONENTS_FOR_ENUMERATION: usize = 20;

/// For a representative of each region between consecutive critical points,
/// joins orbit points at circle distance `< eps`, records the component
/// partition, and counts the distinct collections and distinct nice sets that
/// rotations create.
pub fn nice_collections(f: &IndexSet, eps: &BigRational) -> Result<NiceReport> {
    if f.is_empty() {
        return Err(Error::EmptySet("nice_collections"));
    }
    if f.len() > 64 {
        return Err(Error::InvalidArgument("nice_collections caps |F| at 64".into()));
    }
    let n = f.len();
    let (points, pre_dedup) = if n >= 2 {
        critical_points_with_count(f, eps)?
    } else {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if !eps.is_positive() || eps >= &half {
            return Err(Error::InvalidArgument("nice_collections needs 0 < eps < 1/2".into()));
        }
        (Vec::new(), BigInt::zero())
    };

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let reps: Vec<BigRational> = if points.is_empty() {
        vec![half.clone()]
    } else {
        (0..points.len())
            .map(|i| {
                let next = if i + 1 < points.len() {
                    points[i + 1].clone()
                } else {
                    &points[0] + BigRational::one()
                };
                torus_reduce(&((&points[i] + next) * &half))
            })
            .collect()
    };

    let mut regions = Vec::with_capacity(reps.len());
    let mut collections: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut nice_sets: BTreeSet<u64> = BTreeSet::new();
    for rep in reps {
        let alpha = TorusPoint::one_dim(rep.clone());
        let orbit_points: Vec<BigRational> =
            f.iter().map(|r| scalar_orbit(r, &alpha).coord_1d().clone()).collect();
        let components = connected_components(&orbit_points, eps);
        if components.len() > MAX_COMPONENTS_FOR_ENUMERATION {
            return Err(Error::InvalidArgument(format!(
                "region at {} has {} components; nice-set enumeration capped at {}",
                rat_str(&rep),
                components.len(),
                MAX_COMPONENTS_FOR_ENUMERATION
            )));
        }
        for pick in 0u64..(1u64 << components.len()) {
            let mut union = 0u64;
            for (c, mask) in components.iter().enumerate() {
                if pick >> c & 1 == 1 {
                    union |= mask;
                }
            }
            nice_sets.insert(union);
        }
        collections.insert(components.clone());
        regions.push(RegionStructure { representative: rep, components });
    }

    let ceil_inv_eps = ceil_int(&(BigRational::one() / eps));
    let exponent = u32::try_from(ceil_inv_eps).unwrap_or(u32::MAX);
    let bound: BigInt = BigInt::from(2).pow(exponent)
        * BigInt::from(n)
        * BigInt::from(n.saturating_sub(1))
        * f.max().expect("nonempty");

    let report = NiceReport {
        f: f.clone(),
        epsilon: eps.clone(),
        critical_points: points,
        pre_dedup_count: pre_dedup,
        distinct_collections: collections.len(),
        distinct_nice_sets: nice_sets.len(),
        regions,
        bound,
    };
    if n >= 2 && BigInt::from(report.distinct_nice_sets) > report.bound {
        return Err(Error::InvariantViolation("nice-set count exceeded the counting bound".into()));
    }
    Ok(report)
}

/// Components of the graph on orbit points joined at circle distance `< eps`,
/// as bitmasks sorted ascending.
fn connected_components(orbit: &[BigRational], eps: &BigRational) -> Vec<u64> {
    let n = orbit.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if &circle_dist(&orbit[i], &orbit[j]) < eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut masks: BTreeMap<usize, u64> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        *masks.entry(root).or_insert(0) |= 1u64 << i;
    }
    let mut out: Vec<u64> = masks.into_values().collect();
    out.sort();
    out
}

/// Result of scanning bipartitions of prefixes of `E` for a refuted pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PairSearchOutcome {
    Found { a: IndexSet, b: IndexSet, verdict: NonSeparabilityVerdict },
    NotFound { pairs_tried: u64 },
}

/// Searches bipartitions `(A, F \ A)` of growing prefixes `F` of `E` for a
/// pair that `separability_1d` refutes at `eps`. Deterministic order: prefix
/// length ascending, then subset bitmask ascending, with the first element
/// pinned to `A` to skip mirrored duplicates.
pub fn non_separable_pair_search(
    e: &IndexSet,
    eps: &BigRational,
    budget: u64,
) -> Result<PairSearchOutcome> {
    validate_eps(eps)?;
    if e.len() < 2 {
        return Err(Error::InvalidArgument("pair search needs |E| >= 2".into()));
    }
    let mut tried = 0u64;
    let max_len = e.len().min(16);
    for len in 2..=max_len {
        let f = e.first_n(len);
        let xs = f.elements();
        let free = len - 1;
        for mask in 0u64..((1u64 << free) - 1) {
            let mut av = vec![xs[0].clone()];
            let mut bv = Vec::new();
            for (i, x) in xs.iter().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 1 {
                    av.push(x.clone());
                } else {
                    bv.push(x.clone());
                }
            }
            if tried == budget {
                return Ok(PairSearchOutcome::NotFound { pairs_tried: tried });
            }
            tried += 1;
            let a = IndexSet::new(av, None)?;
            let b = IndexSet::new(bv, None)?;
            if let SeparabilityOutcome::NotSeparable(verdict) = separability_1d(&a, &b, eps)? {
                return Ok(PairSearchOutcome::Found { a, b, verdict });
            }
        }
    }
    Ok(PairSearchOutcome::NotFound { pairs_tried: tried })
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
    fn singleton_pair_certificate() {
        let out = separability_1d(&iset(&[4]), &iset(&[5]), &rat(1, 2)).unwrap();
        match out {
            SeparabilityOutcome::Separable(cert) => {
                assert_eq!(cert.alpha, TorusPoint::one_dim(rat(1, 2)));
                assert_eq!(cert.achieved, rat(1, 2));
                cert.verify().unwrap();
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn overlap_rejected() {
        assert!(matches!(
            separability_1d(&iset(&[2, 4]), &iset(&[4, 5]), &rat(1, 4)),
            Err(Error::Overlap(_))
        ));
        assert!(separability_1d(&iset(&[1]), &iset(&[2]), &rat(2, 3)).is_err());
    }

    /// Offsets 2n - 1 keep every difference odd, so alpha = 1/2 separates the
    /// powers from their shifted copies at the maximum possible distance.
    #[test]
    fn odd_offset_family_separates_at_one_half() {
        let a = iset(&[2, 4, 8, 16, 32]);
        let b = iset(&[3, 7, 13, 23, 41]); // 2^n + 2n - 1
        let out = separability_1d(&a, &b, &rat(1, 2)).unwrap();
        match out {
            SeparabilityOutcome::Separable(cert) => {
                assert_eq!(cert.alpha, TorusPoint::one_dim(rat(1, 2)));
                assert_eq!(cert.achieved, rat(1, 2));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    /// Offsets 2n put small even numbers in the difference set and the exact
    /// sup collapses below 1/3.
    #[test]
    fn even_offset_family_is_refuted_at_one_third() {
        // E = {2^n} ∪ {2^n + 2n} for n <= 5, split into powers and the rest.
        let a = iset(&[2, 4, 8, 16, 32]);
        let b = iset(&[14, 24, 42]); // branch elements that are not powers
        let out = separability_1d(&a, &b, &rat(1, 3)).unwrap();
        match out {
            SeparabilityOutcome::NotSeparable(v) => {
                assert!(v.sup_achieved < rat(1, 3));
                v.verify().unwrap();
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn critical_points_examples() {
        let (pts, count) = critical_points_with_count(&iset(&[1, 2]), &rat(1, 4)).unwrap();
        assert_eq!(pts, vec![rat(1, 4), rat(3, 4)]);
        assert_eq!(count, BigInt::from(2));
        let (pts, count) = critical_points_with_count(&iset(&[1, 3]), &rat(1, 4)).unwrap();
        assert_eq!(pts, vec![rat(1, 8), rat(3, 8), rat(5, 8), rat(7, 8)]);
        assert_eq!(count, BigInt::from(4));
        assert!(critical_points(&iset(&[1, 2]), &rat(1, 2)).is_err());
        assert!(critical_points(&iset(&[1, 2]), &rat(0, 1)).is_err());
    }

    #[test]
    fn pre_dedup_count_matches_formula() {
        let f = iset(&[1, 2, 4, 8]);
        let (_, count) = critical_points_with_count(&f, &rat(1, 5)).unwrap();
        // pairs (1,2),(1,4),(1,8),(2,4),(2,8),(4,8)
        let expect: i64 = 2 * (1 + 3 + 7 + 2 + 6 + 4);
        assert_eq!(count, BigInt::from(expect));
    }

    #[test]
    fn nice_collections_two_points() {
        // F = {1, 2}, eps = 2/5: the region containing 1/2 splits the orbit
        // {1/2, 0} into two components, creating all four nice sets.
        let report = nice_collections(&iset(&[1, 2]), &rat(2, 5)).unwrap();
        let region = report
            .regions
            .iter()
            .find(|r| r.representative == rat(1, 2))
            .expect("midpoint representative at 1/2");
        assert_eq!(region.components.len(), 2);
        assert_eq!(report.distinct_nice_sets, 4);
        assert!(BigInt::from(report.distinct_nice_sets) <= report.bound);
    }

    #[test]
    fn nice_sets_are_separated_from_complements() {
        // Unions of components sit at distance >= eps from their complements,
        // exactly, at every representative.
        let f = iset(&[1, 2, 4, 8]);
        let eps = rat(1, 4);
        let report = nice_collections(&f, &eps).unwrap();
        let full: u64 = (1 << f.len()) - 1;
        for region in &report.regions {
            let alpha = TorusPoint::one_dim(region.representative.clone());
            for pick in 1u64..(1 << region.components.len()) {
                let mut union = 0u64;
                for (c, mask) in region.components.iter().enumerate() {
                    if pick >> c & 1 == 1 {
                        union |= mask;
                    }
                }
                if union == full {
                    continue;
                }
                let side = |m: u64| -> Vec<TorusPoint> {
                    f.iter()
                        .enumerate()
                        .filter(|(i, _)| m >> i & 1 == 1)
                        .map(|(_, r)| scalar_orbit(r, &alpha))
                        .collect()
                };
                let d = set_dist(&side(union), &side(full & !union)).unwrap();
                assert!(d >= eps, "region {} union {union:b}", rat_str(&region.representative));
            }
        }
    }

    #[test]
    fn bound_value_for_four_powers() {
        let report = nice_collections(&iset(&[1, 2, 4, 8]), &rat(1, 4)).unwrap();
        assert_eq!(report.bound, BigInt::from(1536)); // 2^4 * 4 * 3 * 8
    }

    #[test]
    fn chained_region_creates_trivial_collection() {
        // Regions where all orbit points chain within eps contribute only
        // the empty set and F itself.
        let report = nice_collections(&iset(&[1, 2]), &rat(2, 5)).unwrap();
        let trivial = report.regions.iter().find(|r| r.components.len() == 1).unwrap();
        assert_eq!(trivial.components, vec![0b11]);
    }

    #[test]
    fn nd_pads_one_dimensional_witness() {
        let out = separability_nd(
            &iset(&[1]),
            &iset(&[2]),
            &rat(1, 4),
            &NdSearch { dim: 1, budget: 100, seed: 7 },
        )
        .unwrap();
        match out {
            NdOutcome::Certificate(cert) => {
                assert!(cert.achieved >= rat(1, 4));
                cert.verify().unwrap();
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn nd_split_beats_one_dimension() {
        // A = {1}, B = {2, 3}: differences {1, 2} cap the 1-D sup at 1/3, but
        // separating {2} and {3} on their own coordinates reaches 1/2.
        let a = iset(&[1]);
        let b = iset(&[2, 3]);
        if let SeparabilityOutcome::NotSeparable(v) = separability_1d(&a, &b, &rat(2, 5)).unwrap()
        {
            assert_eq!(v.sup_achieved, rat(1, 3));
        } else {
            panic!("1-D should refuse at 2/5");
        }
        let out =
            separability_nd(&a, &b, &rat(2, 5), &NdSearch { dim: 2, budget: 1_000, seed: 11 })
                .unwrap();
        match out {
            NdOutcome::Certificate(cert) => {
                assert_eq!(cert.dim, 2);
                assert!(cert.achieved >= rat(2, 5));
            }
            other => panic!("expected a product certificate, got {other:?}"),
        }
        // Dense consecutive blocks: the exact 1-D sup over {1..6} vs {7..12}
        // is 1/12 (differences 1..11).
        let a = iset(&[1, 2, 3, 4, 5, 6]);
        let b = iset(&[7, 8, 9, 10, 11, 12]);
        if let SeparabilityOutcome::NotSeparable(v) = separability_1d(&a, &b, &rat(1, 8)).unwrap()
        {
            assert_eq!(v.sup_achieved, rat(1, 12));
        } else {
            panic!("1-D should refuse at 1/8");
        }
    }

    #[test]
    fn nd_certificate_for_lacunary_pair_cross_checked_in_one_dim() {
        // Lacunary-spaced quadruples separate comfortably at eps = 1/10; the
        // search certificate must agree with the exhaustive 1-D sup.
        let a = iset(&[3, 7, 19, 47]);
        let b = iset(&[5, 11, 29, 71]);
        let eps = rat(1, 10);
        let sup = match separability_1d(&a, &b, &eps).unwrap() {
            SeparabilityOutcome::Separable(cert) => {
                assert_eq!(cert.achieved, rat(3, 22));
                cert.achieved
            }
            other => panic!("expected 1-D certificate, got {other:?}"),
        };
        let out =
            separability_nd(&a, &b, &eps, &NdSearch { dim: 2, budget: 500, seed: 3 }).unwrap();
        match out {
            NdOutcome::Certificate(cert) => {
                assert_eq!(cert.achieved, sup, "lifted witness attains the exact 1-D sup");
                cert.verify().unwrap();
            }
            other => panic!("expected certificate within budget, got {other:?}"),
        }
    }

    #[test]
    fn nd_exhausted_budget_reports_unknown() {
        // Dense blocks at a demanding eps with a starved search: the honest
        // outcome is Unknown, never a refutation.
        let a = iset(&[1, 2, 3, 4, 5, 6]);
        let b = iset(&[7, 8, 9, 10, 11, 12]);
        let out =
            separability_nd(&a, &b, &rat(1, 2), &NdSearch { dim: 2, budget: 20, seed: 1 })
                .unwrap();
        match out {
            NdOutcome::Unknown { candidates_tried } => assert!(candidates_tried >= 20),
            NdOutcome::Certificate(c) => panic!("eps = 1/2 cannot be certified: {c:?}"),
        }
    }

    #[test]
    fn concat_witnesses_example() {
        let a = iset(&[1]);
        let b1 = iset(&[2]);
        let b2 = iset(&[3]);
        let beta = TorusPoint::one_dim(rat(1, 2));
        let gamma = TorusPoint::one_dim(rat(1, 4));
        let cert = concat_witnesses(&a, &b1, &beta, &b2, &gamma, &rat(1, 4)).unwrap();
        assert_eq!(cert.dim, 2);
        cert.verify().unwrap();
    }

    #[test]
    fn pair_search_finds_refuted_pair_in_dense_prefix() {
        let e = iset(&(1..=20).collect::<Vec<_>>());
        match non_separable_pair_search(&e, &rat(1, 3), 10_000).unwrap() {
            PairSearchOutcome::Found { a, b, verdict } => {
                assert!(verdict.sup_achieved < rat(1, 3));
                assert!(a.is_disjoint(&b));
            }
            PairSearchOutcome::NotFound { .. } => panic!("dense prefix must be refuted"),
        }
    }

    #[test]
    fn pair_search_respects_budget_on_lacunary_set() {
        let e = generate(&GeneratorSpec::Power { base: BigInt::from(2) }, 8).unwrap();
        match non_separable_pair_search(&e, &rat(1, 100), 50).unwrap() {
            PairSearchOutcome::NotFound { pairs_tried } => assert_eq!(pairs_tried, 50),
            PairSearchOutcome::Found { a, b, .. } => {
                panic!("unexpected refutation {:?} vs {:?}", a.elements(), b.elements())
            }
        }
    }

    #[test]
    fn two_element_sets_always_separable_at_quarter() {
        for (x, y) in [(3i64, 8i64), (10, 11), (5, 90)] {
            let out = separability_1d(&iset(&[x]), &iset(&[y]), &rat(1, 4)).unwrap();
            match out {
                SeparabilityOutcome::Separable(cert) => assert_eq!(cert.achieved, rat(1, 2)),
                _ => panic!("singleton pairs achieve 1/2"),
            }
        }
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let out = separability_1d(&iset(&[4]), &iset(&[5]), &rat(1, 2)).unwrap();
        let SeparabilityOutcome::Separable(mut cert) = out else { panic!() };
        cert.achieved = rat(3, 4);
        assert!(cert.verify().is_err());
    }
}
