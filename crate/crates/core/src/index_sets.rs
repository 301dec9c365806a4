//! Integer-sequence families: generation, classification, and set algebra.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rat::{is_integer, serde_int_vec, serde_rat_vec};

/// A strictly increasing finite set of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    #[serde(with = "serde_int_vec")]
    elements: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<String>,
}

impl IndexSet {
    pub fn new(elements: Vec<BigInt>, tag: Option<String>) -> Result<Self> {
        for w in elements.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(format!(
                    "elements must be strictly increasing: {} !< {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(first) = elements.first() {
            if !first.is_positive() {
                return Err(Error::InvalidArgument(format!("elements must be >= 1, got {first}")));
            }
        }
        Ok(IndexSet { elements, tag })
    }

    pub fn empty() -> Self {
        IndexSet { elements: Vec::new(), tag: None }
    }

    pub fn from_i64s(elements: &[i64]) -> Result<Self> {
        Self::new(elements.iter().map(|&x| BigInt::from(x)).collect(), None)
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigInt> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.elements.last()
    }

    /// Elements `<= bound` (the prefix `self ∩ [bound]`).
    pub fn prefix_upto(&self, bound: &BigInt) -> IndexSet {
        let cut = self.elements.partition_point(|x| x <= bound);
        IndexSet { elements: self.elements[..cut].to_vec(), tag: None }
    }

    pub fn first_n(&self, n: usize) -> IndexSet {
        IndexSet { elements: self.elements[..n.min(self.elements.len())].to_vec(), tag: None }
    }

    /// Set difference, preserving order.
    pub fn minus(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            elements: self.elements.iter().filter(|x| !other.contains(x)).cloned().collect(),
            tag: None,
        }
    }

    /// Sorted union (as sets).
    pub fn union_with(&self, other: &IndexSet) -> IndexSet {
        let merged: BTreeSet<BigInt> =
            self.elements.iter().chain(other.elements.iter()).cloned().collect();
        IndexSet { elements: merged.into_iter().collect(), tag: None }
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.elements.iter().all(|x| !other.contains(x))
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }
}

/// Descriptor of a named sequence family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// `base^n` for n = 1, 2, ...
    Power {
        #[serde(with = "crate::rat::serde_int")]
        base: BigInt,
    },
    /// `base^n + lin*n + off` for n = 1, 2, ...
    PowerAffine {
        #[serde(with = "crate::rat::serde_int")]
        base: BigInt,
        #[serde(with = "crate::rat::serde_int")]
        lin: BigInt,
        #[serde(with = "crate::rat::serde_int")]
        off: BigInt,
    },
    /// `3^(n^2) + 3^j` for n >= 1, (n-1)^2 <= j <= n^2, in increasing order.
    Grow,
    /// `P(n) = sum_i coeffs[i] * n^i` for n = 1, 2, ...; must take integer
    /// values and increase strictly on the generated range.
    Polynomial {
        #[serde(with = "serde_rat_vec")]
        coeffs: Vec<BigRational>,
    },
    /// A fixed list.
    Explicit {
        #[serde(with = "serde_int_vec")]
        elements: Vec<BigInt>,
    },
    /// Sorted, deduplicated union of sub-families.
    Union { parts: Vec<GeneratorSpec> },
}

impl GeneratorSpec {
    fn describe(&self) -> String {
        match self {
            GeneratorSpec::Power { base } => format!("power({base})"),
            GeneratorSpec::PowerAffine { base, lin, off } => {
                format!("power-affine({base},{lin},{off})")
            }
            GeneratorSpec::Grow => "grow".into(),
            GeneratorSpec::Polynomial { coeffs } => format!(
                "poly({})",
                coeffs.iter().map(crate::rat::rat_str).collect::<Vec<_>>().join(",")
            ),
            GeneratorSpec::Explicit { .. } => "explicit".into(),
            GeneratorSpec::Union { parts } => {
                format!("union({})", parts.iter().map(|p| p.describe()).collect::<Vec<_>>().join("|"))
            }
        }
    }

    /// First `n` values of a leaf family, in increasing order.
    fn leaf_values(&self, n: usize) -> Result<Vec<BigInt>> {
        match self {
            GeneratorSpec::Power { base } => {
                if base < &BigInt::from(2) {
                    return Err(Error::InvalidArgument("power base must be >= 2".into()));
                }
                let mut v = Vec::with_capacity(n);
                let mut x = base.clone();
                for _ in 0..n {
                    v.push(x.clone());
                    x *= base;
                }
                Ok(v)
            }
            GeneratorSpec::PowerAffine { base, lin, off } => {
                if base < &BigInt::from(2) {
                    return Err(Error::InvalidArgument("power base must be >= 2".into()));
                }
                let mut v = Vec::with_capacity(n);
                let mut pow = base.clone();
                for k in 1..=n {
                    v.push(&pow + lin * BigInt::from(k) + off);
                    pow *= base;
                }
                Ok(v)
            }
            GeneratorSpec::Grow => {
                let three = BigInt::from(3);
                let mut v = Vec::with_capacity(n);
                let mut block = 1u64;
                while v.len() < n {
                    let outer = three.pow((block * block) as u32);
                    let lo = (block - 1) * (block - 1);
                    let hi = block * block;
                    for j in lo..=hi {
                        if v.len() == n {
                            break;
                        }
                        v.push(&outer + three.pow(j as u32));
                    }
                    block += 1;
                }
                Ok(v)
            }
            GeneratorSpec::Polynomial { coeffs } => {
                let mut v = Vec::with_capacity(n);
                for k in 1..=n {
                    let x = BigRational::from(BigInt::from(k));
                    let mut acc = BigRational::zero();
                    for c in coeffs.iter().rev() {
                        acc = acc * &x + c;
                    }
                    if !is_integer(&acc) {
                        return Err(Error::InvalidArgument(format!(
                            "polynomial is not integer-valued at n={k}: {acc}"
                        )));
                    }
                    v.push(acc.to_integer());
                }
                Ok(v)
            }
            GeneratorSpec::Explicit { elements } => Ok(elements.iter().take(n).cloned().collect()),
            GeneratorSpec::Union { .. } => unreachable!("union handled by generate"),
        }
    }
}

/// Generates the first `n` elements of the family, validating positivity and
/// strict monotonicity over the produced range.
pub fn generate(spec: &GeneratorSpec, n: usize) -> Result<IndexSet> {
    Ok(generate_with_provenance(spec, n)?.0)
}

/// Like [`generate`], but for union families also reports, per generated
/// element, the (sorted) indices of the parts that produced it.
pub fn generate_with_provenance(spec: &GeneratorSpec, n: usize) -> Result<(IndexSet, Vec<Vec<usize>>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("generate needs n >= 1".into()));
    }
    let (values, provenance) = match spec {
        GeneratorSpec::Union { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidArgument("union of zero families".into()));
            }
            // Each part contributes increasing values, so its first n cover
            // every candidate for the union's first n.
            let mut merged: BTreeSet<BigInt> = BTreeSet::new();
            let mut streams = Vec::new();
            for part in parts {
                let vals = part.leaf_or_union_values(n)?;
                merged.extend(vals.iter().cloned());
                streams.push(vals);
            }
            let values: Vec<BigInt> = merged.into_iter().take(n).collect();
            let provenance = values
                .iter()
                .map(|v| {
                    streams
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.binary_search(v).is_ok())
                        .map(|(i, _)| i)
                        .collect()
                })
                .collect();
            (values, provenance)
        }
        leaf => {
            let values = leaf.leaf_values(n)?;
            let provenance = vec![vec![0usize]; values.len()];
            (values, provenance)
        }
    };
    let set = IndexSet::new(values, Some(spec.describe())).map_err(|e| {
        Error::InvalidArgument(format!("family {} produced invalid output: {e}", spec.describe()))
    })?;
    Ok((set, provenance))
}

impl GeneratorSpec {
    fn leaf_or_union_values(&self, n: usize) -> Result<Vec<BigInt>> {
        match self {
            GeneratorSpec::Union { .. } => Ok(generate(self, n)?.elements().to_vec()),
            leaf => leaf.leaf_values(n),
        }
    }
}

/// Minimum of consecutive ratios `r_{n+1}/r_n`, exactly.
pub fn lacunary_ratio(e: &IndexSet) -> Result<BigRational> {
    if e.len() < 2 {
        return Err(Error::InvalidArgument("lacunary_ratio needs at least 2 elements".into()));
    }
    Ok(e.elements()
        .windows(2)
        .map(|w| BigRational::new(w[1].clone(), w[0].clone()))
        .min()
        .expect("at least one consecutive pair"))
}

/// Positive part of the difference set `A - B`, sorted and deduplicated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferenceSet {
    pub elements: IndexSet,
    /// True iff more than `cap` distinct positive differences exist; only the
    /// smallest `cap` are kept. Silent truncation is forbidden.
    pub truncated: bool,
}

pub fn difference_set(a: &IndexSet, b: &IndexSet, cap: usize) -> DifferenceSet {
    let mut diffs: BTreeSet<BigInt> = BTreeSet::new();
    for x in a.iter() {
        for y in b.iter() {
            let d = x - y;
            if d.is_positive() {
                diffs.insert(d);
            }
        }
    }
    let truncated = diffs.len() > cap;
    let elements = diffs.into_iter().take(cap).collect();
    DifferenceSet {
        elements: IndexSet::new(elements, None).expect("sorted positive differences"),
        truncated,
    }
}

/// A maximum-length arithmetic progression inside a finite set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApResult {
    pub len: usize,
    #[serde(with = "crate::rat::serde_int")]
    pub start: BigInt,
    #[serde(with = "crate::rat::serde_int")]
    pub gap: BigInt,
}

/// Longest arithmetic progression contained in `e`; ties broken by smallest
/// gap, then smallest start. A singleton reports length 1 with gap 0.
pub fn longest_ap(e: &IndexSet) -> Result<ApResult> {
    if e.is_empty() {
        return Err(Error::EmptySet("longest_ap"));
    }
    let xs = e.elements();
    if xs.len() == 1 {
        return Ok(ApResult { len: 1, start: xs[0].clone(), gap: BigInt::zero() });
    }
    let mut best = ApResult { len: 0, start: BigInt::zero(), gap: BigInt::zero() };
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            // AP with first two terms xs[i], xs[j].
            let gap = &xs[j] - &xs[i];
            let mut len = 2usize;
            let mut next = &xs[j] + &gap;
            while e.contains(&next) {
                len += 1;
                next += &gap;
            }
            let better = len > best.len
                || (len == best.len && (gap < best.gap || (gap == best.gap && xs[i] < best.start)));
            if better {
                best = ApResult { len, start: xs[i].clone(), gap };
            }
        }
    }
    Ok(best)
}

/// Finite-evidence report on the ratios `r_n / q^n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEvidence {
    #[serde(with = "serde_rat_vec")]
    pub ratios: Vec<BigRational>,
    /// 1-based index from which the ratios are non-increasing to the end of
    /// the prefix; `None` when even the final step still increases.
    pub nonincreasing_from: Option<usize>,
    /// Number of strictly increasing adjacent steps over the whole prefix.
    pub increasing_steps: usize,
}

/// Raw evidence for "denser than every lacunary of ratio q": the sequence
/// `r_n / q^n` over the prefix. No verdict is attached; the thresholds are a
/// judgement call left to the caller.
pub fn denser_than_lacunary_evidence(e: &IndexSet, q: &BigRational) -> Result<DensityEvidence> {
    if e.len() < 2 {
        return Err(Error::InvalidArgument("evidence needs at least 2 elements".into()));
    }
    if q <= &BigRational::one() {
        return Err(Error::InvalidArgument("ratio q must be > 1".into()));
    }
    let mut ratios = Vec::with_capacity(e.len());
    let mut qn = q.clone();
    for r in e.iter() {
        ratios.push(BigRational::from(r.clone()) / &qn);
        qn *= q;
    }
    let mut increasing_steps = 0usize;
    let mut nonincreasing_from = Some(1);
    for (i, w) in ratios.windows(2).enumerate() {
        if w[1] > w[0] {
            increasing_steps += 1;
            nonincreasing_from = Some(i + 2);
        }
    }
    if ratios.last() > ratios.get(ratios.len() - 2) {
        nonincreasing_from = None;
    }
    Ok(DensityEvidence { ratios, nonincreasing_from, increasing_steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn iset(xs: &[i64]) -> IndexSet {
        IndexSet::from_i64s(xs).unwrap()
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(IndexSet::from_i64s(&[1, 1]).is_err());
        assert!(IndexSet::from_i64s(&[2, 1]).is_err());
        assert!(IndexSet::from_i64s(&[0, 1]).is_err());
        assert!(IndexSet::from_i64s(&[-1, 1]).is_err());
    }

    #[test]
    fn generate_powers() {
        let spec = GeneratorSpec::Power { base: BigInt::from(2) };
        assert_eq!(generate(&spec, 4).unwrap().elements(), iset(&[2, 4, 8, 16]).elements());
    }

    #[test]
    fn generate_grow_blocks() {
        // n=1 block: 3^1 + 3^j for j in [0,1]; n=2 block: 3^4 + 3^j for j in [1,4].
        let got = generate(&GeneratorSpec::Grow, 6).unwrap();
        assert_eq!(got.elements(), iset(&[4, 6, 84, 90, 108, 162]).elements());
    }

    #[test]
    fn generate_union_power_and_affine() {
        let spec = GeneratorSpec::Union {
            parts: vec![
                GeneratorSpec::Power { base: BigInt::from(2) },
                GeneratorSpec::PowerAffine {
                    base: BigInt::from(2),
                    lin: BigInt::from(2),
                    off: BigInt::zero(),
                },
            ],
        };
        // 2^n: 2,4,8,16,...; 2^n + 2n: 4,8,14,24,...
        let (got, prov) = generate_with_provenance(&spec, 6).unwrap();
        assert_eq!(got.elements(), iset(&[2, 4, 8, 14, 16, 24]).elements());
        assert_eq!(prov[0], vec![0]); // 2 comes from the pure powers
        assert_eq!(prov[1], vec![0, 1]); // 4 = 2^2 = 2^1 + 2
        assert_eq!(prov[3], vec![1]); // 14 = 2^3 + 6
    }

    #[test]
    fn generate_is_deterministic() {
        let spec = GeneratorSpec::Grow;
        assert_eq!(generate(&spec, 12).unwrap(), generate(&spec, 12).unwrap());
    }

    #[test]
    fn generate_polynomial_integrality() {
        // n(n+1)/2 is integer-valued with rational coefficients.
        let spec = GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(1, 2), rat(1, 2)] };
        assert_eq!(generate(&spec, 5).unwrap().elements(), iset(&[1, 3, 6, 10, 15]).elements());
        // n/2 is not.
        let bad = GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(1, 2)] };
        assert!(generate(&bad, 3).is_err());
        // decreasing output is rejected
        let dec = GeneratorSpec::Polynomial { coeffs: vec![rat(10, 1), rat(-1, 1)] };
        assert!(generate(&dec, 3).is_err());
    }

    #[test]
    fn lacunary_ratio_examples() {
        assert_eq!(lacunary_ratio(&iset(&[2, 4, 8, 16])).unwrap(), rat(2, 1));
        assert_eq!(lacunary_ratio(&iset(&[1, 2, 3])).unwrap(), rat(3, 2));
        assert_eq!(lacunary_ratio(&iset(&[5, 6])).unwrap(), rat(6, 5));
        assert!(lacunary_ratio(&iset(&[7])).is_err());
    }

    #[test]
    fn lacunary_ratio_of_powers_is_exact() {
        for q in 2..=5i64 {
            let spec = GeneratorSpec::Power { base: BigInt::from(q) };
            let e = generate(&spec, 10).unwrap();
            assert_eq!(lacunary_ratio(&e).unwrap(), rat(q, 1));
        }
    }

    #[test]
    fn difference_set_examples() {
        // aligned prefixes of 2^n + 2n and 2^n contain the even numbers
        let a = iset(&[4, 8, 14, 24]);
        let b = iset(&[2, 4, 8, 16]);
        let d = difference_set(&a, &b, 1000);
        assert!(!d.truncated);
        for x in [2i64, 4, 6, 8] {
            assert!(d.elements.contains(&BigInt::from(x)), "missing {x}");
        }
        // self-difference keeps only the positive part
        let d = difference_set(&iset(&[2, 4]), &iset(&[2, 4]), 10);
        assert_eq!(d.elements.elements(), iset(&[2]).elements());
        // plain enumeration
        let d = difference_set(&iset(&[5]), &iset(&[1, 2]), 10);
        assert_eq!(d.elements.elements(), iset(&[3, 4]).elements());
    }

    #[test]
    fn difference_set_cap_reports_truncation() {
        let a = iset(&[10, 20, 30, 40]);
        let b = iset(&[1, 2, 3]);
        let d = difference_set(&a, &b, 3);
        assert!(d.truncated);
        assert_eq!(d.elements.len(), 3);
    }

    #[test]
    fn longest_ap_examples() {
        let r = longest_ap(&iset(&[1, 2, 3, 4, 5])).unwrap();
        assert_eq!((r.len, r.start, r.gap), (5, BigInt::from(1), BigInt::from(1)));
        let r = longest_ap(&iset(&[2, 4, 8, 16])).unwrap();
        assert_eq!((r.len, r.start, r.gap), (2, BigInt::from(2), BigInt::from(2)));
        let r = longest_ap(&iset(&[1, 10, 100])).unwrap();
        assert_eq!((r.len, r.start, r.gap), (2, BigInt::from(1), BigInt::from(9)));
        let r = longest_ap(&iset(&[7])).unwrap();
        assert_eq!((r.len, r.start, r.gap), (1, BigInt::from(7), BigInt::from(0)));
    }

    /// Independent oracle: try every (start element, gap) pair up to the set's
    /// diameter, counting memberships directly.
    fn longest_ap_oracle(e: &IndexSet) -> ApResult {
        let xs = e.elements();
        if xs.len() == 1 {
            return ApResult { len: 1, start: xs[0].clone(), gap: BigInt::zero() };
        }
        let diameter = xs.last().unwrap() - &xs[0];
        let mut best = ApResult { len: 0, start: BigInt::zero(), gap: BigInt::zero() };
        let mut gap = BigInt::one();
        while gap <= diameter {
            for s in xs {
                let mut len = 1usize;
                let mut next = s + &gap;
                while e.contains(&next) {
                    len += 1;
                    next += &gap;
                }
                if len >= 2 {
                    let better = len > best.len
                        || (len == best.len
                            && (gap < best.gap || (gap == best.gap && *s < best.start)));
                    if better {
                        best = ApResult { len, start: s.clone(), gap: gap.clone() };
                    }
                }
            }
            gap += BigInt::one();
        }
        best
    }

    #[test]
    fn longest_ap_matches_oracle_on_small_sets() {
        // Deterministic pseudo-random small sets with <= 12 elements.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..60 {
            let count = 2 + (next() % 11) as usize;
            let mut vals: BTreeSet<i64> = BTreeSet::new();
            while vals.len() < count {
                vals.insert(1 + (next() % 60) as i64);
            }
            let e = iset(&vals.iter().cloned().collect::<Vec<_>>());
            assert_eq!(longest_ap(&e).unwrap(), longest_ap_oracle(&e), "set {:?}", e.elements());
        }
    }

    #[test]
    fn density_evidence_examples() {
        // n^2 against 2^n: ratios fall from n = 3 on (1/2, 1, 9/8, 1, 25/32, ...).
        let e = generate(
            &GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(0, 1), rat(1, 1)] },
            10,
        )
        .unwrap();
        let ev = denser_than_lacunary_evidence(&e, &rat(2, 1)).unwrap();
        assert_eq!(ev.nonincreasing_from, Some(3));
        // 2^n against (3/2)^n: ratios (4/3)^n increase throughout.
        let e = generate(&GeneratorSpec::Power { base: BigInt::from(2) }, 8).unwrap();
        let ev = denser_than_lacunary_evidence(&e, &rat(3, 2)).unwrap();
        assert_eq!(ev.nonincreasing_from, None);
        assert_eq!(ev.increasing_steps, 7);
        // n against 2^n: never increases (the first step ties at 1/2).
        let e = generate(&GeneratorSpec::Polynomial { coeffs: vec![rat(0, 1), rat(1, 1)] }, 8)
            .unwrap();
        let ev = denser_than_lacunary_evidence(&e, &rat(2, 1)).unwrap();
        assert_eq!(ev.nonincreasing_from, Some(1));
        assert_eq!(ev.increasing_steps, 0);
        assert!(denser_than_lacunary_evidence(&e, &rat(1, 1)).is_err());
    }

    #[test]
    fn index_set_json_shape() {
        let e = iset(&[2, 4, 8]).with_tag("power(2)");
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"elements": ["2", "4", "8"], "tag": "power(2)"})
        );
        let back: IndexSet = serde_json::from_value(json).unwrap();
        assert_eq!(back, e);
    }
}
