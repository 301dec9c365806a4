//! Python bindings. Exact values cross the boundary as canonical strings
//! ("p/q" for rationals, decimal for integers); structured results are JSON
//! matching the CLI artifact payloads.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use interpolab_core::cert;
use interpolab_core::error::Error as CoreError;
use interpolab_core::index_sets;
use interpolab_core::interpolation;
use interpolab_core::nilseq;
use interpolab_core::rat::{parse_int, parse_rat, rat_str};
use interpolab_core::recurrence;
use interpolab_core::riesz;
use interpolab_core::separability as sep;
use interpolab_core::torus;
use interpolab_core::{BigInt, BigRational};

fn err(e: CoreError) -> PyErr {
    match e {
        CoreError::InvariantViolation(_)
        | CoreError::ContainmentFailure { .. }
        | CoreError::GuardExhausted(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn rat_in(s: &str) -> PyResult<BigRational> {
    parse_rat(s).map_err(err)
}

fn int_in(s: &str) -> PyResult<BigInt> {
    parse_int(s).map_err(err)
}

fn set_in(elements: Vec<String>) -> PyResult<index_sets::IndexSet> {
    let mut vals = Vec::with_capacity(elements.len());
    for e in &elements {
        vals.push(int_in(e)?);
    }
    index_sets::IndexSet::new(vals, None).map_err(err)
}

fn point_in(coords: Vec<String>) -> PyResult<torus::TorusPoint> {
    let mut out = Vec::with_capacity(coords.len());
    for c in &coords {
        out.push(rat_in(&c.clone())?);
    }
    torus::TorusPoint::new(out).map_err(err)
}

fn json_out<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Reduce a rational into [0, 1).
#[pyfunction]
fn torus_reduce(q: &str) -> PyResult<String> {
    Ok(rat_str(&torus::torus_reduce(&rat_in(q)?)))
}

/// Circular distance between two points of the 1-torus.
#[pyfunction]
fn circle_dist(x: &str, y: &str) -> PyResult<String> {
    Ok(rat_str(&torus::circle_dist(&rat_in(x)?, &rat_in(y)?)))
}

/// Max-coordinate circle distance between two torus points.
#[pyfunction]
fn torus_dist(x: Vec<String>, y: Vec<String>) -> PyResult<String> {
    let d = torus::torus_dist(&point_in(x)?, &point_in(y)?).map_err(err)?;
    Ok(rat_str(&d))
}

/// Coordinates of r * alpha, reduced.
#[pyfunction]
fn scalar_orbit(r: &str, alpha: Vec<String>) -> PyResult<Vec<String>> {
    let p = torus::scalar_orbit(&int_in(r)?, &point_in(alpha)?);
    Ok(p.coords().iter().map(rat_str).collect())
}

/// First `count` elements of a generator family described as JSON.
#[pyfunction]
fn generate(spec_json: &str, count: usize) -> PyResult<Vec<String>> {
    let spec: index_sets::GeneratorSpec =
        serde_json::from_str(spec_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let set = index_sets::generate(&spec, count).map_err(err)?;
    Ok(set.iter().map(|x| x.to_string()).collect())
}

/// Minimum consecutive ratio of a strictly increasing set.
#[pyfunction]
fn lacunary_ratio(elements: Vec<String>) -> PyResult<String> {
    Ok(rat_str(&index_sets::lacunary_ratio(&set_in(elements)?).map_err(err)?))
}

/// Positive differences a - b, sorted and deduplicated; returns
/// (elements, truncated).
#[pyfunction]
fn difference_set(a: Vec<String>, b: Vec<String>, cap: usize) -> PyResult<(Vec<String>, bool)> {
    let d = index_sets::difference_set(&set_in(a)?, &set_in(b)?, cap);
    Ok((d.elements.iter().map(|x| x.to_string()).collect(), d.truncated))
}

/// Longest arithmetic progression: (length, start, gap).
#[pyfunction]
fn longest_ap(elements: Vec<String>) -> PyResult<(usize, String, String)> {
    let r = index_sets::longest_ap(&set_in(elements)?).map_err(err)?;
    Ok((r.len, r.start.to_string(), r.gap.to_string()))
}

/// Exact sup over the circle of the min orbit norm: (value, argmax).
#[pyfunction]
fn supmin(elements: Vec<String>) -> PyResult<(String, String)> {
    let r = recurrence::supmin_1d(&set_in(elements)?).map_err(err)?;
    Ok((rat_str(&r.value), rat_str(r.argmax.coord_1d())))
}

/// Least N with supmin(R ∩ [N]) < eps: (N or None, final/threshold sup).
#[pyfunction]
fn recurrence_threshold(elements: Vec<String>, eps: &str) -> PyResult<(Option<String>, String)> {
    match recurrence::recurrence_threshold(&set_in(elements)?, &rat_in(eps)?).map_err(err)? {
        recurrence::ThresholdOutcome::Reached { n, certificate, .. } => {
            Ok((Some(n.to_string()), rat_str(&certificate.value)))
        }
        recurrence::ThresholdOutcome::NotReached { final_sup } => {
            Ok((None, rat_str(&final_sup.value)))
        }
    }
}

/// Greedy partition along the harmonic schedule; JSON trace.
#[pyfunction]
fn partition_bohr(elements: Vec<String>, stages: usize) -> PyResult<String> {
    let trace = recurrence::partition_bohr(
        &set_in(elements)?,
        &recurrence::harmonic_schedule(stages),
    )
    .map_err(err)?;
    json_out(&trace)
}

/// Decide (eps, d)-separability; JSON outcome (certificate or verdict for
/// d = 1, certificate or unknown for d >= 2).
#[pyfunction]
#[pyo3(signature = (a, b, eps, dim = 1, budget = 2000, seed = 0))]
fn separability(
    a: Vec<String>,
    b: Vec<String>,
    eps: &str,
    dim: usize,
    budget: u64,
    seed: u64,
) -> PyResult<String> {
    let a = set_in(a)?;
    let b = set_in(b)?;
    let eps = rat_in(eps)?;
    if dim <= 1 {
        json_out(&sep::separability_1d(&a, &b, &eps).map_err(err)?)
    } else {
        let search = sep::NdSearch { dim, budget, seed };
        json_out(&sep::separability_nd(&a, &b, &eps, &search).map_err(err)?)
    }
}

/// Critical points of a set at eps: (sorted points, pre-dedup count).
#[pyfunction]
fn critical_points(f: Vec<String>, eps: &str) -> PyResult<(Vec<String>, String)> {
    let (pts, count) =
        sep::critical_points_with_count(&set_in(f)?, &rat_in(eps)?).map_err(err)?;
    Ok((pts.iter().map(rat_str).collect(), count.to_string()))
}

/// Nice-set census across critical regions; JSON report.
#[pyfunction]
fn nice_report(f: Vec<String>, eps: &str) -> PyResult<String> {
    json_out(&sep::nice_collections(&set_in(f)?, &rat_in(eps)?).map_err(err)?)
}

/// Certified doubling-orbit verdicts against [3/4, 1):
/// list of (n, "p/2^k", "outside"/"inside").
#[pyfunction]
fn doubling_orbit(n_max: u32) -> PyResult<Vec<(u32, String, String)>> {
    let forbidden = torus::CircleInterval::half_open(
        &rat_in("3/4")?,
        &rat_in("1")?,
    );
    let orbit = recurrence::doubling_orbit(n_max, &forbidden).map_err(err)?;
    Ok(orbit
        .iter()
        .map(|p| {
            let verdict = match p.verdict {
                recurrence::OrbitVerdict::Outside => "outside",
                recurrence::OrbitVerdict::Inside => "inside",
            };
            (p.n, p.value_str(), verdict.to_string())
        })
        .collect())
}

/// Exponential-sum magnitude and histogram of exact fractional parts.
#[pyfunction]
fn weyl_sum(elements: Vec<String>, alpha: &str, bins: usize) -> PyResult<(f64, Vec<u64>)> {
    let report = recurrence::weyl_sum(&set_in(elements)?, &rat_in(alpha)?, bins).map_err(err)?;
    Ok((report.magnitude, report.histogram))
}

/// Balanced-ternary digits of n, least significant first.
#[pyfunction]
fn to_balanced_ternary(n: &str) -> PyResult<Vec<i8>> {
    Ok(riesz::to_balanced_ternary(&int_in(n)?).map_err(err)?.digits)
}

/// Closed-form product coefficient at n for the given c_j.
#[pyfunction]
fn sigma_hat(n: &str, coeffs: Vec<String>) -> PyResult<String> {
    let coeffs: Vec<BigRational> =
        coeffs.iter().map(|c| rat_in(c)).collect::<PyResult<_>>()?;
    let spec = riesz::RieszSpec::new(coeffs).map_err(err)?;
    Ok(rat_str(&riesz::sigma_hat(&int_in(n)?, &spec).map_err(err)?))
}

/// Coefficient at m of the expanded n_factors-fold product.
#[pyfunction]
fn partial_product_oracle(n_factors: usize, coeffs: Vec<String>, m: &str) -> PyResult<String> {
    let coeffs: Vec<BigRational> =
        coeffs.iter().map(|c| rat_in(c)).collect::<PyResult<_>>()?;
    let spec = riesz::RieszSpec::new(coeffs).map_err(err)?;
    Ok(rat_str(&riesz::partial_product_oracle(n_factors, &spec, &int_in(m)?).map_err(err)?))
}

/// Correlation-gap report for seeded perturbations; JSON.
#[pyfunction]
fn correlation_gaps(n_max: u32, delta: &str, seed: u64) -> PyResult<String> {
    json_out(&riesz::correlation_gap_check(n_max, &rat_in(delta)?, seed).map_err(err)?)
}

/// Greedy fast-lacunary base for the nested descent.
#[pyfunction]
fn fast_lacunary(ell: &str, count: usize) -> PyResult<Vec<String>> {
    let s = nilseq::fast_lacunary(&rat_in(ell)?, count).map_err(err)?;
    Ok(s.iter().map(|x| x.to_string()).collect())
}

/// Full witness pipeline: (alpha, enclosure_left, enclosure_right).
#[pyfunction]
fn nested_interval_alpha(ell: &str, n: usize) -> PyResult<(String, String, String)> {
    let w = nilseq::construct_two_step_witness(&rat_in(ell)?, n).map_err(err)?;
    Ok((
        rat_str(&w.alpha),
        rat_str(&w.enclosure.left),
        rat_str(&w.enclosure.right),
    ))
}

/// Construct a witness at ell and check all pair memberships at c.
#[pyfunction]
fn verify_two_step(ell: &str, n: usize, c: &str) -> PyResult<bool> {
    let w = nilseq::construct_two_step_witness(&rat_in(ell)?, n).map_err(err)?;
    let report = nilseq::verify_two_step_witness(&w, n, &rat_in(c)?).map_err(err)?;
    Ok(report.ok)
}

/// Build an interpolant and audit it; JSON payload with nodes, targets,
/// levels, and the node-error report.
#[pyfunction]
#[pyo3(signature = (e, b, depth, eps_floor = "1/256", max_dim = 2, budget = 2000, seed = 0, allow_fragile = false))]
#[allow(clippy::too_many_arguments)]
fn build_interpolant(
    e: Vec<String>,
    b: Vec<String>,
    depth: u32,
    eps_floor: &str,
    max_dim: usize,
    budget: u64,
    seed: u64,
    allow_fragile: bool,
) -> PyResult<String> {
    let e = set_in(e)?;
    let targets: Vec<BigRational> = b.iter().map(|v| rat_in(v)).collect::<PyResult<_>>()?;
    let b = interpolation::TargetSequence::new(targets).map_err(err)?;
    let opts = interpolation::BuildOptions {
        eps_floor: rat_in(eps_floor)?,
        max_dim,
        budget,
        seed,
        allow_fragile,
    };
    let psi = interpolation::build_interpolant(&e, &b, depth, &opts).map_err(err)?;
    let report = interpolation::verify_interpolation(&psi, &e, &b).map_err(err)?;
    json_out(&cert::InterpolantPayload { e, b, interpolant: psi, report })
}

/// Evaluate an interpolant payload (as returned by build_interpolant) at n.
#[pyfunction]
fn interpolant_eval(payload_json: &str, n: &str) -> PyResult<String> {
    let payload: cert::InterpolantPayload =
        serde_json::from_str(payload_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(rat_str(&payload.interpolant.eval_at(&int_in(n)?).map_err(err)?))
}

/// Scan bipartitions of prefixes for a refuted pair; JSON outcome.
#[pyfunction]
fn non_separable_pair_search(elements: Vec<String>, eps: &str, budget: u64) -> PyResult<String> {
    json_out(
        &sep::non_separable_pair_search(&set_in(elements)?, &rat_in(eps)?, budget)
            .map_err(err)?,
    )
}

/// Window averages of e^{2 pi i s_n freq} along a set:
/// (per-window (re, im), tail oscillation).
#[pyfunction]
fn average_trig(
    elements: Vec<String>,
    freq: &str,
    windows: Vec<(usize, usize)>,
) -> PyResult<(Vec<(f64, f64)>, f64)> {
    let psi = nilseq::TrigPolynomial::single(rat_in(freq)?);
    let report = nilseq::average_along(&psi, &set_in(elements)?, &windows).map_err(err)?;
    Ok((report.averages, report.oscillation))
}

/// Re-run the exact verification of an artifact (full JSON document).
#[pyfunction]
fn verify_artifact(artifact_json: &str) -> PyResult<String> {
    let artifact: cert::Artifact =
        serde_json::from_str(artifact_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    cert::verify_artifact(&artifact).map_err(err)
}

#[pymodule]
fn interpolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(torus_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(circle_dist, m)?)?;
    m.add_function(wrap_pyfunction!(torus_dist, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(lacunary_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(difference_set, m)?)?;
    m.add_function(wrap_pyfunction!(longest_ap, m)?)?;
    m.add_function(wrap_pyfunction!(supmin, m)?)?;
    m.add_function(wrap_pyfunction!(recurrence_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(partition_bohr, m)?)?;
    m.add_function(wrap_pyfunction!(separability, m)?)?;
    m.add_function(wrap_pyfunction!(critical_points, m)?)?;
    m.add_function(wrap_pyfunction!(nice_report, m)?)?;
    m.add_function(wrap_pyfunction!(doubling_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_sum, m)?)?;
    m.add_function(wrap_pyfunction!(to_balanced_ternary, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_hat, m)?)?;
    m.add_function(wrap_pyfunction!(partial_product_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(fast_lacunary, m)?)?;
    m.add_function(wrap_pyfunction!(nested_interval_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(verify_two_step, m)?)?;
    m.add_function(wrap_pyfunction!(build_interpolant, m)?)?;
    m.add_function(wrap_pyfunction!(interpolant_eval, m)?)?;
    m.add_function(wrap_pyfunction!(non_separable_pair_search, m)?)?;
    m.add_function(wrap_pyfunction!(average_trig, m)?)?;
    m.add_function(wrap_pyfunction!(verify_artifact, m)?)?;
    Ok(())
}
