//! Reproducible experiments over exact torus arithmetic: separability
//! certificates, recurrence thresholds, greedy partitions, interpolants,
//! averaging reports, two-step witnesses, digit-product correlations, and a
//! certified doubling orbit.
//!
//! Exit codes: 0 success, 1 verified-negative where a certificate was
//! demanded, 2 usage error, 3 internal invariant violation.

mod store;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use interpolab_core::cert::{self, Artifact};
use interpolab_core::index_sets::{generate, GeneratorSpec, IndexSet};
use interpolab_core::interpolation::{
    build_interpolant, verify_interpolation, BuildOptions, TargetSequence,
};
use interpolab_core::nilseq::{
    average_along, average_by_index, construct_two_step_witness, nonconvergent_target,
    polynomial_non_i0_demo, verify_two_step_witness, QuadraticPhase, Selector, TrigPolynomial,
    Window,
};
use interpolab_core::rat::{parse_int, parse_rat, rat_str};
use interpolab_core::recurrence::{
    doubling_orbit, harmonic_schedule, partition_bohr, recurrence_threshold, supmin_1d, weyl_sum,
    OrbitVerdict, Stage, ThresholdOutcome,
};
use interpolab_core::riesz::correlation_gap_check;
use interpolab_core::separability::{
    nice_collections, non_separable_pair_search, separability_1d, separability_nd, NdOutcome,
    NdSearch, PairSearchOutcome, SeparabilityOutcome,
};
use interpolab_core::torus::CircleInterval;
use interpolab_core::{BigRational, Error as CoreError};

use store::CertificateStore;

#[derive(Parser)]
#[command(
    name = "interpolab",
    version,
    about = "Exact separability, recurrence, interpolation, and correlation experiments"
)]
struct Cli {
    /// Directory for content-addressed artifact storage.
    #[arg(long, global = true, env = "INTERPOLAB_STORE")]
    store: Option<PathBuf>,

    /// Write the JSON artifact of this run to the given path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SetSource {
    /// Explicit comma-separated elements.
    #[arg(long, value_name = "LIST")]
    elements: Option<String>,

    /// Named family: power | power-affine | grow | poly.
    #[arg(long)]
    family: Option<String>,

    /// Base for power families.
    #[arg(long)]
    base: Option<String>,

    /// Linear coefficient for power-affine (value = base^n + lin*n + off).
    #[arg(long, default_value = "0")]
    lin: String,

    /// Offset for power-affine.
    #[arg(long, default_value = "0")]
    off: String,

    /// Comma-separated polynomial coefficients, constant term first.
    #[arg(long)]
    coeffs: Option<String>,

    /// Full generator description as JSON (overrides the flags above).
    #[arg(long, value_name = "JSON")]
    spec_json: Option<String>,

    /// Number of elements to generate.
    #[arg(long, default_value_t = 16)]
    count: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an integer-sequence family prefix.
    Gen {
        #[command(flatten)]
        source: SetSource,
    },
    /// Decide (eps, d)-separability of two finite sets.
    Separate {
        /// First set, comma separated.
        #[arg(long = "A", value_name = "LIST")]
        a: String,
        /// Second set, comma separated.
        #[arg(long = "B", value_name = "LIST")]
        b: String,
        /// Required separation, as p/q.
        #[arg(long)]
        eps: String,
        /// Torus dimension (1 = exhaustive exact decision).
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 2_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit 1 unless a certificate is produced.
        #[arg(long)]
        require_certificate: bool,
    },
    /// Census of nice-set collections across critical regions.
    NiceCount {
        #[arg(long = "F", value_name = "LIST")]
        f: String,
        #[arg(long)]
        eps: String,
    },
    /// Exact sup-min of a prefix, or the least threshold pushing it under eps.
    Recur {
        #[command(flatten)]
        source: SetSource,
        /// With eps: find the least N with supmin(R ∩ [N]) < eps.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Greedy two-coloring of a recurrent prefix along an eps schedule.
    Partition {
        #[command(flatten)]
        source: SetSource,
        /// Number of harmonic stages (eps_k = 1/k).
        #[arg(long, default_value_t = 3)]
        stages: usize,
        /// Explicit comma-separated eps list overriding --stages.
        #[arg(long)]
        eps_list: Option<String>,
        /// Exit 1 unless every scheduled stage completes.
        #[arg(long)]
        require_complete: bool,
    },
    /// Build and audit an interpolant for a bounded target on nodes.
    Interpolate {
        #[arg(long = "E", value_name = "LIST")]
        e: String,
        /// Comma-separated rational targets in [0, 1], aligned with E.
        #[arg(long = "b", value_name = "LIST")]
        b: String,
        /// Binary truncation depth.
        #[arg(long = "K", default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value = "1/256")]
        eps_floor: String,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, default_value_t = 2_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accept levels separated below the floor instead of failing.
        #[arg(long)]
        allow_fragile: bool,
    },
    /// Evaluate a stored interpolant at given arguments.
    Eval {
        /// Path to an interpolant artifact.
        #[arg(long)]
        interpolant: PathBuf,
        /// Comma-separated arguments.
        #[arg(long = "n", value_name = "LIST")]
        args: String,
    },
    /// Window averages of a model sequence along a subsequence.
    Average {
        #[command(flatten)]
        source: SetSource,
        /// Model: trig | quad | target | demo.
        #[arg(long, default_value = "trig")]
        seq: String,
        /// Frequencies p/q for the trig family (one report per frequency).
        #[arg(long)]
        freqs: Option<String>,
        /// Frequency for the quadratic phase.
        #[arg(long)]
        alpha: Option<String>,
        /// Block growth factor for the nonconvergent target.
        #[arg(long, default_value_t = 2)]
        factor: u64,
        /// Subsequence selector: all | even | squares.
        #[arg(long, default_value = "all")]
        select: String,
        /// Index windows a:b, comma separated.
        #[arg(long, default_value = "0:100,100:1000,1000:10000,5000:15000")]
        windows: String,
    },
    /// Construct and verify the nested-interval two-step witness.
    #[command(name = "construct-2step")]
    Construct2Step {
        /// Target arc length, as p/q (0 < ell < 1/2).
        #[arg(long)]
        ell: String,
        /// Number of base elements / descent stages.
        #[arg(long = "n", default_value_t = 3)]
        n: usize,
        /// Membership half-width; defaults to 3*ell.
        #[arg(long = "c")]
        c_param: Option<String>,
    },
    /// Digit-product correlation gaps along powers of three.
    Riesz {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        /// Perturbation bound, as p/q (must be < 1/8).
        #[arg(long, default_value = "1/16")]
        delta: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Apply the seeded perturbation (zero perturbation otherwise).
        #[arg(long)]
        perturbed: bool,
    },
    /// Certified doubling-orbit verdicts against a forbidden arc.
    Orbit {
        #[arg(long, default_value_t = 64)]
        n_max: u32,
        /// Arc l:r, taken as [l, r).
        #[arg(long, default_value = "3/4:1")]
        forbidden: String,
    },
    /// Exponential-sum magnitude and equidistribution histogram.
    Weyl {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 16)]
        bins: usize,
    },
    /// Scan bipartitions of a prefix for a refuted pair.
    PairSearch {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Re-run the exact verification of a stored artifact.
    Verify {
        path: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::InvariantViolation(_)
            | CoreError::ContainmentFailure { .. }
            | CoreError::GuardExhausted(_) => 3,
            CoreError::SeparationFailed { .. } => 1,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn parse_set(s: &str, what: &str) -> Result<IndexSet, Failure> {
    let mut vals = Vec::new();
    for tok in s.split(',') {
        vals.push(parse_int(tok).map_err(|e| Failure::usage(format!("{what}: {e}")))?);
    }
    vals.sort();
    vals.dedup();
    IndexSet::new(vals, None).map_err(|e| Failure::usage(format!("{what}: {e}")))
}

fn parse_rat_arg(s: &str, what: &str) -> Result<BigRational, Failure> {
    parse_rat(s).map_err(|e| Failure::usage(format!("{what}: {e}")))
}

fn parse_rat_list(s: &str, what: &str) -> Result<Vec<BigRational>, Failure> {
    s.split(',').map(|tok| parse_rat_arg(tok, what)).collect()
}

fn parse_windows(s: &str) -> Result<Vec<Window>, Failure> {
    let mut out = Vec::new();
    for tok in s.split(',') {
        let (a, b) = tok
            .split_once(':')
            .ok_or_else(|| Failure::usage(format!("window `{tok}` is not of the form a:b")))?;
        let a: usize =
            a.trim().parse().map_err(|e| Failure::usage(format!("window start: {e}")))?;
        let b: usize = b.trim().parse().map_err(|e| Failure::usage(format!("window end: {e}")))?;
        out.push((a, b));
    }
    Ok(out)
}

fn parse_arc(s: &str) -> Result<CircleInterval, Failure> {
    let (l, r) = s
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("arc `{s}` is not of the form l:r")))?;
    Ok(CircleInterval::half_open(&parse_rat_arg(l, "arc left")?, &parse_rat_arg(r, "arc right")?))
}

impl SetSource {
    fn resolve(&self) -> Result<(IndexSet, serde_json::Value), Failure> {
        if let Some(elements) = &self.elements {
            let set = parse_set(elements, "--elements")?;
            let config = json!({ "elements": elements });
            return Ok((set, config));
        }
        let spec = self.generator()?;
        let set = generate(&spec, self.count)?;
        let config = json!({
            "spec": serde_json::to_value(&spec).expect("spec serializes"),
            "count": self.count,
        });
        Ok((set, config))
    }

    fn generator(&self) -> Result<GeneratorSpec, Failure> {
        if let Some(raw) = &self.spec_json {
            return serde_json::from_str(raw)
                .map_err(|e| Failure::usage(format!("--spec-json: {e}")));
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Failure::usage("need --elements, --family, or --spec-json"))?;
        match family {
            "power" => {
                let base = self.base.as_deref().ok_or_else(|| Failure::usage("power needs --base"))?;
                Ok(GeneratorSpec::Power { base: parse_int(base).map_err(Failure::from)? })
            }
            "power-affine" => {
                let base = self
                    .base
                    .as_deref()
                    .ok_or_else(|| Failure::usage("power-affine needs --base"))?;
                Ok(GeneratorSpec::PowerAffine {
                    base: parse_int(base).map_err(Failure::from)?,
                    lin: parse_int(&self.lin).map_err(Failure::from)?,
                    off: parse_int(&self.off).map_err(Failure::from)?,
                })
            }
            "grow" => Ok(GeneratorSpec::Grow),
            "poly" => {
                let coeffs = self
                    .coeffs
                    .as_deref()
                    .ok_or_else(|| Failure::usage("poly needs --coeffs"))?;
                Ok(GeneratorSpec::Polynomial { coeffs: parse_rat_list(coeffs, "--coeffs")? })
            }
            other => Err(Failure::usage(format!(
                "unknown family `{other}` (try power, power-affine, grow, poly, or --spec-json)"
            ))),
        }
    }
}

fn emit(
    cli_store: &Option<PathBuf>,
    cli_out: &Option<PathBuf>,
    kind: &str,
    artifact: &Artifact,
) -> Result<(), Failure> {
    if let Some(path) = cli_out {
        fs::write(path, artifact.to_json_bytes())?;
        store::write_sidecar(path)?;
        println!("artifact written to {}", path.display());
    }
    if let Some(dir) = cli_store {
        let path = CertificateStore::new(dir).save(kind, artifact)?;
        println!("artifact stored at {}", path.display());
    }
    Ok(())
}

fn selector_from(name: &str) -> Result<Selector, Failure> {
    match name {
        "all" => Ok(Selector::All),
        "even" => Ok(Selector::EvenIndices),
        "squares" => Ok(Selector::SquareIndices),
        other => Err(Failure::usage(format!("unknown selector `{other}`"))),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let store_dir = cli.store;
    let out_path = cli.out;
    match cli.command {
        Command::Gen { source } => {
            let (set, config) = source.resolve()?;
            let preview: Vec<String> = set.iter().take(12).map(|x| x.to_string()).collect();
            println!(
                "{} elements{}: {}{}",
                set.len(),
                set.tag().map(|t| format!(" of {t}")).unwrap_or_default(),
                preview.join(", "),
                if set.len() > 12 { ", ..." } else { "" }
            );
            let artifact = Artifact::new(cert::SCHEMA_INDEX_SET, config, &set)?;
            emit(&store_dir, &out_path, "index-set", &artifact)?;
            Ok(0)
        }
        Command::Separate { a, b, eps, dim, budget, seed, require_certificate } => {
            let a = parse_set(&a, "--A")?;
            let b = parse_set(&b, "--B")?;
            let eps = parse_rat_arg(&eps, "--eps")?;
            let config = json!({
                "A": a, "B": b, "eps": rat_str(&eps), "dim": dim,
                "budget": budget, "seed": seed,
            });
            if dim <= 1 {
                let outcome = separability_1d(&a, &b, &eps)?;
                let artifact = Artifact::new(cert::SCHEMA_SEPARABILITY, config, &outcome)?;
                emit(&store_dir, &out_path, "separability", &artifact)?;
                match outcome {
                    SeparabilityOutcome::Separable(cert) => {
                        println!(
                            "separable: alpha = {}, achieved = {} >= eps = {}",
                            rat_str(cert.alpha.coord_1d()),
                            rat_str(&cert.achieved),
                            rat_str(&cert.epsilon)
                        );
                        Ok(0)
                    }
                    SeparabilityOutcome::NotSeparable(v) => {
                        println!(
                            "not separable: exact sup = {} < eps = {} (argsup {})",
                            rat_str(&v.sup_achieved),
                            rat_str(&v.epsilon),
                            rat_str(&v.argsup)
                        );
                        Ok(if require_certificate { 1 } else { 0 })
                    }
                }
            } else {
                let outcome = separability_nd(&a, &b, &eps, &NdSearch { dim, budget, seed })?;
                let artifact = Artifact::new(cert::SCHEMA_ND_SEARCH, config, &outcome)?;
                emit(&store_dir, &out_path, "nd-search", &artifact)?;
                match outcome {
                    NdOutcome::Certificate(cert) => {
                        let coords: Vec<String> =
                            cert.alpha.coords().iter().map(rat_str).collect();
                        println!(
                            "separable in dim {}: alpha = ({}), achieved = {}",
                            cert.dim,
                            coords.join(", "),
                            rat_str(&cert.achieved)
                        );
                        Ok(0)
                    }
                    NdOutcome::Unknown { candidates_tried } => {
                        println!("inconclusive after {candidates_tried} candidates");
                        Ok(if require_certificate { 1 } else { 0 })
                    }
                }
            }
        }
        Command::NiceCount { f, eps } => {
            let f = parse_set(&f, "--F")?;
            let eps = parse_rat_arg(&eps, "--eps")?;
            let report = nice_collections(&f, &eps)?;
            println!(
                "critical points: {} distinct (pre-dedup {}), regions: {}",
                report.critical_points.len(),
                report.pre_dedup_count,
                report.regions.len()
            );
            println!(
                "distinct collections: {}, distinct nice sets: {}, bound: {}",
                report.distinct_collections, report.distinct_nice_sets, report.bound
            );
            let config = json!({ "F": f, "eps": rat_str(&eps) });
            let artifact = Artifact::new(cert::SCHEMA_NICE_REPORT, config, &report)?;
            emit(&store_dir, &out_path, "nice-report", &artifact)?;
            Ok(0)
        }
        Command::Recur { source, eps } => {
            let (r, source_config) = source.resolve()?;
            match eps {
                None => {
                    let result = supmin_1d(&r)?;
                    println!(
                        "supmin = {} at alpha = {}",
                        rat_str(&result.value),
                        rat_str(result.argmax.coord_1d())
                    );
                    let config = json!({ "source": source_config });
                    let artifact = Artifact::new(cert::SCHEMA_SUPMIN, config, &result)?;
                    emit(&store_dir, &out_path, "supmin", &artifact)?;
                    Ok(0)
                }
                Some(eps) => {
                    let eps = parse_rat_arg(&eps, "--eps")?;
                    let outcome = recurrence_threshold(&r, &eps)?;
                    match &outcome {
                        ThresholdOutcome::Reached { n, block, certificate } => println!(
                            "threshold N = {n}: block of {} elements, supmin = {} < {}",
                            block.len(),
                            rat_str(&certificate.value),
                            rat_str(&eps)
                        ),
                        ThresholdOutcome::NotReached { final_sup } => println!(
                            "not reached on this prefix: final sup = {} >= {}",
                            rat_str(&final_sup.value),
                            rat_str(&eps)
                        ),
                    }
                    let payload =
                        cert::ThresholdPayload { eps: eps.clone(), outcome };
                    let config = json!({ "source": source_config, "eps": rat_str(&eps) });
                    let artifact = Artifact::new(cert::SCHEMA_THRESHOLD, config, &payload)?;
                    emit(&store_dir, &out_path, "threshold", &artifact)?;
                    Ok(0)
                }
            }
        }
        Command::Partition { source, stages, eps_list, require_complete } => {
            let (r, source_config) = source.resolve()?;
            let schedule: Vec<Stage> = match &eps_list {
                Some(list) => parse_rat_list(list, "--eps-list")?
                    .into_iter()
                    .map(|eps| Stage { dim: 1, eps })
                    .collect(),
                None => harmonic_schedule(stages),
            };
            let trace = partition_bohr(&r, &schedule)?;
            for st in &trace.stages {
                println!(
                    "stage {}: eps = {}, A block {} elems (N = {}, sup {}), B block {} elems (N = {}, sup {})",
                    st.stage,
                    rat_str(&st.eps),
                    st.a_block.len(),
                    st.a_threshold,
                    rat_str(&st.a_certificate.value),
                    st.b_block.len(),
                    st.b_threshold,
                    rat_str(&st.b_certificate.value)
                );
            }
            match &trace.stopped {
                None => println!(
                    "all {} stages complete; |A| = {}, |B| = {}, residual {}",
                    trace.stages.len(),
                    trace.a.len(),
                    trace.b.len(),
                    trace.residual.len()
                ),
                Some(abort) => println!(
                    "stopped at stage {} phase {}: threshold not reached",
                    abort.stage, abort.phase
                ),
            }
            let config = json!({
                "source": source_config,
                "schedule": serde_json::to_value(&schedule).expect("schedule serializes"),
            });
            let artifact = Artifact::new(cert::SCHEMA_PARTITION, config, &trace)?;
            emit(&store_dir, &out_path, "partition", &artifact)?;
            Ok(if require_complete && !trace.completed_all_stages() { 1 } else { 0 })
        }
        Command::Interpolate {
            e,
            b,
            depth,
            eps_floor,
            max_dim,
            budget,
            seed,
            allow_fragile,
        } => {
            let e = parse_set(&e, "--E")?;
            let b = TargetSequence::new(parse_rat_list(&b, "--b")?)?;
            let opts = BuildOptions {
                eps_floor: parse_rat_arg(&eps_floor, "--eps-floor")?,
                max_dim,
                budget,
                seed,
                allow_fragile,
            };
            let psi = build_interpolant(&e, &b, depth, &opts)?;
            let report = verify_interpolation(&psi, &e, &b)?;
            for level in &psi.levels {
                println!(
                    "level {}: separation {}{}",
                    level.k,
                    rat_str(&level.separation),
                    if level.fragile { " (fragile)" } else { "" }
                );
            }
            println!(
                "max node error {} (bound {}): {}",
                rat_str(&report.max_error),
                rat_str(&report.bound),
                if report.ok { "ok" } else { "EXCEEDED" }
            );
            let config = json!({
                "E": e, "b": b, "K": depth,
                "eps_floor": rat_str(&opts.eps_floor), "max_dim": max_dim,
                "budget": budget, "seed": seed, "allow_fragile": allow_fragile,
            });
            let ok = report.ok;
            let payload = cert::InterpolantPayload { e, b, interpolant: psi, report };
            let artifact = Artifact::new(cert::SCHEMA_INTERPOLANT, config, &payload)?;
            emit(&store_dir, &out_path, "interpolant", &artifact)?;
            Ok(if ok { 0 } else { 3 })
        }
        Command::Eval { interpolant, args } => {
            let raw = fs::read_to_string(&interpolant)?;
            let artifact: Artifact = serde_json::from_str(&raw)
                .map_err(|e| Failure::usage(format!("unreadable artifact: {e}")))?;
            if artifact.schema != cert::SCHEMA_INTERPOLANT {
                return Err(Failure::usage(format!(
                    "expected an interpolant artifact, found schema {}",
                    artifact.schema
                )));
            }
            let payload: cert::InterpolantPayload =
                serde_json::from_value(artifact.payload)
                    .map_err(|e| Failure::usage(format!("payload: {e}")))?;
            for tok in args.split(',') {
                let n = parse_int(tok).map_err(Failure::from)?;
                let v = payload.interpolant.eval_at(&n)?;
                println!("psi({n}) = {}", rat_str(&v));
            }
            Ok(0)
        }
        Command::Average { source, seq, freqs, alpha, factor, select, windows } => {
            let windows = parse_windows(&windows)?;
            match seq.as_str() {
                "trig" => {
                    let (s, source_config) = source.resolve()?;
                    let freqs = parse_rat_list(
                        freqs.as_deref().ok_or_else(|| Failure::usage("trig needs --freqs"))?,
                        "--freqs",
                    )?;
                    println!("freq,window_start,window_end,avg_re,avg_im");
                    let mut reports = Vec::new();
                    for freq in &freqs {
                        let psi = TrigPolynomial::single(freq.clone());
                        let report = average_along(&psi, &s, &windows)?;
                        for (w, avg) in report.windows.iter().zip(&report.averages) {
                            println!("{},{},{},{:e},{:e}", rat_str(freq), w.0, w.1, avg.0, avg.1);
                        }
                        println!("# oscillation({}) = {:e}", rat_str(freq), report.oscillation);
                        reports.push(json!({ "freq": rat_str(freq), "report": report }));
                    }
                    let config = json!({
                        "source": source_config, "seq": "trig",
                        "windows": windows, "freqs": freqs.iter().map(rat_str).collect::<Vec<_>>(),
                    });
                    let artifact =
                        Artifact::new(cert::SCHEMA_AVERAGE, config, &json!({ "reports": reports }))?;
                    emit(&store_dir, &out_path, "average", &artifact)?;
                    Ok(0)
                }
                "quad" => {
                    let (s, source_config) = source.resolve()?;
                    let alpha = parse_rat_arg(
                        alpha.as_deref().ok_or_else(|| Failure::usage("quad needs --alpha"))?,
                        "--alpha",
                    )?;
                    let psi = QuadraticPhase { alpha: alpha.clone() };
                    let report = average_along(&psi, &s, &windows)?;
                    println!("window_start,window_end,avg_re,avg_im");
                    for (w, avg) in report.windows.iter().zip(&report.averages) {
                        println!("{},{},{:e},{:e}", w.0, w.1, avg.0, avg.1);
                    }
                    println!("# oscillation = {:e}", report.oscillation);
                    let config = json!({
                        "source": source_config, "seq": "quad",
                        "alpha": rat_str(&alpha), "windows": windows,
                    });
                    let artifact = Artifact::new(cert::SCHEMA_AVERAGE, config, &report)?;
                    emit(&store_dir, &out_path, "average", &artifact)?;
                    Ok(0)
                }
                "target" => {
                    let target = nonconvergent_target(factor)?;
                    let report = average_by_index(&target, &windows)?;
                    println!("window_start,window_end,avg");
                    for (w, avg) in report.windows.iter().zip(&report.averages) {
                        println!("{},{},{:e}", w.0, w.1, avg.0);
                    }
                    println!("# oscillation = {:e}", report.oscillation);
                    let boundary = target.boundary_report(24);
                    println!(
                        "# block-boundary accumulation points: {} and {}",
                        rat_str(&boundary.lower_limit),
                        rat_str(&boundary.upper_limit)
                    );
                    let config = json!({ "seq": "target", "factor": factor, "windows": windows });
                    let payload = json!({ "averages": report, "boundaries": boundary });
                    let artifact = Artifact::new(cert::SCHEMA_NONCONVERGENT, config, &payload)?;
                    emit(&store_dir, &out_path, "nonconvergent", &artifact)?;
                    Ok(0)
                }
                "demo" => {
                    let coeffs = parse_rat_list(
                        source
                            .coeffs
                            .as_deref()
                            .ok_or_else(|| Failure::usage("demo needs --coeffs"))?,
                        "--coeffs",
                    )?;
                    let freqs = parse_rat_list(
                        freqs.as_deref().ok_or_else(|| Failure::usage("demo needs --freqs"))?,
                        "--freqs",
                    )?;
                    let selector = selector_from(&select)?;
                    let report = polynomial_non_i0_demo(
                        &coeffs,
                        source.count,
                        selector,
                        &freqs,
                        &windows,
                    )?;
                    println!(
                        "trig max oscillation {:e}; target oscillation {:e}",
                        report.trig_max_oscillation, report.target_oscillation
                    );
                    let config = json!({
                        "seq": "demo",
                        "coeffs": coeffs.iter().map(rat_str).collect::<Vec<_>>(),
                        "count": source.count, "select": select,
                        "freqs": freqs.iter().map(rat_str).collect::<Vec<_>>(),
                        "windows": windows,
                    });
                    let artifact = Artifact::new(cert::SCHEMA_DEMO, config, &report)?;
                    emit(&store_dir, &out_path, "demo", &artifact)?;
                    Ok(0)
                }
                other => Err(Failure::usage(format!("unknown sequence model `{other}`"))),
            }
        }
        Command::Construct2Step { ell, n, c_param } => {
            let ell = parse_rat_arg(&ell, "--ell")?;
            let c = match c_param {
                Some(c) => parse_rat_arg(&c, "--c")?,
                None => &ell * BigRational::from(interpolab_core::BigInt::from(3)),
            };
            let witness = construct_two_step_witness(&ell, n)?;
            let report = verify_two_step_witness(&witness, n, &c)?;
            let s_preview: Vec<String> = witness.s.iter().map(|x| x.to_string()).collect();
            println!("base s = {}", s_preview.join(", "));
            println!("alpha = {}", rat_str(&witness.alpha));
            println!(
                "verification over {} pairs at c = {}: {}",
                report.pair_checks.len(),
                rat_str(&c),
                if report.ok { "all inside" } else { "FAILED" }
            );
            let config = json!({ "ell": rat_str(&ell), "n": n, "c": rat_str(&c) });
            let payload = cert::TwoStepPayload { witness, upto: n, c };
            let artifact = Artifact::new(cert::SCHEMA_TWO_STEP, config, &payload)?;
            emit(&store_dir, &out_path, "two-step", &artifact)?;
            Ok(if report.ok { 0 } else { 3 })
        }
        Command::Riesz { n_max, delta, seed, perturbed } => {
            let delta = if perturbed {
                parse_rat_arg(&delta, "--delta")?
            } else {
                BigRational::from(interpolab_core::BigInt::from(0))
            };
            let report = correlation_gap_check(n_max, &delta, seed)?;
            println!("n,sigma_power,sigma_shifted,gap");
            for row in &report.rows {
                println!(
                    "{},{},{},{}",
                    row.n,
                    rat_str(&row.sigma_power),
                    rat_str(&row.sigma_shifted),
                    rat_str(&row.gap)
                );
            }
            println!(
                "# min gap = {} (guaranteed bound {})",
                rat_str(&report.min_gap),
                rat_str(&report.bound)
            );
            let config = json!({
                "n_max": n_max, "delta": rat_str(&delta),
                "seed": seed, "perturbed": perturbed,
            });
            let artifact = Artifact::new(cert::SCHEMA_RIESZ_GAPS, config, &report)?;
            emit(&store_dir, &out_path, "riesz-gaps", &artifact)?;
            Ok(0)
        }
        Command::Orbit { n_max, forbidden } => {
            let arc = parse_arc(&forbidden)?;
            let points = doubling_orbit(n_max, &arc)?;
            println!("n,value,verdict");
            let mut any_inside = false;
            for p in &points {
                let verdict = match p.verdict {
                    OrbitVerdict::Outside => "outside",
                    OrbitVerdict::Inside => {
                        any_inside = true;
                        "inside"
                    }
                };
                println!("{},{},{}", p.n, p.value_str(), verdict);
            }
            let config = json!({ "n_max": n_max, "forbidden": forbidden });
            let payload = cert::OrbitPayload { n_max, forbidden: arc, points };
            let artifact = Artifact::new(cert::SCHEMA_ORBIT, config, &payload)?;
            emit(&store_dir, &out_path, "orbit", &artifact)?;
            Ok(if any_inside { 1 } else { 0 })
        }
        Command::Weyl { source, alpha, bins } => {
            let (e, source_config) = source.resolve()?;
            let alpha = parse_rat_arg(&alpha, "--alpha")?;
            let report = weyl_sum(&e, &alpha, bins)?;
            println!("magnitude = {:e} over {} terms", report.magnitude, report.count);
            println!("bin,count");
            for (i, c) in report.histogram.iter().enumerate() {
                println!("{i},{c}");
            }
            let config =
                json!({ "source": source_config, "alpha": rat_str(&alpha), "bins": bins });
            let artifact = Artifact::new(cert::SCHEMA_WEYL, config, &report)?;
            emit(&store_dir, &out_path, "weyl", &artifact)?;
            Ok(0)
        }
        Command::PairSearch { source, eps, budget } => {
            let (e, source_config) = source.resolve()?;
            let eps = parse_rat_arg(&eps, "--eps")?;
            let outcome = non_separable_pair_search(&e, &eps, budget)?;
            match &outcome {
                PairSearchOutcome::Found { a, b, verdict } => {
                    let fmt = |s: &IndexSet| {
                        s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                    };
                    println!(
                        "refuted pair: A = {{{}}}, B = {{{}}}, exact sup = {} < {}",
                        fmt(a),
                        fmt(b),
                        rat_str(&verdict.sup_achieved),
                        rat_str(&eps)
                    );
                }
                PairSearchOutcome::NotFound { pairs_tried } => {
                    println!("no refuted pair within {pairs_tried} tries");
                }
            }
            let config =
                json!({ "source": source_config, "eps": rat_str(&eps), "budget": budget });
            let artifact = Artifact::new(cert::SCHEMA_PAIR_SEARCH, config, &outcome)?;
            emit(&store_dir, &out_path, "pair-search", &artifact)?;
            Ok(0)
        }
        Command::Verify { path } => {
            let raw = fs::read_to_string(&path)?;
            let artifact: Artifact = serde_json::from_str(&raw)
                .map_err(|e| Failure::usage(format!("unreadable artifact: {e}")))?;
            match cert::verify_artifact(&artifact) {
                Ok(msg) => {
                    println!("pass: {msg}");
                    Ok(0)
                }
                Err(CoreError::Parse(msg)) => Err(Failure::usage(msg)),
                Err(e) => {
                    println!("fail: {e}");
                    Ok(1)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_and_arcs_parse() {
        assert_eq!(parse_windows("0:100,100:1000").unwrap(), vec![(0, 100), (100, 1000)]);
        assert!(parse_windows("5").is_err());
        let arc = parse_arc("3/4:1").unwrap();
        assert!(arc.contains(&interpolab_core::rat::rat(7, 8)));
        assert!(!arc.contains(&interpolab_core::rat::rat(1, 2)));
    }

    #[test]
    fn set_parsing_sorts_and_dedups() {
        let s = parse_set("16,4,4,2", "--A").unwrap();
        assert_eq!(s.elements().iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["2", "4", "16"]);
        assert!(parse_set("3,x", "--A").is_err());
    }
}
