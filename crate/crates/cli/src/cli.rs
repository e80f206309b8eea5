//! Command dispatch for the `divsmooth` binary.
//!
//! Exit codes: 0 on success, 2 on domain errors (out-of-regime parameters,
//! infeasible constructions), 1 on I/O or parse errors. Every document
//! echoes the fully resolved input so that feeding an emitted document back
//! through `--input` reproduces it byte for byte.

use clap::{Args, Parser, Subcommand};
use divsmooth_core::divergence::{
    hypothesis_testing, renyi, smoothed_renyi, smoothed_renyi_sub, RenyiOrder,
};
use divsmooth_core::families as fam;
use divsmooth_core::prob::{ratio_order, sort_desc};
use divsmooth_core::smoothing;
use divsmooth_core::{bounds, majorization, oracle, ExtReal, ProbVec};
use std::io::Write as _;
use std::path::PathBuf;

use crate::doc::{json_extended, Document, Value};
use crate::sample;
use crate::sweep::{sweep_bounds, SweepConfig};

const LN_2: f64 = core::f64::consts::LN_2;

#[derive(Parser)]
#[command(
    name = "divsmooth",
    version,
    about = "Smoothed classical divergences, clipped vectors, and optimal universal corrections"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for the emitted document
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    format: String,

    /// Write the document to this path instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Unit of logarithms in emitted values (internal math stays base 2)
    #[arg(long, global = true, default_value = "2", value_parser = ["2", "e"])]
    log_base: String,

    /// JSON file providing defaults ({"p": [...], "q": [...], ...} or a
    /// previously emitted document)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct VecArgs {
    /// First vector: comma-separated probabilities, `uniform`, or `e1`
    #[arg(long)]
    p: Option<String>,
    /// Reference vector, same syntax; defaults to `uniform`
    #[arg(long)]
    q: Option<String>,
    /// Dimension for the `uniform`/`e1` shorthands
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Clip a vector over the total-variation ball (flattest approximation)
    Clip {
        #[command(flatten)]
        vecs: VecArgs,
        /// Ball radius
        #[arg(long)]
        eps: Option<f64>,
        /// Emit the steepest (majorization-maximal) member instead
        #[arg(long)]
        steepest: bool,
        /// Target mass for subnormalized clipping
        #[arg(long)]
        gamma: Option<f64>,
        /// Denominator cap when a non-uniform reference must be
        /// approximated by rationals for subnormalized clipping
        #[arg(long, default_value_t = 1_000_000)]
        max_denominator: u64,
    },
    /// Evaluate a divergence
    Divergence {
        #[command(flatten)]
        vecs: VecArgs,
        /// `renyi` or `dh` (hypothesis testing)
        #[arg(long, default_value = "renyi", value_parser = ["renyi", "dh"])]
        kind: String,
        /// Rényi order (number, `0`, `1`, or `inf`)
        #[arg(long)]
        order: Option<String>,
        /// Failure tolerance for the hypothesis-testing divergence
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Evaluate a smoothed Rényi divergence
    Smooth {
        #[command(flatten)]
        vecs: VecArgs,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        order: Option<String>,
        /// Smooth over subnormalized vectors (uniform reference only)
        #[arg(long)]
        sub: bool,
    },
    /// Evaluate one of the optimal correction terms
    Bound {
        /// mu | nu | mu-h | nu-h | mu-sub | kappa
        name: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Run the self-check suites (oracles, representatives, scans)
    Verify {
        #[arg(long, default_value_t = 20260808)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
    /// Run a validity/achievability sweep and write report files
    Sweep {
        /// JSON sweep configuration; defaults apply when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for report.csv and summary.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Construct one of the achievability families
    Family {
        /// mu-h | nu-h | steepest-uniform | three-block | entropy-gap | kyfan-max
        name: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        ell: Option<usize>,
    },
}

#[derive(Debug)]
enum RunError {
    Domain(divsmooth_core::Error),
    Parse(String),
    Io(String),
}

impl From<divsmooth_core::Error> for RunError {
    fn from(e: divsmooth_core::Error) -> Self {
        RunError::Domain(e)
    }
}

type RunResult = Result<Document, RunError>;

/// Entry point: parse `std::env::args`, run, and return the exit code.
pub fn run_from_args() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let input = match load_input(cli.input.as_deref()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let nats = cli.log_base == "e";
    let result = dispatch(&cli.command, &input, nats);
    match result {
        Ok(doc) => match emit(&cli, &doc) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(RunError::Domain(e)) => {
            let mut doc = Document::new("error");
            doc.push("error", e.to_string().as_str());
            let _ = emit(&cli, &doc);
            2
        }
        Err(RunError::Parse(e)) | Err(RunError::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(cli: &Cli, doc: &Document) -> Result<(), String> {
    let text = if cli.format == "csv" {
        doc.to_csv()
    } else {
        doc.to_json()
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

/// The resolved view of `--input`: top-level fields, with an emitted
/// document's `input` object taking precedence over its result fields.
struct InputFile(Option<serde_json::Value>);

impl InputFile {
    fn lookup(&self, key: &str) -> Option<serde_json::Value> {
        let v = self.0.as_ref()?;
        if let Some(inner) = v.get("input") {
            if let Some(hit) = inner.get(key) {
                return Some(hit.clone());
            }
        }
        v.get(key).cloned()
    }

    fn number(&self, key: &str) -> Option<f64> {
        json_extended(&self.lookup(key)?)
    }

    fn text(&self, key: &str) -> Option<String> {
        let v = self.lookup(key)?;
        v.as_str()
            .map(str::to_string)
            .or_else(|| v.as_f64().map(|x| x.to_string()))
    }

    fn vector(&self, key: &str) -> Option<Vec<f64>> {
        self.lookup(key)?
            .as_array()?
            .iter()
            .map(json_extended)
            .collect::<Option<Vec<f64>>>()
    }
}

fn load_input(path: Option<&std::path::Path>) -> Result<InputFile, String> {
    match path {
        None => Ok(InputFile(None)),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(InputFile(Some(value)))
        }
    }
}

fn parse_vector(spec: &str, dim: Option<usize>) -> Result<Vec<f64>, RunError> {
    match spec {
        "uniform" => {
            let d = dim.ok_or_else(|| RunError::Parse("`uniform` needs --dim".into()))?;
            Ok(vec![1.0 / d as f64; d])
        }
        "e1" => {
            let d = dim.ok_or_else(|| RunError::Parse("`e1` needs --dim".into()))?;
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            Ok(v)
        }
        _ => spec
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| RunError::Parse(format!("bad entry `{tok}`: {e}")))
            })
            .collect(),
    }
}

fn parse_order(spec: &str) -> Result<RenyiOrder, RunError> {
    let v = match spec {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        s => s
            .parse::<f64>()
            .map_err(|e| RunError::Parse(format!("bad order `{s}`: {e}")))?,
    };
    RenyiOrder::new(v).map_err(RunError::Domain)
}

/// Resolve the (p, q) pair from CLI flags and the input file.
fn resolve_pair(vecs: &VecArgs, input: &InputFile) -> Result<(ProbVec, ProbVec), RunError> {
    let p_raw = match (&vecs.p, input.vector("p")) {
        (Some(spec), _) => parse_vector(spec, vecs.dim)?,
        (None, Some(v)) => v,
        (None, None) => {
            return Err(RunError::Parse(
                "missing --p (or an input file with `p`)".into(),
            ))
        }
    };
    let q_raw = match (&vecs.q, input.vector("q")) {
        (Some(spec), _) => parse_vector(spec, vecs.dim.or(Some(p_raw.len())))?,
        (None, Some(v)) => v,
        (None, None) => vec![1.0 / p_raw.len() as f64; p_raw.len()],
    };
    let p = ProbVec::new(p_raw)?;
    let q = ProbVec::new(q_raw)?;
    Ok((p, q))
}

fn resolve_f64(cli_value: Option<f64>, input: &InputFile, key: &str) -> Result<f64, RunError> {
    cli_value
        .or_else(|| input.number(key))
        .ok_or_else(|| RunError::Parse(format!("missing --{key}")))
}

fn resolve_order(
    cli_value: &Option<String>,
    input: &InputFile,
    key: &str,
) -> Result<RenyiOrder, RunError> {
    let spec = cli_value
        .clone()
        .or_else(|| input.text(key))
        .ok_or_else(|| RunError::Parse(format!("missing --{key}")))?;
    parse_order(&spec)
}

fn scale(nats: bool) -> f64 {
    if nats {
        LN_2
    } else {
        1.0
    }
}

fn push_value(doc: &mut Document, key: &str, v: ExtReal, nats: bool) {
    let v = match v {
        ExtReal::Finite(x) => ExtReal::Finite(x * scale(nats)),
        inf => inf,
    };
    doc.push(key, v);
    doc.push("units", if nats { "nats" } else { "bits" });
}

fn input_echo(p: &ProbVec, q: &ProbVec) -> Document {
    let mut input = Document::new_inner();
    input.push("p", Value::floats(p.as_slice()));
    input.push("q", Value::floats(q.as_slice()));
    input
}

fn dispatch(cmd: &Command, input: &InputFile, nats: bool) -> RunResult {
    match cmd {
        Command::Clip {
            vecs,
            eps,
            steepest,
            gamma,
            max_denominator,
        } => {
            let (p, q) = resolve_pair(vecs, input)?;
            let eps = resolve_f64(*eps, input, "eps")?;
            let gamma = gamma.or_else(|| input.number("gamma"));
            run_clip(p, q, eps, *steepest, gamma, *max_denominator)
        }
        Command::Divergence {
            vecs,
            kind,
            order,
            eps,
        } => {
            let (p, q) = resolve_pair(vecs, input)?;
            let mut doc = Document::new("divergence");
            let mut echo = input_echo(&p, &q);
            match kind.as_str() {
                "dh" => {
                    let eps = resolve_f64(*eps, input, "eps")?;
                    let v = hypothesis_testing(&p, &q, eps)?;
                    doc.push("kind", "dh");
                    push_value(&mut doc, "value", v, nats);
                    echo.push("eps", eps);
                }
                _ => {
                    let ord = resolve_order(order, input, "order")?;
                    let v = renyi(&p, &q, ord)?;
                    doc.push("kind", "renyi");
                    push_value(&mut doc, "value", v, nats);
                    echo.push("order", ExtReal::from_f64(ord.value()));
                }
            }
            doc.push("input", Value::Obj(echo));
            Ok(doc)
        }
        Command::Smooth {
            vecs,
            eps,
            order,
            sub,
        } => {
            let (p, q) = resolve_pair(vecs, input)?;
            let eps = resolve_f64(*eps, input, "eps")?;
            let ord = resolve_order(order, input, "order")?;
            let mut doc = Document::new("smooth");
            let v = if *sub {
                let sorted = sort_desc(&p).0;
                doc.push("kind", "subnormalized");
                smoothed_renyi_sub(&sorted, eps, ord)?
            } else {
                doc.push("kind", "normalized");
                smoothed_renyi(&p, &q, eps, ord)?
            };
            push_value(&mut doc, "value", v, nats);
            let mut echo = input_echo(&p, &q);
            echo.push("eps", eps);
            echo.push("order", ExtReal::from_f64(ord.value()));
            doc.push("input", Value::Obj(echo));
            Ok(doc)
        }
        Command::Bound {
            name,
            eps,
            alpha,
            beta,
        } => {
            let eps = resolve_f64(*eps, input, "eps")?;
            let alpha = resolve_order(alpha, input, "alpha")?;
            let needs_beta = matches!(name.as_str(), "mu" | "nu" | "mu-sub");
            let beta = if needs_beta {
                Some(resolve_order(beta, input, "beta")?)
            } else {
                None
            };
            let bv = match name.as_str() {
                "mu" => bounds::mu(eps, alpha, beta.unwrap())?,
                "nu" => bounds::nu(eps, alpha, beta.unwrap())?,
                "mu-sub" => bounds::mu_sub(eps, alpha, beta.unwrap())?,
                "mu-h" => bounds::mu_h(eps, alpha)?,
                "nu-h" => bounds::nu_h(eps, alpha)?,
                "kappa" => bounds::kappa(eps, alpha)?,
                other => return Err(RunError::Parse(format!("unknown bound `{other}`"))),
            };
            let mut doc = Document::new("bound");
            doc.push("bound", name.as_str());
            push_value(&mut doc, "value", bv.value, nats);
            doc.push("branch", bv.branch.as_str());
            let mut echo = Document::new_inner();
            echo.push("eps", eps);
            echo.push("alpha", ExtReal::from_f64(alpha.value()));
            if let Some(b) = beta {
                echo.push("beta", ExtReal::from_f64(b.value()));
            }
            doc.push("input", Value::Obj(echo));
            Ok(doc)
        }
        Command::Verify { seed, instances } => run_verify(*seed, *instances),
        Command::Sweep {
            config,
            out_dir,
            seed,
        } => run_sweep(config.as_deref(), out_dir, *seed),
        Command::Family {
            name,
            d,
            eps,
            alpha,
            beta,
            k,
            m,
            a,
            b,
            c,
            t,
            s,
            ell,
        } => {
            let need = |v: Option<f64>, key: &str| resolve_f64(v, input, key);
            let need_d = d
                .or_else(|| input.number("d").map(|x| x as usize))
                .ok_or_else(|| RunError::Parse("missing --d".into()));
            let mut doc = Document::new("family");
            doc.push("family", name.as_str());
            let mut echo = Document::new_inner();
            let vector = match name.as_str() {
                "mu-h" => {
                    let (d, eps) = (need_d?, need(*eps, "eps")?);
                    echo.push("d", d);
                    echo.push("eps", eps);
                    fam::mu_h_family(d, eps)?
                }
                "nu-h" => {
                    let (d, eps) = (need_d?, need(*eps, "eps")?);
                    let alpha = resolve_order(alpha, input, "alpha")?.value();
                    echo.push("d", d);
                    echo.push("eps", eps);
                    echo.push("alpha", alpha);
                    fam::nu_h_family(d, eps, alpha)?
                }
                "steepest-uniform" => {
                    let (d, eps) = (need_d?, need(*eps, "eps")?);
                    echo.push("d", d);
                    echo.push("eps", eps);
                    fam::steepest_uniform_family(d, eps)?
                }
                "entropy-gap" => {
                    let d = need_d?;
                    let alpha = resolve_order(alpha, input, "alpha")?.value();
                    let beta = resolve_order(beta, input, "beta")?.value();
                    echo.push("d", d);
                    echo.push("alpha", alpha);
                    echo.push("beta", beta);
                    fam::entropy_gap_family(d, alpha, beta)?
                }
                "three-block" => {
                    let (d, eps) = (need_d?, need(*eps, "eps")?);
                    let (k, m) = (
                        k.ok_or_else(|| RunError::Parse("missing --k".into()))?,
                        m.ok_or_else(|| RunError::Parse("missing --m".into()))?,
                    );
                    let (a, b, c) = (need(*a, "a")?, need(*b, "b")?, need(*c, "c")?);
                    echo.push("d", d);
                    echo.push("eps", eps);
                    echo.push("k", k);
                    echo.push("m", m);
                    echo.push("a", a);
                    echo.push("b", b);
                    echo.push("c", c);
                    fam::three_block_family(d, eps, k, m, a, b, c)?
                }
                "kyfan-max" => {
                    let (d, eps) = (need_d?, need(*eps, "eps")?);
                    let (t, s) = (need(*t, "t")?, need(*s, "s")?);
                    let ell = ell.ok_or_else(|| RunError::Parse("missing --ell".into()))?;
                    echo.push("d", d);
                    echo.push("eps", eps);
                    echo.push("t", t);
                    echo.push("s", s);
                    echo.push("ell", ell);
                    fam::ky_fan_slice_max(d, eps, t, s, ell)?
                }
                other => return Err(RunError::Parse(format!("unknown family `{other}`"))),
            };
            doc.push("vector", Value::floats(vector.as_slice()));
            doc.push("input", Value::Obj(echo));
            Ok(doc)
        }
    }
}

fn run_clip(
    p: ProbVec,
    q: ProbVec,
    eps: f64,
    steepest: bool,
    gamma: Option<f64>,
    max_denominator: u64,
) -> RunResult {
    let (sorted, perm) = sort_desc(&p);
    let unsort = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (pos, &orig) in perm.iter().enumerate() {
            out[orig] = v[pos];
        }
        out
    };
    let uniform_ref = q
        .as_slice()
        .iter()
        .all(|&x| (x - 1.0 / q.dim() as f64).abs() < 1e-15);

    let mut doc = Document::new("clip");
    let mut echo = input_echo(&p, &q);
    echo.push("eps", eps);

    if steepest {
        let s = smoothing::steepest(&sorted, eps)?;
        doc.push("steepest", Value::floats(&unsort(s.as_slice())));
    } else if let Some(gamma) = gamma {
        if uniform_ref {
            let (clip, params) = smoothing::clip_gamma(&sorted, eps, gamma)?;
            doc.push("clipped", Value::floats(&unsort(clip.as_slice())));
            doc.push("a", params.a);
            doc.push("b_gamma", params.b_gamma);
            doc.push("k", params.k);
            doc.push("m", params.m);
            doc.push("mass", clip.mass());
        } else {
            // reduce to a uniform reference via a rational approximation of
            // q, clip there, and collapse the blocks back
            let qref = crate::rational::approximate_reference(q.as_slice(), max_denominator)?;
            let clip = smoothing::clip_gamma_relative(&p, &qref, eps, gamma)?;
            doc.push("clipped", Value::floats(clip.as_slice()));
            doc.push("mass", clip.mass());
            doc.push(
                "reference_denominator",
                Value::Int(qref.denominator() as i64),
            );
        }
        echo.push("gamma", gamma);
        echo.push("max_denominator", Value::Int(max_denominator as i64));
    } else if uniform_ref {
        let (clip, params) = smoothing::flattest(&sorted, eps)?;
        doc.push("clipped", Value::floats(&unsort(clip.as_slice())));
        doc.push("a", params.a);
        doc.push("b", params.b);
        doc.push("k", params.k);
        doc.push("m", params.m);
    } else {
        let clip = smoothing::relative_flattest(&p, &q, eps)?;
        let ord = ratio_order(&p, &q)?;
        let (a, b) = smoothing::dmax_cutoffs(&ord, eps)?;
        doc.push("clipped", Value::floats(clip.as_slice()));
        doc.push("a", a);
        doc.push("b", b);
    }
    doc.push("input", Value::Obj(echo));
    Ok(doc)
}

fn run_verify(seed: u64, instances: usize) -> RunResult {
    let mut checks: Vec<(String, bool, String)> = Vec::new();

    // representative stability and the majorization sandwich
    {
        let mut pass = true;
        let mut detail = String::new();
        let mut done = 0usize;
        let mut idx = 0u64;
        while done < instances && idx < 50 * instances as u64 {
            let mut rng = sample::instance_rng(seed, idx);
            idx += 1;
            let d = 3 + (idx % 7) as usize;
            let p = sort_desc(&sample::dirichlet(&mut rng, d, 1.0)).0;
            let eps = 0.02 + 0.4 * rand::Rng::random::<f64>(&mut rng);
            let u = ProbVec::uniform(d);
            if eps >= divsmooth_core::prob::tv_distance(&p, &u).unwrap() - 1e-6 {
                continue;
            }
            done += 1;
            let (flat, base) = smoothing::flattest(&p, eps).unwrap();
            let lo = fam::representative_min(&p, eps).unwrap();
            let hi = fam::representative_max(&p, eps).unwrap();
            let (_, lo_params) = smoothing::flattest(&lo, eps).unwrap();
            let (hi_flat, _) = smoothing::flattest(&hi, eps).unwrap();
            let stable = lo_params.k == base.k
                && lo_params.m == base.m
                && (lo_params.a - base.a).abs() < 1e-12
                && (lo_params.b - base.b).abs() < 1e-12
                && hi_flat
                    .as_slice()
                    .iter()
                    .zip(flat.as_slice())
                    .all(|(x, y)| (x - y).abs() < 1e-12);
            let sandwich = majorization::majorizes(&p, &lo) && majorization::majorizes(&hi, &p);
            if !(stable && sandwich) {
                pass = false;
                detail = format!("failed at instance {idx}");
                break;
            }
        }
        checks.push(("representative_stability".into(), pass, detail));
    }

    // one-variable monotonicity scans
    checks.push((
        "monotonicity_scans".into(),
        oracle::monotonicity_scans(),
        String::new(),
    ));

    // endpoint property of the edge objective
    {
        let mut pass = true;
        for i in 0..100u64 {
            let mut rng = sample::instance_rng(seed ^ 0xE0E0, i);
            let cs: Vec<f64> = (0..4)
                .map(|_| 0.05 + 2.0 * rand::Rng::random::<f64>(&mut rng))
                .collect();
            if !oracle::edge_max_scan(cs[0], cs[1], cs[2], cs[3], 1.5, 3.0, 10_000)
                || !oracle::edge_max_scan(cs[0], cs[1], cs[2], cs[3], 0.3, 0.7, 10_000)
            {
                pass = false;
                break;
            }
        }
        checks.push(("edge_endpoint_scans".into(), pass, String::new()));
    }

    // hypothesis-testing closed form against the LP-vertex oracle
    {
        let mut worst = 0.0f64;
        for i in 0..instances as u64 {
            let mut rng = sample::instance_rng(seed ^ 0xD4, i);
            let d = 2 + (i % 7) as usize;
            let p = sample::dirichlet(&mut rng, d, sample::CONCENTRATIONS[i as usize % 3]);
            let q = sample::dirichlet(&mut rng, d, 1.0);
            let eps = 0.95 * rand::Rng::random::<f64>(&mut rng);
            let closed = hypothesis_testing(&p, &q, eps).unwrap().to_f64();
            let brute = oracle::dh_oracle(&p, &q, eps).unwrap();
            worst = worst.max((closed - brute).abs());
        }
        checks.push((
            "dh_oracle_agreement".into(),
            worst <= 1e-10,
            format!("max deviation {worst:.3e}"),
        ));
    }

    // relative-majorization criterion against the feasibility LP
    {
        let mut pass = true;
        for i in 0..(instances / 2).max(50) as u64 {
            let mut rng = sample::instance_rng(seed ^ 0x1F, i);
            let d = 2 + (i % 3) as usize;
            let dp = 2 + ((i / 3) % 3) as usize;
            let p1 = sample::dirichlet(&mut rng, d, 1.0);
            let q1 = sample::dirichlet(&mut rng, d, 1.0);
            let (p2, q2) = if i % 2 == 0 {
                let e = sample::stochastic(&mut rng, dp, d);
                (e.apply(&p1).unwrap(), e.apply(&q1).unwrap())
            } else {
                (
                    sample::dirichlet(&mut rng, dp, 1.0),
                    sample::dirichlet(&mut rng, dp, 1.0),
                )
            };
            let (fast, lp) = majorization::relmaj_agreement((&p1, &q1), (&p2, &q2)).unwrap();
            if fast != lp {
                pass = false;
                break;
            }
        }
        checks.push((
            "relative_majorization_lp_agreement".into(),
            pass,
            String::new(),
        ));
    }

    // closed-form smoothing against the grid+descent oracle (small cases)
    {
        let mut worst = 0.0f64;
        for i in 0..20u64 {
            let mut rng = sample::instance_rng(seed ^ 0x5A, i);
            let d = 2 + (i % 2) as usize;
            let p = sample::dirichlet(&mut rng, d, 1.0);
            let q = sample::dirichlet(&mut rng, d, 1.0);
            let eps = [0.05, 0.1, 0.3, 0.6][i as usize % 4];
            for ord in [0.5, 1.0, 2.0, f64::INFINITY] {
                let ord = RenyiOrder::new(ord).unwrap();
                let closed = smoothed_renyi(&p, &q, eps, ord).unwrap().to_f64();
                let div = divsmooth_core::divergence::Renyi(ord);
                let (brute, _) = oracle::smooth_oracle(&div, &p, &q, eps).unwrap();
                worst = worst.max((closed - brute).abs());
            }
        }
        checks.push((
            "smoothing_oracle_agreement".into(),
            worst <= 1e-4,
            format!("max deviation {worst:.3e}"),
        ));
    }

    let all = checks.iter().all(|(_, pass, _)| *pass);
    let mut doc = Document::new("verify");
    let mut arr = Vec::new();
    for (name, pass, detail) in checks {
        let mut c = Document::new_inner();
        c.push("name", name.as_str());
        c.push("pass", Value::Bool(pass));
        if !detail.is_empty() {
            c.push("detail", detail.as_str());
        }
        arr.push(Value::Obj(c));
    }
    doc.push("checks", Value::Arr(arr));
    doc.push("all_pass", Value::Bool(all));
    let mut echo = Document::new_inner();
    echo.push("seed", Value::Int(seed as i64));
    echo.push("instances", instances);
    doc.push("input", Value::Obj(echo));
    Ok(doc)
}

fn run_sweep(
    config: Option<&std::path::Path>,
    out_dir: &std::path::Path,
    seed: Option<u64>,
) -> RunResult {
    let mut cfg = match config {
        None => SweepConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
            SweepConfig::from_json(&text).map_err(RunError::Parse)?
        }
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let threads = std::env::var("DIVSMOOTH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let report = match threads {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Io(e.to_string()))?
            .install(|| sweep_bounds(&cfg)),
        _ => sweep_bounds(&cfg),
    };
    eprintln!("sweep completed in {} ms", report.wall_time.as_millis());

    std::fs::create_dir_all(out_dir).map_err(|e| RunError::Io(e.to_string()))?;
    let csv_path = out_dir.join("report.csv");
    std::fs::write(&csv_path, report.to_csv()).map_err(|e| RunError::Io(e.to_string()))?;

    let mut doc = Document::new("sweep");
    doc.push("max_violation", report.max_violation);
    doc.push("record_count", report.records.len());
    let mut records = Vec::with_capacity(report.records.len());
    for r in &report.records {
        let mut rec = Document::new_inner();
        rec.push("check", r.check);
        rec.push("d", r.d);
        rec.push("eps", r.eps);
        rec.push("alpha", ExtReal::from_f64(r.alpha));
        if !r.beta.is_nan() {
            rec.push("beta", ExtReal::from_f64(r.beta));
        }
        rec.push("lhs", r.lhs);
        rec.push("rhs", r.rhs);
        rec.push("margin", r.margin);
        records.push(Value::Obj(rec));
    }
    doc.push("records", Value::Arr(records));
    let mut gaps = Vec::new();
    for g in &report.gaps {
        let mut gd = Document::new_inner();
        gd.push("bound", g.bound);
        gd.push("d", g.d);
        gd.push("gap", g.gap);
        gaps.push(Value::Obj(gd));
    }
    doc.push("achievability_gaps", Value::Arr(gaps));
    let mut echo = Document::new_inner();
    echo.push("seed", Value::Int(cfg.seed as i64));
    echo.push("instances", cfg.instances);
    echo.push(
        "dims",
        Value::Arr(cfg.dims.iter().map(|&d| Value::Int(d as i64)).collect()),
    );
    echo.push("eps_grid", Value::floats(&cfg.eps_grid));
    echo.push(
        "alpha_grid",
        Value::Arr(
            cfg.alpha_grid
                .iter()
                .map(|&v| Value::Ext(ExtReal::from_f64(v)))
                .collect(),
        ),
    );
    echo.push(
        "beta_grid",
        Value::Arr(
            cfg.beta_grid
                .iter()
                .map(|&v| Value::Ext(ExtReal::from_f64(v)))
                .collect(),
        ),
    );
    echo.push("oracle_tol", cfg.oracle_tol);
    echo.push("slack", cfg.slack);
    doc.push("input", Value::Obj(echo));

    let json_path = out_dir.join("summary.json");
    std::fs::write(&json_path, doc.to_json()).map_err(|e| RunError::Io(e.to_string()))?;
    Ok(doc)
}
