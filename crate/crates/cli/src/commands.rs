use convex_magnitude::arith::{parse_rational, to_f64};
use convex_magnitude::bounds::{bound_report, SamplingOptions};
use convex_magnitude::embedding::{convergence_table, distortion_ratio, distortion_ratio_sampled, lemma_bounds, ConvergenceRow};
use convex_magnitude::magnitude::magnitude_function;
use convex_magnitude::schroeder::{ball_magnitude_function, derivative_at_zero};
use convex_magnitude::{ConvexBodySpec, Error, FiniteMetricSpace, RandomStream};
use serde::Serialize;
use num_bigint::BigInt;
use serde_json::value::RawValue;
use serde_json::{json, Value};

use crate::{CliError, Format};

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Big integers as JSON numbers, digit for digit.
fn big_number(x: &BigInt) -> Box<RawValue> {
    RawValue::from_string(x.to_string()).expect("integer literal is valid JSON")
}

#[derive(Serialize)]
struct BallExactJson {
    d: u32,
    factorial: Box<RawValue>,
    num: Vec<Box<RawValue>>,
    den: Vec<Box<RawValue>>,
    derivative_at_zero: String,
    evaluations: Vec<Value>,
    grid: Vec<Value>,
}

#[derive(Serialize)]
struct EvalRow {
    t: String,
    value: String,
}

pub fn ball_exact(d: u32, evals: &[String], grid: Option<&[f64]>, format: Format) -> Result<String, CliError> {
    let ball = ball_magnitude_function(d)?;
    let mut rows = Vec::new();
    let mut exact = Vec::new();
    for s in evals {
        let t = parse_rational(s)?;
        let v = ball.eval(&t)?;
        rows.push(EvalRow { t: t.to_string(), value: v.to_string() });
        exact.push(json!({ "t": t.to_string(), "value": v.to_string(), "approx": to_f64(&v) }));
    }
    let mut floats = Vec::new();
    for &t in grid.unwrap_or_default() {
        let v = ball.eval_f64(t)?;
        rows.push(EvalRow { t: t.to_string(), value: v.to_string() });
        floats.push(json!({ "t": t, "value": v }));
    }
    match format {
        Format::Csv => to_csv(&rows),
        Format::Json => {
            let ints = |xs: Vec<BigInt>| xs.iter().map(big_number).collect();
            let out = BallExactJson {
                d,
                factorial: big_number(&ball.factorial()),
                num: ints(ball.numerator_integers()),
                den: ints(ball.denominator_integers()),
                derivative_at_zero: derivative_at_zero(&ball).to_string(),
                evaluations: exact,
                grid: floats,
            };
            to_json(&out)
        }
    }
}

#[derive(Serialize)]
struct MagRow {
    t: f64,
    magnitude: f64,
    condition: f64,
    positive_definite: bool,
    warnings: String,
}

pub fn finite_mag(space: &FiniteMetricSpace, ts: &[f64], format: Format) -> Result<String, CliError> {
    let samples = magnitude_function(space, ts)?;
    match format {
        Format::Json => to_json(&samples),
        Format::Csv => {
            let rows: Vec<MagRow> = samples
                .samples
                .iter()
                .map(|s| MagRow {
                    t: s.t,
                    magnitude: s.magnitude,
                    condition: s.condition,
                    positive_definite: s.positive_definite,
                    warnings: s
                        .warnings
                        .iter()
                        .map(|w| serde_json::to_value(w).ok().and_then(|v| v["kind"].as_str().map(str::to_owned)).unwrap_or_default())
                        .collect::<Vec<_>>()
                        .join(";"),
                })
                .collect();
            to_csv(&rows)
        }
    }
}

#[derive(Serialize)]
struct BoundCsvRow {
    t: f64,
    lower: f64,
    upper: f64,
    conjecture_ref: f64,
    flags: String,
}

pub fn bound_check(
    body: &ConvexBodySpec,
    ts: &[f64],
    seed: u64,
    samples: usize,
    cap_points: usize,
    format: Format,
) -> Result<(String, usize), CliError> {
    let opts = SamplingOptions { cap_points, ..Default::default() };
    let report = bound_report(body, ts, samples, &opts, &RandomStream::from_seed(seed))?;
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let rows: Vec<BoundCsvRow> = report
                .rows
                .iter()
                .map(|r| BoundCsvRow {
                    t: r.t,
                    lower: r.lower,
                    upper: r.upper,
                    conjecture_ref: r.conjecture_ref,
                    flags: r.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(";"),
                })
                .collect();
            to_csv(&rows)?
        }
    };
    Ok((text, report.violations()))
}

pub struct EmbedConfig {
    pub y: Vec<f64>,
    pub ns: Vec<usize>,
    pub body: Option<ConvexBodySpec>,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub statistical: bool,
}

#[derive(Serialize)]
struct DistortionRow {
    n: usize,
    ratio: f64,
    stderr: f64,
    exhaustive: bool,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct EmbedCsvRow {
    n: usize,
    estimate: Option<f64>,
    stderr: Option<f64>,
    target: Option<f64>,
    target_stderr: Option<f64>,
    distortion: Option<f64>,
    distortion_stderr: Option<f64>,
    lower: f64,
    upper: f64,
}

pub fn embed_sim(cfg: &EmbedConfig, format: Format) -> Result<String, CliError> {
    if cfg.ns.is_empty() {
        return Err(CliError::Usage("--n needs at least one value".into()));
    }
    let rng = RandomStream::from_seed(cfg.seed);
    let distortion = cfg
        .ns
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let (lower, upper) = lemma_bounds(n);
            let (ratio, stderr) = if cfg.statistical {
                distortion_ratio_sampled(&cfg.y, n, cfg.samples, &rng.substream(1000 + i as u64))?
            } else {
                match distortion_ratio(&cfg.y, n) {
                    Ok(r) => (r, 0.0),
                    // With a body the convergence table is the main output;
                    // distortion is reported only where it can be enumerated.
                    Err(Error::ResourceLimit(_)) if cfg.body.is_some() => return Ok(None),
                    Err(e) => return Err(e.into()),
                }
            };
            Ok(Some(DistortionRow { n, ratio, stderr, exhaustive: !cfg.statistical, lower, upper }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let convergence: Option<Vec<ConvergenceRow>> = cfg
        .body
        .as_ref()
        .map(|b| convergence_table(b, cfg.k, &cfg.ns, cfg.samples, &rng))
        .transpose()?;
    match format {
        Format::Json => to_json(&json!({
            "point": cfg.y,
            "k": cfg.k,
            "distortion": distortion.iter().flatten().collect::<Vec<_>>(),
            "convergence": convergence,
        })),
        Format::Csv => {
            let rows: Vec<EmbedCsvRow> = distortion
                .iter()
                .zip(&cfg.ns)
                .enumerate()
                .map(|(i, (d, &n))| {
                    let c = convergence.as_ref().map(|rows| &rows[i]);
                    let (lower, upper) = lemma_bounds(n);
                    EmbedCsvRow {
                        n,
                        estimate: c.map(|c| c.estimate),
                        stderr: c.map(|c| c.stderr),
                        target: c.map(|c| c.target),
                        target_stderr: c.map(|c| c.target_stderr),
                        distortion: d.as_ref().map(|d| d.ratio),
                        distortion_stderr: d.as_ref().map(|d| d.stderr),
                        lower,
                        upper,
                    }
                })
                .collect();
            to_csv(&rows)
        }
    }
}
