//! Command-line front end: argument grammar, configuration, report emission
//! and exit codes.
//!
//! Exit codes: 0 success, 1 a verification found a violation, 2 malformed
//! input, 3 inconclusive (quadrature or search limits reached).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{random_model_bound, volume_bound, DelocInput, RandomModelInput, DEFAULT_TEMPERED_DELTA};
use crate::error::{Error, Result};
use crate::fuchsian::{
    builtin_group, enumerate_ball, params_from_hints, params_from_tanglefree, verify_counting_bound, C0Rule,
    EnumerateOptions, GeometryParams, GroupPresentation, SearchMode,
};
use crate::geometry::Point;
use crate::multipliers::{evaluate_row, spectral_parameter, BallMultiplierSpec, Family, WaveMultiplierSpec};
use crate::quadrature::{QuadConfig, Table};
use crate::selberg::{inverse_selberg, selberg_transform, InverseOptions, RadialKernel, SpectralFunction};
use crate::verify::{overall_status, run_all, CheckStatus, VerifyConfig};

pub const SCHEMA_VERSION: u32 = 1;
pub const CONFIG_ENV: &str = "HYPDELOC_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Settings read from `--config` or `$HYPDELOC_CONFIG`; command-line flags win.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Points per axis of the inequality grids.
    pub grid_points: usize,
    pub frontier_cap: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        let q = QuadConfig::default();
        Config {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            grid_points: 200,
            frontier_cap: EnumerateOptions::default().frontier_cap,
            out: None,
            format: Format::Json,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if self.grid_points == 0 {
            return Err(Error::invalid("grid_points", "must be positive"));
        }
        if self.frontier_cap < 1000 {
            return Err(Error::invalid("frontier_cap", "must be at least 1000"));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: Config = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            ..QuadConfig::default()
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hypdeloc",
    version,
    about = "Delocalisation bounds for Laplace eigenfunctions on hyperbolic surfaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration file (falls back to $HYPDELOC_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving report files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized sample points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit the generation timestamp from reports.
    #[arg(long, global = true)]
    pub no_timestamps: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List group elements γ with d(z, γw) <= radius.
    Enumerate(EnumerateArgs),
    /// Check orbit counts against Cx C₀(δ) e^{δr}.
    CountVerify(CountVerifyArgs),
    /// Tabulate Selberg transforms of radial kernels.
    Selberg(SelbergArgs),
    /// Tabulate spectral multipliers against their lower bounds.
    Multiplier(MultiplierArgs),
    /// Lower bound on the volume of a set carrying ε of the L² mass.
    Bound(BoundArgs),
    /// Volume bound under random-surface parameter assignments.
    RandomBound(RandomBoundArgs),
    /// Grid certification of the supporting inequalities.
    VerifyLemmas(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Group file path or builtin name (cyclic, pingpong, bolza).
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "0,1")]
    pub z: Point,
    #[arg(long, default_value = "0,1")]
    pub w: Point,
    #[arg(long)]
    pub radius: f64,
    /// Brute-force search over all words up to this length.
    #[arg(long)]
    pub brute: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub injrad: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CountVerifyArgs {
    #[arg(long)]
    pub group: String,
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.5, 1.0])]
    pub delta: Vec<f64>,
    /// Number of radii, equally spaced on (0, R].
    #[arg(long, default_value_t = 20)]
    pub radii: usize,
    /// Random base-point pairs in addition to (i, i).
    #[arg(long, default_value_t = 3)]
    pub pairs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Ball,
    NormalizedBall,
    Wave,
    CustomTable,
}

#[derive(Debug, Args)]
pub struct SelbergArgs {
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    /// Ball radius or wave time.
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.04)]
    pub sigma: f64,
    /// JSON table {start, step, values} of k(ρ) for custom-table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub s_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 51)]
    pub s_points: usize,
    /// Invert the transform and transform back, reporting the error.
    #[arg(long)]
    pub round_trip: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Wave,
    Ball,
}

#[derive(Debug, Args)]
pub struct MultiplierArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    /// Target eigenvalue (wave family).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long = "N", default_value_t = 8)]
    pub n: u32,
    /// Ball radius (ball family).
    #[arg(long, default_value_t = 4.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.04)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 101)]
    pub mu_points: usize,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long = "Cx")]
    pub cx: Option<f64>,
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Spectral gap of the surface, required for λ < 1/4.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RandomBoundArgs {
    #[arg(long)]
    pub genus: u64,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub multiplier_samples: usize,
    #[arg(long)]
    pub skip_selberg: bool,
    #[arg(long)]
    pub skip_counting: bool,
}

/// A finished command: the report body, an optional flat table and its status.
pub struct Outcome {
    pub command: &'static str,
    pub report: Value,
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
    pub exit: i32,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::QuadratureNonConvergence { .. } | Error::FrontierOverflow { .. } | Error::NoNonIdentityFound { .. } => {
            EXIT_INCONCLUSIVE
        }
        _ => EXIT_INPUT,
    }
}

fn resolve_group(spec: &str) -> Result<GroupPresentation> {
    let path = Path::new(spec);
    if path.is_file() {
        return GroupPresentation::load(path);
    }
    builtin_group(spec).ok_or_else(|| Error::invalid("group", format!("{spec} is neither a file nor a builtin group")))
}

fn surface_params(surface: &SurfaceArgs, group: Option<&GroupPresentation>) -> Result<GeometryParams> {
    match (surface.l, surface.injrad, group) {
        (Some(l), Some(injrad), _) => params_from_tanglefree(l, injrad, DEFAULT_TEMPERED_DELTA),
        (None, None, Some(g)) => params_from_hints(g, DEFAULT_TEMPERED_DELTA),
        (Some(_), None, _) => Err(Error::invalid("injrad", "required together with --L")),
        (None, Some(_), _) => Err(Error::invalid("L", "required together with --injrad")),
        (None, None, None) => Err(Error::invalid("R", "give --R and --Cx, or --L and --injrad")),
    }
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn cmd_enumerate(args: &EnumerateArgs, cfg: &Config) -> Result<Outcome> {
    let group = resolve_group(&args.group)?;
    let mode = match args.brute {
        Some(n) => SearchMode::Brute { max_word_len: n },
        None => SearchMode::Pruned,
    };
    let opts = EnumerateOptions {
        mode,
        frontier_cap: cfg.frontier_cap,
    };
    let elems = enumerate_ball(&group, args.z, args.w, args.radius, &opts)?;
    let rows: Vec<Vec<String>> = elems
        .iter()
        .map(|e| {
            let m = e.element.matrix;
            vec![
                group.format_word(&e.element.word),
                f(e.distance),
                f(m.a),
                f(m.b),
                f(m.c),
                f(m.d),
            ]
        })
        .collect();
    let elements: Vec<Value> = elems
        .iter()
        .map(|e| {
            let m = e.element.matrix;
            json!({
                "word": group.format_word(&e.element.word),
                "distance": e.distance,
                "matrix": [m.a, m.b, m.c, m.d],
            })
        })
        .collect();
    Ok(Outcome {
        command: "enumerate",
        report: json!({
            "group": group.name,
            "z": args.z,
            "w": args.w,
            "radius": args.radius,
            "count": elems.len(),
            "elements": elements,
        }),
        table: Some((
            ["word", "distance", "a", "b", "c", "d"].map(String::from).to_vec(),
            rows,
        )),
        exit: EXIT_OK,
    })
}

fn random_point(rng: &mut ChaCha8Rng) -> Result<Point> {
    Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.6))
}

fn cmd_count_verify(args: &CountVerifyArgs, cfg: &Config, seed: u64) -> Result<Outcome> {
    let group = resolve_group(&args.group)?;
    let params = surface_params(&args.surface, Some(&group))?;
    if args.radii == 0 {
        return Err(Error::invalid("radii", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = vec![(Point::I, Point::I)];
    for _ in 0..args.pairs {
        pairs.push((random_point(&mut rng)?, random_point(&mut rng)?));
    }
    let radii: Vec<f64> = (1..=args.radii)
        .map(|k| params.r * k as f64 / args.radii as f64)
        .collect();
    let opts = EnumerateOptions {
        frontier_cap: cfg.frontier_cap,
        ..EnumerateOptions::default()
    };
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for &delta in &args.delta {
        let rep = verify_counting_bound(&group, &params, &pairs, &radii, delta, &opts)?;
        for e in &rep.entries {
            rows.push(vec![
                f(delta),
                format!("{},{}", e.z.x, e.z.y),
                format!("{},{}", e.w.x, e.w.y),
                f(e.radius),
                e.count.to_string(),
                f(e.bound),
                e.pass.to_string(),
            ]);
        }
        reports.push(rep);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome {
        command: "count-verify",
        report: json!({ "group": group.name, "params": params, "pass": pass, "reports": reports }),
        table: Some((
            ["delta", "z", "w", "radius", "count", "bound", "pass"]
                .map(String::from)
                .to_vec(),
            rows,
        )),
        exit: if pass { EXIT_OK } else { EXIT_VIOLATION },
    })
}

fn s_grid(lo: f64, hi: f64, n: usize, field: &str) -> Result<Vec<f64>> {
    if n == 0 || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(field, "need a finite range with at least one point"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn cmd_selberg(args: &SelbergArgs, cfg: &Config) -> Result<Outcome> {
    let quad = cfg.quad();
    let h: SpectralFunction = match args.kernel {
        KernelKind::Ball => selberg_transform(&RadialKernel::ball(args.t)?, &quad),
        KernelKind::NormalizedBall => selberg_transform(&RadialKernel::normalized_ball(args.t, args.sigma)?, &quad),
        KernelKind::Wave => {
            if !(args.t > 0.0) {
                return Err(Error::invalid("t", "must be positive"));
            }
            SpectralFunction::wave(args.t)
        }
        KernelKind::CustomTable => {
            let path = args
                .table
                .as_ref()
                .ok_or_else(|| Error::invalid("table", "required for custom-table"))?;
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            let table: Table = serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.display().to_string(),
                source,
            })?;
            selberg_transform(&RadialKernel::from_table(path.display().to_string(), table)?, &quad)
        }
    };
    let grid = s_grid(args.s_min, args.s_max, args.s_points, "s_points")?;
    let values = h.sample(&grid)?;
    let back = if args.round_trip {
        let k = inverse_selberg(
            &h,
            &InverseOptions {
                quad,
                ..Default::default()
            },
        )?;
        Some(selberg_transform(&k, &quad).sample(&grid)?)
    } else {
        None
    };
    let mut header: Vec<String> = ["s", "h"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut max_err = 0.0f64;
    for (i, &(s, v)) in values.iter().enumerate() {
        let mut row = vec![f(s), f(v)];
        if let Some(b) = &back {
            let err = (b[i].1 - v).abs();
            max_err = max_err.max(err);
            row.push(f(b[i].1));
            row.push(f(err));
        }
        rows.push(row);
    }
    if back.is_some() {
        header.push("h_round_trip".into());
        header.push("abs_error".into());
    }
    let mut report = json!({
        "kernel": h.name,
        "t": args.t,
        "samples": values.iter().map(|&(s, v)| json!({"s": s, "h": v})).collect::<Vec<_>>(),
    });
    if let Some(b) = &back {
        report["round_trip"] = json!(b.iter().map(|&(s, v)| json!({"s": s, "h": v})).collect::<Vec<_>>());
        report["round_trip_max_error"] = json!(max_err);
    }
    Ok(Outcome {
        command: "selberg",
        report,
        table: Some((header, rows)),
        exit: EXIT_OK,
    })
}

fn cmd_multiplier(args: &MultiplierArgs, cfg: &Config) -> Result<Outcome> {
    let family = match args.family {
        FamilyKind::Wave => Family::Wave(WaveMultiplierSpec::new(
            spectral_parameter(args.lambda)?,
            args.r,
            args.n,
        )?),
        FamilyKind::Ball => Family::Ball(BallMultiplierSpec::new(args.t, args.sigma)?),
    };
    let mus = s_grid(args.mu_min, args.mu_max, args.mu_points, "mu_points")?;
    if args.mu_min < 0.0 {
        return Err(Error::invalid("mu_min", "eigenvalues are nonnegative"));
    }
    let quad = cfg.quad();
    let rows: Vec<_> = mus
        .iter()
        .map(|&mu| evaluate_row(&family, &spectral_parameter(mu)?, &quad))
        .collect::<Result<_>>()?;
    let pass = rows.iter().all(|r| r.pass);
    let table = rows
        .iter()
        .map(|r| {
            vec![
                f(r.mu),
                f(r.value),
                r.lower_bound.map(f).unwrap_or_default(),
                r.pass.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        command: "multiplier",
        report: json!({ "family": family, "pass": pass, "rows": rows }),
        table: Some((["mu", "value", "lower_bound", "pass"].map(String::from).to_vec(), table)),
        exit: if pass { EXIT_OK } else { EXIT_VIOLATION },
    })
}

fn cmd_bound(args: &BoundArgs) -> Result<Outcome> {
    let params = match (args.r, args.cx) {
        (Some(r), Some(cx)) => {
            if args.surface.l.is_some() || args.surface.injrad.is_some() {
                return Err(Error::invalid("R", "give either --R/--Cx or --L/--injrad, not both"));
            }
            if !(cx >= 1.0) {
                return Err(Error::invalid("Cx", "must be at least 1"));
            }
            GeometryParams {
                r,
                cx,
                injrad: 1.0 / cx,
                l: 4.0 * r,
                c0: C0Rule::TangleFree,
                default_delta: DEFAULT_TEMPERED_DELTA,
            }
        }
        (Some(_), None) => return Err(Error::invalid("Cx", "required together with --R")),
        (None, Some(_)) => return Err(Error::invalid("R", "required together with --Cx")),
        (None, None) => surface_params(&args.surface, None)?,
    };
    let input = DelocInput {
        eps: args.eps,
        lam: args.lambda,
        sigma: args.sigma,
        params,
        delta: args.delta,
    };
    let rep = volume_bound(&input)?;
    let row = vec![
        f(rep.eps),
        f(rep.lam),
        f(rep.radius),
        f(rep.cx),
        f(rep.delta),
        rep.n.map(|n| n.to_string()).unwrap_or_default(),
        rep.r.map(|n| n.to_string()).unwrap_or_default(),
        rep.d_lam.map(f).unwrap_or_default(),
        f(rep.formula_value),
        rep.lower_bound.map(f).unwrap_or_default(),
        rep.valid.to_string(),
    ];
    Ok(Outcome {
        command: "bound",
        report: serde_json::to_value(&rep).expect("bound report serializes"),
        table: Some((
            [
                "eps",
                "lambda",
                "R",
                "Cx",
                "delta",
                "N",
                "r",
                "d_lam",
                "formula_value",
                "lower_bound",
                "valid",
            ]
            .map(String::from)
            .to_vec(),
            vec![row],
        )),
        exit: EXIT_OK,
    })
}

fn cmd_random_bound(args: &RandomBoundArgs) -> Result<Outcome> {
    let input = RandomModelInput {
        genus: args.genus,
        c: args.c,
        a: args.a,
        eps: args.eps,
        lam: args.lambda,
        sigma: args.sigma,
    };
    let rep = random_model_bound(&input)?;
    let row = vec![
        rep.genus.to_string(),
        f(rep.c),
        f(rep.a),
        f(rep.exponent),
        f(rep.constant),
        f(rep.bound),
        f(rep.radius),
        f(rep.cx),
        rep.deterministic_hypotheses_hold.to_string(),
    ];
    Ok(Outcome {
        command: "random-bound",
        report: serde_json::to_value(&rep).expect("random model report serializes"),
        table: Some((
            [
                "genus",
                "c",
                "a",
                "exponent",
                "constant",
                "bound",
                "R",
                "Cx",
                "deterministic_hypotheses_hold",
            ]
            .map(String::from)
            .to_vec(),
            vec![row],
        )),
        exit: EXIT_OK,
    })
}

fn cmd_verify(args: &VerifyArgs, cfg: &Config, seed: u64) -> Result<Outcome> {
    let defaults = VerifyConfig::default();
    let vc = VerifyConfig {
        sigmas: args.sigma.clone().unwrap_or(defaults.sigmas),
        grid_points: args.grid_points.unwrap_or(cfg.grid_points),
        quad: cfg.quad(),
        seed,
        multiplier_samples: args.multiplier_samples,
        untempered_samples: defaults.untempered_samples,
        include_selberg: !args.skip_selberg,
        include_counting: !args.skip_counting,
    };
    let checks = run_all(&vc)?;
    let status = overall_status(&checks);
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.check.clone(),
                c.grid_points.to_string(),
                f(c.min_slack),
                c.inconclusive_points.to_string(),
                serde_json::to_value(c.status)
                    .expect("status serializes")
                    .as_str()
                    .unwrap_or("")
                    .to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        command: "verify-lemmas",
        report: json!({ "config": vc, "status": status, "checks": checks }),
        table: Some((
            ["check", "grid_points", "min_slack", "inconclusive_points", "status"]
                .map(String::from)
                .to_vec(),
            rows,
        )),
        exit: match status {
            CheckStatus::Pass => EXIT_OK,
            CheckStatus::Fail => EXIT_VIOLATION,
            CheckStatus::Inconclusive => EXIT_INCONCLUSIVE,
        },
    })
}

fn envelope(outcome: &Outcome, global: &GlobalArgs, threads: usize) -> Value {
    let mut env = json!({
        "schema_version": SCHEMA_VERSION,
        "command": outcome.command,
        "seed": global.seed,
        "threads": threads,
        "exit_code": outcome.exit,
        "report": outcome.report,
    });
    if !global.no_timestamps {
        env["generated_at"] = json!(chrono::Utc::now().to_rfc3339());
    }
    env
}

fn render_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::invalid("csv", e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid("csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(outcome: &Outcome, global: &GlobalArgs, cfg: &Config, threads: usize) -> Result<()> {
    let format = global.format.unwrap_or(cfg.format);
    let json_text =
        serde_json::to_string_pretty(&envelope(outcome, global, threads)).expect("report serializes") + "\n";
    let csv_text = match (&outcome.table, format) {
        (Some((h, rows)), Format::Csv | Format::Both) => Some(render_csv(h, rows)?),
        _ => None,
    };
    match global.out.as_ref().or(cfg.out.as_ref()) {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.display().to_string(),
                source,
            })?;
            if format != Format::Csv {
                write_file(&dir.join(format!("{}.json", outcome.command)), &json_text)?;
            }
            if let Some(c) = &csv_text {
                write_file(&dir.join(format!("{}.csv", outcome.command)), c)?;
            }
        }
        None => {
            if format != Format::Csv {
                print!("{json_text}");
            }
            if let Some(c) = &csv_text {
                print!("{c}");
            }
        }
    }
    Ok(())
}

fn load_config(path: Option<&PathBuf>) -> Result<Config> {
    let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    match path.or(env_path.as_ref()) {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn dispatch(cli: &Cli, cfg: &Config) -> Result<Outcome> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, cfg),
        Command::CountVerify(a) => cmd_count_verify(a, cfg, seed),
        Command::Selberg(a) => cmd_selberg(a, cfg),
        Command::Multiplier(a) => cmd_multiplier(a, cfg),
        Command::Bound(a) => cmd_bound(a),
        Command::RandomBound(a) => cmd_random_bound(a),
        Command::VerifyLemmas(a) => cmd_verify(a, cfg, seed),
    }
}

fn run_parsed(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli.global.config.as_ref())?;
    let threads = cli.global.threads.unwrap_or_else(rayon::current_num_threads);
    if threads == 0 {
        return Err(Error::invalid("threads", "must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    let outcome = pool.install(|| dispatch(cli, &cfg))?;
    emit(&outcome, &cli.global, &cfg, threads)?;
    Ok(outcome.exit)
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to stderr as a single line.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: invalid arguments");
            eprintln!("hypdeloc: {}", line.trim_start_matches("error: "));
            return EXIT_INPUT;
        }
    };
    match run_parsed(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hypdeloc: {}", e.to_string().replace('\n', " "));
            exit_code(&e)
        }
    }
}
