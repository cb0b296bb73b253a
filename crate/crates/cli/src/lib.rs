//! Command-line front end for `weylscope`.
//!
//! Every subcommand reads a tuple file (or `builtin:<name>`), writes its data
//! to `<out>/<stem>.<command>.*` and a `<stem>.<command>.manifest.json`
//! describing the run. Data files carry the manifest hash in their first
//! line. Diagnostics go to standard error.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
//! 3 refused precondition (for example a tuple that is not hyperbolic).

pub mod output;
pub mod tuple_file;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use weylscope::cauchy::{singular_scan, JumpSchedule, ScanGrid};
use weylscope::kippenhahn::{boundary_curve, lacuna_detect, wave_front, WaveFrontShape};
use weylscope::linalg::c64;
use weylscope::numrange::sample_range;
use weylscope::pencil::{hyperbolicity_check, DEFAULT_DIRECTIONS};
use weylscope::weyl::{weyl_apply, Gaussian, GridFunction};

use output::{flush, num, sha256_hex, OutputSet, RunManifest};
use tuple_file::{load_tuple, LoadedTuple};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] weylscope::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Core(e) if e.is_refusal() => 3,
            CliError::Core(
                weylscope::Error::DimensionMismatch(_) | weylscope::Error::InvalidInput(_),
            ) => 1,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "weylscope",
    version,
    about = "Weyl calculus, Cauchy kernels and numerical ranges of matrix tuples"
)]
pub struct Cli {
    /// Worker threads; falls back to WEYLSCOPE_THREADS, then the core count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, short = 'o', global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether <A, xi> has real spectrum for all directions xi.
    CheckHyperbolic {
        tuple: String,
        #[arg(long, default_value_t = DEFAULT_DIRECTIONS)]
        dirs: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sample the numerical-range measure (<A_1 h, h>, ..., <A_n h, h>).
    Numrange {
        tuple: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Kippenhahn boundary curve of a hermitian pair.
    Kippenhahn {
        tuple: String,
        #[arg(long, default_value_t = 720)]
        theta_count: usize,
    },
    /// Evaluate <W_A, f> for a grid file or builtin:gauss(c_1,...,c_n,width).
    WeylApply {
        tuple: String,
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Classify the jump of the Cauchy kernel over a grid `lo:hi:count x ...`.
    CauchyScan {
        tuple: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps_list: Option<Vec<f64>>,
    },
    /// Wave front of a hermitian pair.
    Wavefront {
        tuple: String,
        #[arg(long, default_value_t = 720)]
        theta_count: usize,
    },
    /// Lacunas of a hermitian pair inside its numerical range.
    Lacuna {
        tuple: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps_list: Option<Vec<f64>>,
        /// Smaller vanishing components are discarded.
        #[arg(long, default_value_t = 4)]
        min_cells: usize,
    },
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("'{}' is not a number", t.trim())))
        })
        .collect()
}

fn thread_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("WEYLSCOPE_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("WEYLSCOPE_THREADS='{v}' is not a thread count"))),
        _ => Ok(0),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let threads = thread_count(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    pool.install(|| dispatch(cli, threads))
}

struct Ctx<'a> {
    out: &'a Path,
    threads: usize,
    start: Instant,
}

impl Ctx<'_> {
    fn outputs(
        &self,
        command: &str,
        t: &LoadedTuple,
        params: Value,
        seeds: Vec<u64>,
    ) -> Result<OutputSet, CliError> {
        for w in &t.warnings {
            eprintln!("warning: {w}");
        }
        let mut m = RunManifest::new(command, params, seeds, &t.source_bytes, self.threads);
        m.warnings.extend(t.warnings.iter().cloned());
        OutputSet::new(self.out, &t.stem, m)
    }

    fn finish(&self, o: OutputSet) -> Result<(), CliError> {
        for w in &o.manifest.warnings {
            if !w.is_empty() {
                eprintln!("warning: {w}");
            }
        }
        let path = o.finish(self.start.elapsed().as_secs_f64())?;
        eprintln!("manifest: {}", path.display());
        Ok(())
    }
}

fn schedule(eps: &Option<Vec<f64>>) -> JumpSchedule {
    match eps {
        Some(e) => JumpSchedule::with_eps(e.clone()),
        None => JumpSchedule::default(),
    }
}

fn dispatch(cli: &Cli, threads: usize) -> Result<(), CliError> {
    let ctx = Ctx {
        out: &cli.out,
        threads,
        start: Instant::now(),
    };
    match &cli.command {
        Command::CheckHyperbolic { tuple, dirs, tol } => check_hyperbolic(&ctx, tuple, *dirs, *tol),
        Command::Numrange {
            tuple,
            samples,
            seed,
        } => numrange(&ctx, tuple, *samples, *seed),
        Command::Kippenhahn { tuple, theta_count } => kippenhahn(&ctx, tuple, *theta_count),
        Command::WeylApply {
            tuple,
            function,
            cutoff,
        } => weyl(&ctx, tuple, function, *cutoff),
        Command::CauchyScan {
            tuple,
            grid,
            eps_list,
        } => cauchy_scan(&ctx, tuple, grid, eps_list),
        Command::Wavefront { tuple, theta_count } => wavefront(&ctx, tuple, *theta_count),
        Command::Lacuna {
            tuple,
            grid,
            eps_list,
            min_cells,
        } => lacuna(&ctx, tuple, grid, eps_list, *min_cells),
    }
}

fn check_hyperbolic(ctx: &Ctx, source: &str, dirs: usize, tol: f64) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let params = json!({ "tuple": source, "dirs": dirs, "tol": tol });
    let mut o = ctx.outputs("check-hyperbolic", &t, params, vec![])?;
    let report = hyperbolicity_check(&t.tuple, dirs, tol);
    let mismatches = t.file.property_mismatches(&t.tuple, Some(&report));
    o.manifest
        .warnings
        .extend(mismatches.into_iter().filter(|m| !t.warnings.contains(m)));
    let verdict = serde_json::to_value(report.verdict).expect("verdict serializes");
    o.json(
        ".json",
        json!({
            "verdict": verdict,
            "hermitian": t.tuple.is_hermitian(),
            "max_imag": report.max_imag,
            "worst_direction": report.worst_direction,
            "directions_checked": report.directions_checked,
        }),
    )?;
    o.manifest.results = json!({ "verdict": verdict });
    eprintln!("verdict: {}", verdict.as_str().unwrap_or("?"));
    ctx.finish(o)
}

fn numrange(ctx: &Ctx, source: &str, samples: usize, seed: u64) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let params = json!({ "tuple": source, "samples": samples });
    let mut o = ctx.outputs("numrange", &t, params, vec![seed])?;
    let m = sample_range(&t.tuple, samples, seed)?;
    let n = m.n;
    let mut w = o.csv(".csv", &[format!("seed {seed}"), format!("M {samples}")])?;
    let mut header: Vec<String> = (1..=n).map(|j| format!("x_{j}")).collect();
    if m.imag.is_some() {
        header.extend((1..=n).map(|j| format!("y_{j}")));
    }
    write_row(&mut w, &header)?;
    for k in 0..m.len() {
        let mut row: Vec<String> = m.point(k).iter().map(|v| num(*v)).collect();
        if let Some(im) = &m.imag {
            row.extend(im[k * n..(k + 1) * n].iter().map(|v| num(*v)));
        }
        write_row(&mut w, &row)?;
    }
    flush(w)?;
    let (mean, stderr) = m.mean_and_stderr();
    o.manifest.results = json!({ "mean": mean, "stderr": stderr });
    ctx.finish(o)
}

fn kippenhahn(ctx: &Ctx, source: &str, theta_count: usize) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let params = json!({ "tuple": source, "theta_count": theta_count });
    let mut o = ctx.outputs("kippenhahn", &t, params, vec![])?;
    let curve = boundary_curve(&t.tuple, theta_count)?;
    let mut w = o.csv(".csv", &[])?;
    write_row(
        &mut w,
        &[
            "theta",
            "branch",
            "x1",
            "x2",
            "tangent_c",
            "tangent_d",
            "tangent_mu",
            "flag",
        ],
    )?;
    for s in &curve.samples {
        let [c, d, mu] = s.tangent;
        write_row(
            &mut w,
            &[
                num(s.theta),
                s.branch.to_string(),
                num(s.point[0]),
                num(s.point[1]),
                num(c),
                num(d),
                num(mu),
                if s.crossing { "crossing" } else { "regular" }.to_string(),
            ],
        )?;
    }
    flush(w)?;
    let crossings = curve.samples.iter().filter(|s| s.crossing).count();
    o.manifest.results = json!({ "branches": curve.branches, "crossing_samples": crossings });
    ctx.finish(o)
}

/// Grid file for `weyl-apply --fn`: samples on a regular grid with the last
/// axis varying fastest, each value a `[re, im]` pair.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<[f64; 2]>,
}

fn test_function(spec: &str, t: &LoadedTuple) -> Result<(GridFunction, Value), CliError> {
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let inner = rest
            .strip_prefix("gauss(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown test function '{spec}'; expected builtin:gauss(c_1,...,c_n,width)"
                ))
            })?;
        let mut v = parse_floats(inner)?;
        let n = t.tuple.n();
        if v.len() != n + 1 {
            return Err(CliError::Usage(format!(
                "builtin:gauss needs {n} center coordinates and a width, got {} numbers",
                v.len()
            )));
        }
        let width = v.pop().expect("non-empty");
        if !(width > 0.0) {
            return Err(CliError::Usage("gauss width must be positive".into()));
        }
        let g = Gaussian::new(v, width);
        let grid = g.grid_for(&t.tuple)?;
        Ok((
            grid,
            json!({ "gauss": { "center": g.center, "width": g.width } }),
        ))
    } else {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Input(format!("cannot read {spec}: {e}")))?;
        let g: GridFile =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        let values = g.values.iter().map(|z| c64(z[0], z[1])).collect();
        let grid = GridFunction::new(g.origin, g.spacing, g.shape, values)
            .map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        Ok((
            grid,
            json!({ "grid_file": spec, "grid_sha256": sha256_hex(text.as_bytes()) }),
        ))
    }
}

fn weyl(ctx: &Ctx, source: &str, function: &str, cutoff: Option<f64>) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let (grid, fparams) = test_function(function, &t)?;
    let params = json!({ "tuple": source, "fn": fparams, "cutoff": cutoff });
    let mut o = ctx.outputs("weyl-apply", &t, params, vec![])?;
    let r = weyl_apply(&t.tuple, &grid, cutoff)?;
    let mut w = o.csv(
        ".csv",
        &[
            format!("error_estimate {}", num(r.error_estimate)),
            format!("cutoff {}", num(r.cutoff)),
        ],
    )?;
    write_row(&mut w, &["row", "col", "re", "im"])?;
    for i in 0..r.value.nrows() {
        for k in 0..r.value.ncols() {
            let z = r.value[(i, k)];
            write_row(
                &mut w,
                &[i.to_string(), k.to_string(), num(z.re), num(z.im)],
            )?;
        }
    }
    flush(w)?;
    o.manifest.warnings.extend(r.warnings.iter().cloned());
    o.manifest.results = json!({
        "error_estimate": r.error_estimate,
        "cutoff": r.cutoff,
        "nodes_used": r.nodes_used,
        "grid_points": grid.len(),
    });
    ctx.finish(o)
}

fn parse_grid(spec: &str) -> Result<ScanGrid, CliError> {
    ScanGrid::parse(spec).map_err(|e| CliError::Usage(format!("--grid '{spec}': {e}")))
}

fn cauchy_scan(
    ctx: &Ctx,
    source: &str,
    grid: &str,
    eps: &Option<Vec<f64>>,
) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let g = parse_grid(grid)?;
    let sched = schedule(eps);
    let params = json!({ "tuple": source, "grid": grid, "eps": sched.eps, "kappa": sched.kappa, "min_nodes": sched.min_nodes });
    let mut o = ctx.outputs("cauchy-scan", &t, params, vec![])?;
    let scan = singular_scan(&t.tuple, &g, &sched)?;
    let mut w = o.csv(".csv", &[])?;
    let mut header: Vec<String> = (1..=g.dims()).map(|j| format!("x_{j}")).collect();
    header.extend(
        [
            "classification",
            "jump_norm_at_eps_min",
            "extrapolated_density_norm",
        ]
        .map(String::from),
    );
    write_row(&mut w, &header)?;
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for p in &scan.points {
        *counts.entry(p.classification.as_str()).or_default() += 1;
        let mut row: Vec<String> = p.x.iter().map(|v| num(*v)).collect();
        row.push(p.classification.as_str().to_string());
        row.push(num(p.jump_norm_at_eps_min));
        row.push(num(p.extrapolated_density_norm));
        write_row(&mut w, &row)?;
    }
    flush(w)?;
    o.manifest.results = json!({ "counts": counts });
    ctx.finish(o)
}

fn wavefront(ctx: &Ctx, source: &str, theta_count: usize) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let params = json!({ "tuple": source, "theta_count": theta_count });
    let mut o = ctx.outputs("wavefront", &t, params, vec![])?;
    let pieces = wave_front(&t.tuple, theta_count)?;
    let mut w = o.csv(".csv", &[])?;
    write_row(
        &mut w,
        &[
            "piece",
            "xi_0",
            "xi_1",
            "xi_2",
            "multiplicity",
            "shape",
            "x1",
            "x2",
        ],
    )?;
    let mut segments = 0;
    for (k, p) in pieces.iter().enumerate() {
        let head = |shape: &str| {
            let mut r = vec![k.to_string()];
            r.extend(p.direction.iter().map(|v| num(*v)));
            r.push(p.multiplicity.to_string());
            r.push(shape.to_string());
            r
        };
        let pts: Vec<[f64; 2]> = match &p.shape {
            WaveFrontShape::Point(q) => vec![*q],
            WaveFrontShape::Segment(a, b) => {
                segments += 1;
                vec![*a, *b]
            }
            WaveFrontShape::Unresolved => vec![[f64::NAN; 2]],
        };
        let shape = match &p.shape {
            WaveFrontShape::Point(_) => "point",
            WaveFrontShape::Segment(..) => "segment",
            WaveFrontShape::Unresolved => "unresolved",
        };
        for q in pts {
            let mut row = head(shape);
            row.push(num(q[0]));
            row.push(num(q[1]));
            write_row(&mut w, &row)?;
        }
    }
    flush(w)?;
    o.manifest.results = json!({ "pieces": pieces.len(), "segments": segments });
    ctx.finish(o)
}

fn lacuna(
    ctx: &Ctx,
    source: &str,
    grid: &str,
    eps: &Option<Vec<f64>>,
    min_cells: usize,
) -> Result<(), CliError> {
    let t = load_tuple(source)?;
    let g = parse_grid(grid)?;
    let sched = schedule(eps);
    let params = json!({
        "tuple": source, "grid": grid, "eps": sched.eps, "kappa": sched.kappa,
        "min_nodes": sched.min_nodes, "min_cells": min_cells,
    });
    let mut o = ctx.outputs("lacuna", &t, params, vec![])?;
    let rep = lacuna_detect(&t.tuple, &g, &sched, min_cells)?;
    let mut w = o.csv(".csv", &[])?;
    write_row(&mut w, &["x1", "x2", "inside_hull", "classification"])?;
    for (k, class) in rep.classes.iter().enumerate() {
        let p = g.point(k);
        write_row(
            &mut w,
            &[
                num(p[0]),
                num(p[1]),
                rep.inside_hull[k].to_string(),
                class.map_or("unscanned", |c| c.as_str()).to_string(),
            ],
        )?;
    }
    flush(w)?;
    let regions: Vec<Value> = rep
        .lacunas
        .iter()
        .map(|l| json!({ "cells": l.cells.len(), "area": l.area, "centroid": l.centroid }))
        .collect();
    eprintln!("lacunas found: {}", regions.len());
    for (k, r) in regions.iter().enumerate() {
        eprintln!("  lacuna {k}: {r}");
    }
    o.json(".json", json!({ "lacunas": regions }))?;
    o.manifest.results = json!({ "lacunas": rep.lacunas.len() });
    ctx.finish(o)
}

fn write_row<W: std::io::Write, S: AsRef<[u8]>>(
    w: &mut csv::Writer<W>,
    row: &[S],
) -> Result<(), CliError> {
    w.write_record(row)
        .map_err(|e| CliError::Input(format!("writing csv: {e}")))
}
