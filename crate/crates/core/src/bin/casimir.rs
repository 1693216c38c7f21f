//! Command-line front end: computes the renormalized stress-energy tensor on
//! interior grids, boundary pressure profiles, total energy, side forces,
//! a₂-scans, and feature extraction, emitting CSV (default for tables), JSON,
//! or plain text. Every emitted value is accompanied by its certified radius.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numerical error (pole, edge,
//! domain), 4 solver failure (bracketing or fitting).

use std::collections::HashMap;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use casimir_box::analysis::{extract_features, scan};
use casimir_box::boxmodel::{BoxGeometry, SideId};
use casimir_box::dirichlet::TruncationParams;
use casimir_box::error::Error;
use casimir_box::observables::{
    eval_auto, pressure, stress_energy, xi_critical, ObservableKind,
};

const U0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Parser)]
#[command(name = "casimir", version, about = "Certified Casimir observables for a massless scalar field in a d-dimensional Dirichlet box")]
struct Cli {
    /// Spatial dimension d (defaults to the number of --sides entries, else 1)
    #[arg(short = 'd', long, global = true)]
    dimension: Option<usize>,
    /// Comma-separated side lengths a1,a2,...
    #[arg(long, global = true, value_name = "A1,A2,...")]
    sides: Option<String>,
    /// Mellin cut T (default: a_min*a_max/pi; results are T-independent)
    #[arg(long, global = true, value_name = "T")]
    mellin_cut: Option<f64>,
    /// Truncation shell radius N (default: escalated until radius <= 1e-8)
    #[arg(short = 'N', long, global = true)]
    shell: Option<f64>,
    /// Tail-bound splitting parameter alpha in (0,1)
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Curvature coupling xi (default: critical value (d-1)/(4d))
    #[arg(long, global = true)]
    xi: Option<f64>,
    /// Mass scale kappa (enters only as kappa^u; irrelevant at u=0)
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Output format: csv | json | text
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (fallback: CASIMIR_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Plain key=value config file; flags take precedence over its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stress-energy VEV on an interior grid or at explicit points
    Tensor {
        /// Grid counts per axis, e.g. "101" or "51x51"
        #[arg(long)]
        grid: Option<String>,
        /// Explicit points "x1,..,xd;y1,..,yd" (overrides --grid)
        #[arg(long)]
        points: Option<String>,
    },
    /// Renormalized pressure profile on a side
    Pressure {
        /// Side "p,lambda" with 1-based axis p and lambda in {0,1}
        #[arg(long, default_value = "1,0")]
        side: String,
        /// Points per tangential axis
        #[arg(long, default_value_t = 51)]
        grid: usize,
    },
    /// Renormalized total energy
    Energy,
    /// Renormalized integrated force on a side
    Force {
        #[arg(long, default_value = "1,0")]
        side: String,
    },
    /// Energy or force as a function of the last side length
    Scan {
        /// energy | force
        kind: String,
        /// Range "lo:hi:count" for the scanned side length
        #[arg(long)]
        a2: String,
    },
    /// Extremum, zeros, and asymptotic fits versus the last side length
    Features {
        /// energy | force
        #[arg(long, default_value = "energy")]
        kind: String,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::Pole(_) | Error::Edge(_) | Error::Domain(_) => 3,
        Error::Bracket(_) | Error::Fit(_) => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

/// Resolved run configuration after merging flags > config file > defaults.
struct Settings {
    g: BoxGeometry,
    t_cut: f64,
    n_shell: Option<f64>,
    alpha: f64,
    xi: f64,
    kappa: f64,
    format: String,
    output: Option<PathBuf>,
}

fn parse_kv_file(path: &PathBuf) -> Result<HashMap<String, String>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {path:?}: {e}")))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("config line {} is not key=value: {line}", lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, Error> {
    s.parse::<T>().map_err(|_| Error::Config(format!("cannot parse {what} from {s:?}")))
}

fn parse_sides(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',').map(|t| parse_num::<f64>("side length", t.trim())).collect()
}

fn resolve(cli: &Cli) -> Result<Settings, Error> {
    let file = match &cli.config {
        Some(p) => parse_kv_file(p)?,
        None => HashMap::new(),
    };
    let get = |key: &str| file.get(key).cloned();

    let sides_str = cli.sides.clone().or_else(|| get("sides"));
    let dimension = match (cli.dimension, get("dimension")) {
        (Some(d), _) => Some(d),
        (None, Some(s)) => Some(parse_num::<usize>("dimension", &s)?),
        (None, None) => None,
    };
    let sides = match sides_str {
        Some(s) => parse_sides(&s)?,
        None => vec![1.0; dimension.unwrap_or(1)],
    };
    if let Some(d) = dimension {
        if d != sides.len() {
            return Err(Error::Config(format!(
                "dimension {d} does not match {} side lengths",
                sides.len()
            )));
        }
    }
    let g = BoxGeometry::new(sides).map_err(|e| Error::Config(e.to_string()))?;
    let d = g.d();

    let pick_f64 = |flag: Option<f64>, key: &str| -> Result<Option<f64>, Error> {
        match (flag, get(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => Ok(Some(parse_num::<f64>(key, &s)?)),
            (None, None) => Ok(None),
        }
    };

    let t_cut = pick_f64(cli.mellin_cut, "mellin_cut")?
        .unwrap_or(g.a_min() * g.a_max() / std::f64::consts::PI);
    let n_shell = pick_f64(cli.shell, "shell")?;
    let alpha = pick_f64(cli.alpha, "alpha")?.unwrap_or(TruncationParams::default_alpha(d));
    let xi = pick_f64(cli.xi, "xi")?.unwrap_or(xi_critical(d));
    let kappa = pick_f64(cli.kappa, "kappa")?.unwrap_or(1.0);
    let format = cli.format.clone().or_else(|| get("format")).unwrap_or_default();
    let output = cli.output.clone().or_else(|| get("output").map(PathBuf::from));

    let threads = match (cli.threads, get("threads")) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(parse_num::<usize>("threads", &s)?),
        (None, None) => std::env::var("CASIMIR_THREADS")
            .ok()
            .map(|s| parse_num::<usize>("CASIMIR_THREADS", &s))
            .transpose()?,
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }

    // Validate the numeric parameters eagerly so bad configs exit with 2.
    TruncationParams::new(t_cut, n_shell.unwrap_or(8.0), alpha)
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(Settings { g, t_cut, n_shell, alpha, xi, kappa, format, output })
}

fn parse_side(s: &str, d: usize) -> Result<SideId, Error> {
    let (p, l) = s
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("side must be \"p,lambda\", got {s:?}")))?;
    let p: usize = parse_num("side axis", p.trim())?;
    let l: u8 = parse_num("side lambda", l.trim())?;
    if p == 0 || p > d {
        return Err(Error::Config(format!("side axis {p} out of 1..={d}")));
    }
    SideId::new(p - 1, l, d).map_err(|e| Error::Config(e.to_string()))
}

/// 17 significant digits, enough to round-trip any f64.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn emit(settings: &Settings, command: &str, table: &Table, text: Option<String>) -> Result<(), Error> {
    let default_fmt = if text.is_some() { "text" } else { "csv" };
    let format = if settings.format.is_empty() { default_fmt } else { settings.format.as_str() };
    let body = match format {
        "csv" => {
            let mut s = table.columns.join(",");
            s.push('\n');
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
        "json" => {
            let config = serde_json::json!({
                "command": command,
                "dimension": settings.g.d(),
                "sides": settings.g.sides(),
                "mellin_cut": settings.t_cut,
                "shell": settings.n_shell,
                "alpha": settings.alpha,
                "xi": settings.xi,
                "kappa": settings.kappa,
            });
            let doc = serde_json::json!({
                "config": config,
                "columns": table.columns,
                "rows": table.rows,
            });
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| Error::Config(format!("json: {e}")))?;
            s.push('\n');
            s
        }
        "text" => text.unwrap_or_else(|| {
            let mut s = String::new();
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
                s.push_str(&line.join(" "));
                s.push('\n');
            }
            s
        }),
        other => return Err(Error::Config(format!("unknown format {other:?}"))),
    };
    match &settings.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::Config(format!("cannot write {path:?}: {e}"))),
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| Error::Config(format!("stdout: {e}")))
        }
    }
}

/// Smallest N at which the probe evaluation certifies radius <= tol; the
/// remainder bounds are uniform in the evaluation point, so one probe at the
/// box center is representative of the whole grid.
fn auto_n<F>(start: f64, tol: f64, mut probe: F) -> Result<f64, Error>
where
    F: FnMut(f64) -> Result<f64, Error>,
{
    let mut n = start;
    while n <= 400.0 {
        match probe(n) {
            Ok(r) if r <= tol => return Ok(n),
            Ok(_) => {}
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
        n = (n * 1.2).ceil().max(n + 2.0);
    }
    Ok(400.0)
}

fn tensor_params(s: &Settings) -> Result<TruncationParams, Error> {
    let g = &s.g;
    let start = 2.0 * (g.d() as f64).sqrt() + 2.0;
    let n = match s.n_shell {
        Some(n) => n,
        None => {
            let center: Vec<f64> = g.sides().iter().map(|a| 0.5 * a).collect();
            auto_n(start, 1e-8, |n| {
                let tp = TruncationParams::new(s.t_cut, n, s.alpha)?;
                let ten = stress_energy(&center, g, s.xi, &tp, U0, s.kappa)?;
                Ok(ten
                    .conformal
                    .iter()
                    .chain(&ten.nonconformal)
                    .flatten()
                    .map(|v| v.radius)
                    .fold(0.0, f64::max))
            })?
        }
    };
    TruncationParams::new(s.t_cut, n, s.alpha)
}

fn parse_grid_counts(spec: &str, d: usize) -> Result<Vec<usize>, Error> {
    let parts: Vec<&str> = spec.split('x').collect();
    let counts: Vec<usize> = parts
        .iter()
        .map(|p| parse_num::<usize>("grid count", p.trim()))
        .collect::<Result<_, _>>()?;
    let counts = if counts.len() == 1 { vec![counts[0]; d] } else { counts };
    if counts.len() != d || counts.iter().any(|&c| c == 0) {
        return Err(Error::Config(format!("grid {spec:?} does not fit dimension {d}")));
    }
    Ok(counts)
}

/// Cartesian product of per-axis interior points x_i = a_i k/(n_i+1).
fn interior_grid(g: &BoxGeometry, counts: &[usize]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    for (i, &c) in counts.iter().enumerate() {
        let mut next = Vec::with_capacity(pts.len() * c);
        for p in &pts {
            for k in 1..=c {
                let mut q = p.clone();
                q.push(g.side(i) * k as f64 / (c as f64 + 1.0));
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

fn cmd_tensor(s: &Settings, grid: Option<String>, points: Option<String>) -> Result<(), Error> {
    let g = &s.g;
    let d = g.d();
    let tp = tensor_params(s)?;
    let pts: Vec<Vec<f64>> = match points {
        Some(spec) => spec
            .split(';')
            .map(|p| {
                let x = parse_sides(p)?;
                if x.len() != d {
                    return Err(Error::Config(format!("point {p:?} has wrong dimension")));
                }
                Ok(x)
            })
            .collect::<Result<_, _>>()?,
        None => {
            let counts = parse_grid_counts(grid.as_deref().unwrap_or("21"), d)?;
            interior_grid(g, &counts)
        }
    };
    let mut columns: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    for mu in 0..=d {
        for nu in 0..=d {
            columns.push(format!("T{mu}{nu}_conf"));
            columns.push(format!("T{mu}{nu}_conf_radius"));
            columns.push(format!("T{mu}{nu}_nonconf"));
            columns.push(format!("T{mu}{nu}_nonconf_radius"));
        }
    }
    let rows: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|x| {
            let ten = stress_energy(x, g, s.xi, &tp, U0, s.kappa)?;
            let mut row = x.clone();
            for mu in 0..=d {
                for nu in 0..=d {
                    row.push(ten.conformal[mu][nu].re());
                    row.push(ten.conformal[mu][nu].radius);
                    row.push(ten.nonconformal[mu][nu].re());
                    row.push(ten.nonconformal[mu][nu].radius);
                }
            }
            Ok(row)
        })
        .collect::<Result<_, Error>>()?;
    emit(s, "tensor", &Table { columns, rows }, None)
}

fn cmd_pressure(s: &Settings, side_spec: &str, grid: usize) -> Result<(), Error> {
    let g = &s.g;
    let d = g.d();
    let side = parse_side(side_spec, d)?;
    let n = match s.n_shell {
        Some(n) => n,
        None => {
            let mid: Vec<f64> = g.sides().iter().map(|a| 0.5 * a).collect();
            auto_n(2.0 * (d as f64).sqrt() + 2.0, 1e-8, |n| {
                let tp = TruncationParams::new(s.t_cut, n, s.alpha)?;
                Ok(pressure(&side, &mid, g, &tp, U0, s.kappa)?[side.axis].radius)
            })?
        }
    };
    let tp = TruncationParams::new(s.t_cut, n, s.alpha)?;
    // Grid over the tangential axes only; d=1 has the single boundary point.
    let tang: Vec<usize> = (0..d).filter(|&i| i != side.axis).collect();
    let tgrid = {
        let sub_sides: Vec<f64> = tang.iter().map(|&i| g.side(i)).collect();
        if sub_sides.is_empty() {
            vec![vec![]]
        } else {
            let sub = BoxGeometry::new(sub_sides)?;
            interior_grid(&sub, &vec![grid; tang.len()])
        }
    };
    let mut columns: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    columns.push(format!("p{}", side.axis + 1));
    columns.push("radius".into());
    let rows: Vec<Vec<f64>> = tgrid
        .par_iter()
        .map(|tx| {
            let mut x = vec![0.0; d];
            x[side.axis] = side.lambda as f64 * g.side(side.axis);
            for (k, &i) in tang.iter().enumerate() {
                x[i] = tx[k];
            }
            let p = pressure(&side, &x, g, &tp, U0, s.kappa)?;
            let mut row = x.clone();
            row.push(p[side.axis].re());
            row.push(p[side.axis].radius);
            Ok(row)
        })
        .collect::<Result<_, Error>>()?;
    emit(s, "pressure", &Table { columns, rows }, None)
}

fn scalar_value(s: &Settings, kind: ObservableKind, side: &SideId) -> Result<(f64, f64), Error> {
    let tp = TruncationParams::new(s.t_cut, s.n_shell.unwrap_or(8.0), s.alpha)?;
    let v = match s.n_shell {
        Some(_) => match kind {
            ObservableKind::Energy => {
                casimir_box::observables::energy_ren(&s.g, &tp, U0, s.kappa)?
            }
            ObservableKind::Force => {
                casimir_box::observables::force_ren(side, &s.g, &tp, U0, s.kappa)?
            }
            _ => unreachable!(),
        },
        None => eval_auto(kind, side, &s.g, &tp, U0, s.kappa, 1e-8, 2000.0)?,
    };
    Ok((v.re(), v.radius))
}

fn cmd_scalar(s: &Settings, kind: ObservableKind, side_spec: &str) -> Result<(), Error> {
    let side = parse_side(side_spec, s.g.d())?;
    let (v, r) = scalar_value(s, kind, &side)?;
    let name = if kind == ObservableKind::Energy { "energy" } else { "force" };
    let table = Table { columns: vec![name.into(), "radius".into()], rows: vec![vec![v, r]] };
    emit(s, name, &table, Some(format!("{} ± {:.1e}\n", fmt17(v), r)))
}

fn parse_kind(s: &str) -> Result<ObservableKind, Error> {
    match s {
        "energy" => Ok(ObservableKind::Energy),
        "force" => Ok(ObservableKind::Force),
        other => Err(Error::Config(format!("kind must be energy or force, got {other:?}"))),
    }
}

fn cmd_scan(s: &Settings, kind_spec: &str, a2_spec: &str) -> Result<(), Error> {
    let kind = parse_kind(kind_spec)?;
    let parts: Vec<&str> = a2_spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("--a2 must be lo:hi:count, got {a2_spec:?}")));
    }
    let lo: f64 = parse_num("a2 lo", parts[0])?;
    let hi: f64 = parse_num("a2 hi", parts[1])?;
    let count: usize = parse_num("a2 count", parts[2])?;
    let tp = TruncationParams::new(1.0, s.n_shell.unwrap_or(8.0), s.alpha)
        .map_err(|e| Error::Config(e.to_string()))?;
    let result = scan(kind, &s.g, lo, hi, count, &tp)?;
    let rows: Vec<Vec<f64>> = result
        .abscissas
        .iter()
        .zip(&result.values)
        .map(|(&a2, v)| vec![a2, v.re(), v.radius])
        .collect();
    let table = Table { columns: vec!["a2".into(), kind_spec.into(), "radius".into()], rows };
    emit(s, "scan", &table, None)
}

fn cmd_features(s: &Settings, kind_spec: &str) -> Result<(), Error> {
    let kind = parse_kind(kind_spec)?;
    let tp = TruncationParams::new(1.0, s.n_shell.unwrap_or(8.0), s.alpha)?;
    let rep = extract_features(kind, &s.g, &tp)?;
    // Fit coefficients are diagnostics; their quoted uncertainties are the
    // validation tolerances, not certified radii.
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    if let Some((loc, val)) = rep.maximum {
        rows.push(("a2_max".into(), loc.re(), loc.radius));
        rows.push(("value_at_max".into(), val.re(), val.radius));
    }
    for (i, z) in rep.zeros.iter().enumerate() {
        rows.push((format!("zero{}", i + 1), z.re(), z.radius));
    }
    rows.push(("small_a2_coeff".into(), rep.small_a2_coeff, 1e-4));
    rows.push(("asymptote_slope".into(), rep.asymptote.0, 1e-5));
    rows.push(("asymptote_intercept".into(), rep.asymptote.1, 1e-5));
    let mut text = String::new();
    for (name, v, r) in &rows {
        text.push_str(&format!("{name} = {} ± {:.1e}\n", fmt17(*v), r));
    }
    let table = Table {
        columns: vec!["feature_index".into(), "value".into(), "radius".into()],
        rows: rows.iter().enumerate().map(|(i, (_, v, r))| vec![i as f64, *v, *r]).collect(),
    };
    emit(s, "features", &table, Some(text))
}

fn run(cli: Cli) -> Result<(), Error> {
    let settings = resolve(&cli)?;
    match &cli.cmd {
        Cmd::Tensor { grid, points } => cmd_tensor(&settings, grid.clone(), points.clone()),
        Cmd::Pressure { side, grid } => cmd_pressure(&settings, side, *grid),
        Cmd::Energy => cmd_scalar(&settings, ObservableKind::Energy, "1,0"),
        Cmd::Force { side } => cmd_scalar(&settings, ObservableKind::Force, side),
        Cmd::Scan { kind, a2 } => cmd_scan(&settings, kind, a2),
        Cmd::Features { kind } => cmd_features(&settings, kind),
    }
}
