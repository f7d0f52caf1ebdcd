//! `genlame`: evaluate generalized Jacobi functions, verify and enumerate the
//! polynomial eigenpairs, and compute Hill spectra.
//!
//! Exit status: 0 success, 1 usage error, 2 domain error, 3 convergence
//! failure, 4 verification failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use genlame::ince::{
    distinct_solutions, enumerate_vanishing_solutions, hill_eigen_energies, EnumerationOptions, FourierClass,
    Transform,
};
use genlame::lame::{period_grid, potential, schrodinger_residual};
use genlame::series::{termination_search, transcription_audit, AnsatzKind, TerminationOptions};
use genlame::{catalog, eval_all, CatalogEntry, EnergyCoeffs, Error, FactorMask, ModulusPair, ParamVector};
use serde_json::{Map, Value};

#[derive(Debug, Parser)]
#[command(name = "genlame", version, about = "Generalized Jacobi functions and the generalized Lamé equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate s, c, d1, d2 and the potential V on a grid.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Potential parameters (α,β,γ,δ,λ).
        #[arg(long, default_value = "(3,0,2,2,2)", allow_hyphen_values = true)]
        params: ParamVector,
        /// Grid as start:stop:count, endpoints included.
        #[arg(long, default_value = "0:5:101", allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Check every catalog eigenpair against the Schrödinger equation.
    VerifyCatalog {
        #[command(flatten)]
        common: Common,
        /// Largest acceptable normalized residual.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Added to every catalog energy before checking.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        energy_shift: f64,
        /// Grid points per period.
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Lowest characteristic energies per Fourier class.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Potential parameters (α,β,γ,δ,λ).
        #[arg(long, default_value = "(3,0,2,2,2)", allow_hyphen_values = true)]
        params: ParamVector,
        /// Initial truncation; doubled until the energies settle.
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Energies reported per class.
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Restrict to one class.
        #[arg(long)]
        class: Option<FourierClass>,
        #[arg(long, default_value = "standard")]
        transform: Transform,
    },
    /// Find every polynomial eigenpair by exact vanishing conditions.
    Enumerate {
        #[command(flatten)]
        output: Output,
        #[arg(long, value_enum, default_value_t = Route::Fourier)]
        route: Route,
    },
    /// Print the catalog of polynomial eigenpairs.
    Catalog {
        #[command(flatten)]
        output: Output,
    },
    /// Compare the tabulated series bands with the generated ones.
    Audit {
        #[command(flatten)]
        output: Output,
        /// Largest band index compared.
        #[arg(long, default_value_t = 12)]
        max_n: i64,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 0.8)]
    k1: f64,
    #[arg(long, default_value_t = 0.3)]
    k2: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Fourier,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 }).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(format!("grid must be start:stop:count, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let (Some(start), Some(stop)) = (num(start), num(stop)) else {
            return Err(format!("grid bounds must be finite numbers, got {s:?}"));
        };
        let count = count.trim().parse::<usize>().ok().filter(|&c| c > 0).ok_or_else(|| format!("grid count must be a positive integer, got {s:?}"))?;
        Ok(Grid { start, stop, count })
    }
}

enum Failure {
    Usage(String),
    Domain(String),
    Convergence(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Convergence(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Convergence(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Domain(e.to_string()),
            Error::Convergence(_) => Failure::Convergence(e.to_string()),
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(format!("output: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Domain(format!("output: {e}"))
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => shortest(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v + 0.0).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(v) => Value::from(v.as_str()),
            Cell::Bool(v) => Value::from(*v),
        }
    }
}

/// Shortest decimal that parses back to `v`; exponent form outside `[1e-5, 1e16)`.
fn shortest(v: f64) -> String {
    let v = v + 0.0; // no "-0"
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Rows with a fixed header; rendered as CSV or as a JSON array of objects
/// keyed by the header.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, out: &Output) -> Result<(), Failure> {
        let sink: Box<dyn Write> = match &out.output {
            Some(path) => Box::new(File::create(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?),
            None => Box::new(io::stdout().lock()),
        };
        let mut sink = BufWriter::new(sink);
        match out.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut sink);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.header.iter().zip(row).map(|(k, v)| (k.to_string(), v.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut sink, &records).map_err(|e| Failure::Domain(format!("output: {e}")))?;
                writeln!(sink)?;
            }
        }
        sink.flush()?;
        Ok(())
    }
}

fn moduli(common: &Common) -> Result<ModulusPair, Failure> {
    Ok(ModulusPair::new(common.k1, common.k2)?)
}

fn param_cells(p: &ParamVector) -> Vec<Cell> {
    p.to_array().into_iter().map(Cell::Num).collect()
}

fn energy_cells(e: &EnergyCoeffs) -> Vec<Cell> {
    vec![Cell::Num(e.e0), Cell::Num(e.e1), Cell::Num(e.e2)]
}

fn cmd_eval(common: &Common, params: &ParamVector, grid: &Grid) -> Result<(), Failure> {
    let m = moduli(common)?;
    let mut table = Table::new(&["z", "s", "c", "d1", "d2", "V"]);
    for z in grid.points() {
        let p = eval_all(z, &m)?;
        let v = potential(z, params, &m)?;
        table.push([z, p.s, p.c, p.d1, p.d2, v].into_iter().map(Cell::Num).collect());
    }
    table.write(&common.output)
}

fn cmd_verify_catalog(common: &Common, tol: f64, shift: f64, points: usize) -> Result<(), Failure> {
    if !(tol > 0.0) || !shift.is_finite() {
        return Err(Failure::Usage("--tol must be positive and --energy-shift finite".into()));
    }
    if points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    let m = moduli(common)?;
    let mut table =
        Table::new(&["row", "alpha", "beta", "gamma", "delta", "lambda", "factors", "energy", "residual", "pass"]);
    let mut failed = 0;
    for (i, row) in catalog().iter().enumerate() {
        let grid = period_grid(row.factors.period(&m)?, points);
        let energy = row.energy_at(&m) + shift;
        let residual = schrodinger_residual(&row.factors, &row.params, energy, &m, &grid)?;
        let pass = residual < tol;
        failed += usize::from(!pass);
        let mut cells = vec![Cell::Int(i as i64 + 1)];
        cells.extend(param_cells(&row.params));
        cells.extend([Cell::Text(row.factors.to_string()), Cell::Num(energy), Cell::Num(residual), Cell::Bool(pass)]);
        table.push(cells);
    }
    table.write(&common.output)?;
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {} catalog rows exceed tolerance {}", shortest(tol), catalog().len())));
    }
    Ok(())
}

fn cmd_spectrum(
    common: &Common,
    params: &ParamVector,
    n: usize,
    count: usize,
    class: Option<FourierClass>,
    transform: Transform,
) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::Usage("--count must be positive".into()));
    }
    let m = moduli(common)?;
    let classes = match class {
        Some(c) => vec![c],
        None => FourierClass::ALL.to_vec(),
    };
    let mut table = Table::new(&["class", "index", "energy"]);
    for class in classes {
        let energies = hill_eigen_energies(class, params, &m, transform, n, count)?;
        for (i, e) in energies.into_iter().enumerate() {
            table.push(vec![Cell::Text(class.to_string()), Cell::Int(i as i64), Cell::Num(e)]);
        }
    }
    table.write(&common.output)
}

struct Found {
    params: ParamVector,
    energy: EnergyCoeffs,
    factors: Option<FactorMask>,
    source: String,
}

fn catalog_rank(params: &ParamVector) -> usize {
    catalog().iter().position(|r| r.params == *params).unwrap_or(usize::MAX)
}

fn cmd_enumerate(output: &Output, route: Route) -> Result<(), Failure> {
    let mut found: Vec<Found> = match route {
        Route::Fourier => {
            let options = EnumerationOptions::default();
            let all: Vec<_> = Transform::ALL.iter().flat_map(|&t| enumerate_vanishing_solutions(t, &options)).collect();
            distinct_solutions(&all)
                .into_iter()
                .map(|s| Found {
                    params: s.params,
                    energy: s.energy,
                    factors: s.factors,
                    source: format!("{} {} {}", s.transform, s.class, s.line),
                })
                .collect()
        }
        Route::Series => {
            let options = TerminationOptions::default();
            let mut out: Vec<Found> = Vec::new();
            for kind in AnsatzKind::all() {
                let report = termination_search(kind, &options);
                let all = report.columns.iter().map(|(j, s)| (format!("{kind} column {j}"), s));
                let chain = report.chain.iter().map(|(mu, s)| (format!("{kind} chain {mu}"), s));
                for (source, s) in all.chain(chain) {
                    if out.iter().any(|o| o.params == s.params && o.energy == s.energy) {
                        continue;
                    }
                    out.push(Found { params: s.params, energy: s.energy, factors: Some(s.kind.leading_factors()), source });
                }
            }
            out
        }
    };
    found.sort_by_key(|f| catalog_rank(&f.params));
    let route_name = match route {
        Route::Fourier => "fourier",
        Route::Series => "series",
    };
    let mut table =
        Table::new(&["alpha", "beta", "gamma", "delta", "lambda", "e0", "e1", "e2", "factors", "route", "source"]);
    for f in &found {
        let mut cells = param_cells(&f.params);
        cells.extend(energy_cells(&f.energy));
        cells.push(Cell::Text(f.factors.map_or_else(String::new, |m| m.to_string())));
        cells.push(Cell::Text(route_name.into()));
        cells.push(Cell::Text(f.source.clone()));
        table.push(cells);
    }
    table.write(output)
}

fn cmd_catalog(output: &Output) -> Result<(), Failure> {
    let mut table = Table::new(&["alpha", "beta", "gamma", "delta", "lambda", "e0", "e1", "e2", "factors"]);
    for row in catalog() {
        let CatalogEntry { params, energy, factors } = row;
        let mut cells = param_cells(params);
        cells.extend(energy_cells(energy));
        cells.push(Cell::Text(factors.to_string()));
        table.push(cells);
    }
    table.write(output)
}

fn cmd_audit(output: &Output, max_n: i64) -> Result<(), Failure> {
    if max_n < 0 {
        return Err(Failure::Usage("--max-n must be non-negative".into()));
    }
    let mut table = Table::new(&["kind", "entry", "differing_at", "printed", "resolved", "resolved_matches"]);
    for f in transcription_audit(max_n) {
        let at: Vec<String> = f.differing_at.iter().map(i64::to_string).collect();
        let (printed, resolved) = f.misprint.as_ref().map_or((String::new(), String::new()), |m| {
            (m.printed.to_string(), m.resolved.to_string())
        });
        table.push(vec![
            Cell::Text(f.kind.to_string()),
            Cell::Text(format!("{:?}", f.entry)),
            Cell::Text(at.join(" ")),
            Cell::Text(printed),
            Cell::Text(resolved),
            Cell::Bool(f.resolved_matches),
        ]);
    }
    table.write(output)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Eval { common, params, grid } => cmd_eval(common, params, grid),
        Command::VerifyCatalog { common, tol, energy_shift, points } => {
            cmd_verify_catalog(common, *tol, *energy_shift, *points)
        }
        Command::Spectrum { common, params, n, count, class, transform } => {
            cmd_spectrum(common, params, *n, *count, *class, *transform)
        }
        Command::Enumerate { output, route } => cmd_enumerate(output, *route),
        Command::Catalog { output } => cmd_catalog(output),
        Command::Audit { output, max_n } => cmd_audit(output, *max_n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("usage error"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("genlame: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
