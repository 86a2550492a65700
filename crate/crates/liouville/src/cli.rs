//! File formats and the subcommands behind the `liouville` binary.
//!
//! All files are line oriented and start with a versioned header. `#` begins
//! a comment, blank lines are skipped, fields are separated by whitespace.
//! Floating point values are written with 17 significant digits, so parsing
//! a written file reproduces every `f64` bit for bit.
//!
//! * Complex files (`liouville complex v1`): one `dimension n` line first,
//!   then `vertex id x1 .. xn` and `cell id0 .. idn` records. Omitting the
//!   coordinates on every vertex and adding `length a b value` records
//!   instead describes an abstract manifold with edge lengths; mixing the
//!   two styles is an error.
//! * Map files (`liouville map v1`): `pair v v'` records. Optional `source`
//!   and `target` lines may name the complexes the map was written for, but
//!   they are informative only; the paths on the command line decide.
//! * Transform files (`liouville transform v1`): one `dimension n` line,
//!   then primitive lines applied in file order. `inversion c1 .. cn r` is
//!   the inversion in the sphere of center `c` and radius `r`;
//!   `similarity scale a11 .. ann b1 .. bn` is `x -> scale * A x + b` with
//!   `A` row-major and orthogonal. A raw `matrix m11 .. m(n+2)(n+2)` line is
//!   accepted only behind `--allow-matrix` and is validated against the
//!   Lorentz invariant before use.
//! * Factor files (`liouville factors v1`): `u id value` records. `apply`
//!   writes one next to the image complex.
//!
//! Exit codes: 0 on success (for `verify`: Möbius equivalent), 1 on errors
//! and failed validation, 2 when `verify` finds conformal but not Möbius
//! equivalence, 3 when it finds neither. Output is sorted and deterministic;
//! `LIOUVILLE_THREADS` caps the worker pool and is the only environment
//! knob.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{
    Cell, ComplexError, DelaunayReport, DomainReport, EdgeLengthManifold, GeometricComplex,
    Isomorphism, VertexId,
};
use crate::conformal::{mobius_image, verify_liouville, ConformalError, ConformalFactors};
use crate::flatness::{
    flatness_check_embedded, polygon_inequality_check, realize_link_polyhedron, tilde_lengths,
    FlatnessError, RealizationOutcome,
};
use crate::geometry::{GeometryError, MobiusTransform, Point, SimilarityParams, Sphere};
use crate::hyperbolic::{invariant_profile, invariant_profile_lengths, HyperbolicError};
use crate::sampling::{delaunay_complex, point_cloud, SamplingError};
use crate::tol;

pub const COMPLEX_HEADER: &str = "liouville complex v1";
pub const MAP_HEADER: &str = "liouville map v1";
pub const TRANSFORM_HEADER: &str = "liouville transform v1";
pub const FACTORS_HEADER: &str = "liouville factors v1";

/// Attempts per generated point cloud before reporting failure.
const GENERATE_ATTEMPTS: usize = 16;
/// Randomized starts for length-only link realization.
const REALIZE_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
}

fn at(line: usize, message: impl std::fmt::Display) -> ParseError {
    ParseError {
        message: format!("line {line}: {message}"),
    }
}

fn whole(message: impl std::fmt::Display) -> ParseError {
    ParseError {
        message: message.to_string(),
    }
}

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Flatness(#[from] FlatnessError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// A parsed complex file: embedded with coordinates, or combinatorics plus
/// edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexFile {
    Geometric(GeometricComplex),
    Lengths(EdgeLengthManifold),
}

/// Comment-stripped, tokenized lines paired with 1-based line numbers.
fn significant_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                None
            } else {
                Some((i + 1, line.split_whitespace().collect()))
            }
        })
        .collect()
}

fn expect_header(lines: &[(usize, Vec<&str>)], header: &str) -> Result<(), ParseError> {
    match lines.first() {
        Some(&(line, ref tokens)) if tokens.join(" ") == header => {
            let _ = line;
            Ok(())
        }
        Some(&(line, _)) => Err(at(line, format!("expected header '{header}'"))),
        None => Err(whole(format!("empty file; expected header '{header}'"))),
    }
}

fn parse_id(line: usize, token: &str) -> Result<VertexId, ParseError> {
    token
        .parse::<VertexId>()
        .map_err(|_| at(line, format!("bad vertex id '{token}'")))
}

fn parse_float(line: usize, token: &str) -> Result<f64, ParseError> {
    let value = token
        .parse::<f64>()
        .map_err(|_| at(line, format!("bad number '{token}'")))?;
    if !value.is_finite() {
        return Err(at(line, format!("non-finite value '{token}'")));
    }
    Ok(value)
}

fn parse_dimension(line: usize, tokens: &[&str]) -> Result<usize, ParseError> {
    if tokens.len() != 2 || tokens[0] != "dimension" {
        return Err(at(line, "expected 'dimension n' as the first record"));
    }
    let n = tokens[1]
        .parse::<usize>()
        .map_err(|_| at(line, format!("bad dimension '{}'", tokens[1])))?;
    if n == 0 {
        return Err(at(line, "dimension must be at least 1"));
    }
    Ok(n)
}

/// Parse a complex file. The variant is decided by whether the vertex
/// records carry coordinates.
pub fn parse_complex(text: &str) -> Result<ComplexFile, ParseError> {
    let lines = significant_lines(text);
    expect_header(&lines, COMPLEX_HEADER)?;
    let mut records = lines[1..].iter();
    let &(line, ref tokens) = records
        .next()
        .ok_or_else(|| whole("missing 'dimension n' record"))?;
    let dimension = parse_dimension(line, tokens)?;

    let mut coords: BTreeMap<VertexId, Point> = BTreeMap::new();
    let mut bare: BTreeSet<VertexId> = BTreeSet::new();
    let mut cells: Vec<(usize, Vec<VertexId>)> = Vec::new();
    let mut lengths: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    let mut first_coord_line = None;
    let mut first_bare_line = None;
    let mut first_length_line = None;

    for &(line, ref tokens) in records {
        match tokens[0] {
            "dimension" => return Err(at(line, "repeated 'dimension' record")),
            "vertex" => {
                if tokens.len() < 2 {
                    return Err(at(line, "vertex record needs an id"));
                }
                let id = parse_id(line, tokens[1])?;
                if coords.contains_key(&id) || bare.contains(&id) {
                    return Err(at(line, format!("repeated vertex {id}")));
                }
                match tokens.len() - 2 {
                    0 => {
                        first_bare_line.get_or_insert(line);
                        bare.insert(id);
                    }
                    c if c == dimension => {
                        first_coord_line.get_or_insert(line);
                        let mut p = Point::zeros(dimension);
                        for (k, token) in tokens[2..].iter().enumerate() {
                            p[k] = parse_float(line, token)?;
                        }
                        coords.insert(id, p);
                    }
                    c => {
                        return Err(at(
                            line,
                            format!("vertex record needs 0 or {dimension} coordinates, got {c}"),
                        ));
                    }
                }
            }
            "cell" => {
                if tokens.len() != dimension + 2 {
                    return Err(at(
                        line,
                        format!(
                            "cell record needs {} vertices, got {}",
                            dimension + 1,
                            tokens.len() - 1
                        ),
                    ));
                }
                let mut cell = Vec::with_capacity(dimension + 1);
                for token in &tokens[1..] {
                    cell.push(parse_id(line, token)?);
                }
                cells.push((line, cell));
            }
            "length" => {
                if tokens.len() != 4 {
                    return Err(at(line, "length record needs 'length a b value'"));
                }
                first_length_line.get_or_insert(line);
                let a = parse_id(line, tokens[1])?;
                let b = parse_id(line, tokens[2])?;
                if a == b {
                    return Err(at(line, format!("length from vertex {a} to itself")));
                }
                let value = parse_float(line, tokens[3])?;
                let key = (a.min(b), a.max(b));
                if lengths.insert(key, value).is_some() {
                    return Err(at(line, format!("repeated length for edge {key:?}")));
                }
            }
            other => return Err(at(line, format!("unknown record '{other}'"))),
        }
    }

    if let (Some(c), Some(b)) = (first_coord_line, first_bare_line) {
        return Err(at(
            c.max(b),
            "every vertex record needs coordinates, or none of them",
        ));
    }
    if let (Some(c), Some(l)) = (first_coord_line, first_length_line) {
        return Err(at(
            c.max(l),
            "length records and vertex coordinates are mutually exclusive",
        ));
    }

    let declared: BTreeSet<VertexId> = if first_coord_line.is_some() {
        coords.keys().copied().collect()
    } else {
        bare.iter().copied().collect()
    };
    for &(line, ref cell) in &cells {
        for v in cell {
            if !declared.contains(v) {
                return Err(at(line, format!("cell references undeclared vertex {v}")));
            }
        }
    }
    let cell_list: Vec<Vec<VertexId>> = cells.into_iter().map(|(_, c)| c).collect();

    if first_length_line.is_some() || (coords.is_empty() && !bare.is_empty()) {
        let manifold =
            EdgeLengthManifold::new(dimension, cell_list, lengths).map_err(whole)?;
        Ok(ComplexFile::Lengths(manifold))
    } else {
        let complex = GeometricComplex::new(dimension, coords, cell_list).map_err(whole)?;
        Ok(ComplexFile::Geometric(complex))
    }
}

pub fn write_complex(k: &GeometricComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{COMPLEX_HEADER}");
    let _ = writeln!(out, "dimension {}", k.dimension());
    for (&v, p) in k.vertices() {
        let _ = write!(out, "vertex {v}");
        for x in p.iter() {
            let _ = write!(out, " {x:.16e}");
        }
        out.push('\n');
    }
    for cell in k.cells() {
        write_cell(&mut out, cell);
    }
    out
}

pub fn write_manifold(m: &EdgeLengthManifold) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{COMPLEX_HEADER}");
    let _ = writeln!(out, "dimension {}", m.dimension());
    for v in m.vertex_ids() {
        let _ = writeln!(out, "vertex {v}");
    }
    for cell in m.cells() {
        write_cell(&mut out, cell);
    }
    for (&(a, b), &l) in m.lengths() {
        let _ = writeln!(out, "length {a} {b} {l:.16e}");
    }
    out
}

fn write_cell(out: &mut String, cell: &[VertexId]) {
    let _ = write!(out, "cell");
    for v in cell {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

pub fn parse_map(text: &str) -> Result<Isomorphism, ParseError> {
    let lines = significant_lines(text);
    expect_header(&lines, MAP_HEADER)?;
    let mut forward = BTreeMap::new();
    for &(line, ref tokens) in &lines[1..] {
        match tokens[0] {
            // Informative provenance only; the command line names the files.
            "source" | "target" => {}
            "pair" => {
                if tokens.len() != 3 {
                    return Err(at(line, "pair record needs 'pair v v''"));
                }
                let v = parse_id(line, tokens[1])?;
                let w = parse_id(line, tokens[2])?;
                if forward.insert(v, w).is_some() {
                    return Err(at(line, format!("vertex {v} mapped twice")));
                }
            }
            other => return Err(at(line, format!("unknown record '{other}'"))),
        }
    }
    if forward.is_empty() {
        return Err(whole("map has no pair records"));
    }
    Ok(Isomorphism::new(forward))
}

pub fn write_map(phi: &Isomorphism, source: Option<&str>, target: Option<&str>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAP_HEADER}");
    if let Some(s) = source {
        let _ = writeln!(out, "source {s}");
    }
    if let Some(t) = target {
        let _ = writeln!(out, "target {t}");
    }
    for (&v, &w) in phi.map() {
        let _ = writeln!(out, "pair {v} {w}");
    }
    out
}

/// Parse a transform file into the composition of its primitives, first line
/// applied first. An empty body is the identity.
pub fn parse_transform(
    text: &str,
    allow_matrix: bool,
    tolerance: f64,
) -> Result<MobiusTransform, ParseError> {
    let lines = significant_lines(text);
    expect_header(&lines, TRANSFORM_HEADER)?;
    let mut records = lines[1..].iter();
    let &(line, ref tokens) = records
        .next()
        .ok_or_else(|| whole("missing 'dimension n' record"))?;
    let n = parse_dimension(line, tokens)?;

    let mut composed = MobiusTransform::identity(n);
    for &(line, ref tokens) in records {
        let floats = |expected: usize| -> Result<Vec<f64>, ParseError> {
            if tokens.len() != expected + 1 {
                return Err(at(
                    line,
                    format!(
                        "'{}' record needs {expected} numbers, got {}",
                        tokens[0],
                        tokens.len() - 1
                    ),
                ));
            }
            tokens[1..].iter().map(|t| parse_float(line, t)).collect()
        };
        let primitive = match tokens[0] {
            "inversion" => {
                let values = floats(n + 1)?;
                let center = Point::from_column_slice(&values[..n]);
                let sphere = Sphere::new(center, values[n]).map_err(|e| at(line, e))?;
                MobiusTransform::sphere_inversion(&sphere)
            }
            "similarity" => {
                let values = floats(1 + n * n + n)?;
                let params = SimilarityParams {
                    scale: values[0],
                    rotation: DMatrix::from_row_slice(n, n, &values[1..1 + n * n]),
                    translation: Point::from_column_slice(&values[1 + n * n..]),
                };
                MobiusTransform::similarity(&params, tolerance).map_err(|e| at(line, e))?
            }
            "matrix" => {
                if !allow_matrix {
                    return Err(at(line, "raw matrix records need --allow-matrix"));
                }
                let k = n + 2;
                let values = floats(k * k)?;
                let matrix = DMatrix::from_row_slice(k, k, &values);
                MobiusTransform::from_matrix(matrix, tolerance).map_err(|e| at(line, e))?
            }
            other => return Err(at(line, format!("unknown record '{other}'"))),
        };
        composed = primitive.compose(&composed);
    }
    Ok(composed)
}

pub fn write_factors(factors: &ConformalFactors) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FACTORS_HEADER}");
    for (&v, &u) in factors.u() {
        let _ = writeln!(out, "u {v} {u:.16e}");
    }
    out
}

#[derive(Parser)]
#[command(
    name = "liouville",
    version,
    about = "Discrete conformal rigidity for simplicial complexes",
    after_help = "Exit codes:\n  \
        0  success; for verify, Möbius equivalent\n  \
        1  error, or a validation that came back negative\n  \
        2  verify only: conformally but not Möbius equivalent\n  \
        3  verify only: not conformally equivalent\n\n\
        LIOUVILLE_THREADS caps the worker pool."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a complex is a locally Delaunay discrete domain.
    Validate(ValidateArgs),
    /// Decide whether two complexes are Möbius equivalent under a vertex map.
    Verify(VerifyArgs),
    /// Apply a Möbius transformation and record the induced scale factors.
    Apply(ApplyArgs),
    /// Test conformal flatness of interior vertex stars.
    Flatness(FlatnessArgs),
    /// Print the cross-ratio and cone-angle profile of a complex.
    Invariants(InvariantsArgs),
    /// Build a Delaunay complex over seeded random points.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Complex file with vertex coordinates.
    complex: PathBuf,
    /// Cosphericity tolerance for the Delaunay test.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Source complex file.
    source: PathBuf,
    /// Target complex file.
    target: PathBuf,
    /// Vertex map file from source to target.
    map: PathBuf,
    /// Equivalence tolerance on residuals and transform agreement.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct ApplyArgs {
    /// Complex file with vertex coordinates.
    complex: PathBuf,
    /// Transform file listing primitives in application order.
    transform: PathBuf,
    /// Output path for the image; scale factors go to '<output>.u'.
    #[arg(short, long)]
    output: PathBuf,
    /// Accept raw 'matrix' records in the transform file.
    #[arg(long)]
    allow_matrix: bool,
    /// Validation tolerance for rotations and raw matrices.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct FlatnessArgs {
    /// Complex file; coordinates unless --abstract is given.
    complex: PathBuf,
    /// Restrict the check to one interior vertex.
    #[arg(long)]
    vertex: Option<VertexId>,
    /// Use edge lengths only: polygon inequalities in dimension 2, numerical
    /// link realization in dimension 3.
    #[arg(long = "abstract")]
    lengths_only: bool,
    /// Convexity tolerance for the embedded check.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct InvariantsArgs {
    /// Complex file, with coordinates or with edge lengths.
    complex: PathBuf,
    /// Accepted for interface uniformity; this command has no
    /// tolerance-dependent step.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of points to sample in the unit cube.
    #[arg(long)]
    points: usize,
    /// Seed; the output is a pure function of points, seed, and dim.
    #[arg(long)]
    seed: u64,
    /// Ambient dimension.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Output path for the complex file.
    #[arg(short, long)]
    output: PathBuf,
    /// Cosphericity tolerance for the Delaunay check.
    #[arg(long)]
    tol: Option<f64>,
}

/// Entry point for the binary. Returns instead of exiting so tests can call
/// straight into it.
pub fn main_entry() -> ExitCode {
    let _ = env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or("warn"),
    )
    .try_init();
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() {
    let Ok(value) = std::env::var("LIOUVILLE_THREADS") else {
        return;
    };
    match value.parse::<usize>() {
        Ok(count) if count > 0 => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build_global();
        }
        _ => log::warn!("ignoring LIOUVILLE_THREADS={value:?}: expected a positive integer"),
    }
}

fn run(command: &Command) -> Result<u8, CliError> {
    match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Apply(args) => cmd_apply(args),
        Command::Flatness(args) => cmd_flatness(args),
        Command::Invariants(args) => cmd_invariants(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn read_complex_file(path: &Path) -> Result<ComplexFile, CliError> {
    parse_complex(&read_file(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn read_geometric(path: &Path) -> Result<GeometricComplex, CliError> {
    match read_complex_file(path)? {
        ComplexFile::Geometric(k) => Ok(k),
        ComplexFile::Lengths(_) => Err(CliError::Usage(format!(
            "{}: has edge lengths but no vertex coordinates; this command needs coordinates",
            path.display()
        ))),
    }
}

fn read_map(path: &Path) -> Result<Isomorphism, CliError> {
    parse_map(&read_file(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn resolve_tol(flag: Option<f64>, default: f64) -> Result<f64, CliError> {
    match flag {
        None => Ok(default),
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(CliError::Usage(format!(
            "--tol must be a positive finite number, got {t}"
        ))),
    }
}

fn join_ids(ids: &[VertexId]) -> String {
    ids.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_domain_report(report: &DomainReport) {
    println!("domain:");
    println!("  pure: {}", report.pure);
    println!(
        "  every cell has an interior vertex: {}",
        report.every_cell_has_interior_vertex
    );
    println!(
        "  interior subgraph connected: {}",
        report.interior_subgraph_connected
    );
    println!("  interior vertices: {}", report.interior_vertices.len());
    println!("  boundary faces: {}", report.boundary_faces.len());
    println!("  verdict: {}", report.verdict);
}

fn print_delaunay_report(report: &DelaunayReport) {
    println!("delaunay:");
    println!("  faces tested: {}", report.faces_tested);
    println!("  cospherical contacts: {}", report.cospherical_count);
    println!("  violations: {}", report.violations.len());
    for v in &report.violations {
        println!(
            "  violation: circumball of cell {} contains vertex {} at depth {:.3e}",
            join_ids(&v.cell),
            v.opposite_vertex,
            v.depth
        );
    }
    println!("  verdict: {}", report.verdict);
}

fn cmd_validate(args: &ValidateArgs) -> Result<u8, CliError> {
    let k = read_geometric(&args.complex)?;
    let tolerance = resolve_tol(args.tol, tol::SPHERE)?;
    let domain = k.is_discrete_domain();
    let delaunay = k.is_locally_delaunay(tolerance)?;
    println!(
        "complex: dimension {}, {} vertices, {} cells",
        k.dimension(),
        k.vertices().len(),
        k.cells().len()
    );
    print_domain_report(&domain);
    print_delaunay_report(&delaunay);
    if domain.verdict && delaunay.verdict {
        println!("overall: valid");
        Ok(0)
    } else {
        let mut reasons = Vec::new();
        if !domain.verdict {
            reasons.push(if domain.interior_vertices.is_empty() {
                "no interior vertex"
            } else {
                "not a discrete domain"
            });
        }
        if !delaunay.verdict {
            reasons.push("not locally Delaunay");
        }
        println!("overall: invalid ({})", reasons.join("; "));
        Ok(1)
    }
}

fn print_matrix(m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        println!("  {}", row.join(" "));
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let k = read_geometric(&args.source)?;
    let k_prime = read_geometric(&args.target)?;
    let phi = read_map(&args.map)?;
    let tolerance = resolve_tol(args.tol, tol::MOBIUS_EQ)?;
    let verdict = verify_liouville(&k, &k_prime, &phi, tolerance)?;
    println!(
        "conformally equivalent: {}",
        verdict.conformally_equivalent
    );
    println!("mobius equivalent: {}", verdict.mobius_equivalent);
    if let Some(factors) = &verdict.factors {
        println!("residual: {:.16e}", factors.residual());
        for (&v, &u) in factors.u() {
            println!("u {v} {u:.16e}");
        }
    }
    println!(
        "max cell disagreement: {:.16e}",
        verdict.max_cell_disagreement
    );
    if let Some(transform) = &verdict.transform {
        println!("transform:");
        print_matrix(transform.matrix());
    }
    Ok(if verdict.mobius_equivalent {
        0
    } else if verdict.conformally_equivalent {
        2
    } else {
        3
    })
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".u");
    PathBuf::from(name)
}

fn cmd_apply(args: &ApplyArgs) -> Result<u8, CliError> {
    let k = read_geometric(&args.complex)?;
    let tolerance = resolve_tol(args.tol, tol::SIMILARITY)?;
    let text = read_file(&args.transform)?;
    let transform =
        parse_transform(&text, args.allow_matrix, tolerance).map_err(|source| CliError::Parse {
            path: args.transform.clone(),
            source,
        })?;
    if transform.dimension() != k.dimension() {
        return Err(CliError::Usage(format!(
            "transform dimension {} does not match complex dimension {}",
            transform.dimension(),
            k.dimension()
        )));
    }
    let (image, factors) = mobius_image(&k, &transform)?;
    write_file(&args.output, &write_complex(&image))?;
    let sidecar = sidecar_path(&args.output);
    write_file(&sidecar, &write_factors(&factors))?;
    println!(
        "wrote {} and {}",
        args.output.display(),
        sidecar.display()
    );
    Ok(0)
}

fn select_interior(
    interior: BTreeSet<VertexId>,
    requested: Option<VertexId>,
) -> Result<Vec<VertexId>, CliError> {
    match requested {
        Some(v) if interior.contains(&v) => Ok(vec![v]),
        Some(v) => Err(FlatnessError::NotInterior(v).into()),
        None => Ok(interior.into_iter().collect()),
    }
}

fn cmd_flatness(args: &FlatnessArgs) -> Result<u8, CliError> {
    let file = read_complex_file(&args.complex)?;
    if args.lengths_only {
        let manifold = match file {
            ComplexFile::Geometric(k) => k.to_manifold(),
            ComplexFile::Lengths(m) => m,
        };
        return flatness_from_lengths(&manifold, args.vertex);
    }
    let ComplexFile::Geometric(k) = file else {
        return Err(CliError::Usage(format!(
            "{}: the embedded check needs coordinates; pass --abstract for a length-only check",
            args.complex.display()
        )));
    };
    let tolerance = resolve_tol(args.tol, tol::CONVEXITY)?;
    let targets = select_interior(k.interior_vertices(), args.vertex)?;
    if targets.is_empty() {
        println!("no interior vertices; flatness holds vacuously");
        return Ok(0);
    }
    let mut all_flat = true;
    for v in targets {
        let certificate = flatness_check_embedded(&k, v, tolerance)?;
        if certificate.convex {
            println!(
                "vertex {v}: flat (min clearance {:.3e})",
                certificate.min_clearance
            );
        } else {
            all_flat = false;
            let worst = certificate
                .violations
                .iter()
                .map(|w| w.signed_distance)
                .fold(0.0, f64::max);
            println!(
                "vertex {v}: not flat ({} violations, worst depth {:.3e})",
                certificate.violations.len(),
                worst
            );
        }
    }
    println!("overall: {}", if all_flat { "flat" } else { "not flat" });
    Ok(if all_flat { 0 } else { 1 })
}

fn flatness_from_lengths(
    m: &EdgeLengthManifold,
    requested: Option<VertexId>,
) -> Result<u8, CliError> {
    let targets = select_interior(m.interior_vertices(), requested)?;
    if targets.is_empty() {
        println!("no interior vertices; flatness holds vacuously");
        return Ok(0);
    }
    match m.dimension() {
        2 => {
            println!(
                "criterion: every scaled link length strictly below the sum of the others"
            );
            let mut all_flat = true;
            for v in targets {
                let tilde = tilde_lengths(m, v)?;
                let sides: Vec<f64> = tilde.lengths().values().copied().collect();
                let flat = polygon_inequality_check(&sides)?;
                all_flat &= flat;
                println!("vertex {v}: {}", if flat { "flat" } else { "not flat" });
            }
            println!("overall: {}", if all_flat { "flat" } else { "not flat" });
            Ok(if all_flat { 0 } else { 1 })
        }
        3 => {
            let mut all_certified = true;
            for v in targets {
                let tilde = tilde_lengths(m, v)?;
                let facets: BTreeSet<Cell> = m
                    .star_cells(v)
                    .iter()
                    .map(|cell| cell.iter().copied().filter(|&w| w != v).collect())
                    .collect();
                match realize_link_polyhedron(&facets, &tilde, REALIZE_ATTEMPTS)? {
                    RealizationOutcome::Realized(_) => {
                        println!("vertex {v}: certified (convex link realized)");
                    }
                    RealizationOutcome::Inconclusive { best_residual } => {
                        all_certified = false;
                        println!(
                            "vertex {v}: inconclusive (best residual {best_residual:.3e})"
                        );
                    }
                }
            }
            if all_certified {
                println!("overall: certified");
                Ok(0)
            } else {
                // Realization is a search; failure certifies nothing.
                println!("overall: inconclusive");
                Ok(1)
            }
        }
        n => Err(CliError::Usage(format!(
            "length-only flatness is implemented for dimensions 2 and 3, not {n}"
        ))),
    }
}

fn cmd_invariants(args: &InvariantsArgs) -> Result<u8, CliError> {
    resolve_tol(args.tol, 1.0)?;
    let file = read_complex_file(&args.complex)?;
    let profile = match &file {
        ComplexFile::Geometric(k) => invariant_profile(k)?,
        ComplexFile::Lengths(m) => invariant_profile_lengths(m)?,
    };
    println!("cross-ratios: {}", profile.cross_ratios().len());
    for (&(_, quad), &value) in profile.cross_ratios() {
        println!(
            "cross-ratio {} {} {} {} {value:.16e}",
            quad[0], quad[1], quad[2], quad[3]
        );
    }
    println!("cone angles: {}", profile.cone_angles().len());
    for (&(a, b), &angle) in profile.cone_angles() {
        println!("cone-angle {a} {b} {angle:.16e}");
    }
    match &file {
        ComplexFile::Lengths(m) if m.dimension() == 3 => {
            println!("note: cone angles need vertex coordinates; none computed");
        }
        ComplexFile::Geometric(k) if k.dimension() != 3 => {
            println!("note: cone angles are only defined in dimension 3");
        }
        _ => {}
    }
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, CliError> {
    if args.dim < 2 {
        return Err(CliError::Usage(format!(
            "--dim must be at least 2, got {}",
            args.dim
        )));
    }
    if args.points < args.dim + 1 {
        return Err(CliError::Usage(format!(
            "--points must be at least {} in dimension {}",
            args.dim + 1,
            args.dim
        )));
    }
    let tolerance = resolve_tol(args.tol, tol::SPHERE)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut last: Option<GeometricComplex> = None;
    for _ in 0..GENERATE_ATTEMPTS {
        let points = point_cloud(args.points, args.dim, &mut rng);
        let Ok(k) = delaunay_complex(&points, args.dim) else {
            // Degenerate cloud; the next draw resamples.
            continue;
        };
        let valid = k.is_discrete_domain().verdict && k.is_locally_delaunay(tolerance)?.verdict;
        last = Some(k);
        if valid {
            break;
        }
    }
    let Some(k) = last else {
        return Err(CliError::Usage(format!(
            "every cloud of {} points over {GENERATE_ATTEMPTS} attempts was degenerate",
            args.points
        )));
    };
    write_file(&args.output, &write_complex(&k))?;
    println!(
        "wrote {} ({} vertices, {} cells)",
        args.output.display(),
        k.vertices().len(),
        k.cells().len()
    );
    let valid = k.is_discrete_domain().verdict && k.is_locally_delaunay(tolerance)?.verdict;
    if valid {
        Ok(0)
    } else {
        eprintln!(
            "no attempt out of {GENERATE_ATTEMPTS} produced a valid domain; wrote the last candidate"
        );
        Ok(1)
    }
}
