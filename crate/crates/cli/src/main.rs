//! Command line front end: rasterized domain topology, Betti numbers of the
//! axially symmetric lift, Runge pair decisions, the randomized verification
//! corpus, and constructive pole-pushed approximation.
//!
//! Machine outputs are JSON on stdout plus SVG/CSV files in `--out-dir`;
//! progress and timing go to stderr so identical inputs produce byte
//! identical artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use axirunge::corpus::{
    equivalence_suite, exact_sequence_suite, norm_lemma_suite, records_to_csv, roundtrip_suite,
    torsion_suite, CorpusConfig, SuiteOutcome,
};
use axirunge::domain::{rasterize, Box2, DomainSpec, SymmetricDomainGrid};
use axirunge::homology::{DomainAnalysis, HomologyError};
use axirunge::planar::PlanarError;
use axirunge::runge::{
    circle_quadrature_bound, obstruction_lower_bound, quaternionic_approx, runge_decide,
    CompactSet, Contour, Disposition, PolePushPlan, RungeError, RungeReport,
};
use axirunge::stem::{ComplexRational, RationalStem};
use axirunge::svg::topology_svg;

const EXIT_NOT_RUNGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NOT_NESTED: u8 = 3;
const EXIT_NOT_APPROXIMABLE: u8 = 4;
const EXIT_INTERNAL: u8 = 70;

/// Coefficient range enumerated per bounded component by the roundtrip suite.
const ROUNDTRIP_SPAN: i64 = 3;
/// Relative slack allowed on the norm comparison constants.
const NORM_SLACK: f64 = 1e-9;
/// Trapezoid nodes for the quadrature cross-check in obstruction reports.
const QUADRATURE_NODES: usize = 4096;

#[derive(Parser)]
#[command(
    name = "axirunge",
    version,
    about = "Topology, homology, and Runge approximation for mirror-symmetric plane domains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rasterize a domain spec and summarize its complement topology.
    Topology(TopologyArgs),
    /// Betti numbers of the axially symmetric lift of a plane domain.
    Betti(BettiArgs),
    /// Decide whether a rasterized nested pair is a Runge pair.
    Runge(RungeArgs),
    /// Run the randomized verification suites over a generated corpus.
    Verify(VerifyArgs),
    /// Approximate a stem function on a compact set by pushing its poles
    /// out of the larger domain.
    Approx(ApproxArgs),
}

#[derive(Args)]
struct RasterArgs {
    /// Grid cells per axis (odd, at least 5).
    #[arg(long, default_value_t = 129)]
    resolution: usize,
    /// Half-width of the square rasterization window.
    #[arg(long = "box", default_value_t = 2.5)]
    box_half: f64,
}

#[derive(Args)]
struct TopologyArgs {
    /// Domain spec file (JSON).
    spec: PathBuf,
    #[command(flatten)]
    raster: RasterArgs,
    /// Directory for the SVG overlay.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BettiArgs {
    /// Domain spec file (JSON).
    spec: PathBuf,
    #[command(flatten)]
    raster: RasterArgs,
}

#[derive(Args)]
struct RungeArgs {
    /// Smaller domain spec file (JSON).
    spec_d: PathBuf,
    /// Larger domain spec file (JSON).
    spec_d1: PathBuf,
    #[command(flatten)]
    raster: RasterArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Domain pairs to generate; each runs at every resolution.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Comma separated grid resolutions.
    #[arg(long, value_delimiter = ',', default_values_t = vec![65, 129, 257])]
    resolutions: Vec<usize>,
    /// Half-width of the square rasterization window.
    #[arg(long = "box", default_value_t = 2.5)]
    box_half: f64,
    /// Domains exercised by the cycle-class roundtrip suite.
    #[arg(long, default_value_t = 50)]
    domains: usize,
    /// Sample points for the norm comparison suite.
    #[arg(long, default_value_t = 10000)]
    samples: usize,
    /// Flip one recorded verdict to prove the suites can fail.
    #[arg(long)]
    inject_bug: bool,
    /// Directory for the per-instance CSV.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ApproxArgs {
    /// Smaller domain spec file (JSON).
    spec_d: PathBuf,
    /// Larger domain spec file (JSON).
    spec_d1: PathBuf,
    /// Stem function file (JSON).
    stem: PathBuf,
    /// Compact evaluation set spec file (JSON), rasterized inside the
    /// smaller domain.
    compact: PathBuf,
    /// Target sup-norm error on the compact set.
    epsilon: f64,
    #[command(flatten)]
    raster: RasterArgs,
    /// Directory for the error-curve CSV.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, message: message.into() }
    }
}

fn map_runge(e: RungeError) -> CliError {
    let message = e.to_string();
    let code = match e {
        RungeError::Planar(PlanarError::NotNested)
        | RungeError::Homology(HomologyError::Planar(PlanarError::NotNested)) => EXIT_NOT_NESTED,
        RungeError::Domain(_)
        | RungeError::Stem(_)
        | RungeError::BadPole(_)
        | RungeError::BadCompact
        | RungeError::AsymmetricCompact => EXIT_PARSE,
        RungeError::NotRunge { .. } | RungeError::DegreeOverflow(_) => EXIT_NOT_APPROXIMABLE,
        RungeError::EquivalenceViolation(_)
        | RungeError::PathNotFound
        | RungeError::Planar(_)
        | RungeError::Homology(_) => EXIT_INTERNAL,
    };
    CliError { code, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.cmd {
        Cmd::Topology(a) => cmd_topology(a),
        Cmd::Betti(a) => cmd_betti(a),
        Cmd::Runge(a) => cmd_runge(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Approx(a) => cmd_approx(a),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

// --- shared plumbing ---------------------------------------------------------

fn read_spec(path: &Path) -> Result<DomainSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    DomainSpec::from_json(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn build_grid(spec: &DomainSpec, raster: &RasterArgs) -> Result<SymmetricDomainGrid, CliError> {
    rasterize(spec, Box2::square(raster.box_half), raster.resolution, raster.resolution)
        .map_err(|e| CliError::parse(e.to_string()))
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<String, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::parse(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn print_json<T: Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serialize output");
    // tolerate a closed pipe (e.g. piping into head)
    let _ = writeln!(std::io::stdout(), "{text}");
}

// --- topology ----------------------------------------------------------------

#[derive(Serialize)]
struct ComponentSummary {
    id: usize,
    cells: usize,
    bounded: bool,
}

#[derive(Serialize)]
struct IntervalSummary {
    /// Inclusive cell-column range on the real row.
    columns: [usize; 2],
    /// World x-extent of those cells.
    x: [f64; 2],
}

#[derive(Serialize)]
struct TopologySummary {
    #[serde(rename = "box")]
    box2: Box2,
    resolution: [usize; 2],
    inside_cells: usize,
    component_count: usize,
    bounded_count: usize,
    components: Vec<ComponentSummary>,
    real_intervals: Vec<IntervalSummary>,
    svg: String,
}

fn cmd_topology(a: TopologyArgs) -> Result<u8, CliError> {
    let spec = read_spec(&a.spec)?;
    let analysis = DomainAnalysis::new(build_grid(&spec, &a.raster)?);
    let g = analysis.grid();
    let atlas = analysis.atlas();

    let svg = write_artifact(&a.out_dir, "topology.svg", &topology_svg(g, atlas))?;
    let components = (0..atlas.comp_count())
        .map(|id| {
            let info = atlas.comp(id);
            ComponentSummary { id, cells: info.size, bounded: info.bounded }
        })
        .collect();
    let real_intervals = analysis
        .real_intervals()
        .iter()
        .map(|&(s, e)| IntervalSummary {
            columns: [s, e],
            x: [g.corner(s as i64, 0).0, g.corner(e as i64 + 1, 0).0],
        })
        .collect();

    print_json(&TopologySummary {
        box2: g.box2(),
        resolution: [g.nx(), g.ny()],
        inside_cells: g.inside_count(),
        component_count: atlas.comp_count(),
        bounded_count: atlas.bounded().len(),
        components,
        real_intervals,
        svg,
    });
    Ok(0)
}

// --- betti -------------------------------------------------------------------

#[derive(Serialize)]
struct BettiInputs {
    /// First Betti number of the plane domain itself.
    planar_b1: usize,
    /// Rank of the reduced 0-homology of the real trace.
    reduced_h0_rank: usize,
    /// Upper-half components that never touch the real axis.
    off_axis_components: usize,
}

#[derive(Serialize)]
struct BettiOutput {
    b1: usize,
    b2: usize,
    b3: usize,
    inputs: BettiInputs,
}

fn cmd_betti(a: BettiArgs) -> Result<u8, CliError> {
    let spec = read_spec(&a.spec)?;
    let analysis = DomainAnalysis::new(build_grid(&spec, &a.raster)?);
    let triple = analysis.betti();
    print_json(&BettiOutput {
        b1: triple.b1,
        b2: triple.b2,
        b3: triple.b3,
        inputs: BettiInputs {
            planar_b1: analysis.h1_rank(),
            reduced_h0_rank: analysis.hhat0().rank,
            off_axis_components: triple.b2,
        },
    });
    Ok(0)
}

// --- runge -------------------------------------------------------------------

fn analyses(
    spec_d: &Path,
    spec_d1: &Path,
    raster: &RasterArgs,
) -> Result<(DomainAnalysis, DomainAnalysis), CliError> {
    let d = DomainAnalysis::new(build_grid(&read_spec(spec_d)?, raster)?);
    let d1 = DomainAnalysis::new(build_grid(&read_spec(spec_d1)?, raster)?);
    Ok((d, d1))
}

fn cmd_runge(a: RungeArgs) -> Result<u8, CliError> {
    let (d, d1) = analyses(&a.spec_d, &a.spec_d1, &a.raster)?;
    let report = runge_decide(&d, &d1).map_err(map_runge)?;
    print_json(&report);
    Ok(if report.runge { 0 } else { EXIT_NOT_RUNGE })
}

// --- verify ------------------------------------------------------------------

#[derive(Serialize)]
struct VerifySummary {
    config: CorpusConfig,
    ok: bool,
    suites: Vec<SuiteOutcome>,
    records_csv: String,
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, CliError> {
    let config = CorpusConfig {
        seed: a.seed,
        count: a.count,
        resolutions: a.resolutions,
        min_primitives: 1,
        max_primitives: 3,
        box2: Box2::square(a.box_half),
    };

    let mut suites = Vec::new();
    let mut record = |name: &str, outcome: SuiteOutcome| {
        eprintln!("{name}: {} instances, {} failures", outcome.instances, outcome.failures.len());
        suites.push(outcome);
    };

    let t = Instant::now();
    let (equivalence, records) = equivalence_suite(&config, a.inject_bug);
    record("equivalence", equivalence);
    record("exact-sequence", exact_sequence_suite(&config));
    record("torsion", torsion_suite(&config));
    record("roundtrip", roundtrip_suite(&config, a.domains, ROUNDTRIP_SPAN));
    record("norm-lemma", norm_lemma_suite(a.seed, a.samples, NORM_SLACK));
    eprintln!("suites finished in {:.2}s", t.elapsed().as_secs_f64());

    let records_csv = write_artifact(&a.out_dir, "verify_records.csv", &records_to_csv(&records))?;
    let ok = suites.iter().all(SuiteOutcome::ok);
    print_json(&VerifySummary { config, ok, suites, records_csv });
    Ok(if ok { 0 } else { EXIT_NOT_RUNGE })
}

// --- approx ------------------------------------------------------------------

#[derive(Serialize)]
struct PathSummary {
    start: [f64; 2],
    steps: usize,
    max_ratio: f64,
    max_degree: usize,
    disposition: String,
}

#[derive(Serialize)]
struct PlanSummary {
    term: usize,
    paths: Vec<PathSummary>,
}

fn summarize_plans(plans: &[PolePushPlan]) -> Vec<PlanSummary> {
    plans
        .iter()
        .enumerate()
        .map(|(term, plan)| PlanSummary {
            term,
            paths: plan
                .paths
                .iter()
                .map(|p| PathSummary {
                    start: [p.start.re, p.start.im],
                    steps: p.steps.len(),
                    max_ratio: p.steps.iter().map(|s| s.ratio).fold(0.0, f64::max),
                    max_degree: p.steps.iter().map(|s| s.degree).max().unwrap_or(0),
                    disposition: match p.disposition {
                        Disposition::Unmoved => "unmoved".into(),
                        Disposition::Target { cell } => format!("cell({},{})", cell.0, cell.1),
                        Disposition::Infinity => "infinity".into(),
                    },
                })
                .collect(),
        })
        .collect()
}

#[derive(Serialize)]
struct ObstructionSummary {
    component: usize,
    center: [f64; 2],
    radius: f64,
    poles_enclosed: usize,
    /// Max over stem terms of the residue lower bound, scaled by the
    /// quaternionic coefficient norm; null when a pole sits on the contour.
    residue_bound: Option<f64>,
    /// Independent trapezoid quadrature of the same integral.
    quadrature_bound: Option<f64>,
}

// One informational contour per filled-in hole: a circle just outside the
// component's cells, so any pole trapped there certifies a minimum distance
// to every polynomial-pole-free competitor.
fn obstruction_reports(
    stem: &RationalStem,
    d: &DomainAnalysis,
    report: &RungeReport,
) -> Vec<ObstructionSummary> {
    let g = d.grid();
    let diag = g.cell_width().hypot(g.cell_height());
    let zero = ComplexRational::zero();
    report
        .missing_components
        .iter()
        .map(|&comp| {
            let pts: Vec<(f64, f64)> = d
                .atlas()
                .cells_of(comp)
                .iter()
                .map(|&(i, j)| g.center(i, j))
                .collect();
            let n = pts.len() as f64;
            let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let spread = pts.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).fold(0.0, f64::max);
            let radius = spread + diag;
            let center = Complex64::new(cx, cy);
            let contour = Contour::Circle { center, radius };

            let poles_enclosed = stem
                .terms()
                .iter()
                .flat_map(|(r, _)| r.pole_terms())
                .filter(|t| (t.location - center).norm() < radius)
                .count();
            let mut residue_bound = Some(0.0f64);
            let mut quadrature_bound = Some(0.0f64);
            for (scalar, coeff) in stem.terms() {
                let w = coeff.norm();
                residue_bound = match (residue_bound, obstruction_lower_bound(scalar, &contour, &zero)) {
                    (Some(best), Ok(b)) => Some(best.max(w * b)),
                    _ => None,
                };
                quadrature_bound = match (
                    quadrature_bound,
                    circle_quadrature_bound(scalar, &zero, center, radius, QUADRATURE_NODES),
                ) {
                    (Some(best), Ok(b)) => Some(best.max(w * b)),
                    _ => None,
                };
            }
            ObstructionSummary {
                component: comp,
                center: [cx, cy],
                radius,
                poles_enclosed,
                residue_bound,
                quadrature_bound,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct ApproxRefusal<'a> {
    runge: bool,
    report: &'a RungeReport,
    obstruction: Vec<ObstructionSummary>,
}

#[derive(Serialize)]
struct ApproxOutput {
    runge: bool,
    result: axirunge::runge::ApproxResult,
    plans: Vec<PlanSummary>,
    approximant: serde_json::Value,
    error_curve: String,
}

fn cmd_approx(a: ApproxArgs) -> Result<u8, CliError> {
    if !(a.epsilon > 0.0) {
        return Err(CliError::parse("epsilon must be positive"));
    }
    let stem_text = fs::read_to_string(&a.stem)
        .map_err(|e| CliError::parse(format!("{}: {e}", a.stem.display())))?;
    let stem = RationalStem::from_json(&stem_text)
        .map_err(|e| CliError::parse(format!("{}: {e}", a.stem.display())))?;
    let spec_k = read_spec(&a.compact)?;
    let (d, d1) = analyses(&a.spec_d, &a.spec_d1, &a.raster)?;

    let report = runge_decide(&d, &d1).map_err(map_runge)?;
    if !report.runge {
        let obstruction = obstruction_reports(&stem, &d, &report);
        print_json(&ApproxRefusal { runge: false, report: &report, obstruction });
        return Ok(EXIT_NOT_APPROXIMABLE);
    }

    let k = CompactSet::from_spec(&spec_k, d.grid()).map_err(map_runge)?;
    let (pushed, plans, result) =
        quaternionic_approx(&stem, &d, &d1, &k, a.epsilon).map_err(map_runge)?;

    // Decade ladder down to the requested accuracy, for regression plots.
    // 10^k is exact up to k = 22, so the reciprocal rounds to the literal.
    let mut ladder = Vec::new();
    for k in 1..=22 {
        let eps = 1.0 / 10f64.powi(k);
        if eps <= a.epsilon {
            break;
        }
        ladder.push(eps);
    }
    ladder.push(a.epsilon);
    let mut curve = String::from("epsilon,total_degree,achieved_complex,achieved_quaternionic\n");
    for &eps in &ladder {
        let (_, _, r) = quaternionic_approx(&stem, &d, &d1, &k, eps).map_err(map_runge)?;
        let quaternionic =
            r.achieved_quaternionic.map(|v| format!("{v:e}")).unwrap_or_default();
        curve.push_str(&format!(
            "{:e},{},{:e},{}\n",
            eps, r.total_degree, r.achieved_complex, quaternionic
        ));
    }
    let error_curve = write_artifact(&a.out_dir, "error_curve.csv", &curve)?;

    let approximant: serde_json::Value =
        serde_json::from_str(&pushed.to_json()).expect("reparse approximant");
    print_json(&ApproxOutput {
        runge: true,
        result,
        plans: summarize_plans(&plans),
        approximant,
        error_curve,
    });
    Ok(0)
}
