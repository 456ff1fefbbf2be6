//! Command-line entry point: tiling generation, curvature reports, Dirichlet
//! solves, harmonic extension, surface measurements, the verification
//! suites, and dimension estimation.
//!
//! Every run echoes its fully resolved configuration into the output header;
//! identical configurations produce byte-identical outputs. Exit codes:
//! 0 success, 1 a numeric bound failed, 2 input or parameter error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use semiplanar::analysis::{
    ball_transfer_check, energy_bound_report, estimate_dimension, graph_mvi_sweep,
    harmonic_family, harnack_sweep, lipschitz_equivalence_report, sample_vertex_pairs,
    trace_control_report, trace_lower_check, trace_upper_check, verify_graph_volume,
    verify_poincare, verify_surface_mvi, verify_surface_volume, InequalityReport,
};
use semiplanar::extension::ExtendedField;
use semiplanar::field::{load_field, save_field, ScalarField};
use semiplanar::laplace::DirichletProblem;
use semiplanar::report::{any_bound_failure, reports_to_json, write_reports_csv};
use semiplanar::surface::{planar_layout, MetricMesh, SurfacePoint};
use semiplanar::tiling::{generate, load_graph, save_graph, TilingKind, TilingSpec};
use semiplanar::SemiplanarGraph;

#[derive(Parser)]
#[command(
    name = "semiplanar",
    version,
    about = "Curvature, harmonic functions, and polygonal-surface analysis on semiplanar graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Rvc,
    Poincare,
    Mvi,
    Gram,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Rvc => "rvc",
            Suite::Poincare => "poincare",
            Suite::Mvi => "mvi",
            Suite::Gram => "gram",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ball of a supported tiling and write the graph file.
    Gen {
        /// Vertex configuration, e.g. 4^4, 6^3, 4.8.8, 3.3.4.3.4.
        #[arg(long)]
        kind: String,
        /// Hop radius guaranteed inside the truncation.
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact curvature report for every interior vertex.
    Curvature {
        #[arg(long)]
        graph: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a Dirichlet problem on a graph ball.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        /// Ball as `p,R` (center vertex id, hop radius).
        #[arg(long)]
        ball: String,
        /// Boundary data: one | x | y | xy | x2-y2 | const:<v> |
        /// random:<seed> | file:<path>. Coordinate data needs a flat patch.
        #[arg(long)]
        boundary: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iterations: usize,
    },
    /// Extend a vertex field to per-face Fourier data.
    Extend {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        field: PathBuf,
        /// Harmonics kept per face.
        #[arg(long = "K", default_value_t = 64)]
        k: usize,
        /// Uniform boundary samples per face (at least 8K).
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Surface-ball areas against the mesh metric.
    Surface {
        #[arg(long)]
        graph: PathBuf,
        /// Ball as `p,R` (vertex id, real radius).
        #[arg(long = "ball-volume")]
        ball_volume: String,
        /// Additional radii sharing the same distance field.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        /// Mesh refinement step.
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write the report.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Center vertex (generated graphs place it at 0).
        #[arg(long, default_value_t = 0)]
        center: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Graph-ball radii.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        radii: Vec<usize>,
        /// Surface-ball radii.
        #[arg(long = "surface-radii", value_delimiter = ',', default_value = "1,2,3")]
        surface_radii: Vec<f64>,
        /// Mesh refinement step.
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        /// Random fields per sweep.
        #[arg(long, default_value_t = 8)]
        fields: usize,
        /// Harmonics per face for extension-based rows.
        #[arg(long = "K", default_value_t = 32)]
        k: usize,
        /// Boundary samples per face.
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Quadrature slack multiplying the surface volume bounds.
        #[arg(long = "quad-slack", default_value_t = 0.05, allow_negative_numbers = true)]
        quad_slack: f64,
        /// Mesh slack added to the upper bi-Lipschitz bound.
        #[arg(long = "mesh-slack", default_value_t = 0.02, allow_negative_numbers = true)]
        mesh_slack: f64,
    },
    /// Estimate the dimension of the polynomial-growth harmonic space.
    Dim {
        #[arg(long)]
        graph: PathBuf,
        /// Growth rate.
        #[arg(long)]
        d: f64,
        /// Radius schedule (at least three entries).
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
        radii: Vec<usize>,
        /// Relative eigenvalue cutoff.
        #[arg(long, default_value_t = 1e-8)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        center: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(raw: &str) -> Result<(usize, f64)> {
    let (p, r) = raw
        .split_once(',')
        .ok_or_else(|| anyhow!("expected `p,R`, got `{raw}`"))?;
    Ok((p.trim().parse()?, r.trim().parse()?))
}

fn graph_descriptor(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Boundary data forms accepted by `solve`.
fn boundary_field(graph: &SemiplanarGraph, spec: &str) -> Result<ScalarField> {
    let vertex_count = graph.vertex_count();
    if let Some(value) = spec.strip_prefix("const:") {
        return Ok(ScalarField::constant(vertex_count, value.parse()?));
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        return Ok(ScalarField::random(vertex_count, seed.parse()?, -1.0, 1.0));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(load_field(path, vertex_count)?);
    }
    if spec == "one" {
        return Ok(ScalarField::constant(vertex_count, 1.0));
    }
    let layout = planar_layout(graph)
        .context("coordinate boundary data requires a flat (developable) patch")?;
    let f: fn(f64, f64) -> f64 = match spec {
        "x" => |x, _| x,
        "y" => |_, y| y,
        "xy" => |x, y| x * y,
        "x2-y2" => |x, y| x * x - y * y,
        other => bail!("unknown boundary spec `{other}`"),
    };
    Ok(ScalarField::full(
        (0..vertex_count)
            .map(|v| layout.get(v).map_or(0.0, |c| f(c[0], c[1])))
            .collect(),
    ))
}

struct VerifyOutput {
    reports: Vec<InequalityReport>,
    notes: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn run_suite(
    graph: &SemiplanarGraph,
    descriptor: &str,
    suite: Suite,
    center: usize,
    seed: u64,
    radii: &[usize],
    surface_radii: &[f64],
    h: f64,
    field_count: usize,
    harmonics: usize,
    samples: usize,
    quad_slack: f64,
    mesh_slack: f64,
) -> Result<VerifyOutput> {
    let mut reports = Vec::new();
    let mut notes = Vec::new();
    let max_graph_r = radii.iter().copied().max().unwrap_or(2);
    let max_surface_r = surface_radii.iter().copied().fold(0.0, f64::max);

    let want = |s: Suite| suite == Suite::All || suite == s;

    let mesh = if want(Suite::Rvc) || want(Suite::Mvi) || want(Suite::Gram) {
        Some(MetricMesh::build(graph, h)?)
    } else {
        None
    };

    if want(Suite::Rvc) {
        reports.extend(verify_graph_volume(graph, descriptor, center, radii)?);
        let mesh = mesh.as_ref().unwrap();
        let p = SurfacePoint::at_vertex(graph, center)?;
        reports.extend(verify_surface_volume(mesh, descriptor, &p, surface_radii, quad_slack)?);
    }

    if want(Suite::Poincare) {
        let r = max_graph_r;
        let mut family = harmonic_family(graph, center, r, field_count, seed, -1.0, 1.0)?;
        family.push(ScalarField::random(graph.vertex_count(), seed ^ 0x5eed, -1.0, 1.0));
        reports.push(verify_poincare(graph, descriptor, center, r, 1.0, &family)?);
    }

    if want(Suite::Mvi) {
        reports.push(harnack_sweep(graph, descriptor, center, radii, 2, field_count, seed)?);
        reports.push(graph_mvi_sweep(graph, descriptor, center, radii, field_count, seed)?);

        let mesh = mesh.as_ref().unwrap();
        let p = SurfacePoint::at_vertex(graph, center)?;
        let c3 = semiplanar::surface::face_diameter_bound(graph.max_face_degree());
        let domain = max_surface_r.ceil() as usize + c3.ceil() as usize + 2;
        let family = harmonic_family(graph, center, domain, field_count, seed, -1.0, 1.0)?;
        let extensions: Vec<ExtendedField> = family
            .iter()
            .map(|f| ExtendedField::extend(graph, f, harmonics, samples))
            .collect::<semiplanar::Result<_>>()?;
        reports.extend(verify_surface_mvi(mesh, descriptor, &p, surface_radii, &extensions)?);
        reports.push(energy_bound_report(descriptor, &extensions));
        reports.extend(trace_control_report(descriptor, &extensions, 24)?);

        // Pair spread stays well below the rim distance so the safe-region
        // guard of the mesh metric cannot trip.
        let pair_radius = (max_graph_r / 2).max(1);
        let pairs = sample_vertex_pairs(graph, center, pair_radius, 100, seed)?;
        let lip = lipschitz_equivalence_report(graph, mesh, descriptor, &pairs, mesh_slack)?;
        let c_lower = lip
            .iter()
            .find(|r| r.sample.contains("min"))
            .map(|r| r.measured)
            .unwrap_or(0.5);
        reports.extend(lip);
        let transfer_r = 2 * max_graph_r;
        match ball_transfer_check(graph, mesh, descriptor, &p, center, transfer_r, c_lower) {
            Ok(row) => reports.push(row),
            Err(err) => notes.push(format!("ball transfer skipped: {err}")),
        }
    }

    if want(Suite::Gram) {
        match planar_layout(graph) {
            Ok(layout) => {
                let coord = |axis: usize| {
                    ScalarField::full(
                        (0..graph.vertex_count())
                            .map(|v| layout.get(v).map_or(0.0, |c| c[axis]))
                            .collect(),
                    )
                };
                let ones = ScalarField::constant(graph.vertex_count(), 1.0);
                let (x, y) = (coord(0), coord(1));
                let fields = vec![
                    ("1".to_string(), &ones),
                    ("x".to_string(), &x),
                    ("y".to_string(), &y),
                ];
                let lower =
                    trace_lower_check(graph, descriptor, &fields, center, 1.0, 1.5, 0.1, radii)?;
                reports.push(lower.report);

                let mesh = mesh.as_ref().unwrap();
                let p = SurfacePoint::at_vertex(graph, center)?;
                let extensions: Vec<(String, ExtendedField)> = [("1", &ones), ("x", &x), ("y", &y)]
                    .into_iter()
                    .map(|(name, f)| {
                        Ok((
                            name.to_string(),
                            ExtendedField::extend(graph, f, harmonics, samples)?,
                        ))
                    })
                    .collect::<semiplanar::Result<_>>()?;
                let borrowed: Vec<(String, &ExtendedField)> =
                    extensions.iter().map(|(n, e)| (n.clone(), e)).collect();
                reports.push(trace_upper_check(
                    mesh,
                    descriptor,
                    &borrowed,
                    &p,
                    max_surface_r,
                    0.25,
                )?);
            }
            Err(err) => notes.push(format!(
                "gram suite skipped (needs a developable patch for coordinate candidates): {err}"
            )),
        }
    }

    Ok(VerifyOutput { reports, notes })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { kind, radius, out } => {
            let parsed: TilingKind = kind.parse()?;
            let patch = generate(TilingSpec { kind: parsed, radius })?;
            save_graph(&patch.graph, &out)?;
            println!(
                "wrote {} ({} vertices, {} faces, D={}, center=0)",
                out.display(),
                patch.graph.vertex_count(),
                patch.graph.face_count(),
                patch.graph.max_face_degree()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Curvature { graph, out } => {
            let g = load_graph(&graph)?;
            let config = json!({
                "command": "curvature",
                "graph": graph_descriptor(&graph),
                "version": env!("CARGO_PKG_VERSION"),
            });
            let check = g.nonnegative_curvature();
            let mut text = String::new();
            text.push_str(&format!("# config: {config}\n"));
            text.push_str(&format!(
                "# nonnegative={} offenders={} skipped_boundary={}\n",
                check.all_nonnegative,
                check.offenders.len(),
                check.skipped_boundary
            ));
            text.push_str("vertex,phi_num,phi_den,phi,total_angle\n");
            for v in 0..g.vertex_count() {
                if g.is_boundary(v) {
                    continue;
                }
                let phi = g.vertex_curvature(v)?;
                text.push_str(&format!(
                    "{v},{},{},{},{}\n",
                    phi.numer(),
                    phi.denom(),
                    *phi.numer() as f64 / *phi.denom() as f64,
                    g.total_angle(v)?
                ));
            }
            write_text(out.as_ref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { graph, ball, boundary, out, tolerance, max_iterations } => {
            let g = load_graph(&graph)?;
            let (p, radius) = parse_pair(&ball)?;
            let data = boundary_field(&g, &boundary)?;
            let mut problem =
                DirichletProblem::on_ball(&g, p, radius as usize, |v| data.value(v).unwrap())?;
            problem.tolerance = tolerance;
            problem.max_iterations = max_iterations;
            let (field, report) = problem.solve()?;
            save_field(&field, &out)?;
            println!(
                "solved ball ({p},{radius}): iterations={} residual={:.3e} method={:?}",
                report.iterations, report.max_residual, report.method
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Extend { graph, field, k, samples, out } => {
            let g = load_graph(&graph)?;
            let f = load_field(&field, g.vertex_count())?;
            let ext = ExtendedField::extend(&g, &f, k, samples)?;
            ext.save(&out)?;
            println!(
                "extended {} faces (K={k}, samples={samples}) to {}",
                ext.extended_faces().count(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Surface { graph, ball_volume, radii, h, out } => {
            let g = load_graph(&graph)?;
            let (p, r) = parse_pair(&ball_volume)?;
            let mut all = vec![r];
            all.extend(radii);
            all.sort_by(f64::total_cmp);
            all.dedup();
            let mesh = MetricMesh::build(&g, h)?;
            let point = SurfacePoint::at_vertex(&g, p)?;
            let volumes = mesh.ball_volumes(&point, &all)?;
            let config = json!({
                "command": "surface",
                "graph": graph_descriptor(&graph),
                "p": p,
                "radii": all,
                "h": h,
                "version": env!("CARGO_PKG_VERSION"),
            });
            let mut text = format!("# config: {config}\np,R,value,eps_quad\n");
            for v in &volumes {
                text.push_str(&format!("{p},{},{},{}\n", v.radius, v.area, v.band_mass));
            }
            write_text(out.as_ref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            graph,
            suite,
            out,
            format,
            center,
            seed,
            radii,
            surface_radii,
            h,
            fields,
            k,
            samples,
            quad_slack,
            mesh_slack,
        } => {
            let g = load_graph(&graph)?;
            let descriptor = graph_descriptor(&graph);
            let config = json!({
                "command": "verify",
                "suite": suite.name(),
                "graph": descriptor,
                "center": center,
                "seed": seed,
                "radii": radii,
                "surface_radii": surface_radii,
                "h": h,
                "fields": fields,
                "K": k,
                "samples": samples,
                "quad_slack": quad_slack,
                "mesh_slack": mesh_slack,
                "version": env!("CARGO_PKG_VERSION"),
            });
            let output = run_suite(
                &g,
                &descriptor,
                suite,
                center,
                seed,
                &radii,
                &surface_radii,
                h,
                fields,
                k,
                samples,
                quad_slack,
                mesh_slack,
            )?;
            match format {
                OutputFormat::Csv => {
                    let mut lines = vec![format!("config: {config}")];
                    lines.extend(output.notes.iter().map(|n| format!("note: {n}")));
                    let mut buffer = Vec::new();
                    write_reports_csv(&mut buffer, &lines, &output.reports)?;
                    std::fs::write(&out, buffer)?;
                }
                OutputFormat::Json => {
                    let doc = reports_to_json(&config, &output.notes, &output.reports);
                    std::fs::write(&out, serde_json::to_string_pretty(&doc)? + "\n")?;
                }
            }
            let failed = any_bound_failure(&output.reports);
            println!(
                "wrote {} ({} rows, {} notes){}",
                out.display(),
                output.reports.len(),
                output.notes.len(),
                if failed { "; numeric bound FAILED" } else { "" }
            );
            Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Dim { graph, d, radii, tau, center, out } => {
            let g = load_graph(&graph)?;
            let layout = planar_layout(&g)
                .context("dimension candidates need a flat (developable) patch")?;
            let config = json!({
                "command": "dim",
                "graph": graph_descriptor(&graph),
                "d": d,
                "radii": radii,
                "tau": tau,
                "center": center,
                "version": env!("CARGO_PKG_VERSION"),
            });
            // Sensitivity sweep over the standard cutoffs plus the requested
            // one.
            let mut taus = vec![1e-6, 1e-8, 1e-10, tau];
            taus.sort_by(f64::total_cmp);
            taus.dedup();
            taus.reverse();
            let mut text = format!("# config: {config}\n");
            text.push_str(
                "tau,estimated,candidates,eig_index,eigenvalue,above_rank_cut,stable,kept,fitted\n",
            );
            let mut requested = 0;
            for &t in &taus {
                let est = estimate_dimension(&g, &layout, center, d, &radii, t)?;
                if t == tau {
                    requested = est.estimated;
                }
                for (i, diag) in est.diagnostics.iter().enumerate() {
                    let fitted: Vec<String> = diag
                        .fitted
                        .iter()
                        .map(|(r, c)| format!("{r}:{c:.6e}"))
                        .collect();
                    text.push_str(&format!(
                        "{t:e},{},{},{i},{:e},{},{},{},\"{}\"\n",
                        est.estimated,
                        est.candidate_count,
                        diag.eigenvalue,
                        diag.above_rank_cut,
                        diag.stable,
                        diag.kept,
                        fitted.join(" ")
                    ));
                }
            }
            write_text(out.as_ref(), &text)?;
            println!("dim estimate (d={d}, tau={tau:e}): {requested}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
