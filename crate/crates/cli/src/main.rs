use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kgraph::export::{to_dot, to_json};
use kgraph::factorization::{validate_kg2, validate_kg3, Kg2Report, Kg3Report, SquareSet};
use kgraph::format::{parse, serialize, KgDocument};
use kgraph::kgraph::{isomorphic_with, source_free_report, IsoOptions, SourceFreeReport};
use kgraph::moves::{check_hr, complete_edge_reduction, delay, product, reduce, ParType};
use kgraph::saturation::{morita_certificate, saturate, CertificateBounds};
use kgraph::{generators, ColorSet, ColoredDigraph, Error, KGraph, VertexId};

const SCHEMA: &str = "kg-report";
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "kg", version, about = "Validate and transform finite higher-rank graphs")]
struct Cli {
    /// Emit reports as versioned JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the square coverage and braid conditions.
    Validate {
        file: PathBuf,
        /// Also require an incoming edge of every color at every vertex.
        #[arg(long)]
        per_color_source_free: bool,
    },
    /// Check the Reduction hypotheses at a vertex.
    CheckHr {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        /// Comma-separated color set, e.g. 1,2
        #[arg(long)]
        colors: String,
    },
    /// Apply the Reduction move.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        colors: String,
        #[arg(long)]
        bridge_color: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the parent functor and grading as JSON.
        #[arg(long)]
        emit_par: Option<PathBuf>,
    },
    /// Apply the Delay move to an edge.
    Delay {
        file: PathBuf,
        #[arg(long)]
        edge: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Apply Complete-Edge Reduction at a vertex.
    Cr {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Cartesian product of two graphs.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Search for an isomorphism.
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        allow_color_permutation: bool,
        /// Write the mapping as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Hereditary and saturated closure of a vertex set.
    Saturate {
        file: PathBuf,
        /// Comma-separated vertex ids.
        #[arg(long)]
        set: String,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Write the certificate for a Reduction.
    Certify {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        colors: String,
        #[arg(long)]
        bridge_color: usize,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 3)]
        injectivity_degree: usize,
    },
    /// Certify every Reduction available in every `.kg` file of a directory.
    CertifyAll {
        dir: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
    /// Export to another format.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a fixture: torus N..., figure1, cr-example, bouquet N...
    Gen {
        name: GenName,
        args: Vec<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenName {
    Torus,
    Figure1,
    CrExample,
    Bouquet,
}

/// A usage or input problem (exit 2) as opposed to a property that does
/// not hold (exit 1).
struct Outcome {
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome { ok: true }) => ExitCode::SUCCESS,
        Ok(Outcome { ok: false }) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    version: u32,
    command: &'a str,
    ok: bool,
    report: T,
}

fn emit<T: Serialize>(cli: &Cli, command: &str, ok: bool, report: &T, text: impl FnOnce() -> String) -> Outcome {
    if cli.json {
        let env = Envelope {
            schema: SCHEMA,
            version: SCHEMA_VERSION,
            command,
            ok,
            report,
        };
        out(&(serde_json::to_string_pretty(&env).expect("report serializes") + "\n"));
    } else {
        out(&text());
    }
    Outcome { ok }
}

/// Writes to stdout; a closed pipe is not an error.
fn out(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn read_doc(path: &FsPath) -> Result<KgDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load(path: &FsPath) -> Result<(KgDocument, KGraph)> {
    let doc = read_doc(path)?;
    let k = doc.to_kgraph().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok((doc, k))
}

fn write(path: &FsPath, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Output document: the graph plus the input's color names and a note.
fn write_graph(path: &FsPath, k: &KGraph, like: Option<&KgDocument>, note: String) -> Result<()> {
    let mut doc = KgDocument::from_kgraph(k);
    if let Some(src) = like {
        doc.colors = src.colors.clone();
    }
    doc.comments.push(note);
    write(path, &serialize(&doc))
}

fn colors(k: &KGraph, list: &str) -> Result<ColorSet> {
    let parsed = list
        .split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad color `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    Ok(ColorSet::new(k.rank(), parsed)?)
}

fn vertex(k: &KGraph, name: &str) -> Result<VertexId> {
    Ok(k.vertex(name)?)
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Validate {
            file,
            per_color_source_free,
        } => validate(cli, file, *per_color_source_free),
        Command::CheckHr { file, vertex: w, colors: list } => {
            let (_, k) = load(file)?;
            let report = check_hr(&k, vertex(&k, w)?, &colors(&k, list)?)?;
            Ok(emit(cli, "check-hr", report.passed, &report, || match report.first_failure() {
                None => format!("hypotheses hold at {}\n", report.vertex),
                Some(reason) => format!("hypotheses fail: {reason}\n"),
            }))
        }
        Command::Reduce {
            file,
            vertex: w,
            colors: list,
            bridge_color,
            output,
            emit_par,
        } => {
            let (doc, k) = load(file)?;
            let b = colors(&k, list)?;
            match reduce(&k, vertex(&k, w)?, &b, *bridge_color) {
                Ok(r) => {
                    write_graph(
                        output,
                        &r.graph,
                        Some(&doc),
                        format!("reduction of {} at {w} with colors {b}, bridge color {bridge_color}", file_name(file)),
                    )?;
                    if let Some(path) = emit_par {
                        write(path, &(serde_json::to_string_pretty(&par_report(&k, &r))? + "\n"))?;
                    }
                    let g = r.graph.skeleton();
                    let summary = GraphSummary::of(&r.graph);
                    Ok(emit(cli, "reduce", true, &summary, || {
                        format!("reduced graph: {} vertices, {} edges\n", g.vertex_count(), g.edge_count())
                    }))
                }
                Err(Error::HypothesesNotMet { reason, report, .. }) => {
                    Ok(emit(cli, "reduce", false, &report, || format!("hypotheses fail: {reason}\n")))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Delay { file, edge, output } => {
            let (doc, k) = load(file)?;
            let d = delay(&k, k.edge(edge)?)?;
            write_graph(output, &d.graph, Some(&doc), format!("delay of {} at {edge}", file_name(file)))?;
            let report = DelayReport {
                delayed_edge: &d.delayed_edge,
                midpoint: d.midpoint(),
                linked: &d.linked,
                classes: &d.classes,
                graph: GraphSummary::of(&d.graph),
            };
            Ok(emit(cli, "delay", true, &report, || {
                format!(
                    "delayed {} ({} linked edges, {} added edges)\n",
                    edge,
                    d.linked.len(),
                    d.classes.len()
                )
            }))
        }
        Command::Cr { file, vertex: w, output } => {
            let (doc, k) = load(file)?;
            match complete_edge_reduction(&k, vertex(&k, w)?) {
                Ok(cr) => {
                    write_graph(
                        output,
                        &cr.graph,
                        Some(&doc),
                        format!("complete-edge reduction of {} at {w}", file_name(file)),
                    )?;
                    let report = CrReport {
                        redirect_target: &cr.redirect_target,
                        fixed_edge: &cr.fixed_edge,
                        graph: GraphSummary::of(&cr.graph),
                    };
                    Ok(emit(cli, "cr", true, &report, || {
                        format!("removed {w}; edges into it now end at {}\n", cr.redirect_target)
                    }))
                }
                Err(Error::HypothesesNotMet { reason, .. }) => {
                    Ok(emit(cli, "cr", false, &reason, || format!("hypotheses fail: {reason}\n")))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Product { a, b, output } => {
            let (_, ka) = load(a)?;
            let (_, kb) = load(b)?;
            let p = product(&ka, &kb)?;
            write_graph(output, &p, None, format!("product of {} and {}", file_name(a), file_name(b)))?;
            let summary = GraphSummary::of(&p);
            Ok(emit(cli, "product", true, &summary, || {
                format!("product: rank {}, {} vertices, {} edges\n", summary.rank, summary.vertices, summary.edges)
            }))
        }
        Command::Iso {
            a,
            b,
            allow_color_permutation,
            output,
        } => {
            let (_, ka) = load(a)?;
            let (_, kb) = load(b)?;
            let opts = IsoOptions {
                allow_color_permutation: *allow_color_permutation,
            };
            let iso = isomorphic_with(&ka, &kb, &opts);
            let report = match &iso {
                Some(m) => {
                    let (vertices, edges) = m.named(&ka, &kb);
                    IsoReport {
                        isomorphic: true,
                        color_map: Some(m.color_map.clone()),
                        vertices,
                        edges,
                    }
                }
                None => IsoReport {
                    isomorphic: false,
                    color_map: None,
                    vertices: vec![],
                    edges: vec![],
                },
            };
            if let (Some(path), true) = (output, report.isomorphic) {
                write(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            Ok(emit(cli, "iso", report.isomorphic, &report, || {
                if !report.isomorphic {
                    return "not isomorphic\n".into();
                }
                let mut s = String::from("isomorphic\n");
                for (x, y) in report.vertices.iter().chain(&report.edges) {
                    s.push_str(&format!("{x} -> {y}\n"));
                }
                s
            }))
        }
        Command::Saturate { file, set, max_degree } => {
            let (_, k) = load(file)?;
            let start = set
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| vertex(&k, s.trim()))
                .collect::<Result<Vec<_>>>()?;
            let bound = max_degree.unwrap_or(k.skeleton().vertex_count());
            let s = saturate(&k, &start, bound)?;
            Ok(emit(cli, "saturate", true, &s, || {
                let mut out = format!("closure: {}\n", s.members.join(","));
                for step in &s.trace {
                    let why = match (&step.edge, &step.degree) {
                        (Some(e), _) => format!("hereditary via {e}"),
                        (_, Some(d)) => format!("saturated at degree {d:?}"),
                        _ => String::new(),
                    };
                    out.push_str(&format!("  {} ({why})\n", step.vertex));
                }
                out
            }))
        }
        Command::Certify {
            file,
            vertex: w,
            colors: list,
            bridge_color,
            output,
            injectivity_degree,
        } => {
            let (_, k) = load(file)?;
            let bounds = CertificateBounds {
                injectivity_degree: *injectivity_degree,
                max_degree: None,
            };
            match morita_certificate(&k, vertex(&k, w)?, &colors(&k, list)?, *bridge_color, bounds) {
                Ok(cert) => {
                    write(output, &(serde_json::to_string_pretty(&cert)? + "\n"))?;
                    Ok(emit(cli, "certify", cert.passed, &cert, || {
                        format!("certificate {}\n", if cert.passed { "passes" } else { "fails" })
                    }))
                }
                Err(Error::HypothesesNotMet { reason, report, .. }) => {
                    Ok(emit(cli, "certify", false, &report, || format!("hypotheses fail: {reason}\n")))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::CertifyAll { dir, output, jobs } => certify_all(cli, dir, output, *jobs),
        Command::Export { file, format, output } => {
            let doc = read_doc(file)?;
            doc.to_kgraph().map_err(|e| anyhow!("{}: {e}", file.display()))?;
            let text = match format {
                ExportFormat::Dot => to_dot(&doc),
                ExportFormat::Json => to_json(&doc),
            };
            match output {
                Some(path) => write(path, &text)?,
                None => out(&text),
            }
            Ok(Outcome { ok: true })
        }
        Command::Gen { name, args, output } => {
            let (k, names): (KGraph, &[(usize, &str)]) = match name {
                GenName::Torus => (generators::torus(args)?, &[]),
                GenName::Bouquet => (generators::bouquet(args)?, &[]),
                GenName::Figure1 | GenName::CrExample if !args.is_empty() => {
                    bail!("this generator takes no arguments")
                }
                GenName::Figure1 => (generators::figure1(), &[(1, "black"), (2, "blue"), (3, "red")]),
                GenName::CrExample => (generators::cr_example(), &[(1, "black"), (2, "blue")]),
            };
            let mut doc = KgDocument::from_kgraph(&k);
            doc.colors = names.iter().map(|&(c, n)| (c, n.to_string())).collect();
            let label = name.to_possible_value().expect("named").get_name().to_string();
            let params: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            doc.comments.push(format!("generated: {label} {}", params.join(" ")).trim_end().to_string());
            write(output, &serialize(&doc))?;
            let summary = GraphSummary::of(&k);
            Ok(emit(cli, "gen", true, &summary, || {
                format!("{label}: {} vertices, {} edges, {} squares\n", summary.vertices, summary.edges, summary.squares)
            }))
        }
    }
}

fn file_name(p: &FsPath) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct GraphSummary {
    rank: usize,
    vertices: usize,
    edges: usize,
    squares: usize,
}

impl GraphSummary {
    fn of(k: &KGraph) -> GraphSummary {
        GraphSummary {
            rank: k.rank(),
            vertices: k.skeleton().vertex_count(),
            edges: k.skeleton().edge_count(),
            squares: k.squares().len(),
        }
    }
}

#[derive(Serialize)]
struct DelayReport<'a> {
    delayed_edge: &'a str,
    midpoint: String,
    linked: &'a [String],
    classes: &'a [kgraph::moves::DelayClass],
    graph: GraphSummary,
}

#[derive(Serialize)]
struct CrReport<'a> {
    redirect_target: &'a str,
    fixed_edge: &'a str,
    graph: GraphSummary,
}

#[derive(Serialize)]
struct IsoReport {
    isomorphic: bool,
    color_map: Option<Vec<usize>>,
    vertices: Vec<(String, String)>,
    edges: Vec<(String, String)>,
}

#[derive(Serialize)]
struct ParEntry {
    edge: String,
    kind: ParType,
    image: Vec<String>,
}

#[derive(Serialize)]
struct ParReport {
    bridge_color: usize,
    edges: Vec<ParEntry>,
    /// Grading of the input graph, per edge.
    grading: Vec<(String, Vec<i64>)>,
}

fn par_report(parent: &KGraph, r: &kgraph::moves::ReductionResult) -> ParReport {
    let g = r.graph.skeleton();
    let pg = parent.skeleton();
    let edges = g
        .edge_ids()
        .map(|e| ParEntry {
            edge: g.edge_name(e).to_string(),
            kind: r.classification[e.0],
            image: r.realization.functor.edge_map[e.0]
                .edges()
                .iter()
                .map(|&x| pg.edge_name(x).to_string())
                .collect(),
        })
        .collect();
    let grading = pg
        .edge_ids()
        .map(|e| (pg.edge_name(e).to_string(), r.realization.grading.values[e.0].clone()))
        .collect();
    ParReport {
        bridge_color: r.bridge_color,
        edges,
        grading,
    }
}

#[derive(Serialize)]
struct ValidateReport {
    kg2: Kg2Report,
    kg3: Option<Kg3Report>,
    source_free: Option<SourceFreeReport>,
}

fn validate(cli: &Cli, file: &FsPath, per_color: bool) -> Result<Outcome> {
    let doc = read_doc(file)?;
    let edges = doc.edges.iter().map(|e| (e.id.clone(), e.color, e.src.clone(), e.rng.clone()));
    let g = ColoredDigraph::new(doc.rank, doc.vertices.iter().cloned(), edges)
        .map_err(|e| anyhow!("{}: {e}", file.display()))?;
    let mut squares = Vec::new();
    for sq in &doc.squares {
        let names = [&sq.lhs[0], &sq.lhs[1], &sq.rhs[0], &sq.rhs[1]].map(|s| s.as_str());
        squares.push(kgraph::Square::from_names(&g, names).map_err(|e| anyhow!("{}: {e}", file.display()))?);
    }
    let s = SquareSet::new(&g, squares);
    let kg2 = validate_kg2(&g, &s);
    let kg3 = if kg2.passed { Some(validate_kg3(&g, &s, &kg2)?) } else { None };
    let mut ok = kg2.passed && kg3.as_ref().is_some_and(|r| r.passed);
    let source_free = if ok && per_color {
        let k = kgraph::assemble(g, s)?;
        let r = source_free_report(&k);
        ok &= r.per_color_passed;
        Some(r)
    } else {
        None
    };
    let report = ValidateReport { kg2, kg3, source_free };
    Ok(emit(cli, "validate", ok, &report, || {
        let mut out = String::new();
        let r2 = &report.kg2;
        out.push_str(&format!(
            "squares: {} ({} bicolored 2-paths)\n",
            if r2.passed { "ok" } else { "FAIL" },
            r2.two_paths_checked
        ));
        for m in &r2.malformed {
            out.push_str(&format!("  malformed square {}: {}\n", m.square, m.reason));
        }
        for p in &r2.uncovered {
            out.push_str(&format!("  uncovered {p}\n"));
        }
        for p in &r2.multiply_covered {
            out.push_str(&format!("  covered twice {p}\n"));
        }
        if let Some(r3) = &report.kg3 {
            out.push_str(&format!(
                "braids: {} ({} tricolored 3-paths)\n",
                if r3.passed { "ok" } else { "FAIL" },
                r3.three_paths_checked
            ));
            for f in &r3.failures {
                out.push_str(&format!("  {}: {} vs {}\n", f.path, f.inner_first, f.outer_first));
            }
        }
        if let Some(sf) = &report.source_free {
            out.push_str(&format!(
                "per-color source-free: {}\n",
                if sf.per_color_passed { "ok" } else { "FAIL" }
            ));
            for (v, c) in &sf.violations {
                out.push_str(&format!("  {v} has no incoming edge of color {c}\n"));
            }
        }
        out
    }))
}

#[derive(Serialize)]
struct Certified {
    vertex: String,
    colors: Vec<usize>,
    bridge_color: usize,
    passed: bool,
    hereditary_only: bool,
    bridge_color_agreement: Vec<(usize, bool)>,
}

#[derive(Serialize)]
struct FileCertificates {
    file: String,
    certified: Vec<Certified>,
}

fn certify_file(path: &FsPath) -> Result<FileCertificates> {
    let (_, k) = load(path)?;
    let rank = k.rank();
    let mut certified = Vec::new();
    for w in k.skeleton().vertex_ids() {
        for mask in 1..(1usize << rank) {
            let set = ColorSet::new(rank, (1..=rank).filter(|c| mask & (1 << (c - 1)) != 0))?;
            if !check_hr(&k, w, &set)?.passed {
                continue;
            }
            let b = set.iter().next().expect("nonempty");
            let cert = morita_certificate(&k, w, &set, b, CertificateBounds::default())?;
            certified.push(Certified {
                vertex: cert.vertex,
                colors: cert.colors,
                bridge_color: b,
                passed: cert.passed,
                hereditary_only: cert.hereditary_only,
                bridge_color_agreement: cert.bridge_color_agreement,
            });
        }
    }
    Ok(FileCertificates {
        file: file_name(path),
        certified,
    })
}

fn certify_all(cli: &Cli, dir: &FsPath, output: &FsPath, jobs: usize) -> Result<Outcome> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "kg"))
        .collect();
    files.sort();
    let jobs = jobs.max(1);
    let mut results: Vec<Option<Result<FileCertificates>>> = (0..files.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_files, chunk_results) in files.chunks(jobs.max(1)).zip(results.chunks_mut(jobs.max(1))) {
            let handles: Vec<_> = chunk_files
                .iter()
                .map(|f| scope.spawn(move || certify_file(f)))
                .collect();
            for (slot, h) in chunk_results.iter_mut().zip(handles) {
                *slot = Some(h.join().unwrap_or_else(|_| Err(anyhow!("worker panicked"))));
            }
        }
    });
    let results = results
        .into_iter()
        .map(|r| r.expect("every file processed"))
        .collect::<Result<Vec<_>>>()?;
    let ok = results.iter().all(|f| f.certified.iter().all(|c| c.passed));
    write(output, &(serde_json::to_string_pretty(&results)? + "\n"))?;
    Ok(emit(cli, "certify-all", ok, &results, || {
        let mut out = String::new();
        for f in &results {
            let passed = f.certified.iter().filter(|c| c.passed).count();
            out.push_str(&format!("{}: {passed}/{} certificates pass\n", f.file, f.certified.len()));
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn color_lists() {
        let k = generators::figure1();
        assert_eq!(colors(&k, "1, 3").unwrap().iter().collect::<Vec<_>>(), [1, 3]);
        assert!(colors(&k, "4").is_err());
        assert!(colors(&k, "a").is_err());
    }
}
