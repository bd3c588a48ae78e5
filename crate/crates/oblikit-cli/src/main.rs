use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use oblikit::cost::{cost_report, parse_demands, CostReport, Demand, FusionFunction};
use oblikit::cover::{dump_cover, planar_cover};
use oblikit::experiment::{
    build_stack, ratio_curve_from_csv, run_pipeline, validate_all, validate_dump,
    ExperimentSpec, GraphSource,
};
use oblikit::generate::WeightRule;
use oblikit::graph::{NodeId, Weight, WeightedPlanarGraph};
use oblikit::hierarchy::{
    dump_paths, find_all_paths, find_path, hierarchy_report, ParamOverrides, PathEntry,
    PathTable,
};
use oblikit::oracle::{approximation_ratio, optimal_cost, OracleBudget};

#[derive(Parser)]
#[command(
    name = "oblikit",
    version,
    about = "Oblivious buy-at-bulk routing toolkit for weighted planar graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for generators and demand sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Hierarchy base override (>= 2); defaults to 4x the stretch bound.
    #[arg(long, global = true)]
    base: Option<Weight>,
    /// Fusion function: identity, power:A, unit-step, saturating:C, log2p1.
    #[arg(long, global = true, default_value = "identity")]
    fusion: String,
    /// Oracle budget override: maximum graph size.
    #[arg(long, global = true)]
    budget_nodes: Option<usize>,
    /// Oracle budget override: maximum demand count.
    #[arg(long, global = true)]
    budget_demands: Option<usize>,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a grid graph file (seeded weights in [1,10], or --unit).
    GenGrid {
        rows: usize,
        cols: usize,
        /// Unit weights instead of seeded random ones.
        #[arg(long)]
        unit: bool,
    },
    /// Generate a seeded random triangulated planar graph file.
    GenTri { n: usize },
    /// Build a sparse cover at one locality and print its dump.
    Cover {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        gamma: Weight,
    },
    /// Build the cover hierarchy and print its level report.
    Hierarchy { graph: PathBuf },
    /// Print the fixed path for a pair `S T`, or every pair with --all.
    Route {
        graph: PathBuf,
        /// Source and target node ids.
        #[arg(value_names = ["S", "T"], num_args = 2, required_unless_present = "all")]
        pair: Option<Vec<NodeId>>,
        /// Dump the whole path table instead.
        #[arg(long, conflicts_with = "pair")]
        all: bool,
    },
    /// Route a demand file and evaluate its cost and bounds.
    Eval {
        graph: PathBuf,
        demands: PathBuf,
        /// Emit the cost CSV (header plus one row) instead of the text report.
        #[arg(long)]
        csv: bool,
    },
    /// Exhaustive optimum for a demand file, with witness and oblivious ratio.
    Oracle { graph: PathBuf, demands: PathBuf },
    /// Run a seeded sweep: route random demands, check bounds, emit CSV.
    Experiment {
        /// Grid instance, e.g. --grid 10 10.
        #[arg(long, value_names = ["ROWS", "COLS"], num_args = 2)]
        grid: Option<Vec<usize>>,
        /// Triangulated instance on N nodes.
        #[arg(long, conflicts_with = "grid")]
        tri: Option<usize>,
        /// Graph file instance.
        #[arg(long, conflicts_with_all = ["grid", "tri"])]
        graph: Option<PathBuf>,
        /// Unit weights for --grid.
        #[arg(long)]
        unit: bool,
        /// Demands sampled per repetition.
        #[arg(long, default_value_t = 10)]
        demands: usize,
        /// Number of repetitions.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Also run the exhaustive oracle per repetition (desk scale only).
        #[arg(long)]
        oracle: bool,
        /// Leave the elapsed_ms cells empty for byte-stable output.
        #[arg(long)]
        no_timing: bool,
    },
    /// Validate covers at the given localities; nonzero exit on violation.
    Validate {
        graph: PathBuf,
        /// Localities to check, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        gamma: Vec<Weight>,
        /// Validate this cover dump (at the first --gamma) instead of
        /// building covers.
        #[arg(long)]
        cover: Option<PathBuf>,
    },
    /// Reduce a pipeline CSV to gnuplot-ready `n max_ratio` lines.
    Curve { csv: PathBuf },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let overrides = ParamOverrides { base: cli.base, level_rule: None };
    let budget = OracleBudget {
        max_nodes: cli.budget_nodes.unwrap_or(OracleBudget::default().max_nodes),
        max_demands: cli.budget_demands.unwrap_or(OracleBudget::default().max_demands),
        ..OracleBudget::default()
    };
    match &cli.cmd {
        Cmd::GenGrid { rows, cols, unit } => {
            if *rows < 2 || *cols < 2 {
                bail!("grids need at least 2 rows and 2 columns");
            }
            let weights =
                if *unit { WeightRule::Unit } else { WeightRule::Uniform { seed: cli.seed } };
            let g = GraphSource::Grid { rows: *rows, cols: *cols, weights }.load()?;
            emit(&cli.out, &g.to_file_string())?;
        }
        Cmd::GenTri { n } => {
            if *n < 3 {
                bail!("triangulated graphs need at least 3 nodes");
            }
            let g = GraphSource::Triangulated { n: *n, seed: cli.seed }.load()?;
            emit(&cli.out, &g.to_file_string())?;
        }
        Cmd::Cover { graph, gamma } => {
            let g = load_graph(graph)?;
            let cover = planar_cover(&g, *gamma)?;
            emit(&cli.out, &dump_cover(&g, &cover)?)?;
        }
        Cmd::Hierarchy { graph } => {
            let (_, h, _) = build_stack(&GraphSource::File(graph.clone()), overrides)?;
            emit(&cli.out, &hierarchy_report(&h))?;
        }
        Cmd::Route { graph, pair, all } => {
            let (g, h, aux) = build_stack(&GraphSource::File(graph.clone()), overrides)?;
            let table = if *all {
                find_all_paths(&g, &h, &aux, None)?
            } else {
                let pair = pair.as_ref().expect("clap requires the pair without --all");
                let (s, t) = (pair[0], pair[1]);
                if s >= g.node_count() || t >= g.node_count() {
                    bail!("node ids must be below {}", g.node_count());
                }
                let mut entries = BTreeMap::new();
                entries.insert((s, t), find_path(&g, &h, &aux, s, t));
                PathTable { entries }
            };
            emit(&cli.out, &dump_paths(&table))?;
        }
        Cmd::Eval { graph, demands, csv } => {
            let (g, h, aux) = build_stack(&GraphSource::File(graph.clone()), overrides)?;
            let fusion = FusionFunction::parse(&cli.fusion)?;
            let a = load_demands(demands, g.node_count())?;
            let entries = route_all(&g, &h, &aux, &a);
            let label = instance_label(graph);
            let report = cost_report(&g, &h, &entries, &a, &fusion, &label)?;
            if *csv {
                emit(&cli.out, &format!("{}\n{}\n", CostReport::csv_header(), report.csv_row(None)))?;
            } else {
                emit(&cli.out, &report.render_text())?;
            }
        }
        Cmd::Oracle { graph, demands } => {
            let g = load_graph(graph)?;
            let fusion = FusionFunction::parse(&cli.fusion)?;
            let a = load_demands(demands, g.node_count())?;
            let (c_star, witness) = optimal_cost(&g, &a, &fusion, &budget)?;
            let mut out = format!("C_star {c_star}\n");
            for (d, p) in a.iter().zip(&witness) {
                let spelled: Vec<String> = p.nodes().iter().map(|v| v.to_string()).collect();
                out.push_str(&format!(
                    "witness {} {} nodes {}\n",
                    d.source,
                    d.target,
                    spelled.join(" ")
                ));
            }
            let (_, h, aux) = build_stack(&GraphSource::File(graph.clone()), overrides)?;
            let rep = approximation_ratio(&g, &h, &aux, &a, &fusion, &budget)?;
            out.push_str(&format!("C {} ratio {}\n", rep.cost, rep.ratio));
            emit(&cli.out, &out)?;
        }
        Cmd::Experiment {
            grid,
            tri,
            graph,
            unit,
            demands,
            reps,
            oracle,
            no_timing,
        } => {
            let weights =
                if *unit { WeightRule::Unit } else { WeightRule::Uniform { seed: cli.seed } };
            let source = match (grid, tri, graph) {
                (Some(rc), None, None) => {
                    GraphSource::Grid { rows: rc[0], cols: rc[1], weights }
                }
                (None, Some(n), None) => GraphSource::Triangulated { n: *n, seed: cli.seed },
                (None, None, Some(p)) => GraphSource::File(p.clone()),
                _ => bail!("pick exactly one graph source: --grid, --tri, or --graph"),
            };
            let spec = ExperimentSpec {
                source,
                overrides,
                fusion: FusionFunction::parse(&cli.fusion)?,
                demands: *demands,
                seed: cli.seed,
                repetitions: *reps,
                oracle: oracle.then_some(budget),
                timing: !no_timing,
            };
            let output = run_pipeline(&spec)?;
            match &cli.out {
                Some(path) => {
                    fs::write(path, &output.csv)
                        .with_context(|| format!("failed to write {}", path.display()))?;
                    print!("{}", output.report);
                }
                None => {
                    eprint!("{}", output.report);
                    print!("{}", output.csv);
                }
            }
            if !output.all_passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Validate { graph, gamma, cover } => {
            let g = load_graph(graph)?;
            let outcome = match cover {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("failed to read {}", path.display()))?;
                    validate_dump(&g, &text, gamma[0])
                }
                None => validate_all(&g, gamma),
            };
            emit(&cli.out, &outcome.report)?;
            if !outcome.ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Curve { csv } => {
            let text = fs::read_to_string(csv)
                .with_context(|| format!("failed to read {}", csv.display()))?;
            emit(&cli.out, &ratio_curve_from_csv(&text))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("failed to write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<WeightedPlanarGraph> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("failed to read {}", path.display()))?;
    Ok(WeightedPlanarGraph::parse(&text)?)
}

fn load_demands(path: &Path, n: usize) -> Result<Vec<Demand>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("failed to read {}", path.display()))?;
    Ok(parse_demands(&text, n)?)
}

fn route_all(
    g: &WeightedPlanarGraph,
    h: &oblikit::hierarchy::CoverHierarchy,
    aux: &oblikit::hierarchy::AuxiliaryPaths,
    a: &[Demand],
) -> BTreeMap<(NodeId, NodeId), PathEntry> {
    let mut entries = BTreeMap::new();
    for d in a {
        entries
            .entry((d.source, d.target))
            .or_insert_with(|| find_path(g, h, aux, d.source, d.target));
    }
    entries
}

fn instance_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into())
}
