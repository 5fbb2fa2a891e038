mod bench;

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use plysweep::io::{read_any, write_gml};
use plysweep::layout::{circular_fallback, layout, minimize, refine_ply, Algorithm};
use plysweep::verify::{empty_ply, oracle_ply};
use plysweep::{compute_ply, Drawing, Graph, LayoutConfig, RefineConfig};

use bench::{BenchRecord, CorpusSpec};

#[derive(Parser)]
#[command(name = "plysweep", version, about = "Vertex-ply of straight-line graph drawings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    /// Overrides the seed of both the layout and the refinement.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with optional "layout" and "refine" sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for compute, csv for minimize and bench.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Ply of a drawing.
    Compute {
        path: PathBuf,
        /// Also run the brute-force oracle and report agreement.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Lay out a graph file or the first graph of a corpus spec; writes GML.
    Layout {
        input: String,
        algorithm: String,
        #[command(flatten)]
        common: Common,
    },
    /// Ply minimization; prints the trajectory.
    Minimize {
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Ply, events and timing over a generated corpus.
    Bench {
        /// e.g. `gnm:n=100,density=1.5..2.5,count=10,seed=1`, or a graph file.
        #[arg(long)]
        corpus: String,
        #[arg(long, value_delimiter = ',', default_value = "organic,circular,random")]
        layouts: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Empty-ply test.
    Emptyply { path: PathBuf },
    /// HTTP/WebSocket service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    layout: LayoutConfig,
    refine: RefineConfig,
}

impl Common {
    fn config(&self) -> Result<ConfigFile> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str::<ConfigFile>(&text).with_context(|| format!("config {}", p.display()))?
            }
            None => ConfigFile::default(),
        };
        if let Some(seed) = self.seed {
            cfg.layout.seed = seed;
            cfg.refine.seed = seed;
        }
        cfg.layout.validate().map_err(|e| anyhow!("layout config: {e}"))?;
        cfg.refine.validate().map_err(|e| anyhow!("refine config: {e}"))?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

struct Input {
    name: String,
    graph: Graph,
    drawing: Option<Drawing>,
}

fn read_file(path: &Path) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let loaded = read_any(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let drawing = match loaded.drawing {
        None if loaded.graph.is_empty() => Some(Drawing::default()),
        d => d,
    };
    Ok(Input { name, graph: loaded.graph, drawing })
}

fn read_drawn(path: &Path) -> Result<(Input, Drawing)> {
    let input = read_file(path)?;
    let drawing = input.drawing.clone().with_context(|| format!("{} has no coordinates", path.display()))?;
    Ok((input, drawing))
}

/// A file path if one exists, otherwise the first graph of a corpus spec.
fn read_path_or_spec(s: &str) -> Result<Input> {
    let p = Path::new(s);
    if p.exists() {
        return read_file(p);
    }
    let spec: CorpusSpec = s.parse().with_context(|| format!("{s:?} is neither a file nor a corpus spec"))?;
    let (name, graph) = spec.generate().swap_remove(0);
    Ok(Input { name, graph, drawing: None })
}

fn to_json(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_compute(path: &Path, verify: bool, common: &Common) -> Result<()> {
    let (input, drawing) = read_drawn(path)?;
    let g = &input.graph;
    let report = compute_ply(g, &drawing)?;
    if common.format == Some(Format::Csv) {
        let rec = bench::record(&input.name, g, &drawing, "input")?;
        return common.emit(&records_csv(&[rec])?);
    }
    let mut out = serde_json::to_value(&report)?;
    out["n"] = json!(g.vertex_count());
    out["m"] = json!(g.edge_count());
    out["density"] = json!(g.density().map(|d| d.0).unwrap_or(0.0));
    if verify {
        match oracle_ply(g, &drawing) {
            Ok((ply, probe)) => {
                out["oracle"] = json!({ "ply": ply, "witness": probe.point });
                out["agrees"] = json!(ply == report.ply);
            }
            Err(e) => {
                eprintln!("oracle skipped: {e}");
                out["oracle"] = Value::Null;
                out["agrees"] = Value::Null;
            }
        }
    }
    common.emit(&to_json(&out)?)
}

fn cmd_layout(input: &str, algorithm: &str, common: &Common) -> Result<()> {
    let alg: Algorithm = algorithm.parse().map_err(|e| anyhow!("{e}"))?;
    let input = read_path_or_spec(input)?;
    let mut cfg = common.config()?.layout;
    cfg.algorithm = alg;
    let d = layout(&input.graph, &cfg);
    let report = compute_ply(&input.graph, &d)?;
    let gml = write_gml(&input.graph, &d)?;
    match &common.out {
        Some(p) => fs::write(p, gml).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{gml}"),
    }
    // keep stdout a clean GML stream when no --out is given
    if common.out.is_some() {
        println!("ply {}", report.ply);
    } else {
        eprintln!("ply {}", report.ply);
    }
    Ok(())
}

fn cmd_minimize(input: &str, common: &Common) -> Result<()> {
    let input = read_path_or_spec(input)?;
    let cfg = common.config()?;
    let g = &input.graph;
    let result = match &input.drawing {
        Some(d) if !g.is_empty() => {
            let mut r = refine_ply(g, d, &cfg.refine);
            circular_fallback(g, &cfg.layout, &mut r);
            r
        }
        _ => minimize(g, &cfg.layout, &cfg.refine),
    };
    if let Some(p) = &common.out {
        fs::write(p, write_gml(g, &result.drawing)?).with_context(|| format!("writing {}", p.display()))?;
    }
    let mut stdout = std::io::stdout().lock();
    match common.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut v = serde_json::to_value(&result)?;
            v.as_object_mut().unwrap().remove("drawing");
            v.as_object_mut().unwrap().remove("report");
            stdout.write_all(to_json(&v)?.as_bytes())?;
        }
        Format::Csv => {
            writeln!(stdout, "iteration,ply,best_ply,fallback")?;
            let mut best = usize::MAX;
            for t in &result.trajectory {
                best = best.min(t.ply);
                writeln!(stdout, "{},{},{},{}", t.iteration, t.ply, best, result.fallback)?;
            }
        }
    }
    eprintln!("best ply {} (fallback: {})", result.ply, result.fallback);
    Ok(())
}

fn records_csv<T: serde::Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn cmd_bench(corpus: &str, layouts: &[String], common: &Common) -> Result<()> {
    let algs =
        layouts.iter().map(|l| l.parse::<Algorithm>().map_err(|e| anyhow!("{e}"))).collect::<Result<Vec<_>>>()?;
    if algs.is_empty() {
        bail!("no layouts given");
    }
    let (class, graphs) = if Path::new(corpus).exists() {
        let input = read_file(Path::new(corpus))?;
        (input.name.clone(), vec![(input.name, input.graph)])
    } else {
        let spec: CorpusSpec = corpus.parse()?;
        (spec.class().to_string(), spec.generate())
    };
    let seed = common.seed.unwrap_or(0);
    let records: Vec<BenchRecord> = bench::run(&graphs, &algs, seed)?;
    let averages = bench::averages(&class, &records);
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            common.emit(&records_csv(&records)?)?;
            eprint!("{}", records_csv(&averages)?);
        }
        Format::Json => common.emit(&to_json(&json!({ "records": records, "averages": averages }))?)?,
    }
    Ok(())
}

fn cmd_emptyply(path: &Path) -> Result<()> {
    let (input, drawing) = read_drawn(path)?;
    let verdict = empty_ply(&input.graph, &drawing)?;
    print!("{}", to_json(&verdict)?);
    Ok(())
}

fn cmd_serve(host: IpAddr, port: u16) -> Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(plysweep_service::serve(SocketAddr::new(host, port)))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute { path, verify, common } => cmd_compute(path, *verify, common),
        Command::Layout { input, algorithm, common } => cmd_layout(input, algorithm, common),
        Command::Minimize { input, common } => cmd_minimize(input, common),
        Command::Bench { corpus, layouts, common } => cmd_bench(corpus, layouts, common),
        Command::Emptyply { path } => cmd_emptyply(path),
        Command::Serve { host, port } => cmd_serve(*host, *port),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
