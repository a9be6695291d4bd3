//! Command surface of the `hopfgraph` binary.
//!
//! Every command reads a graph file and prints one JSON document per graph,
//! one per line, in file order. `--pretty` prints plain text instead.
//!
//! Exit codes: 0 success, 1 unreadable input, parse, validation or usage
//! errors, 2 failed axiom checks, 3 arithmetic truncated by the window.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dsl::{parse_graph_source, DslError};
use crate::graph::{canonical_key, commutative_key, subgraphs, CanonicalKey, FeynmanGraph, SubgraphSel};
use crate::hopf::{CoproductMode, HopfAlgebra, HopfError};
use crate::json::{element_to_json, laurent_from_json, laurent_to_json, tensor_to_json, GraphTable, JsonError};
use crate::renorm::{DefaultRule, FeynmanRules, LaurentError, RenormError, Renormalizer, Window};
use crate::ribbon::{topology, topology_per_component, TopologyReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Dsl { path: PathBuf, source: DslError },
    #[error("{0}")]
    Hopf(#[from] HopfError),
    #[error("{0}")]
    Renorm(RenormError),
    #[error("rules file {path}: {message}")]
    Rules { path: PathBuf, message: String },
    #[error("{0}")]
    Window(#[from] LaurentError),
    #[error("axiom check failed for {0}")]
    Axioms(String),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl From<RenormError> for CliError {
    fn from(e: RenormError) -> Self {
        match e {
            RenormError::Hopf(h) => CliError::Hopf(h),
            other => CliError::Renorm(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Axioms(_) => 2,
            CliError::Renorm(RenormError::Truncated(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hopfgraph", version, about = "Hopf algebras of Feynman and ribbon graphs")]
pub struct Cli {
    /// Print plain-text tables instead of JSON
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DefaultArg {
    /// ((1+ε)/ε)^L
    Toy,
    /// ε^-L
    Pole,
    /// Every graph needs an explicit rule
    None,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertex, edge, face and genus counts of each graph
    Classify { file: PathBuf },
    /// Subgraphs summed over by the coproduct
    Subgraphs {
        file: PathBuf,
        #[arg(long, default_value = "phi4")]
        theory: CoproductMode,
    },
    /// Coproduct of each graph
    Coproduct {
        file: PathBuf,
        #[arg(long, default_value = "phi4")]
        theory: CoproductMode,
        /// Drop the primitive part Γ⊗1 + 1⊗Γ
        #[arg(long)]
        reduced: bool,
    },
    /// Antipode of each graph
    Antipode {
        file: PathBuf,
        #[arg(long, default_value = "phi4")]
        theory: CoproductMode,
    },
    /// Renormalized value of each graph under minimal subtraction
    Renormalize {
        file: PathBuf,
        /// JSON object from graph name or canonical key to series
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Exponent window MIN:MAX; overrides HOPFGRAPH_WINDOW
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Window>,
        #[arg(long, default_value = "phi4")]
        theory: CoproductMode,
        /// Value of graphs without an explicit rule
        #[arg(long, value_enum, default_value = "toy")]
        default: DefaultArg,
        /// Print the counterterm φ₋ instead of φ₊
        #[arg(long)]
        counterterm: bool,
    },
    /// Validate each graph and optionally run the Hopf axiom suite
    Check {
        file: PathBuf,
        /// Coassociativity, counit, antipode, grading and pole-freeness
        #[arg(long)]
        axioms: bool,
        /// Restrict to one theory; all three by default
        #[arg(long)]
        theory: Option<CoproductMode>,
    },
    /// Canonical keys of each graph
    Canon { file: PathBuf },
}

/// Parses `args` (program name first) and runs the command. Returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_graphs(path: &Path) -> Result<Vec<FeynmanGraph>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_graph_source(&text).map_err(|source| CliError::Dsl {
        path: path.to_owned(),
        source,
    })
}

fn name_of(g: &FeynmanGraph) -> String {
    g.name.clone().unwrap_or_else(|| "G".into())
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{v}").map_err(CliError::Output)
}

fn line(out: &mut dyn Write, s: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", s.as_ref()).map_err(CliError::Output)
}

/// An algebra with the file's connected graphs registered first, so their
/// names label the terms.
fn algebra_for(mode: CoproductMode, graphs: &[FeynmanGraph]) -> HopfAlgebra {
    let alg = HopfAlgebra::new(mode);
    for g in graphs.iter().filter(|g| g.is_connected()) {
        alg.intern(g);
    }
    alg
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let pretty = cli.pretty;
    match &cli.command {
        Command::Classify { file } => {
            for g in read_graphs(file)? {
                if g.is_connected() {
                    let t = topology(&g).map_err(HopfError::from)?;
                    if pretty {
                        line(out, format!("{}  {}", name_of(&g), topology_line(&t)))?;
                    } else {
                        emit(out, &serde_json::to_value(t).expect("plain struct"))?;
                    }
                } else {
                    let parts = topology_per_component(&g).map_err(HopfError::from)?;
                    if pretty {
                        let text: Vec<String> = parts.iter().map(topology_line).collect();
                        line(out, format!("{}  {}", name_of(&g), text.join(" | ")))?;
                    } else {
                        emit(out, &serde_json::to_value(parts).expect("plain struct"))?;
                    }
                }
            }
        }
        Command::Subgraphs { file, theory } => {
            for g in read_graphs(file)? {
                let alg = HopfAlgebra::new(*theory);
                alg.check_generator(&g)?;
                let subs = subgraphs(&g, theory.class()).map_err(HopfError::from)?;
                if pretty {
                    line(out, format!("{}: {} subgraphs", name_of(&g), subs.len()))?;
                    for s in &subs {
                        line(out, format!("  {{{}}} E={} L={}", edge_labels(&g, s).join(","), s.external_count(&g), s.loop_number(&g)))?;
                    }
                } else {
                    let items: Vec<Value> = subs
                        .iter()
                        .map(|s| {
                            json!({
                                "edges": edge_labels(&g, s),
                                "E": s.external_count(&g),
                                "L": s.loop_number(&g),
                            })
                        })
                        .collect();
                    emit(out, &Value::Array(items))?;
                }
            }
        }
        Command::Coproduct { file, theory, reduced } => {
            let graphs = read_graphs(file)?;
            let alg = algebra_for(*theory, &graphs);
            for g in &graphs {
                let t = if *reduced { alg.reduced_coproduct(g)? } else { alg.coproduct(g)? };
                if pretty {
                    let mut table = GraphTable::new();
                    table.collect(t.iter().flat_map(|((l, r), _)| [l, r]));
                    line(out, format!("{}:", name_of(g)))?;
                    for ((l, r), c) in t.iter() {
                        line(out, format!("  {c} · {} ⊗ {}", table.label(&alg, l), table.label(&alg, r)))?;
                    }
                } else {
                    emit(out, &tensor_to_json(&alg, &t)?)?;
                }
            }
        }
        Command::Antipode { file, theory } => {
            let graphs = read_graphs(file)?;
            let alg = algebra_for(*theory, &graphs);
            for g in &graphs {
                let s = alg.antipode(g)?;
                if pretty {
                    let mut table = GraphTable::new();
                    table.collect(s.iter().map(|(m, _)| m));
                    line(out, format!("{}:", name_of(g)))?;
                    for (m, c) in s.iter() {
                        line(out, format!("  {c} · {}", table.label(&alg, m)))?;
                    }
                } else {
                    emit(out, &element_to_json(&alg, &s)?)?;
                }
            }
        }
        Command::Renormalize {
            file,
            rules,
            window,
            theory,
            default,
            counterterm,
        } => {
            let graphs = read_graphs(file)?;
            let window = match window {
                Some(w) => *w,
                None => Window::from_env()?,
            };
            let default = match default {
                DefaultArg::Toy => Some(DefaultRule::Toy),
                DefaultArg::Pole => Some(DefaultRule::PurePole),
                DefaultArg::None => None,
            };
            let mut feynman = FeynmanRules::new(window, default);
            if let Some(path) = rules {
                load_rules(path, &graphs, &mut feynman)?;
            }
            let alg = algebra_for(*theory, &graphs);
            let r = Renormalizer::minimal(&alg, &feynman);
            for g in &graphs {
                let value = if *counterterm { r.twisted_antipode(g)? } else { r.renormalize(g)? };
                if pretty {
                    let sym = if *counterterm { "φ₋" } else { "φ₊" };
                    line(out, format!("{}: {sym} = {value}", name_of(g)))?;
                } else {
                    emit(out, &laurent_to_json(&value))?;
                }
            }
        }
        Command::Check { file, axioms, theory } => {
            let graphs = read_graphs(file)?;
            if !axioms {
                for g in &graphs {
                    let report = g.validate();
                    if pretty {
                        let status = if report.is_valid() { "valid".to_string() } else { report.summary() };
                        line(out, format!("{}: {status}", name_of(g)))?;
                    } else {
                        emit(out, &json!({ "graph": name_of(g), "valid": report.is_valid() }))?;
                    }
                }
                return Ok(());
            }
            let modes: Vec<CoproductMode> = match theory {
                Some(m) => vec![*m],
                None => CoproductMode::ALL.to_vec(),
            };
            let window = Window::from_env()?;
            let feynman = FeynmanRules::toy(window);
            let mut failed = Vec::new();
            for mode in modes {
                let alg = algebra_for(mode, &graphs);
                let r = Renormalizer::minimal(&alg, &feynman);
                for g in &graphs {
                    let mut result = serde_json::Map::new();
                    result.insert("graph".into(), json!(name_of(g)));
                    result.insert("theory".into(), json!(mode.name()));
                    let report = alg.check_coassociativity(g)?;
                    let mut checks = vec![
                        ("coassociativity", report.holds),
                        ("counit", alg.check_counit_laws(g)?),
                        ("antipode", alg.check_antipode_axiom(g)?),
                        ("grading", alg.check_grading(g)?),
                    ];
                    if mode != CoproductMode::Core {
                        let plus = r.renormalize(g)?;
                        let conv = r.renormalize_by_convolution(g)?;
                        checks.push(("pole_free", !plus.has_poles() && plus == conv));
                    }
                    for (k, ok) in &checks {
                        result.insert((*k).into(), json!(ok));
                    }
                    if checks.iter().any(|(_, ok)| !ok) {
                        failed.push(format!("{} ({})", name_of(g), mode.name()));
                    }
                    if pretty {
                        let text: Vec<String> = checks
                            .iter()
                            .map(|(k, ok)| format!("{k} {}", if *ok { "ok" } else { "FAILED" }))
                            .collect();
                        line(out, format!("{} [{}]: {}", name_of(g), mode.name(), text.join(", ")))?;
                    } else {
                        emit(out, &Value::Object(result))?;
                    }
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Axioms(failed.join(", ")));
            }
        }
        Command::Canon { file } => {
            for g in read_graphs(file)? {
                let (ribbon, comm) = (canonical_key(&g), commutative_key(&g));
                if pretty {
                    line(out, format!("{}  {ribbon}  {comm}", name_of(&g)))?;
                } else {
                    emit(
                        out,
                        &json!({ "graph": name_of(&g), "ribbon": ribbon.to_hex(), "commutative": comm.to_hex() }),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn topology_line(t: &TopologyReport) -> String {
    format!(
        "V={} I={} E={} F={} B={} g={}",
        t.vertices, t.internal, t.external, t.faces, t.broken, t.g
    )
}

fn edge_labels(g: &FeynmanGraph, s: &SubgraphSel) -> Vec<String> {
    s.edges().iter().map(|&e| g.internal[e].label.clone()).collect()
}

/// Reads a rules file. Names refer to graphs of the input file; anything
/// else must be a canonical key in hex.
fn load_rules(path: &Path, graphs: &[FeynmanGraph], rules: &mut FeynmanRules) -> Result<(), CliError> {
    let fail = |message: String| CliError::Rules {
        path: path.to_owned(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let v: Value = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| fail("expected a JSON object".into()))?;
    for (name, series) in obj {
        let value = laurent_from_json(series, rules.window())
            .map_err(|e: JsonError| fail(format!("{name}: {e}")))?;
        if let Some(g) = graphs.iter().find(|g| g.name.as_deref() == Some(name)) {
            rules.set(g, value).map_err(|e| fail(e.to_string()))?;
        } else if let Some(key) = CanonicalKey::from_hex(name) {
            rules.set_key(key, value).map_err(|e| fail(e.to_string()))?;
        } else {
            return Err(fail(format!("{name} is neither a graph in the input nor a canonical key")));
        }
    }
    Ok(())
}
