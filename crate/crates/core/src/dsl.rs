//! Text format for graphs.
//!
//! ```text
//! # comments start with '#' or '//'
//! graph TADPOLE_P {
//!   vertex v0;
//!   edge e1: v0.0 -- v0.1;
//!   ext f1: v0.2;
//!   ext f2: v0.3;
//! }
//! ```
//!
//! Vertices are numbered in order of first mention, whether by a `vertex`
//! line or inside an edge or leg. A vertex has four ports unless declared
//! with `vertex vK: N;`. The order of ports at a vertex is its rotation.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::graph::{FeynmanGraph, PortRef, PHI4_VALENCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("{at}: syntax error: {message}")]
    Syntax { at: Location, message: String },
    #[error("{at}: {message}")]
    Semantic { at: Location, message: String },
    #[error("{at}: graph {graph} is invalid: {summary}")]
    Invalid { at: Location, graph: String, summary: String },
}

impl DslError {
    pub fn location(&self) -> Location {
        match self {
            DslError::Syntax { at, .. } | DslError::Semantic { at, .. } | DslError::Invalid { at, .. } => *at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(usize),
    LBrace,
    RBrace,
    Semi,
    Colon,
    Dot,
    Link,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Number(n) => write!(f, "{n}"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Colon => f.write_str("':'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Link => f.write_str("'--'"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Location)>, DslError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let at = Location { line: li + 1, column: i + 1 };
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
                break;
            }
            let single = match c {
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                ';' => Some(Tok::Semi),
                ':' => Some(Tok::Colon),
                '.' => Some(Tok::Dot),
                _ => None,
            };
            if let Some(t) = single {
                out.push((t, at));
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'-') {
                out.push((Tok::Link, at));
                i += 2;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n = digits.parse().map_err(|_| DslError::Syntax {
                    at,
                    message: format!("number {digits} is too large"),
                })?;
                out.push((Tok::Number(n), at));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), at));
            } else {
                return Err(DslError::Syntax {
                    at,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Location)>,
    pos: usize,
    end: Location,
}

/// Graph under construction with the location of every claimed port.
struct Builder {
    graph: FeynmanGraph,
    vertex_index: HashMap<String, usize>,
    declared: HashSet<String>,
    claimed: HashMap<(usize, usize), Location>,
    pending: Vec<(String, usize, Location)>,
    labels: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> Location {
        self.toks.get(self.pos).map(|(_, l)| *l).unwrap_or(self.end)
    }

    fn next(&mut self, wanted: &str) -> Result<(Tok, Location), DslError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(DslError::Syntax {
                at: self.end,
                message: format!("expected {wanted}, found end of input"),
            }),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Location, DslError> {
        let (t, at) = self.next(&tok.to_string())?;
        if t != tok {
            return Err(DslError::Syntax {
                at,
                message: format!("expected {tok}, found {t}"),
            });
        }
        Ok(at)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Location), DslError> {
        match self.next(what)? {
            (Tok::Ident(s), at) => Ok((s, at)),
            (t, at) => Err(DslError::Syntax {
                at,
                message: format!("expected {what}, found {t}"),
            }),
        }
    }

    fn number(&mut self, what: &str) -> Result<(usize, Location), DslError> {
        match self.next(what)? {
            (Tok::Number(n), at) => Ok((n, at)),
            (t, at) => Err(DslError::Syntax {
                at,
                message: format!("expected {what}, found {t}"),
            }),
        }
    }

    fn port(&mut self) -> Result<(String, usize, Location), DslError> {
        let (v, at) = self.ident("vertex name")?;
        self.expect(Tok::Dot)?;
        let (p, _) = self.number("port index")?;
        Ok((v, p, at))
    }

    fn graph(&mut self) -> Result<(FeynmanGraph, Location), DslError> {
        let (kw, at) = self.ident("'graph'")?;
        if kw != "graph" {
            return Err(DslError::Syntax {
                at,
                message: format!("expected 'graph', found {kw:?}"),
            });
        }
        let (name, _) = self.ident("graph name")?;
        self.expect(Tok::LBrace)?;
        let mut b = Builder {
            graph: FeynmanGraph::new(Some(&name)),
            vertex_index: HashMap::new(),
            declared: HashSet::new(),
            claimed: HashMap::new(),
            pending: Vec::new(),
            labels: HashSet::new(),
        };
        loop {
            if self.peek() == Some(&Tok::RBrace) {
                self.pos += 1;
                break;
            }
            let (kw, kw_at) = self.ident("'vertex', 'edge', 'ext' or '}'")?;
            match kw.as_str() {
                "vertex" => {
                    let (v, v_at) = self.ident("vertex name")?;
                    let valence = if self.peek() == Some(&Tok::Colon) {
                        self.pos += 1;
                        self.number("valence")?.0
                    } else {
                        PHI4_VALENCE
                    };
                    self.expect(Tok::Semi)?;
                    b.declare(&v, valence, v_at)?;
                }
                "edge" => {
                    let (label, l_at) = self.ident("edge label")?;
                    self.expect(Tok::Colon)?;
                    let a = self.port()?;
                    self.expect(Tok::Link)?;
                    let c = self.port()?;
                    self.expect(Tok::Semi)?;
                    b.label(&label, l_at)?;
                    let pa = b.claim(a)?;
                    let pc = b.claim(c)?;
                    b.graph.add_edge((pa.vertex, pa.port), (pc.vertex, pc.port));
                    b.graph.internal.last_mut().expect("just added").label = label;
                }
                "ext" => {
                    let (label, l_at) = self.ident("leg label")?;
                    self.expect(Tok::Colon)?;
                    let a = self.port()?;
                    self.expect(Tok::Semi)?;
                    b.label(&label, l_at)?;
                    let p = b.claim(a)?;
                    b.graph.add_external(&label, (p.vertex, p.port));
                }
                other => {
                    return Err(DslError::Syntax {
                        at: kw_at,
                        message: format!("expected 'vertex', 'edge', 'ext' or '}}', found {other:?}"),
                    })
                }
            }
        }
        b.finish()?;
        Ok((b.graph, at))
    }
}

impl Builder {
    fn vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.vertex_index.get(name) {
            return i;
        }
        let i = self.graph.add_vertex();
        self.graph.vertices[i].name = name.to_owned();
        self.vertex_index.insert(name.to_owned(), i);
        i
    }

    fn declare(&mut self, name: &str, valence: usize, at: Location) -> Result<(), DslError> {
        if !self.declared.insert(name.to_owned()) {
            return Err(DslError::Semantic {
                at,
                message: format!("vertex {name} declared twice"),
            });
        }
        let fresh = !self.vertex_index.contains_key(name);
        let i = self.vertex(name);
        if !fresh && valence != self.graph.vertices[i].valence {
            return Err(DslError::Semantic {
                at,
                message: format!("vertex {name} declared after use with a different valence"),
            });
        }
        self.graph.vertices[i].valence = valence;
        Ok(())
    }

    fn label(&mut self, label: &str, at: Location) -> Result<(), DslError> {
        if !self.labels.insert(label.to_owned()) {
            return Err(DslError::Semantic {
                at,
                message: format!("label {label} used twice"),
            });
        }
        Ok(())
    }

    fn claim(&mut self, (name, port, at): (String, usize, Location)) -> Result<PortRef, DslError> {
        let v = self.vertex(&name);
        if let Some(first) = self.claimed.insert((v, port), at) {
            return Err(DslError::Semantic {
                at,
                message: format!("port reused: {name}.{port} already taken at {first}"),
            });
        }
        self.pending.push((name, port, at));
        Ok(PortRef::new(v, port))
    }

    /// Port indices are checked once every declaration has been seen.
    fn finish(&mut self) -> Result<(), DslError> {
        for (name, port, at) in &self.pending {
            let valence = self.graph.vertices[self.vertex_index[name]].valence;
            if *port >= valence {
                return Err(DslError::Semantic {
                    at: *at,
                    message: format!("bad port index: {name}.{port} but {name} has {valence} ports"),
                });
            }
        }
        Ok(())
    }
}

/// Parses every graph in a source text and validates each one. Vertices
/// declared with an explicit valence may differ from four.
pub fn parse_graph_source(text: &str) -> Result<Vec<FeynmanGraph>, DslError> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let end = Location {
        line: lines,
        column: text.lines().last().map_or(0, |l| l.chars().count()) + 1,
    };
    let mut p = Parser { toks, pos: 0, end };
    let mut names = HashSet::new();
    let mut out = Vec::new();
    while p.peek().is_some() {
        let at = p.here();
        let (g, _) = p.graph()?;
        let name = g.name.clone().unwrap_or_default();
        if !names.insert(name.clone()) {
            return Err(DslError::Semantic {
                at,
                message: format!("graph {name} defined twice"),
            });
        }
        let report = g.validate();
        if !report.is_structurally_valid() {
            return Err(DslError::Invalid {
                at,
                graph: name,
                summary: report.summary(),
            });
        }
        out.push(g);
    }
    Ok(out)
}

/// Canonical text form: vertices `v0..`, edges `e1..` and legs in stored
/// order, one item per line.
pub fn to_dsl(graph: &FeynmanGraph) -> String {
    let mut s = String::new();
    let name = graph.name.as_deref().unwrap_or("G");
    let _ = writeln!(s, "graph {name} {{");
    for (i, v) in graph.vertices.iter().enumerate() {
        if v.valence == PHI4_VALENCE {
            let _ = writeln!(s, "  vertex v{i};");
        } else {
            let _ = writeln!(s, "  vertex v{i}: {};", v.valence);
        }
    }
    for (i, e) in graph.internal.iter().enumerate() {
        let _ = writeln!(s, "  edge e{}: {} -- {};", i + 1, e.ends[0], e.ends[1]);
    }
    for (i, l) in graph.external.iter().enumerate() {
        let label = if is_ident(&l.label) { l.label.clone() } else { format!("f{}", i + 1) };
        let _ = writeln!(s, "  ext {label}: {};", l.at);
    }
    s.push_str("}\n");
    s
}

pub fn to_dsl_all(graphs: &[FeynmanGraph]) -> String {
    graphs.iter().map(to_dsl).collect::<Vec<_>>().join("\n")
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && !matches!(s, "graph" | "vertex" | "edge" | "ext")
}
