//! The line-oriented graph file.
//!
//! ```text
//! c any comment
//! p <n> <m>
//! e <u> <v>
//! w <r_0> ... <r_{n-1}>
//! path <v_0> ... <v_{k-1}>
//! ```
//!
//! Vertices are 0-based. `w` gives exact rational masses summing to 1 and
//! `path` an induced path of the graph (used as `P` when the file is a
//! pattern).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mass::{Mass, MassedGraph};
use crate::scalar::Scalar;
use crate::{MassedGraphQ, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct GraphFile {
    pub graph: Graph,
    pub weights: Option<Vec<Rational>>,
    pub path: Option<Vec<usize>>,
}

impl GraphFile {
    pub fn massed(&self) -> Result<MassedGraphQ> {
        match &self.weights {
            None => {
                if self.graph.n() == 0 {
                    return Err(Error::InvalidMass("a mass needs at least one vertex".into()));
                }
                Ok(MassedGraph::uniform(self.graph.clone()))
            }
            Some(w) => MassedGraph::new(self.graph.clone(), Mass::weighted(w.clone())?),
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| err(line, format!("`{tok}` is not a vertex number")))
}

pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut graph = Graph::new(0);
    let mut weights = None;
    let mut path = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        let rest: Vec<&str> = toks.collect();
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(err(line, "second `p` line"));
                }
                let [n, m] = rest[..] else {
                    return Err(err(line, "expected `p <n> <m>`"));
                };
                let (n, m) = (number(n, line)?, number(m, line)?);
                header = Some((n, m, line));
                graph = Graph::new(n);
            }
            _ if header.is_none() => return Err(err(line, format!("`{tag}` before the `p` line"))),
            "e" => {
                let [u, v] = rest[..] else {
                    return Err(err(line, "expected `e <u> <v>`"));
                };
                let (u, v) = (number(u, line)?, number(v, line)?);
                graph.add_edge(u, v).map_err(|e| err(line, e.to_string()))?;
            }
            "w" => {
                if weights.is_some() {
                    return Err(err(line, "second `w` line"));
                }
                if rest.len() != graph.n() {
                    return Err(err(line, format!("{} weights for {} vertices", rest.len(), graph.n())));
                }
                let w = rest
                    .iter()
                    .map(|t| Rational::parse_text(t).ok_or_else(|| err(line, format!("`{t}` is not a rational"))))
                    .collect::<Result<Vec<_>>>()?;
                Mass::weighted(w.clone()).map_err(|e| err(line, e.to_string()))?;
                weights = Some(w);
            }
            "path" => {
                if path.is_some() {
                    return Err(err(line, "second `path` line"));
                }
                path = Some((line, rest.iter().map(|t| number(t, line)).collect::<Result<Vec<_>>>()?));
            }
            other => return Err(err(line, format!("unknown line type `{other}`"))),
        }
    }
    let Some((_, m, hline)) = header else {
        return Err(err(0, "missing `p` line"));
    };
    if graph.edge_count() != m {
        return Err(err(hline, format!("header says {m} edges, found {}", graph.edge_count())));
    }
    let path = match path {
        None => None,
        Some((line, p)) => {
            if p.iter().any(|&v| v >= graph.n()) || !graph.is_induced_path(&p) {
                return Err(err(line, "not an induced path of the graph"));
            }
            Some(p)
        }
    };
    Ok(GraphFile { graph, weights, path })
}

pub fn serialize_graph_file(f: &GraphFile) -> String {
    let g = &f.graph;
    let mut out = String::new();
    let _ = writeln!(out, "p {} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    if let Some(w) = &f.weights {
        let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "w {}", ws.join(" "));
    }
    if let Some(p) = &f.path {
        let ps: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "path {}", ps.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_a_path() {
        let f = parse_graph_file("p 3 2\ne 0 1\ne 1 2\n").unwrap();
        assert_eq!(f.graph.edges(), vec![(0, 1), (1, 2)]);
        assert!(f.weights.is_none());
    }

    #[test]
    fn reports_lines() {
        let e = parse_graph_file("p 2 1\ne 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_graph_file("p 2 2\ne 0 1\ne 1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_graph_file("p 3 0\nw 1/2 1/2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_graph_file("p 3 3\ne 0 1\ne 1 2\ne 0 2\npath 0 1 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e}");
    }

    #[test]
    fn weights_round_trip() {
        let text = "p 3 1\ne 0 2\nw 1/2 1/4 1/4\npath 0 2\n";
        let f = parse_graph_file(text).unwrap();
        assert_eq!(serialize_graph_file(&f), text);
        assert!(!f.massed().unwrap().mass.is_uniform());
    }
}
