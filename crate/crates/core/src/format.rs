//! Line-based instance files.
//!
//! ```text
//! planar-sep v1
//! n 4
//! rot 0: 1 2 3
//! rot 1: 0 3 2
//! rot 2: 0 1 3
//! rot 3: 0 2 1
//! outer: 0 2 1
//! path: 0
//! indep:
//! list 0: 1 2 3 4
//! ...
//! ```
//!
//! Rotations are clockwise. Text after `#` is ignored. A graph with several
//! components lists one outer walk per component, separated by `|`.
//! Serialization is canonical, so `serialize(parse(s)) == s` for any file
//! this module wrote.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::lists::{Color, Instance, ListAssignment};
use crate::plane_graph::{GraphError, PlaneGraph, Vertex};

pub const HEADER: &str = "planar-sep v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid embedding: {source}")]
    Graph { line: usize, source: GraphError },
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        message: message.into(),
    })
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let last = text.lines().count().max(1);
        Lines {
            lines,
            pos: 0,
            last,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        match self.lines.get(self.pos) {
            Some(&l) => {
                self.pos += 1;
                Ok(l)
            }
            None => err(
                self.last,
                format!("unexpected end of input, expected {what}"),
            ),
        }
    }

    /// Content after `prefix`, or an error naming the expected section.
    fn section(&mut self, prefix: &str) -> Result<(usize, &'a str), FormatError> {
        let (no, line) = self.next(prefix)?;
        match line.strip_prefix(prefix) {
            Some(rest) => Ok((no, rest.trim())),
            None => err(no, format!("expected `{prefix}`, found `{line}`")),
        }
    }
}

fn numbers<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>, FormatError> {
    s.split_whitespace()
        .map(|t| {
            t.parse()
                .map_or_else(|_| err(line, format!("bad number `{t}`")), Ok)
        })
        .collect()
}

/// Parses `<keyword> <v>: rest` and returns `(v, rest)`.
fn keyed<'a>(line: usize, s: &'a str, keyword: &str) -> Result<(Vertex, &'a str), FormatError> {
    let Some(rest) = s.strip_prefix(keyword) else {
        return err(line, format!("expected `{keyword} <v>:`, found `{s}`"));
    };
    let Some((v, tail)) = rest.split_once(':') else {
        return err(line, format!("missing `:` in `{s}`"));
    };
    let v = v
        .trim()
        .parse()
        .map_or_else(|_| err(line, format!("bad vertex `{}`", v.trim())), Ok)?;
    Ok((v, tail.trim()))
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut lines = Lines::new(text);
    let (no, header) = lines.next("header")?;
    if header != HEADER {
        return err(no, format!("expected `{HEADER}`"));
    }
    let (no, n) = lines.section("n ")?;
    let n: usize = n
        .parse()
        .map_or_else(|_| err(no, format!("bad vertex count `{n}`")), Ok)?;
    let mut rot: Vec<Option<Vec<Vertex>>> = vec![None; n];
    for _ in 0..n {
        let (no, line) = lines.next("rot line")?;
        let (v, rest) = keyed(no, line, "rot ")?;
        if v >= n {
            return err(no, format!("vertex {v} out of range"));
        }
        if rot[v].is_some() {
            return err(no, format!("duplicate rot line for {v}"));
        }
        let nbrs: Vec<Vertex> = numbers(no, rest)?;
        if let Some(w) = nbrs.iter().find(|&&w| w >= n) {
            return err(no, format!("neighbour {w} out of range"));
        }
        rot[v] = Some(nbrs);
    }
    let (outer_line, outer) = lines.section("outer:")?;
    let walks: Vec<Vec<Vertex>> = outer
        .split('|')
        .map(|w| numbers(outer_line, w))
        .collect::<Result<_, _>>()?;
    let rotations: Vec<Vec<Vertex>> = rot.into_iter().map(Option::unwrap_or_default).collect();
    let graph =
        PlaneGraph::with_outer_walks(n, rotations, walks).map_err(|source| FormatError::Graph {
            line: outer_line,
            source,
        })?;
    let (no, path) = lines.section("path:")?;
    let path: Vec<Vertex> = numbers(no, path)?;
    if let Some(v) = path.iter().find(|&&v| v >= n) {
        return err(no, format!("vertex {v} out of range"));
    }
    let (no, indep) = lines.section("indep:")?;
    let indep: BTreeSet<Vertex> = numbers::<Vertex>(no, indep)?.into_iter().collect();
    if let Some(v) = indep.iter().find(|&&v| v >= n) {
        return err(no, format!("vertex {v} out of range"));
    }
    let mut lists = ListAssignment::new();
    for _ in 0..n {
        let (no, line) = lines.next("list line")?;
        let (v, rest) = keyed(no, line, "list ")?;
        if v >= n {
            return err(no, format!("vertex {v} out of range"));
        }
        if lists.get(v).is_some() {
            return err(no, format!("duplicate list line for {v}"));
        }
        let colors: Vec<u32> = numbers(no, rest)?;
        lists.set(v, colors.into_iter().map(Color));
    }
    if let Ok((no, extra)) = lines.next("") {
        return err(no, format!("unexpected trailing line `{extra}`"));
    }
    Ok(Instance::new(graph, indep, path, lists))
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn keyed_line(out: &mut String, key: &str, items: String) {
    if items.is_empty() {
        writeln!(out, "{key}").unwrap();
    } else {
        writeln!(out, "{key} {items}").unwrap();
    }
}

/// The rotation of a cyclic sequence that is smallest lexicographically.
fn canonical_cycle(xs: &[Vertex]) -> Vec<Vertex> {
    (0..xs.len())
        .map(|i| [&xs[i..], &xs[..i]].concat())
        .min()
        .unwrap_or_default()
}

pub fn serialize_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "n {}", g.vertex_count()).unwrap();
    for v in g.vertices() {
        keyed_line(
            &mut out,
            &format!("rot {v}:"),
            join(canonical_cycle(g.neighbors(v))),
        );
    }
    let walks: Vec<String> = g
        .outer_walks()
        .iter()
        .map(|w| join(canonical_cycle(w.vertices())))
        .collect();
    keyed_line(&mut out, "outer:", walks.join(" | "));
    keyed_line(&mut out, "path:", join(&inst.path));
    keyed_line(&mut out, "indep:", join(&inst.indep));
    for v in g.vertices() {
        let list = inst
            .lists
            .get(v)
            .map(|l| join(l.iter()))
            .unwrap_or_default();
        keyed_line(&mut out, &format!("list {v}:"), list);
    }
    out
}
