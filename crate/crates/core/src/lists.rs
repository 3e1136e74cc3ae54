//! Color lists, the separation condition and instance validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{PlaneGraph, Vertex};

/// An opaque color id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u32);

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub type ColorSet = BTreeSet<Color>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("vertex {0} has no list")]
    UnknownVertex(Vertex),
}

/// Mapping from vertices to finite color sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListAssignment {
    lists: BTreeMap<Vertex, ColorSet>,
}

impl ListAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: Vertex) -> Option<&ColorSet> {
        self.lists.get(&v)
    }

    /// The list of `v`; panics when `v` has none.
    pub fn list(&self, v: Vertex) -> &ColorSet {
        &self.lists[&v]
    }

    pub fn set<I: IntoIterator<Item = Color>>(&mut self, v: Vertex, colors: I) {
        self.lists.insert(v, colors.into_iter().collect());
    }

    pub fn remove(&mut self, v: Vertex) -> Option<ColorSet> {
        self.lists.remove(&v)
    }

    pub fn list_mut(&mut self, v: Vertex) -> Option<&mut ColorSet> {
        self.lists.get_mut(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, &ColorSet)> {
        self.lists.iter().map(|(&v, l)| (v, l))
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Sum of the list sizes.
    pub fn total_size(&self) -> usize {
        self.lists.values().map(BTreeSet::len).sum()
    }

    /// `L(u) ∩ L(v)`.
    pub fn shared(&self, u: Vertex, v: Vertex) -> Result<ColorSet, ListError> {
        let a = self.get(u).ok_or(ListError::UnknownVertex(u))?;
        let b = self.get(v).ok_or(ListError::UnknownVertex(v))?;
        Ok(a.intersection(b).copied().collect())
    }

    /// Lists of the given vertices only.
    pub fn restrict<I: IntoIterator<Item = Vertex>>(&self, vertices: I) -> Self {
        ListAssignment {
            lists: vertices
                .into_iter()
                .filter_map(|v| self.lists.get(&v).map(|l| (v, l.clone())))
                .collect(),
        }
    }

    /// Applies a palette map to every color. Colors absent from the map are
    /// kept unchanged.
    pub fn recolor(&self, map: &BTreeMap<Color, Color>) -> Self {
        ListAssignment {
            lists: self
                .lists
                .iter()
                .map(|(&v, l)| (v, l.iter().map(|c| *map.get(c).unwrap_or(c)).collect()))
                .collect(),
        }
    }

    /// Every color used by some list.
    pub fn palette(&self) -> ColorSet {
        self.lists.values().flatten().copied().collect()
    }
}

impl FromIterator<(Vertex, ColorSet)> for ListAssignment {
    fn from_iter<T: IntoIterator<Item = (Vertex, ColorSet)>>(iter: T) -> Self {
        ListAssignment {
            lists: iter.into_iter().collect(),
        }
    }
}

/// A (partial) vertex coloring.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring(BTreeMap<Vertex, Color>);

impl Coloring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: Vertex) -> Option<Color> {
        self.0.get(&v).copied()
    }

    pub fn insert(&mut self, v: Vertex, c: Color) {
        self.0.insert(v, c);
    }

    pub fn remove(&mut self, v: Vertex) -> Option<Color> {
        self.0.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Color)> + '_ {
        self.0.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&mut self, other: &Coloring) {
        self.0.extend(other.iter());
    }

    pub fn recolor(&self, map: &BTreeMap<Color, Color>) -> Self {
        Coloring(
            self.0
                .iter()
                .map(|(&v, c)| (v, *map.get(c).unwrap_or(c)))
                .collect(),
        )
    }
}

impl FromIterator<(Vertex, Color)> for Coloring {
    fn from_iter<T: IntoIterator<Item = (Vertex, Color)>>(iter: T) -> Self {
        Coloring(iter.into_iter().collect())
    }
}

/// A plane graph with an independent set `I`, a precolored outer path `P`
/// of at most two vertices and a list assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: PlaneGraph,
    pub indep: BTreeSet<Vertex>,
    pub path: Vec<Vertex>,
    pub lists: ListAssignment,
}

/// Termination measure, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Measure {
    pub vertices: usize,
    pub edges: usize,
    pub list_total: usize,
}

impl Instance {
    pub fn new(
        graph: PlaneGraph,
        indep: BTreeSet<Vertex>,
        path: Vec<Vertex>,
        lists: ListAssignment,
    ) -> Self {
        Instance {
            graph,
            indep,
            path,
            lists,
        }
    }

    pub fn measure(&self) -> Measure {
        Measure {
            vertices: self.graph.vertex_count(),
            edges: self.graph.edge_count(),
            list_total: self
                .graph
                .vertices()
                .filter_map(|v| self.lists.get(v))
                .map(BTreeSet::len)
                .sum(),
        }
    }

    /// `L(uv)`: the shared colors of adjacent `u`, `v`; empty otherwise.
    pub fn edge_colors(&self, u: Vertex, v: Vertex) -> ColorSet {
        if self.graph.has_edge(u, v) {
            self.lists.shared(u, v).unwrap_or_default()
        } else {
            ColorSet::new()
        }
    }

    pub fn on_path(&self, v: Vertex) -> bool {
        self.path.contains(&v)
    }

    pub fn is_path_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.path.len() == 2 && self.on_path(u) && self.on_path(v) && u != v
    }
}

/// `4 - ι_I(v) - ι_F(v) - 2 ι_P(v)`, where `F` is the outer boundary.
pub fn required_list_size(v: Vertex, inst: &Instance) -> usize {
    let outer = inst
        .graph
        .outer_walks()
        .iter()
        .any(|w| w.vertices().contains(&v));
    required_size(inst.indep.contains(&v), outer, inst.on_path(v))
}

fn required_size(in_indep: bool, outer: bool, on_path: bool) -> usize {
    4 - usize::from(in_indep) - usize::from(outer) - 2 * usize::from(on_path)
}

/// Edges whose lists share more than `d` colors.
pub fn check_separation(g: &PlaneGraph, lists: &ListAssignment, d: usize) -> Vec<(Vertex, Vertex)> {
    g.edges()
        .into_iter()
        .filter(|&(u, v)| match (lists.get(u), lists.get(v)) {
            (Some(a), Some(b)) => a.intersection(b).count() > d,
            _ => false,
        })
        .collect()
}

/// True iff `coloring` is a proper coloring of `g` drawn from the lists.
pub fn verify_coloring(g: &PlaneGraph, lists: &ListAssignment, coloring: &Coloring) -> bool {
    g.vertices().all(|v| match (coloring.get(v), lists.get(v)) {
        (Some(c), Some(l)) => l.contains(&c),
        _ => false,
    }) && g
        .edges()
        .into_iter()
        .all(|(u, v)| coloring.get(u) != coloring.get(v))
}

/// One violated hypothesis of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Embedding(String),
    UnknownVertex(Vertex),
    MissingList(Vertex),
    NotIndependent(Vertex, Vertex),
    IndepOnPath(Vertex),
    PathTooLong(usize),
    PathNotOnOuterFace(Vertex),
    PathNotOuterEdge(Vertex, Vertex),
    Separation {
        u: Vertex,
        v: Vertex,
        shared: usize,
    },
    ListTooSmall {
        v: Vertex,
        required: usize,
        actual: usize,
    },
    PathNotColorable,
    PathConflict {
        v: Vertex,
        path_neighbors: Vec<Vertex>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Embedding(e) => write!(f, "embedding: {e}"),
            Violation::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            Violation::MissingList(v) => write!(f, "vertex {v} has no list"),
            Violation::NotIndependent(u, v) => write!(f, "independent set contains edge {u}-{v}"),
            Violation::IndepOnPath(v) => write!(f, "vertex {v} is in both the independent set and the path"),
            Violation::PathTooLong(n) => write!(f, "path has {n} vertices (at most 2 allowed)"),
            Violation::PathNotOnOuterFace(v) => write!(f, "path vertex {v} is not on the outer face"),
            Violation::PathNotOuterEdge(u, v) => write!(f, "path {u}-{v} is not an outer-face edge"),
            Violation::Separation { u, v, shared } => {
                write!(f, "edge {u}-{v}: lists share {shared} colors (at most 1 allowed)")
            }
            Violation::ListTooSmall { v, required, actual } => {
                write!(f, "vertex {v}: list has {actual} colors, {required} required")
            }
            Violation::PathNotColorable => write!(f, "path is not colorable from its lists"),
            Violation::PathConflict { v, path_neighbors } => write!(
                f,
                "independent vertex {v} shares colors with several path neighbours {path_neighbors:?}"
            ),
        }
    }
}

/// All violations found by [`check_instance`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every hypothesis of the precoloring-extension statement: the
/// embedding, `I` independent and disjoint from `P`, `P` an outer path of at
/// most two vertices, `(*,1)` separation, the list-size bound, colorability
/// of `P`, and that each `v ∈ I` shares colors with at most one neighbour
/// on `P`.
pub fn check_instance(inst: &Instance) -> ValidationReport {
    let g = &inst.graph;
    let mut out = Vec::new();
    if let Err(e) = g.validate() {
        out.push(Violation::Embedding(e.to_string()));
    }
    for &v in inst.indep.iter().chain(&inst.path) {
        if !g.contains(v) {
            out.push(Violation::UnknownVertex(v));
        }
    }
    for v in g.vertices() {
        if inst.lists.get(v).is_none() {
            out.push(Violation::MissingList(v));
        }
    }
    for (u, v) in g.edges() {
        if inst.indep.contains(&u) && inst.indep.contains(&v) {
            out.push(Violation::NotIndependent(u, v));
        }
    }
    for &v in &inst.path {
        if inst.indep.contains(&v) {
            out.push(Violation::IndepOnPath(v));
        }
    }
    let outer = g.outer_vertices();
    if inst.path.len() > 2 {
        out.push(Violation::PathTooLong(inst.path.len()));
    }
    for &v in &inst.path {
        if g.contains(v) && !outer.contains(&v) {
            out.push(Violation::PathNotOnOuterFace(v));
        }
    }
    if let [p, q] = inst.path[..] {
        let darts = g.outer_darts();
        if !(darts.contains(&(p, q)) || darts.contains(&(q, p))) {
            out.push(Violation::PathNotOuterEdge(p, q));
        }
    }
    for (u, v) in check_separation(g, &inst.lists, 1) {
        let shared = inst.lists.shared(u, v).map(|s| s.len()).unwrap_or(0);
        out.push(Violation::Separation { u, v, shared });
    }
    for v in g.vertices() {
        let required = required_size(inst.indep.contains(&v), outer.contains(&v), inst.on_path(v));
        let actual = inst.lists.get(v).map_or(0, BTreeSet::len);
        if actual < required {
            out.push(Violation::ListTooSmall {
                v,
                required,
                actual,
            });
        }
    }
    if !path_colorable(inst) {
        out.push(Violation::PathNotColorable);
    }
    for &v in &inst.indep {
        if !g.contains(v) {
            continue;
        }
        let Some(lv) = inst.lists.get(v) else {
            continue;
        };
        let path_neighbors: Vec<Vertex> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|p| inst.on_path(*p))
            .filter(|&p| inst.lists.get(p).is_some_and(|lp| !lp.is_disjoint(lv)))
            .collect();
        if path_neighbors.len() > 1 {
            out.push(Violation::PathConflict { v, path_neighbors });
        }
    }
    ValidationReport { violations: out }
}

/// Lexicographically smallest proper coloring of the path from its lists.
pub fn smallest_path_coloring(inst: &Instance) -> Option<Vec<Color>> {
    let empty = ColorSet::new();
    let list = |v: Vertex| inst.lists.get(v).unwrap_or(&empty);
    match inst.path[..] {
        [] => Some(Vec::new()),
        [p] => list(p).first().map(|&c| vec![c]),
        [p, q] => {
            let adjacent = inst.graph.has_edge(p, q);
            list(p).iter().find_map(|&a| {
                list(q)
                    .iter()
                    .find(|&&b| !adjacent || a != b)
                    .map(|&b| vec![a, b])
            })
        }
        _ => None,
    }
}

fn path_colorable(inst: &Instance) -> bool {
    inst.path.len() > 2 || smallest_path_coloring(inst).is_some()
}

/// Checks the hypotheses of the planar (unprecolored) statement: `I`
/// independent, `(*,1)` separation, lists of size at least 3 on `I` and at
/// least 4 elsewhere.
pub fn check_planar_hypotheses(
    g: &PlaneGraph,
    indep: &BTreeSet<Vertex>,
    lists: &ListAssignment,
) -> ValidationReport {
    let inst = Instance::new(g.clone(), indep.clone(), Vec::new(), lists.clone());
    let mut report = check_instance(&inst);
    report
        .violations
        .retain(|v| !matches!(v, Violation::ListTooSmall { .. }));
    for v in g.vertices() {
        let required = if indep.contains(&v) { 3 } else { 4 };
        let actual = lists.get(v).map_or(0, BTreeSet::len);
        if actual < required {
            report.violations.push(Violation::ListTooSmall {
                v,
                required,
                actual,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn set(cs: &[u32]) -> ColorSet {
        cs.iter().map(|&c| Color(c)).collect()
    }

    fn triangle() -> PlaneGraph {
        PlaneGraph::new(3, vec![vec![1, 2], vec![2, 0], vec![0, 1]], vec![0, 2, 1]).unwrap()
    }

    fn lists(ls: &[&[u32]]) -> ListAssignment {
        ls.iter().enumerate().map(|(v, l)| (v, set(l))).collect()
    }

    #[test]
    fn shared_colors() {
        let l = lists(&[&[1, 2, 3, 4], &[4, 5, 6], &[7], &[7]]);
        assert_eq!(l.shared(0, 1).unwrap(), set(&[4]));
        assert!(l.shared(0, 2).unwrap().is_empty());
        assert_eq!(l.shared(2, 3).unwrap(), set(&[7]));
        assert_eq!(l.shared(0, 9), Err(ListError::UnknownVertex(9)));
    }

    #[test]
    fn separation() {
        let g = triangle();
        let l = lists(&[&[1, 2], &[2, 3], &[3, 1]]);
        assert!(check_separation(&g, &l, 1).is_empty());
        assert_eq!(check_separation(&g, &l, 0).len(), 3);
        let edge = PlaneGraph::new(2, vec![vec![1], vec![0]], vec![0, 1]).unwrap();
        let l = lists(&[&[1, 2, 3], &[1, 2, 4]]);
        assert_eq!(check_separation(&edge, &l, 1), vec![(0, 1)]);
        assert!(check_separation(&edge, &l, usize::MAX).is_empty());
    }

    #[test]
    fn verify() {
        let g = triangle();
        let l = lists(&[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]]);
        let phi = |cs: [u32; 3]| cs.iter().enumerate().map(|(v, &c)| (v, Color(c))).collect();
        assert!(verify_coloring(&g, &l, &phi([1, 2, 3])));
        assert!(!verify_coloring(&g, &l, &phi([1, 1, 3])));
        assert!(!verify_coloring(&g, &l, &phi([1, 2, 4])));
    }

    #[test]
    fn required_sizes() {
        // K4 with 3 inside the outer triangle (0,2,1)
        let g = PlaneGraph::new(
            4,
            vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]],
            vec![0, 2, 1],
        )
        .unwrap();
        let l = lists(&[&[1], &[1, 2, 3], &[1, 2, 3], &[1, 2, 3, 4]]);
        let mut inst = Instance::new(g, BTreeSet::new(), vec![0], l);
        assert_eq!(required_list_size(3, &inst), 4);
        assert_eq!(required_list_size(1, &inst), 3);
        assert_eq!(required_list_size(0, &inst), 1);
        inst.indep.insert(3);
        assert_eq!(required_list_size(3, &inst), 3);
        inst.indep = BTreeSet::from([1]);
        assert_eq!(required_list_size(1, &inst), 2);
    }

    #[test]
    fn report_lists_all_problems() {
        let g = triangle();
        // 0 and 1 both in I (adjacent), 2 shares two colors with 0.
        let l = lists(&[&[1, 2], &[3, 4], &[1, 2, 5]]);
        let inst = Instance::new(g, BTreeSet::from([0, 1]), vec![], l);
        let report = check_instance(&inst);
        assert!(report.violations.contains(&Violation::NotIndependent(0, 1)));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Separation { u: 0, v: 2, .. })));
        assert!(!report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ListTooSmall { .. })));
    }

    #[test]
    fn condition_iii_violation() {
        // path 0-1 on the outer triangle, 2 in I adjacent to both
        let g = triangle();
        let l = lists(&[&[1], &[2], &[1, 2]]);
        let inst = Instance::new(g, BTreeSet::from([2]), vec![0, 1], l);
        let report = check_instance(&inst);
        assert_eq!(
            report.violations,
            vec![Violation::PathConflict {
                v: 2,
                path_neighbors: vec![0, 1]
            }]
        );
    }

    #[test]
    fn interior_vertex_needs_four() {
        let g = PlaneGraph::new(
            4,
            vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]],
            vec![0, 2, 1],
        )
        .unwrap();
        let l = lists(&[&[1, 2, 3], &[4, 5, 1], &[6, 2, 5], &[3, 4, 6]]);
        let inst = Instance::new(g, BTreeSet::new(), vec![], l);
        assert_eq!(
            check_instance(&inst).violations,
            vec![Violation::ListTooSmall {
                v: 3,
                required: 4,
                actual: 3
            }]
        );
    }

    #[test]
    fn path_coloring_is_lexicographic() {
        let g = triangle();
        let l = lists(&[&[1, 2], &[1, 3], &[5, 6, 7]]);
        let inst = Instance::new(g, BTreeSet::new(), vec![0, 1], l);
        assert_eq!(
            smallest_path_coloring(&inst),
            Some(vec![Color(1), Color(3)])
        );
    }
}
