//! Plane graphs stored as rotation systems.
//!
//! Every vertex carries the clockwise cyclic order of its neighbours. Faces
//! are traced with a single convention: arriving at `v` along the dart
//! `(u, v)`, the walk leaves along `(v, w)` where `w` is the neighbour
//! immediately following `u` in the rotation at `v`.
//!
//! Vertex ids are never renumbered. A subgraph produced by a surgery keeps
//! the ids of its parent, so colorings computed on pieces can be merged
//! directly. Every connected component owns one designated outer boundary
//! walk; for a connected graph this is simply the outer face.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Vertex identifier.
pub type Vertex = usize;

/// Directed edge `(tail, head)`.
pub type Dart = (Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} lists {1} as a neighbour but not vice versa")]
    AsymmetricAdjacency(Vertex, Vertex),
    #[error("rotation of vertex {0} is not simple: {1}")]
    NotSimple(Vertex, String),
    #[error("bad face structure: {0}")]
    BadFaceStructure(String),
    #[error("outer walk is not a face: {0}")]
    OuterWalkNotAFace(String),
    #[error("outer face is not a cycle")]
    OuterFaceNotACycle,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("{0}-{1} is not a chord of the outer cycle")]
    NotAChord(Vertex, Vertex),
    #[error("triangle {0:?} is not separating")]
    NotSeparating([Vertex; 3]),
    #[error("vertex {0} is not a cut vertex")]
    NotACutVertex(Vertex),
    #[error("no such element: {0}")]
    NoSuchElement(String),
    #[error("vertex {0} is not on the outer face")]
    NotOnOuterFace(Vertex),
    #[error("anchor vertex {0} lies on the separator")]
    AnchorOnSeparator(Vertex),
}

/// A closed walk, stored starting at its lexicographically smallest dart.
///
/// A single-vertex walk denotes the face around an isolated vertex and
/// contains no darts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceWalk(Vec<Vertex>);

impl FaceWalk {
    pub fn new(mut vertices: Vec<Vertex>) -> Self {
        if vertices.len() > 1 {
            let m = vertices.len();
            let start = (0..m)
                .min_by_key(|&j| (vertices[j], vertices[(j + 1) % m]))
                .unwrap_or(0);
            vertices.rotate_left(start);
        }
        FaceWalk(vertices)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    /// Number of darts on the walk.
    pub fn len(&self) -> usize {
        if self.0.len() <= 1 {
            0
        } else {
            self.0.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        let m = self.0.len();
        let k = if m <= 1 { 0 } else { m };
        (0..k).map(move |j| (self.0[j], self.0[(j + 1) % m]))
    }

    /// True when the walk visits at least three distinct vertices, each once.
    pub fn is_cycle(&self) -> bool {
        let distinct: BTreeSet<_> = self.0.iter().collect();
        self.0.len() >= 3 && distinct.len() == self.0.len()
    }
}

impl fmt::Display for FaceWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A simple plane graph given by its rotation system and outer boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    rotation: Vec<Option<Vec<Vertex>>>,
    outer: Vec<FaceWalk>,
}

impl PlaneGraph {
    /// Builds a graph on vertices `0..n` with a single designated outer walk.
    ///
    /// Components not touched by `outer_walk` get the face traced from their
    /// smallest dart as outer boundary.
    pub fn new(
        n: usize,
        rotations: Vec<Vec<Vertex>>,
        outer_walk: Vec<Vertex>,
    ) -> Result<Self, GraphError> {
        Self::with_outer_walks(n, rotations, vec![outer_walk])
    }

    /// Builds a graph on vertices `0..n` with one outer walk per component
    /// (walks for components may be omitted).
    pub fn with_outer_walks(
        n: usize,
        rotations: Vec<Vec<Vertex>>,
        outer_walks: Vec<Vec<Vertex>>,
    ) -> Result<Self, GraphError> {
        if rotations.len() != n {
            return Err(GraphError::BadFaceStructure(format!(
                "expected {n} rotations, got {}",
                rotations.len()
            )));
        }
        let rotation: Vec<Option<Vec<Vertex>>> = rotations
            .into_iter()
            .map(|r| Some(canonical_rotation(r)))
            .collect();
        check_rotations(&rotation)?;
        let mut g = PlaneGraph {
            rotation,
            outer: Vec::new(),
        };
        let comps = g.components();
        let mut outer = vec![None; comps.len()];
        for walk in outer_walks.into_iter().filter(|w| !w.is_empty()) {
            let face = g.face_matching(&walk)?;
            let first = face.vertices()[0];
            let c = comps
                .iter()
                .position(|comp| comp.contains(&first))
                .ok_or_else(|| GraphError::OuterWalkNotAFace(format!("{walk:?}")))?;
            if outer[c].is_some() {
                return Err(GraphError::OuterWalkNotAFace(format!(
                    "second outer walk for the component of {first}"
                )));
            }
            outer[c] = Some(face);
        }
        g.outer = comps
            .iter()
            .zip(outer)
            .map(|(comp, w)| w.unwrap_or_else(|| g.default_face(comp)))
            .collect();
        g.validate()?;
        Ok(g)
    }

    /// One past the largest vertex id that may occur in this graph.
    pub fn id_bound(&self) -> usize {
        self.rotation.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        matches!(self.rotation.get(v), Some(Some(_)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.rotation
            .iter()
            .enumerate()
            .filter_map(|(v, r)| r.as_ref().map(|_| v))
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.iter().filter(|r| r.is_some()).count()
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.iter().flatten().map(Vec::len).sum::<usize>() / 2
    }

    /// Clockwise rotation at `v`, starting at its smallest neighbour.
    ///
    /// Panics if `v` is not a vertex of the graph.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.rotation[v].as_deref().expect("vertex not in graph")
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.contains(u) && self.contains(v) && self.neighbors(u).contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.vertices()
            .flat_map(|u| {
                self.neighbors(u)
                    .iter()
                    .filter(move |&&v| u < v)
                    .map(move |&v| (u, v))
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn darts(&self) -> Vec<Dart> {
        let mut out: Vec<Dart> = self
            .vertices()
            .flat_map(|u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// The neighbour following `u` clockwise around `v`.
    pub fn succ(&self, v: Vertex, u: Vertex) -> Vertex {
        let rot = self.neighbors(v);
        let i = rot.iter().position(|&w| w == u).expect("not a neighbour");
        rot[(i + 1) % rot.len()]
    }

    /// The dart following `d` on its face.
    pub fn next_dart(&self, (u, v): Dart) -> Dart {
        (v, self.succ(v, u))
    }

    /// Traces the face containing the dart `d`.
    pub fn face_of(&self, d: Dart) -> FaceWalk {
        let mut walk = vec![d.0];
        let mut cur = self.next_dart(d);
        while cur != d {
            walk.push(cur.0);
            cur = self.next_dart(cur);
        }
        FaceWalk::new(walk)
    }

    /// All faces, each component traced separately.
    pub fn trace_faces(&self) -> Vec<FaceWalk> {
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for v in self.vertices() {
            if self.degree(v) == 0 {
                faces.push(FaceWalk::new(vec![v]));
            }
        }
        for d in self.darts() {
            if seen.contains(&d) {
                continue;
            }
            let face = self.face_of(d);
            seen.extend(face.darts());
            faces.push(face);
        }
        faces.sort();
        faces
    }

    /// The outer walk of the component containing the smallest vertex.
    pub fn outer_walk(&self) -> &FaceWalk {
        &self.outer[0]
    }

    /// Outer boundary walks, one per component, ordered by component.
    pub fn outer_walks(&self) -> &[FaceWalk] {
        &self.outer
    }

    pub fn outer_vertices(&self) -> BTreeSet<Vertex> {
        self.outer
            .iter()
            .flat_map(|w| w.vertices().iter().copied())
            .collect()
    }

    pub fn outer_darts(&self) -> BTreeSet<Dart> {
        self.outer.iter().flat_map(|w| w.darts()).collect()
    }

    /// Connected components as vertex sets, ordered by smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = vec![false; self.id_bound()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                comp.insert(u);
                for &w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Checks symmetry, simplicity, Euler's formula per component and that
    /// every stored outer walk is a traced face of its own component.
    pub fn validate(&self) -> Result<(), GraphError> {
        check_rotations(&self.rotation)?;
        let faces = self.trace_faces();
        let total: usize = faces.iter().map(FaceWalk::len).sum();
        if total != 2 * self.edge_count() {
            return Err(GraphError::BadFaceStructure(format!(
                "face lengths sum to {total}, expected {}",
                2 * self.edge_count()
            )));
        }
        let comps = self.components();
        for comp in &comps {
            let nv = comp.len() as i64;
            let ne = comp.iter().map(|&v| self.degree(v)).sum::<usize>() as i64 / 2;
            let nf = faces
                .iter()
                .filter(|f| comp.contains(&f.vertices()[0]))
                .count() as i64;
            if nv - ne + nf != 2 {
                return Err(GraphError::BadFaceStructure(format!(
                    "component of {} has V-E+F = {}-{}+{} != 2",
                    comp.first().unwrap(),
                    nv,
                    ne,
                    nf
                )));
            }
        }
        if self.outer.len() != comps.len() {
            return Err(GraphError::OuterWalkNotAFace(format!(
                "{} outer walks for {} components",
                self.outer.len(),
                comps.len()
            )));
        }
        for (walk, comp) in self.outer.iter().zip(&comps) {
            if !comp.contains(&walk.vertices()[0]) || !faces.contains(walk) {
                return Err(GraphError::OuterWalkNotAFace(walk.to_string()));
            }
        }
        Ok(())
    }

    /// The outer boundary as a vertex cycle, for a connected graph whose
    /// outer face is bounded by a simple cycle.
    pub fn outer_cycle(&self) -> Result<&[Vertex], GraphError> {
        if self.outer.len() != 1 || !self.outer[0].is_cycle() {
            return Err(GraphError::OuterFaceNotACycle);
        }
        Ok(self.outer[0].vertices())
    }

    /// Edges joining two outer-cycle vertices that are not cycle edges.
    pub fn outer_chords(&self) -> Result<Vec<(Vertex, Vertex)>, GraphError> {
        let cycle = self.outer_cycle()?;
        let m = cycle.len();
        let on_cycle: BTreeSet<Vertex> = cycle.iter().copied().collect();
        let cycle_edges: BTreeSet<(Vertex, Vertex)> = (0..m)
            .map(|j| ordered(cycle[j], cycle[(j + 1) % m]))
            .collect();
        Ok(self
            .edges()
            .into_iter()
            .filter(|&(u, v)| {
                on_cycle.contains(&u) && on_cycle.contains(&v) && !cycle_edges.contains(&(u, v))
            })
            .collect())
    }

    /// Articulation points of a connected graph.
    pub fn cut_vertices(&self) -> Result<BTreeSet<Vertex>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let Some(root) = self.vertices().next() else {
            return Ok(BTreeSet::new());
        };
        let n = self.id_bound();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut cuts = BTreeSet::new();
        let mut time = 0;
        // (vertex, parent, next neighbour index)
        let mut stack: Vec<(Vertex, Option<Vertex>, usize)> = vec![(root, None, 0)];
        disc[root] = time;
        low[root] = time;
        let mut root_children = 0;
        while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
            let nbrs = self.neighbors(u);
            if *idx < nbrs.len() {
                let w = nbrs[*idx];
                *idx += 1;
                if disc[w] == usize::MAX {
                    time += 1;
                    disc[w] = time;
                    low[w] = time;
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((w, Some(u), 0));
                } else if Some(w) != parent {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(p) = parent {
                    low[p] = low[p].min(low[u]);
                    if p != root && low[u] >= disc[p] {
                        cuts.insert(p);
                    }
                }
            }
        }
        if root_children > 1 {
            cuts.insert(root);
        }
        Ok(cuts)
    }

    /// All triangles as sorted triples.
    pub fn triangles(&self) -> Vec<[Vertex; 3]> {
        let mut out = Vec::new();
        for (u, v) in self.edges() {
            for &w in self.neighbors(u) {
                if w > v && self.has_edge(v, w) {
                    out.push([u, v, w]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether one of the two orientations of the triangle is a face.
    fn is_facial_triangle(&self, [a, b, c]: [Vertex; 3]) -> bool {
        let oriented =
            |x, y, z| self.succ(y, x) == z && self.succ(z, y) == x && self.succ(x, z) == y;
        oriented(a, b, c) || oriented(a, c, b)
    }

    /// Interior and exterior vertex sets (excluding the triangle itself).
    /// Returns `None` when neither side contains a vertex.
    fn triangle_sides(&self, t: [Vertex; 3]) -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
        let (left, right) = self.cycle_sides(&t);
        let outer: BTreeSet<Vertex> = self
            .outer
            .iter()
            .filter(|w| w.vertices().iter().any(|v| t.contains(v)))
            .flat_map(|w| w.vertices().iter().copied())
            .filter(|v| !t.contains(v))
            .collect();
        if left.iter().any(|v| outer.contains(v)) {
            (right, left)
        } else {
            (left, right)
        }
    }

    /// Triangles with at least one vertex strictly inside and one strictly
    /// outside.
    pub fn separating_triangles(&self) -> Vec<[Vertex; 3]> {
        let connected = self.is_connected();
        self.triangles()
            .into_iter()
            .filter(|&t| {
                if connected && self.is_facial_triangle(t) {
                    return false;
                }
                let (inside, outside) = self.triangle_sides(t);
                !inside.is_empty() && !outside.is_empty()
            })
            .collect()
    }

    /// Splits the vertices off a simple closed cycle into the two sides
    /// determined by the rotation system. Cycle vertices are excluded.
    pub fn cycle_sides(&self, cycle: &[Vertex]) -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
        let m = cycle.len();
        let on_cycle: BTreeSet<Vertex> = cycle.iter().copied().collect();
        let mut seeds = [Vec::new(), Vec::new()];
        for j in 0..m {
            let prev = cycle[(j + m - 1) % m];
            let cur = cycle[j];
            let next = cycle[(j + 1) % m];
            let rot = self.neighbors(cur);
            let d = rot.len();
            let start = rot.iter().position(|&w| w == prev).expect("cycle edge");
            let mut side = 0;
            for k in 1..d {
                let w = rot[(start + k) % d];
                if w == next {
                    side = 1;
                    continue;
                }
                if !on_cycle.contains(&w) {
                    seeds[side].push(w);
                }
            }
        }
        let closure = |seeds: &[Vertex]| {
            let mut seen: BTreeSet<Vertex> = seeds.iter().copied().collect();
            let mut queue: VecDeque<Vertex> = seeds.iter().copied().collect();
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if !on_cycle.contains(&w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            seen
        };
        let left = closure(&seeds[0]);
        let right = closure(&seeds[1]);
        debug_assert!(left.is_disjoint(&right), "cycle sides overlap");
        (left, right)
    }

    /// Vertex sets (each including `x` and `y`) of the two sides of the
    /// outer chord `xy`.
    pub fn chord_sides(
        &self,
        x: Vertex,
        y: Vertex,
    ) -> Result<(BTreeSet<Vertex>, BTreeSet<Vertex>), GraphError> {
        let (x, y) = ordered(x, y);
        if !self.outer_chords()?.contains(&(x, y)) {
            return Err(GraphError::NotAChord(x, y));
        }
        let cycle = self.outer_cycle()?;
        let m = cycle.len();
        let i = cycle.iter().position(|&v| v == x).unwrap();
        let arc_a: Vec<Vertex> = (0..m)
            .map(|k| cycle[(i + k) % m])
            .take_while(|&v| v != y)
            .chain(std::iter::once(y))
            .collect();
        let arc_b_inner: BTreeSet<Vertex> = cycle
            .iter()
            .copied()
            .filter(|v| !arc_a.contains(v))
            .collect();
        let (left, right) = self.cycle_sides(&arc_a);
        let inner_a = if left.iter().any(|v| arc_b_inner.contains(v)) {
            right
        } else {
            left
        };
        let side_a: BTreeSet<Vertex> = arc_a.iter().copied().chain(inner_a).collect();
        let side_b: BTreeSet<Vertex> = self
            .vertices()
            .filter(|v| !side_a.contains(v) || *v == x || *v == y)
            .collect();
        Ok((side_a, side_b))
    }

    /// Splits along the outer chord `xy`; the first part contains `anchor`.
    pub fn split_along_chord(
        &self,
        x: Vertex,
        y: Vertex,
        anchor: Vertex,
    ) -> Result<(PlaneGraph, PlaneGraph), GraphError> {
        if anchor == x || anchor == y {
            return Err(GraphError::AnchorOnSeparator(anchor));
        }
        let (a, b) = self.chord_sides(x, y)?;
        if !self.contains(anchor) {
            return Err(GraphError::NoSuchElement(format!("vertex {anchor}")));
        }
        let (s1, s2) = if a.contains(&anchor) { (a, b) } else { (b, a) };
        Ok((self.induced(&s1), self.induced(&s2)))
    }

    /// Returns `(Ext_T, Int_T)` for a separating triangle `t`. The interior
    /// part has `t` as its outer face.
    pub fn split_at_triangle(
        &self,
        t: [Vertex; 3],
    ) -> Result<(PlaneGraph, PlaneGraph), GraphError> {
        let mut t = t;
        t.sort_unstable();
        if !self.separating_triangles().contains(&t) {
            return Err(GraphError::NotSeparating(t));
        }
        let (inside, outside) = self.triangle_sides(t);
        let ext_set: BTreeSet<Vertex> = outside.into_iter().chain(t).collect();
        let int_set: BTreeSet<Vertex> = inside.into_iter().chain(t).collect();
        let ext = self.induced(&ext_set);
        let mut int = self.induced(&int_set);
        let [a, b, c] = t;
        let cand = int.face_of((a, b));
        let face = if cand.len() == 3 && cand.vertices().contains(&c) {
            cand
        } else {
            int.face_of((b, a))
        };
        int.outer = vec![face];
        int.debug_validate();
        Ok((ext, int))
    }

    /// Splits at cut vertex `v`; the first part is `v` plus the component of
    /// `G - v` containing `anchor`, the second part is everything else plus `v`.
    pub fn split_at_cut_vertex(
        &self,
        v: Vertex,
        anchor: Vertex,
    ) -> Result<(PlaneGraph, PlaneGraph), GraphError> {
        if anchor == v {
            return Err(GraphError::AnchorOnSeparator(anchor));
        }
        if !self.cut_vertices()?.contains(&v) {
            return Err(GraphError::NotACutVertex(v));
        }
        if !self.contains(anchor) {
            return Err(GraphError::NoSuchElement(format!("vertex {anchor}")));
        }
        let rest = self.delete_vertex(v)?;
        let comp = rest
            .components()
            .into_iter()
            .find(|c| c.contains(&anchor))
            .expect("anchor has a component");
        let s1: BTreeSet<Vertex> = comp.iter().copied().chain([v]).collect();
        let s2: BTreeSet<Vertex> = self.vertices().filter(|u| !comp.contains(u)).collect();
        Ok((self.induced(&s1), self.induced(&s2)))
    }

    pub fn delete_vertex(&self, v: Vertex) -> Result<PlaneGraph, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::NoSuchElement(format!("vertex {v}")));
        }
        let keep: BTreeSet<Vertex> = self.vertices().filter(|&u| u != v).collect();
        Ok(self.induced(&keep))
    }

    pub fn delete_vertices(&self, gone: &BTreeSet<Vertex>) -> Result<PlaneGraph, GraphError> {
        if let Some(v) = gone.iter().find(|&&v| !self.contains(v)) {
            return Err(GraphError::NoSuchElement(format!("vertex {v}")));
        }
        let keep: BTreeSet<Vertex> = self.vertices().filter(|u| !gone.contains(u)).collect();
        Ok(self.induced(&keep))
    }

    pub fn delete_edge(&self, u: Vertex, v: Vertex) -> Result<PlaneGraph, GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NoSuchElement(format!("edge {u}-{v}")));
        }
        let mut scars = Vec::new();
        if self.degree(u) > 1 {
            scars.push((u, self.succ(u, v)));
        }
        if self.degree(v) > 1 {
            scars.push((v, self.succ(v, u)));
        }
        let mut rotation = self.rotation.clone();
        rotation[u].as_mut().unwrap().retain(|&w| w != v);
        rotation[v].as_mut().unwrap().retain(|&w| w != u);
        let mut g = PlaneGraph {
            rotation,
            outer: Vec::new(),
        };
        g.outer = g.recompute_outer(&self.outer_darts(), &scars);
        g.debug_validate();
        Ok(g)
    }

    /// Induced subgraph on `keep`, ids preserved.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> PlaneGraph {
        let mut scars = Vec::new();
        let mut rotation = vec![None; self.id_bound()];
        for &u in keep {
            let rot = self.neighbors(u);
            let kept: Vec<Vertex> = rot.iter().copied().filter(|w| keep.contains(w)).collect();
            if !kept.is_empty() && kept.len() < rot.len() {
                let d = rot.len();
                for (k, w) in rot.iter().enumerate() {
                    if keep.contains(w) {
                        continue;
                    }
                    let next = (1..d)
                        .map(|s| rot[(k + s) % d])
                        .find(|x| keep.contains(x))
                        .unwrap();
                    scars.push((u, next));
                }
            }
            rotation[u] = Some(kept);
        }
        let mut g = PlaneGraph {
            rotation,
            outer: Vec::new(),
        };
        g.outer = g.recompute_outer(&self.outer_darts(), &scars);
        g.debug_validate();
        g
    }

    /// Adds a new degree-2 vertex in the outer face adjacent to `x` and `y`.
    pub fn add_outer_apex(&self, x: Vertex, y: Vertex) -> Result<(PlaneGraph, Vertex), GraphError> {
        for v in [x, y] {
            if !self.contains(v) {
                return Err(GraphError::NoSuchElement(format!("vertex {v}")));
            }
        }
        if x == y {
            return Err(GraphError::NoSuchElement(format!("distinct pair {x}-{y}")));
        }
        let c = self
            .outer
            .iter()
            .position(|w| w.vertices().contains(&x))
            .ok_or(GraphError::NotOnOuterFace(x))?;
        let walk = self.outer[c].vertices();
        let m = walk.len();
        let i = walk.iter().position(|&v| v == x).unwrap();
        let j = walk
            .iter()
            .position(|&v| v == y)
            .ok_or(GraphError::NotOnOuterFace(y))?;
        let a = self.id_bound();
        let mut rotation = self.rotation.clone();
        rotation.push(Some(vec![x, y]));
        let insert_after = |rot: &mut Vec<Vertex>, prev: Option<Vertex>| match prev {
            Some(p) => {
                let pos = rot.iter().position(|&w| w == p).unwrap();
                rot.insert(pos + 1, a);
            }
            None => rot.push(a),
        };
        let corner_prev = |k: usize| {
            if m > 1 {
                Some(walk[(k + m - 1) % m])
            } else {
                None
            }
        };
        insert_after(rotation[x].as_mut().unwrap(), corner_prev(i));
        insert_after(rotation[y].as_mut().unwrap(), corner_prev(j));
        for r in rotation.iter_mut().flatten() {
            *r = canonical_rotation(std::mem::take(r));
        }
        let mut g = PlaneGraph {
            rotation,
            outer: Vec::new(),
        };
        // The two new faces through the apex; the longer becomes outer.
        let f1 = g.face_of((x, a));
        let f2 = g.face_of((y, a));
        let new_outer = if f2.len() > f1.len() { f2 } else { f1 };
        g.outer = self.outer.clone();
        g.outer[c] = new_outer;
        g.debug_validate();
        Ok((g, a))
    }

    fn recompute_outer(&self, old_outer: &BTreeSet<Dart>, scars: &[Dart]) -> Vec<FaceWalk> {
        let scars: BTreeSet<Dart> = scars.iter().copied().collect();
        self.components()
            .into_iter()
            .map(|comp| {
                let pick = |set: &BTreeSet<Dart>| {
                    set.iter()
                        .find(|&&(u, v)| comp.contains(&u) && self.has_edge(u, v))
                        .copied()
                };
                match pick(old_outer).or_else(|| pick(&scars)) {
                    Some(d) => self.face_of(d),
                    None => self.default_face(&comp),
                }
            })
            .collect()
    }

    fn default_face(&self, comp: &BTreeSet<Vertex>) -> FaceWalk {
        let v = *comp.first().expect("empty component");
        if self.degree(v) == 0 {
            return FaceWalk::new(vec![v]);
        }
        let d = comp
            .iter()
            .flat_map(|&u| self.neighbors(u).iter().map(move |&w| (u, w)))
            .min()
            .unwrap();
        self.face_of(d)
    }

    fn face_matching(&self, walk: &[Vertex]) -> Result<FaceWalk, GraphError> {
        let err = || GraphError::OuterWalkNotAFace(format!("{walk:?}"));
        if walk.iter().any(|&v| !self.contains(v)) {
            return Err(err());
        }
        if walk.len() == 1 {
            return if self.degree(walk[0]) == 0 {
                Ok(FaceWalk::new(walk.to_vec()))
            } else {
                Err(err())
            };
        }
        if !self.has_edge(walk[0], walk[1]) {
            return Err(err());
        }
        let face = self.face_of((walk[0], walk[1]));
        if face == FaceWalk::new(walk.to_vec()) {
            Ok(face)
        } else {
            Err(err())
        }
    }

    fn debug_validate(&self) {
        if cfg!(debug_assertions) {
            if let Err(e) = self.validate() {
                panic!("surgery broke the embedding: {e}");
            }
        }
    }
}

/// Convenience wrapper matching [`PlaneGraph::new`].
pub fn build_plane_graph(
    n: usize,
    rotations: Vec<Vec<Vertex>>,
    outer_walk: Vec<Vertex>,
) -> Result<PlaneGraph, GraphError> {
    PlaneGraph::new(n, rotations, outer_walk)
}

pub(crate) fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn canonical_rotation(mut rot: Vec<Vertex>) -> Vec<Vertex> {
    if let Some(start) = rot
        .iter()
        .enumerate()
        .min_by_key(|(_, &w)| w)
        .map(|(i, _)| i)
    {
        rot.rotate_left(start);
    }
    rot
}

fn check_rotations(rotation: &[Option<Vec<Vertex>>]) -> Result<(), GraphError> {
    for (v, rot) in rotation.iter().enumerate() {
        let Some(rot) = rot else { continue };
        let mut seen = BTreeSet::new();
        for &w in rot {
            if w == v {
                return Err(GraphError::NotSimple(v, "loop".into()));
            }
            if !seen.insert(w) {
                return Err(GraphError::NotSimple(v, format!("repeated neighbour {w}")));
            }
            match rotation.get(w) {
                Some(Some(back)) if back.contains(&v) => {}
                _ => return Err(GraphError::AsymmetricAdjacency(v, w)),
            }
        }
    }
    Ok(())
}
