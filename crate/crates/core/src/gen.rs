//! Seeded generators for plane graphs and list assignments.
//!
//! All randomness comes from [`SplitMix64`], so a given seed reproduces the
//! same instance on every platform.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::lists::{required_list_size, Color, ColorSet, Instance, ListAssignment};
use crate::plane_graph::{PlaneGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("cannot delete {0} more edges without disconnecting the graph")]
    CannotStayConnected(usize),
    #[error("palette assignment gave up at vertex {0}")]
    RetriesExhausted(Vertex),
}

/// The SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish value in `0..n` (plain modulo reduction).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        self.next_u64() % n
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

/// Random stacked triangulation on `n` vertices.
///
/// Starts from the triangle `0,1,2` and inserts each new vertex into a
/// uniformly chosen bounded face. The outer face stays `0,2,1`.
pub fn random_stacked_triangulation(n: usize, seed: u64) -> Result<PlaneGraph, GenError> {
    if n < 3 {
        return Err(GenError::BadParameter(format!("n = {n} < 3")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut rot: Vec<Vec<Vertex>> = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
    let mut faces: Vec<[Vertex; 3]> = vec![[0, 1, 2]];
    for w in 3..n {
        let f = rng.below(faces.len() as u64) as usize;
        let [a, b, c] = faces[f];
        insert_after(&mut rot[b], a, w);
        insert_after(&mut rot[c], b, w);
        insert_after(&mut rot[a], c, w);
        rot.push(vec![a, c, b]);
        faces[f] = [a, b, w];
        faces.push([b, c, w]);
        faces.push([c, a, w]);
    }
    Ok(PlaneGraph::new(n, rot, vec![0, 2, 1]).expect("stacked triangulation is plane"))
}

fn insert_after(rot: &mut Vec<Vertex>, after: Vertex, w: Vertex) {
    let pos = rot
        .iter()
        .position(|&x| x == after)
        .expect("corner in rotation");
    rot.insert(pos + 1, w);
}

/// Applies up to `count` random edge flips to a triangulation, replacing
/// the diagonal `uv` of the quadrilateral `u x v w` by `wx`. Edges of the
/// outer face are left alone.
pub fn random_flips(g: &PlaneGraph, count: usize, seed: u64) -> PlaneGraph {
    let mut rng = SplitMix64::new(seed);
    let n = g.id_bound();
    let mut rot: Vec<Vec<Vertex>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let outer = g.outer_walk().vertices().to_vec();
    let mut h = g.clone();
    for _ in 0..count {
        let edges = h.edges();
        let (u, v) = edges[rng.below(edges.len() as u64) as usize];
        let f1 = h.face_of((u, v));
        let f2 = h.face_of((v, u));
        let outer_face = h.outer_walk();
        if f1.len() != 3 || f2.len() != 3 || &f1 == outer_face || &f2 == outer_face {
            continue;
        }
        let (w, x) = (h.succ(v, u), h.succ(u, v));
        if w == x || h.has_edge(w, x) || h.degree(u) <= 3 || h.degree(v) <= 3 {
            continue;
        }
        rot[u].retain(|&y| y != v);
        rot[v].retain(|&y| y != u);
        insert_after(&mut rot[w], v, x);
        insert_after(&mut rot[x], u, w);
        h = PlaneGraph::new(n, rot.clone(), outer.clone()).expect("flip keeps the embedding");
    }
    h
}

/// Deletes `m` random edges, never disconnecting the graph.
pub fn sparsify(g: &PlaneGraph, m: usize, seed: u64) -> Result<PlaneGraph, GenError> {
    if m > 0 && m >= g.edge_count() {
        return Err(GenError::BadParameter(format!(
            "cannot delete {m} of {} edges",
            g.edge_count()
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut g = g.clone();
    for left in (1..=m).rev() {
        let mut edges = g.edges();
        rng.shuffle(&mut edges);
        let next = edges.into_iter().find_map(|(u, v)| {
            let h = g.delete_edge(u, v).expect("edge exists");
            h.is_connected().then_some(h)
        });
        g = next.ok_or(GenError::CannotStayConnected(left))?;
    }
    Ok(g)
}

/// Greedy independent set over a random vertex order.
pub fn random_independent_set(g: &PlaneGraph, seed: u64) -> BTreeSet<Vertex> {
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<Vertex> = g.vertices().collect();
    rng.shuffle(&mut order);
    let mut set = BTreeSet::new();
    for v in order {
        if g.neighbors(v).iter().all(|w| !set.contains(w)) {
            set.insert(v);
        }
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignmentMode {
    /// Private colors per vertex, merged pairwise along random edges.
    PrivateMerge,
    /// Lists drawn from a shared palette under a separation constraint.
    Palette,
}

impl FromStr for AssignmentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "private-merge" => Ok(AssignmentMode::PrivateMerge),
            "palette" => Ok(AssignmentMode::Palette),
            other => Err(format!(
                "unknown mode {other:?} (expected private-merge or palette)"
            )),
        }
    }
}

/// Lists of size 3 on `indep` and 4 elsewhere with `|L(u) ∩ L(v)| ≤ 1` on
/// every edge.
pub fn random_qualifying_assignment(
    g: &PlaneGraph,
    indep: &BTreeSet<Vertex>,
    mode: AssignmentMode,
    seed: u64,
) -> Result<ListAssignment, GenError> {
    let sizes = |v: Vertex| if indep.contains(&v) { 3 } else { 4 };
    match mode {
        AssignmentMode::PrivateMerge => Ok(private_merge(g, sizes, &|_, _| true, 0.5, seed)),
        AssignmentMode::Palette => palette_lists(g, sizes, seed),
    }
}

fn private_merge(
    g: &PlaneGraph,
    size: impl Fn(Vertex) -> usize,
    allow: &dyn Fn(&ListAssignment, (Vertex, Vertex)) -> bool,
    share: f64,
    seed: u64,
) -> ListAssignment {
    let mut rng = SplitMix64::new(seed);
    let mut next = 0u32;
    let mut lists = ListAssignment::new();
    let mut private: Vec<Vec<Color>> = vec![Vec::new(); g.id_bound()];
    for v in g.vertices() {
        let fresh: Vec<Color> = (next..next + size(v) as u32).map(Color).collect();
        next += size(v) as u32;
        lists.set(v, fresh.iter().copied());
        private[v] = fresh;
    }
    for (u, v) in g.edges() {
        let take = if share >= 1.0 { true } else { rng.coin() };
        if !take || private[u].is_empty() || private[v].is_empty() || !allow(&lists, (u, v)) {
            continue;
        }
        let c = Color(next);
        next += 1;
        for w in [u, v] {
            let old = private[w].remove(0);
            let l = lists.list_mut(w).expect("listed");
            l.remove(&old);
            l.insert(c);
        }
    }
    lists
}

fn palette_lists(
    g: &PlaneGraph,
    size: impl Fn(Vertex) -> usize,
    seed: u64,
) -> Result<ListAssignment, GenError> {
    let mut rng = SplitMix64::new(seed);
    let max_list = g.vertices().map(&size).max().unwrap_or(0) as f64;
    let n = g.vertex_count().max(1) as f64;
    let palette = (1.5 * max_list * n.sqrt()).ceil().max(max_list) as u64;
    let mut lists = ListAssignment::new();
    for v in g.vertices() {
        let neighbour_colors: Vec<Color> = g
            .neighbors(v)
            .iter()
            .filter_map(|&w| lists.get(w))
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut list = ColorSet::new();
        let mut tries = 0;
        while list.len() < size(v) {
            tries += 1;
            if tries > 1000 {
                return Err(GenError::RetriesExhausted(v));
            }
            let c = if !neighbour_colors.is_empty() && rng.coin() {
                neighbour_colors[rng.below(neighbour_colors.len() as u64) as usize]
            } else {
                Color(rng.below(palette) as u32)
            };
            if list.contains(&c) {
                continue;
            }
            list.insert(c);
            let ok = g.neighbors(v).iter().all(|&w| {
                lists
                    .get(w)
                    .is_none_or(|lw| lw.intersection(&list).count() <= 1)
            });
            if !ok {
                list.remove(&c);
            }
        }
        lists.set(v, list);
    }
    Ok(lists)
}

/// Parameters for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceParams {
    pub n: usize,
    pub sparsify: usize,
    pub mode: AssignmentMode,
}

/// A random instance of the unprecolored statement (`P` empty). Sub-seeds
/// for the graph, the deletions, `I` and the lists are drawn in that order
/// from one stream.
pub fn random_instance(params: InstanceParams, seed: u64) -> Result<Instance, GenError> {
    let mut rng = SplitMix64::new(seed);
    let (s_graph, s_sparse, s_indep, s_lists) = (
        rng.next_u64(),
        rng.next_u64(),
        rng.next_u64(),
        rng.next_u64(),
    );
    let mut g = random_stacked_triangulation(params.n, s_graph)?;
    if params.sparsify > 0 {
        g = sparsify(&g, params.sparsify, s_sparse)?;
    }
    let indep = random_independent_set(&g, s_indep);
    let lists = random_qualifying_assignment(&g, &indep, params.mode, s_lists)?;
    Ok(Instance::new(g, indep, Vec::new(), lists))
}

/// A random precolored instance whose lists have exactly the required
/// sizes: `P` is one or two outer vertices with singleton lists, and every
/// edge shares a color whenever both endpoints still have a private one.
pub fn random_tight_instance(n: usize, sparsify_m: usize, seed: u64) -> Result<Instance, GenError> {
    let mut rng = SplitMix64::new(seed);
    let (s_graph, s_sparse, s_indep, s_lists) = (
        rng.next_u64(),
        rng.next_u64(),
        rng.next_u64(),
        rng.next_u64(),
    );
    let mut g = random_stacked_triangulation(n, s_graph)?;
    if sparsify_m > 0 {
        g = sparsify(&g, sparsify_m, s_sparse)?;
    }
    let walk = g.outer_walk().vertices().to_vec();
    let path = if rng.coin() && walk.len() >= 2 {
        vec![walk[0], walk[1]]
    } else {
        vec![walk[0]]
    };
    let mut indep = random_independent_set(&g, s_indep);
    for p in &path {
        indep.remove(p);
    }
    let mut inst = Instance::new(g, indep, path, ListAssignment::new());
    let sizes: Vec<usize> = (0..inst.graph.id_bound())
        .map(|v| {
            if inst.graph.contains(v) {
                required_list_size(v, &inst)
            } else {
                0
            }
        })
        .collect();
    let on_path = |v: Vertex| inst.path.contains(&v);
    let indep_ref = &inst.indep;
    // An I vertex may share colors with at most one path vertex.
    let allow = |lists: &ListAssignment, (u, v): (Vertex, Vertex)| {
        let (i, p) = match (on_path(u), on_path(v)) {
            (true, false) => (v, u),
            (false, true) => (u, v),
            (true, true) => return false,
            _ => return true,
        };
        if !indep_ref.contains(&i) {
            return true;
        }
        let li = lists.list(i);
        !inst
            .path
            .iter()
            .any(|&q| q != p && inst.graph.has_edge(i, q) && !lists.list(q).is_disjoint(li))
    };
    let lists = private_merge(&inst.graph, |v| sizes[v], &allow, 1.0, s_lists);
    inst.lists = lists;
    Ok(inst)
}

/// A random instance on which no edge or vertex can be discarded: every
/// edge shares exactly one color with its ends and every list color is
/// shared along some edge, except for padding added where a vertex has too
/// few edges. Edge colors start distinct and are merged at random while the
/// separation and list-size conditions survive, which pushes lists toward
/// their required sizes. With `precolored`, `P` is one or two outer
/// vertices; otherwise `P` is empty.
pub fn random_minimal_instance(
    n: usize,
    sparsify_m: usize,
    precolored: bool,
    seed: u64,
) -> Result<Instance, GenError> {
    let mut rng = SplitMix64::new(seed);
    let (s_graph, s_sparse, s_indep) = (rng.next_u64(), rng.next_u64(), rng.next_u64());
    let mut g = random_flips(&random_stacked_triangulation(n, s_graph)?, 3 * n, s_graph);
    if sparsify_m > 0 {
        g = sparsify(&g, sparsify_m, s_sparse)?;
    }
    let walk = g.outer_walk().vertices().to_vec();
    let path = match (precolored, rng.coin()) {
        (false, _) => Vec::new(),
        (true, true) if walk.len() >= 2 => vec![walk[0], walk[1]],
        (true, _) => vec![walk[0]],
    };
    // Low-degree vertices first, so that short lists land in I.
    let mut order: Vec<Vertex> = g.vertices().collect();
    SplitMix64::new(s_indep).shuffle(&mut order);
    order.sort_by_key(|&v| g.degree(v));
    let mut indep = BTreeSet::new();
    for v in order {
        if g.neighbors(v).iter().all(|w| !indep.contains(w)) {
            indep.insert(v);
        }
    }
    indep.retain(|v| !path.contains(v) && path.iter().filter(|&&p| g.has_edge(*v, p)).count() < 2);
    let mut inst = Instance::new(g, indep, path, ListAssignment::new());
    let g = &inst.graph;
    let required: Vec<usize> = (0..g.id_bound())
        .map(|v| {
            if g.contains(v) {
                required_list_size(v, &inst)
            } else {
                0
            }
        })
        .collect();
    let edges = g.edges();
    let index = |u: Vertex, v: Vertex| {
        let key = if u < v { (u, v) } else { (v, u) };
        edges.binary_search(&key).expect("edge")
    };
    let mut class: Vec<usize> = (0..edges.len()).collect();
    let list_of = |class: &[usize], v: Vertex| -> BTreeSet<usize> {
        g.neighbors(v).iter().map(|&w| class[index(v, w)]).collect()
    };
    let pad = |v: Vertex| usize::from(inst.path.contains(&v));
    // A merge may not push a list below its required size, unless it was
    // already short and stays the same size (padding fixes it later).
    let ok_at = |class: &[usize], before: &[usize], v: Vertex| {
        let lv = list_of(class, v);
        let need = required[v].max(1) + pad(v);
        (lv.len() >= need || lv.len() == list_of(before, v).len())
            && g.neighbors(v)
                .iter()
                .all(|&w| lv.intersection(&list_of(class, w)).count() <= 1)
    };
    let mut triangles: Vec<[Vertex; 3]> = g
        .trace_faces()
        .into_iter()
        .filter(|f| f.len() == 3)
        .map(|f| {
            let w = f.vertices();
            [w[0], w[1], w[2]]
        })
        .collect();
    for _ in 0..3 {
        rng.shuffle(&mut triangles);
        for &[a, b, c] in &triangles {
            // Merge the color classes of the three sides of a face.
            let merged = [class[index(a, b)], class[index(b, c)], class[index(a, c)]];
            let target = merged[0];
            let before = class.clone();
            let mut touched = BTreeSet::new();
            for (e, k) in class.iter_mut().enumerate() {
                if merged.contains(k) {
                    *k = target;
                    touched.insert(edges[e].0);
                    touched.insert(edges[e].1);
                }
            }
            if !touched.iter().all(|&t| ok_at(&class, &before, t)) {
                class = before;
            }
        }
    }
    let mut ids: Vec<usize> = class.clone();
    ids.sort_unstable();
    ids.dedup();
    let color = |c: usize| Color(ids.binary_search(&c).unwrap() as u32);
    let mut next = ids.len() as u32;
    let mut lists = ListAssignment::new();
    for v in g.vertices() {
        let mut l: ColorSet = list_of(&class, v).into_iter().map(color).collect();
        while l.len() < required[v].max(1) || (pad(v) == 1 && l.len() < 2) {
            l.insert(Color(next));
            next += 1;
        }
        lists.set(v, l);
    }
    inst.lists = lists;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lists::{check_instance, check_planar_hypotheses, check_separation};

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0 of the reference implementation.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn small_triangulations() {
        let t = random_stacked_triangulation(3, 1).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (3, 3));
        let k4 = random_stacked_triangulation(4, 1).unwrap();
        assert_eq!((k4.vertex_count(), k4.edge_count()), (4, 6));
        assert!(random_stacked_triangulation(2, 1).is_err());
    }

    #[test]
    fn triangulations_are_deterministic_and_maximal() {
        for seed in 0..20 {
            let g = random_stacked_triangulation(25, seed).unwrap();
            assert_eq!(g, random_stacked_triangulation(25, seed).unwrap());
            assert_eq!(g.edge_count(), 3 * 25 - 6);
            assert_eq!(g.trace_faces().len(), 2 * 25 - 4);
        }
    }

    #[test]
    fn sparsify_keeps_connectivity() {
        let g = random_stacked_triangulation(12, 3).unwrap();
        assert_eq!(sparsify(&g, 0, 1).unwrap(), g);
        let h = sparsify(&g, 15, 9).unwrap();
        assert_eq!(h.edge_count(), g.edge_count() - 15);
        assert!(h.is_connected());
        h.validate().unwrap();
        let t = random_stacked_triangulation(3, 0).unwrap();
        assert_eq!(sparsify(&t, 1, 0).unwrap().edge_count(), 2);
        assert!(matches!(
            sparsify(&t, 2, 0),
            Err(GenError::CannotStayConnected(_))
        ));
    }

    #[test]
    fn independent_sets() {
        let k4 = random_stacked_triangulation(4, 0).unwrap();
        assert_eq!(random_independent_set(&k4, 5).len(), 1);
        let g = random_stacked_triangulation(30, 2).unwrap();
        let s = random_independent_set(&g, 11);
        assert!(g
            .edges()
            .iter()
            .all(|(u, v)| !(s.contains(u) && s.contains(v))));
    }

    #[test]
    fn assignments_qualify() {
        for seed in 0..30 {
            for mode in [AssignmentMode::PrivateMerge, AssignmentMode::Palette] {
                let g = random_stacked_triangulation(5 + seed as usize, seed).unwrap();
                let i = random_independent_set(&g, seed);
                let l = random_qualifying_assignment(&g, &i, mode, seed).unwrap();
                assert!(check_separation(&g, &l, 1).is_empty());
                assert!(check_planar_hypotheses(&g, &i, &l).is_empty());
                assert_eq!(l, random_qualifying_assignment(&g, &i, mode, seed).unwrap());
            }
        }
        let single = PlaneGraph::new(1, vec![vec![]], vec![0]).unwrap();
        let i: BTreeSet<Vertex> = [0].into();
        let l = random_qualifying_assignment(&single, &i, AssignmentMode::PrivateMerge, 0).unwrap();
        assert_eq!(l.list(0).len(), 3);
    }

    #[test]
    fn tight_instances_are_valid() {
        for seed in 0..40 {
            let n = 4 + (seed as usize % 20);
            let inst = random_tight_instance(n, seed as usize % 4, seed).unwrap();
            let report = check_instance(&inst);
            assert!(report.is_empty(), "seed {seed}: {report}");
        }
    }

    #[test]
    fn minimal_instances_are_valid() {
        for seed in 0..40 {
            let n = 4 + (seed as usize % 25);
            let inst = random_minimal_instance(n, seed as usize % 3, seed % 2 == 0, seed).unwrap();
            let report = check_instance(&inst);
            assert!(report.is_empty(), "seed {seed}: {report}");
            let g = &inst.graph;
            for (u, v) in g.edges() {
                if !(inst.on_path(u) && inst.on_path(v)) {
                    assert_eq!(inst.edge_colors(u, v).len(), 1);
                }
            }
        }
    }
}
