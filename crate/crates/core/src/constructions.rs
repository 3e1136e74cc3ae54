//! The tightness family: `K_{2,(k-1)^2}` with lists that cannot be colored.
//!
//! The two hubs `a = 0` and `b = 1` get the lists `{a_1..a_{k-1}}` and
//! `{b_1..b_{k-1}}`; the middle vertex `x_ij` gets `{a_i, b_j}`. Whatever
//! colors `a_i`, `b_j` the hubs take, `x_ij` is stuck.

use thiserror::Error;

use crate::lists::{check_separation, Color, Coloring, ListAssignment};
use crate::oracle;
use crate::plane_graph::{PlaneGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Id of the middle vertex `x_ij` (1-based `i`, `j`).
pub fn middle_vertex(k: usize, i: usize, j: usize) -> Vertex {
    2 + (i - 1) * (k - 1) + (j - 1)
}

fn color_a(i: usize) -> Color {
    Color(i as u32 - 1)
}

fn color_b(k: usize, j: usize) -> Color {
    Color((k - 1 + j - 1) as u32)
}

pub fn ktv_family(k: usize) -> Result<(PlaneGraph, ListAssignment), ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::BadParameter(format!("k = {k} < 2")));
    }
    let m = (k - 1) * (k - 1);
    let middle: Vec<Vertex> = (2..2 + m).collect();
    let mut rot = vec![middle.clone(), middle.iter().rev().copied().collect()];
    rot.extend(middle.iter().map(|_| vec![0, 1]));
    let outer = vec![0, middle[0], 1, middle[m - 1]];
    let g = PlaneGraph::new(2 + m, rot, outer).expect("family embedding is plane");
    let mut lists = ListAssignment::new();
    lists.set(0, (1..k).map(color_a));
    lists.set(1, (1..k).map(|j| color_b(k, j)));
    for i in 1..k {
        for j in 1..k {
            lists.set(middle_vertex(k, i, j), [color_a(i), color_b(k, j)]);
        }
    }
    Ok((g, lists))
}

/// Facts checked by [`verify_family`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    pub embedding_ok: bool,
    pub complete_bipartite: bool,
    pub min_list: usize,
    pub min_union: usize,
    pub max_union: usize,
    pub separated: bool,
    pub colorable: bool,
    /// For every hub coloring, the middle vertex left without a color.
    pub stuck_witnesses: bool,
}

impl FamilyReport {
    /// All expected properties hold, the oracle answer included.
    pub fn confirms(&self) -> bool {
        self.embedding_ok
            && self.complete_bipartite
            && self.min_list >= 2
            && self.min_union == self.k
            && self.max_union == self.k
            && self.separated
            && !self.colorable
            && self.stuck_witnesses
    }
}

pub fn verify_family(k: usize) -> Result<FamilyReport, ConstructionError> {
    let (g, lists) = ktv_family(k)?;
    let m = (k - 1) * (k - 1);
    let complete_bipartite = g.edge_count() == 2 * m
        && (2..2 + m).all(|x| g.has_edge(0, x) && g.has_edge(1, x))
        && !g.has_edge(0, 1);
    let unions: Vec<usize> = g
        .edges()
        .into_iter()
        .map(|(u, v)| lists.list(u).union(lists.list(v)).count())
        .collect();
    let stuck_witnesses = (1..k).all(|i| {
        (1..k).all(|j| {
            let l = lists.list(middle_vertex(k, i, j));
            l.contains(&color_a(i)) && l.contains(&color_b(k, j)) && l.len() == 2
        })
    });
    Ok(FamilyReport {
        k,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        embedding_ok: g.validate().is_ok(),
        complete_bipartite,
        min_list: lists.iter().map(|(_, l)| l.len()).min().unwrap_or(0),
        min_union: unions.iter().copied().min().unwrap_or(0),
        max_union: unions.iter().copied().max().unwrap_or(0),
        separated: check_separation(&g, &lists, 1).is_empty(),
        colorable: oracle::exact_color(&g, &lists, &Coloring::new()).is_some(),
        stuck_witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_shape() {
        let (g, l) = ktv_family(3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 8));
        let lists: Vec<Vec<u32>> = (2..6)
            .map(|x| l.list(x).iter().map(|c| c.0).collect())
            .collect();
        // a_1 = 0, a_2 = 1, b_1 = 2, b_2 = 3
        assert_eq!(lists, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
        assert_eq!(g.outer_walk().vertices(), &[0, 2, 1, 5]);
    }

    #[test]
    fn k2_is_a_path() {
        let (g, l) = ktv_family(2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        assert_eq!(l.list(2).len(), 2);
        let r = verify_family(2).unwrap();
        assert!(!r.colorable && r.min_union == 2);
    }

    #[test]
    fn bad_parameter() {
        assert!(ktv_family(1).is_err());
    }

    #[test]
    fn families_confirmed() {
        for k in 3..=4 {
            let r = verify_family(k).unwrap();
            assert!(r.confirms(), "{r:?}");
            assert_eq!(r.vertices, 2 + (k - 1) * (k - 1));
        }
    }
}
