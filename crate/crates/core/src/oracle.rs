//! Exact list-coloring search, used as ground truth.
//!
//! Backtracking with forward checking: vertices are picked by smallest
//! remaining list (ties to the smallest id), colors are tried in ascending
//! order. The search ignores the embedding.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::gen::SplitMix64;
use crate::lists::{check_separation, Color, ColorSet, Coloring, ListAssignment};
use crate::plane_graph::{PlaneGraph, Vertex};

/// Largest graph accepted by [`count_colorings`].
pub const COUNT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {0} vertices; counting is limited to {COUNT_LIMIT}")]
    TooLarge(usize),
}

struct Search<'a> {
    verts: Vec<Vertex>,
    lists: Vec<Vec<Color>>,
    adj: Vec<Vec<usize>>,
    block: Vec<Vec<u32>>,
    avail: Vec<usize>,
    color: Vec<Option<usize>>,
    nodes: u64,
    _g: &'a PlaneGraph,
}

impl<'a> Search<'a> {
    fn new(g: &'a PlaneGraph, lists: &ListAssignment) -> Self {
        let verts: Vec<Vertex> = g.vertices().collect();
        let mut index = vec![usize::MAX; g.id_bound()];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let lists: Vec<Vec<Color>> = verts
            .iter()
            .map(|&v| {
                lists
                    .get(v)
                    .map(|l| l.iter().copied().collect())
                    .unwrap_or_default()
            })
            .collect();
        let adj = verts
            .iter()
            .map(|&v| g.neighbors(v).iter().map(|&w| index[w]).collect())
            .collect();
        let block = lists.iter().map(|l| vec![0; l.len()]).collect();
        let avail = lists.iter().map(Vec::len).collect();
        Search {
            color: vec![None; verts.len()],
            verts,
            lists,
            adj,
            block,
            avail,
            nodes: 0,
            _g: g,
        }
    }

    /// Colors vertex `i` with its `j`-th list entry. Returns false when some
    /// uncolored neighbour is left without options; the change must still be
    /// undone with [`Search::unassign`].
    fn assign(&mut self, i: usize, j: usize) -> bool {
        let c = self.lists[i][j];
        self.color[i] = Some(j);
        let mut ok = true;
        for k in 0..self.adj[i].len() {
            let w = self.adj[i][k];
            if self.color[w].is_some() {
                continue;
            }
            if let Ok(jj) = self.lists[w].binary_search(&c) {
                self.block[w][jj] += 1;
                if self.block[w][jj] == 1 {
                    self.avail[w] -= 1;
                    if self.avail[w] == 0 {
                        ok = false;
                    }
                }
            }
        }
        ok
    }

    fn unassign(&mut self, i: usize) {
        let j = self.color[i].take().expect("assigned");
        let c = self.lists[i][j];
        for k in 0..self.adj[i].len() {
            let w = self.adj[i][k];
            if self.color[w].is_some() {
                continue;
            }
            if let Ok(jj) = self.lists[w].binary_search(&c) {
                self.block[w][jj] -= 1;
                if self.block[w][jj] == 0 {
                    self.avail[w] += 1;
                }
            }
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.verts.len())
            .filter(|&i| self.color[i].is_none())
            .min_by_key(|&i| (self.avail[i], i))
    }

    /// Applies the fixed partial coloring. False on conflict.
    fn fix(&mut self, fixed: &Coloring) -> bool {
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (i, &v) in self.verts.iter().enumerate() {
            if let Some(c) = fixed.get(v) {
                match self.lists[i].binary_search(&c) {
                    Ok(j) => order.push((i, j)),
                    Err(_) => return false,
                }
            }
        }
        for (i, j) in order {
            if self.block[i][j] > 0 {
                return false;
            }
            if !self.assign(i, j) {
                return false;
            }
        }
        true
    }

    fn solve(&mut self) -> bool {
        self.nodes += 1;
        let Some(i) = self.pick() else { return true };
        for j in 0..self.lists[i].len() {
            if self.block[i][j] > 0 {
                continue;
            }
            let ok = self.assign(i, j);
            if ok && self.solve() {
                return true;
            }
            self.unassign(i);
        }
        false
    }

    fn count(&mut self, cap: u128) -> u128 {
        self.nodes += 1;
        let Some(i) = self.pick() else { return 1 };
        let mut total = 0;
        for j in 0..self.lists[i].len() {
            if self.block[i][j] > 0 {
                continue;
            }
            if self.assign(i, j) {
                total += self.count(cap - total);
            }
            self.unassign(i);
            if total >= cap {
                break;
            }
        }
        total
    }

    fn coloring(&self) -> Coloring {
        self.verts
            .iter()
            .zip(&self.color)
            .map(|(&v, j)| (v, self.lists_color(v, j.expect("complete"))))
            .collect()
    }

    fn lists_color(&self, v: Vertex, j: usize) -> Color {
        let i = self.verts.iter().position(|&w| w == v).unwrap();
        self.lists[i][j]
    }
}

/// A proper list coloring extending `fixed`, or `None` when none exists.
pub fn exact_color(g: &PlaneGraph, lists: &ListAssignment, fixed: &Coloring) -> Option<Coloring> {
    exact_color_counted(g, lists, fixed).0
}

/// Like [`exact_color`], also reporting the number of search nodes.
pub fn exact_color_counted(
    g: &PlaneGraph,
    lists: &ListAssignment,
    fixed: &Coloring,
) -> (Option<Coloring>, u64) {
    let mut s = Search::new(g, lists);
    if s.lists.iter().any(Vec::is_empty) || !s.fix(fixed) {
        return (None, s.nodes);
    }
    let found = s.solve();
    (found.then(|| s.coloring()), s.nodes)
}

/// Exact number of proper list colorings.
pub fn count_colorings(g: &PlaneGraph, lists: &ListAssignment) -> Result<u128, OracleError> {
    let n = g.vertex_count();
    if n > COUNT_LIMIT {
        return Err(OracleError::TooLarge(n));
    }
    Ok(count_up_to(g, lists, u128::MAX))
}

/// Number of proper list colorings, stopping once `cap` is reached.
pub fn count_up_to(g: &PlaneGraph, lists: &ListAssignment, cap: u128) -> u128 {
    let mut s = Search::new(g, lists);
    if s.lists.iter().any(Vec::is_empty) {
        return 0;
    }
    s.count(cap)
}

/// Limits for [`falsify_kd_choosability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Number of candidate assignments (exhaustive mode) or evaluations
    /// (random mode) to examine.
    pub nodes: u64,
    pub time_limit: Duration,
}

impl SearchBudget {
    pub fn nodes(nodes: u64) -> Self {
        SearchBudget {
            nodes: nodes.max(1),
            time_limit: Duration::from_secs(3600),
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::nodes(1_000_000)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FalsifyOutcome {
    /// An assignment with lists of size `k`, separation `d`, and no coloring.
    Certificate(ListAssignment),
    NoneFound,
}

/// Up to this many vertices the search enumerates canonical assignments.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Looks for a list assignment showing `g` is not `(k,d)`-choosable.
///
/// `hint` is tried first when it satisfies the size and separation
/// constraints. Graphs with at most [`EXHAUSTIVE_LIMIT`] vertices are
/// searched exhaustively over assignments whose colors are first used in
/// increasing order; larger graphs get seeded random assignments improved by
/// local search on the number of colorings.
pub fn falsify_kd_choosability(
    g: &PlaneGraph,
    k: usize,
    d: usize,
    budget: SearchBudget,
    seed: u64,
    hint: Option<&ListAssignment>,
) -> FalsifyOutcome {
    let k = k.max(1);
    if let Some(h) = hint {
        let sizes_ok = g.vertices().all(|v| h.get(v).is_some_and(|l| l.len() >= k));
        if sizes_ok
            && check_separation(g, h, d).is_empty()
            && exact_color(g, h, &Coloring::new()).is_none()
        {
            return FalsifyOutcome::Certificate(h.restrict(g.vertices()));
        }
    }
    let started = Instant::now();
    let mut ctx = Ctx {
        g,
        k,
        d,
        budget,
        started,
        nodes: 0,
    };
    let found = if g.vertex_count() <= EXHAUSTIVE_LIMIT {
        ctx.exhaustive()
    } else {
        ctx.random(seed)
    };
    match found {
        Some(l) => FalsifyOutcome::Certificate(l),
        None => FalsifyOutcome::NoneFound,
    }
}

struct Ctx<'a> {
    g: &'a PlaneGraph,
    k: usize,
    d: usize,
    budget: SearchBudget,
    started: Instant,
    nodes: u64,
}

impl Ctx<'_> {
    fn out_of_budget(&self) -> bool {
        self.nodes >= self.budget.nodes || self.started.elapsed() >= self.budget.time_limit
    }

    fn exhaustive(&mut self) -> Option<ListAssignment> {
        let order: Vec<Vertex> = self.g.vertices().collect();
        let mut partial = ListAssignment::new();
        self.extend(&order, 0, 0, &mut partial)
    }

    fn extend(
        &mut self,
        order: &[Vertex],
        pos: usize,
        used: u32,
        partial: &mut ListAssignment,
    ) -> Option<ListAssignment> {
        if self.out_of_budget() {
            return None;
        }
        self.nodes += 1;
        if pos >= 2 {
            let sub: BTreeSet<Vertex> = order[..pos].iter().copied().collect();
            let h = self.g.induced(&sub);
            if exact_color(&h, partial, &Coloring::new()).is_none() {
                // Remaining vertices get fresh colors; they cannot help.
                let mut full = partial.clone();
                let mut next = used;
                for &v in &order[pos..] {
                    full.set(v, (next..next + self.k as u32).map(Color));
                    next += self.k as u32;
                }
                return Some(full);
            }
        }
        if pos == order.len() {
            return None;
        }
        let v = order[pos];
        let k = self.k;
        let palette_cap = (k * order.len()) as u32;
        for fresh in 0..=k {
            let fresh32 = fresh as u32;
            if used + fresh32 > palette_cap || (k - fresh) as u32 > used {
                continue;
            }
            for old in combinations(used as usize, k - fresh) {
                let list: ColorSet = old
                    .iter()
                    .map(|&c| Color(c as u32))
                    .chain((used..used + fresh32).map(Color))
                    .collect();
                let separated = self.g.neighbors(v).iter().all(|&w| {
                    partial
                        .get(w)
                        .is_none_or(|lw| lw.intersection(&list).count() <= self.d)
                });
                if !separated {
                    continue;
                }
                partial.set(v, list.iter().copied());
                let r = self.extend(order, pos + 1, used + fresh32, partial);
                partial.remove(v);
                if r.is_some() {
                    return r;
                }
                if self.out_of_budget() {
                    return None;
                }
            }
        }
        None
    }

    fn random(&mut self, seed: u64) -> Option<ListAssignment> {
        let mut rng = SplitMix64::new(seed);
        let k = self.k as u64;
        while !self.out_of_budget() {
            let palette = (2 * k).saturating_sub(self.d as u64).max(k) + rng.below(k + 1);
            let Some(mut lists) = self.random_lists(palette as u32, &mut rng) else {
                self.nodes += 1;
                continue;
            };
            let mut score = self.score(&lists);
            for _ in 0..64 {
                if score == 0 {
                    return Some(lists);
                }
                if self.out_of_budget() {
                    return None;
                }
                let verts: Vec<Vertex> = self.g.vertices().collect();
                let v = verts[rng.below(verts.len() as u64) as usize];
                let current: Vec<Color> = lists.list(v).iter().copied().collect();
                let out = current[rng.below(current.len() as u64) as usize];
                let candidates: Vec<Color> = (0..palette as u32)
                    .map(Color)
                    .filter(|c| !current.contains(c))
                    .collect();
                if candidates.is_empty() {
                    continue;
                }
                let inc = candidates[rng.below(candidates.len() as u64) as usize];
                let mut trial = lists.clone();
                let l = trial.list_mut(v).unwrap();
                l.remove(&out);
                l.insert(inc);
                if !self.separated_at(&trial, v) {
                    continue;
                }
                let s = self.score(&trial);
                if s <= score {
                    lists = trial;
                    score = s;
                }
            }
            if score == 0 {
                return Some(lists);
            }
        }
        None
    }

    fn separated_at(&self, lists: &ListAssignment, v: Vertex) -> bool {
        let lv = lists.list(v);
        self.g
            .neighbors(v)
            .iter()
            .all(|&w| lists.list(w).intersection(lv).count() <= self.d)
    }

    fn score(&mut self, lists: &ListAssignment) -> u128 {
        self.nodes += 1;
        count_up_to(self.g, lists, 256)
    }

    fn random_lists(&self, palette: u32, rng: &mut SplitMix64) -> Option<ListAssignment> {
        let mut lists = ListAssignment::new();
        for v in self.g.vertices() {
            let mut list = ColorSet::new();
            let mut tries = 0;
            while list.len() < self.k {
                tries += 1;
                if tries > 64 {
                    return None;
                }
                let c = Color(rng.below(palette as u64) as u32);
                if list.contains(&c) {
                    continue;
                }
                list.insert(c);
                let ok = self.g.neighbors(v).iter().all(|&w| {
                    lists
                        .get(w)
                        .is_none_or(|lw| lw.intersection(&list).count() <= self.d)
                });
                if !ok {
                    list.remove(&c);
                }
            }
            lists.set(v, list);
        }
        Some(lists)
    }
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Relabels colors through a bijection of the palette, used to check that
/// answers do not depend on color names.
pub fn palette_bijection(lists: &ListAssignment, seed: u64) -> BTreeMap<Color, Color> {
    let palette: Vec<Color> = lists.palette().into_iter().collect();
    let mut image = palette.clone();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut image);
    palette.into_iter().zip(image).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lists::verify_coloring;

    fn cycle(n: usize) -> PlaneGraph {
        let rots = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        PlaneGraph::new(n, rots, (0..n).collect()).unwrap()
    }

    fn uniform(g: &PlaneGraph, cs: &[u32]) -> ListAssignment {
        g.vertices()
            .map(|v| (v, cs.iter().map(|&c| Color(c)).collect()))
            .collect()
    }

    #[test]
    fn even_cycle_alternates() {
        let g = cycle(6);
        let l = uniform(&g, &[1, 2]);
        let phi = exact_color(&g, &l, &Coloring::new()).unwrap();
        let colors: Vec<u32> = phi.iter().map(|(_, c)| c.0).collect();
        assert_eq!(colors, vec![1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn odd_cycle_unsat() {
        let g = cycle(5);
        assert!(exact_color(&g, &uniform(&g, &[1, 2]), &Coloring::new()).is_none());
        assert_eq!(count_colorings(&g, &uniform(&g, &[1, 2])).unwrap(), 0);
    }

    #[test]
    fn fixed_colors_are_respected() {
        let g = cycle(4);
        let l = uniform(&g, &[1, 2, 3]);
        let fixed: Coloring = [(0, Color(3))].into_iter().collect();
        let phi = exact_color(&g, &l, &fixed).unwrap();
        assert_eq!(phi.get(0), Some(Color(3)));
        assert!(verify_coloring(&g, &l, &phi));
        let clash: Coloring = [(0, Color(3)), (1, Color(3))].into_iter().collect();
        assert!(exact_color(&g, &l, &clash).is_none());
    }

    #[test]
    fn counts() {
        let tri = cycle(3);
        assert_eq!(
            count_colorings(&tri, &uniform(&tri, &[1, 2, 3])).unwrap(),
            6
        );
        let single = PlaneGraph::new(1, vec![vec![]], vec![0]).unwrap();
        assert_eq!(
            count_colorings(&single, &uniform(&single, &[1, 2, 3])).unwrap(),
            3
        );
        // proper 3-colorings of C5: (k-1)^n + (-1)^n (k-1) = 32 - 2
        let c5 = cycle(5);
        assert_eq!(count_colorings(&c5, &uniform(&c5, &[1, 2, 3])).unwrap(), 30);
        let big = cycle(21);
        assert_eq!(
            count_colorings(&big, &uniform(&big, &[1, 2])),
            Err(OracleError::TooLarge(21))
        );
    }

    #[test]
    fn combinations_lexicographic() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3), Vec::<Vec<usize>>::new());
        assert_eq!(combinations(3, 2)[0], vec![0, 1]);
    }
}
