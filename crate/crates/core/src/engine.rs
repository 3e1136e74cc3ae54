//! Constructive solver for precolored instances.
//!
//! Each recursion step applies the first rule that fits, in this order:
//! small base case, components, precoloring `P`, deletion of edges whose
//! endpoints share no color, vertices with a color no neighbour can take,
//! cut vertices, separating triangles through `I`, outer chords with a big
//! side, and finally a frontier step that colors one or three vertices of
//! the outer cycle. Every step is logged in a [`ReductionTrace`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lists::{
    check_instance, check_planar_hypotheses, smallest_path_coloring, verify_coloring, Color,
    ColorSet, Coloring, Instance, ListAssignment, Measure, ValidationReport,
};
use crate::oracle;
use crate::plane_graph::{PlaneGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("instance violates the hypotheses:\n{0}")]
    PreconditionViolated(ValidationReport),
    #[error("internal assertion failed: {0}")]
    InternalAssertionFailure(String),
    #[error("no frontier vertex outside I and P")]
    NoEligibleFrontierVertex,
    #[error("trace does not match the instance: {0}")]
    ReplayMismatch(String),
}

fn fail<T>(msg: impl Into<String>) -> Result<T, EngineError> {
    Err(EngineError::InternalAssertionFailure(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Base,
    Component,
    NormalizeP,
    DelEdge,
    FreeVertex,
    CutSplit,
    TriSplit,
    ChordSplit,
    X1,
    X2,
    X3,
    Fallback,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::Base,
        Rule::Component,
        Rule::NormalizeP,
        Rule::DelEdge,
        Rule::FreeVertex,
        Rule::CutSplit,
        Rule::TriSplit,
        Rule::ChordSplit,
        Rule::X1,
        Rule::X2,
        Rule::X3,
        Rule::Fallback,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Base => "BASE",
            Rule::Component => "COMPONENT",
            Rule::NormalizeP => "NORMALIZE_P",
            Rule::DelEdge => "DEL_EDGE",
            Rule::FreeVertex => "FREE_VERTEX",
            Rule::CutSplit => "CUT_SPLIT",
            Rule::TriSplit => "TRI_SPLIT",
            Rule::ChordSplit => "CHORD_SPLIT",
            Rule::X1 => "X1",
            Rule::X2 => "X2",
            Rule::X3 => "X3",
            Rule::Fallback => "FALLBACK",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrontierRule {
    X1,
    X2,
    X3,
}

/// One rule application together with every choice it made.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Step {
    Base {
        coloring: Coloring,
    },
    Component {
        components: Vec<Vec<Vertex>>,
    },
    NormalizeP {
        path: Vec<Vertex>,
        colors: Vec<Color>,
    },
    DelEdge {
        u: Vertex,
        v: Vertex,
    },
    FreeVertex {
        vertex: Vertex,
        color: Color,
    },
    CutSplit {
        cut: Vertex,
        anchor: Vertex,
    },
    TriSplit {
        x: Vertex,
        y: Vertex,
        z: Vertex,
    },
    /// `protected` is the vertex of `I` adjacent to both chord ends whose
    /// two edge colors are carried by an apex added to the first side.
    ChordSplit {
        x: Vertex,
        y: Vertex,
        anchor: Vertex,
        protected: Option<Vertex>,
    },
    Frontier {
        frontier: FrontierRule,
        picks: Vec<(Vertex, Color)>,
    },
    Fallback {
        coloring: Coloring,
        reason: String,
    },
}

impl Step {
    pub fn rule(&self) -> Rule {
        match self {
            Step::Base { .. } => Rule::Base,
            Step::Component { .. } => Rule::Component,
            Step::NormalizeP { .. } => Rule::NormalizeP,
            Step::DelEdge { .. } => Rule::DelEdge,
            Step::FreeVertex { .. } => Rule::FreeVertex,
            Step::CutSplit { .. } => Rule::CutSplit,
            Step::TriSplit { .. } => Rule::TriSplit,
            Step::ChordSplit { .. } => Rule::ChordSplit,
            Step::Frontier {
                frontier: FrontierRule::X1,
                ..
            } => Rule::X1,
            Step::Frontier {
                frontier: FrontierRule::X2,
                ..
            } => Rule::X2,
            Step::Frontier {
                frontier: FrontierRule::X3,
                ..
            } => Rule::X3,
            Step::Fallback { .. } => Rule::Fallback,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub depth: usize,
    pub measure: Measure,
    #[serde(flatten)]
    pub step: Step,
    /// Measures of the subinstances, in the order they were solved.
    pub children: Vec<Measure>,
}

/// Pre-order log of the recursion tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub records: Vec<TraceRecord>,
}

impl ReductionTrace {
    /// Number of applications of each rule, indexed like [`Rule::ALL`].
    pub fn rule_counts(&self) -> [usize; 12] {
        let mut counts = [0; 12];
        for r in &self.records {
            counts[r.step.rule() as usize] += 1;
        }
        counts
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.rule_counts()[rule as usize]
    }

    pub fn fallbacks(&self) -> usize {
        self.count(Rule::Fallback)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Validate every subinstance and the frontier list updates.
    pub check_subinstances: bool,
    /// Return an error on a failed check instead of falling back to the
    /// oracle.
    pub strict: bool,
    /// Instances with at most this many vertices go to the oracle.
    pub base_threshold: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            check_subinstances: true,
            strict: cfg!(debug_assertions),
            base_threshold: 6,
        }
    }
}

/// Colors a plane graph whose lists have size at least 3 on the
/// independent set `indep` and at least 4 elsewhere, with adjacent lists
/// sharing at most one color.
pub fn color_planar(
    g: &PlaneGraph,
    indep: &BTreeSet<Vertex>,
    lists: &ListAssignment,
) -> Result<(Coloring, ReductionTrace), EngineError> {
    let report = check_planar_hypotheses(g, indep, lists);
    if !report.is_empty() {
        return Err(EngineError::PreconditionViolated(report));
    }
    solve(&Instance::new(
        g.clone(),
        indep.clone(),
        Vec::new(),
        lists.clone(),
    ))
}

pub fn solve(inst: &Instance) -> Result<(Coloring, ReductionTrace), EngineError> {
    solve_with(inst, &SolveOptions::default())
}

pub fn solve_with(
    inst: &Instance,
    opts: &SolveOptions,
) -> Result<(Coloring, ReductionTrace), EngineError> {
    let report = check_instance(inst);
    if !report.is_empty() {
        return Err(EngineError::PreconditionViolated(report));
    }
    let mut runner = Runner {
        opts: *opts,
        replay: None,
        trace: Vec::new(),
    };
    let phi = runner.run(inst, 0)?;
    if !verify_coloring(&inst.graph, &inst.lists, &phi) {
        return fail("final coloring does not verify");
    }
    Ok((
        phi,
        ReductionTrace {
            records: runner.trace,
        },
    ))
}

/// Re-executes `trace` on `inst`, taking every choice from the trace, and
/// returns the coloring it produces. Fails if any subinstance measure or
/// choice disagrees with the instance.
pub fn replay(inst: &Instance, trace: &ReductionTrace) -> Result<Coloring, EngineError> {
    let opts = SolveOptions {
        check_subinstances: true,
        strict: true,
        base_threshold: 0,
    };
    let mut runner = Runner {
        opts,
        replay: Some(trace.records.iter()),
        trace: Vec::new(),
    };
    let phi = runner.run(inst, 0)?;
    if runner.replay.as_mut().is_some_and(|it| it.next().is_some()) {
        return Err(EngineError::ReplayMismatch(
            "trace has unused records".into(),
        ));
    }
    if runner.trace != trace.records {
        return Err(EngineError::ReplayMismatch(
            "subinstance measures differ".into(),
        ));
    }
    if !verify_coloring(&inst.graph, &inst.lists, &phi) {
        return Err(EngineError::ReplayMismatch(
            "replayed coloring does not verify".into(),
        ));
    }
    Ok(phi)
}

/// Result of one frontier step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierStep {
    pub rule: FrontierRule,
    pub removed: BTreeSet<Vertex>,
    pub picks: Coloring,
    pub child: Instance,
}

/// Applies the frontier rule to an instance on which no earlier rule
/// applies: `P` nonempty with singleton lists and the outer face a cycle.
pub fn frontier_step(inst: &Instance) -> Result<FrontierStep, EngineError> {
    let (rule, picks) = frontier_choice(inst)?;
    let child = frontier_child(inst, &picks)?;
    Ok(FrontierStep {
        rule,
        removed: picks.iter().map(|&(v, _)| v).collect(),
        picks: picks.into_iter().collect(),
        child,
    })
}

struct Runner<'t> {
    opts: SolveOptions,
    replay: Option<std::slice::Iter<'t, TraceRecord>>,
    trace: Vec<TraceRecord>,
}

impl Runner<'_> {
    fn run(&mut self, inst: &Instance, depth: usize) -> Result<Coloring, EngineError> {
        let idx = self.trace.len();
        match self.attempt(inst, depth) {
            Ok(phi) => Ok(phi),
            Err(
                e @ (EngineError::InternalAssertionFailure(_)
                | EngineError::NoEligibleFrontierVertex),
            ) if !self.opts.strict && self.replay.is_none() => {
                self.trace.truncate(idx);
                let fixed: Coloring = match smallest_path_coloring(inst) {
                    Some(cs) => inst.path.iter().copied().zip(cs).collect(),
                    None => Coloring::new(),
                };
                let coloring = oracle::exact_color(&inst.graph, &inst.lists, &fixed)
                    .or_else(|| oracle::exact_color(&inst.graph, &inst.lists, &Coloring::new()))
                    .ok_or_else(|| e.clone())?;
                self.trace.push(TraceRecord {
                    depth,
                    measure: inst.measure(),
                    step: Step::Fallback {
                        coloring: coloring.clone(),
                        reason: e.to_string(),
                    },
                    children: Vec::new(),
                });
                Ok(coloring)
            }
            Err(e) => Err(e),
        }
    }

    fn attempt(&mut self, inst: &Instance, depth: usize) -> Result<Coloring, EngineError> {
        let measure = inst.measure();
        let step = match &mut self.replay {
            None => self.choose(inst)?,
            Some(it) => {
                let rec = it
                    .next()
                    .ok_or_else(|| EngineError::ReplayMismatch("trace ended early".into()))?;
                if rec.depth != depth || rec.measure != measure {
                    return Err(EngineError::ReplayMismatch(format!(
                        "expected depth {depth} measure {measure:?}, trace has depth {} measure {:?}",
                        rec.depth, rec.measure
                    )));
                }
                rec.step.clone()
            }
        };
        let idx = self.trace.len();
        self.trace.push(TraceRecord {
            depth,
            measure,
            step: step.clone(),
            children: Vec::new(),
        });
        self.execute(inst, &step, idx, depth)
    }

    fn choose(&self, inst: &Instance) -> Result<Step, EngineError> {
        let g = &inst.graph;
        let l = &inst.lists;
        if g.vertex_count() <= self.opts.base_threshold {
            let fixed: Coloring = match smallest_path_coloring(inst) {
                Some(cs) => inst.path.iter().copied().zip(cs).collect(),
                None => return fail("path is not colorable"),
            };
            return match oracle::exact_color(g, l, &fixed) {
                Some(coloring) => Ok(Step::Base { coloring }),
                None => fail("base instance has no coloring"),
            };
        }
        if !g.is_connected() {
            let components = g
                .components()
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect();
            return Ok(Step::Component { components });
        }
        if inst.path.is_empty() {
            let v0 = *g.outer_vertices().first().expect("nonempty graph");
            let Some(&c) = l.list(v0).first() else {
                return fail("empty list");
            };
            return Ok(Step::NormalizeP {
                path: vec![v0],
                colors: vec![c],
            });
        }
        if inst.path.iter().any(|&p| l.list(p).len() != 1) {
            let Some(colors) = smallest_path_coloring(inst) else {
                return fail("path is not colorable");
            };
            return Ok(Step::NormalizeP {
                path: inst.path.clone(),
                colors,
            });
        }
        for (u, v) in g.edges() {
            if !inst.is_path_edge(u, v) && inst.edge_colors(u, v).is_empty() {
                return Ok(Step::DelEdge { u, v });
            }
        }
        for u in g.vertices().filter(|&u| !inst.on_path(u)) {
            let used: ColorSet = g
                .neighbors(u)
                .iter()
                .flat_map(|&w| inst.edge_colors(u, w))
                .collect();
            if let Some(&color) = l.list(u).iter().find(|c| !used.contains(c)) {
                return Ok(Step::FreeVertex { vertex: u, color });
            }
        }
        let cuts = g.cut_vertices().or_else(|e| fail(e.to_string()))?;
        if let Some(&cut) = cuts.first() {
            let anchor = inst
                .path
                .iter()
                .copied()
                .find(|&p| p != cut)
                .or_else(|| g.vertices().find(|&v| v != cut))
                .expect("cut vertex has company");
            return Ok(Step::CutSplit { cut, anchor });
        }
        for t in g.separating_triangles() {
            if let Some(&x) = t.iter().find(|v| inst.indep.contains(v)) {
                let mut rest = t.iter().copied().filter(|&v| v != x);
                let (y, z) = (rest.next().unwrap(), rest.next().unwrap());
                return Ok(Step::TriSplit { x, y, z });
            }
        }
        if let Some(step) = self.choose_chord(inst)? {
            return Ok(step);
        }
        let (frontier, picks) = frontier_choice(inst)?;
        Ok(Step::Frontier { frontier, picks })
    }

    fn choose_chord(&self, inst: &Instance) -> Result<Option<Step>, EngineError> {
        let g = &inst.graph;
        let chords = g.outer_chords().or_else(|e| fail(e.to_string()))?;
        for (x, y) in chords {
            let (a, b) = g.chord_sides(x, y).or_else(|e| fail(e.to_string()))?;
            let inner = |s: &BTreeSet<Vertex>| -> BTreeSet<Vertex> {
                s.iter().copied().filter(|&v| v != x && v != y).collect()
            };
            let mut sides = [(inner(&a), a.len()), (inner(&b), b.len())];
            sides.sort_by_key(|(s, _)| s.first().copied());
            for k in 0..2 {
                let (far, size) = &sides[k];
                let (near, _) = &sides[1 - k];
                if *size < 4 || inst.path.iter().any(|p| far.contains(p)) {
                    continue;
                }
                let anchor = *near.first().expect("chord sides have inner vertices");
                let candidates: Vec<Vertex> = far
                    .iter()
                    .copied()
                    .filter(|v| inst.indep.contains(v) && g.has_edge(*v, x) && g.has_edge(*v, y))
                    .collect();
                if candidates.len() > 1 {
                    return fail(format!(
                        "several I vertices {candidates:?} see chord {x}-{y}"
                    ));
                }
                let protected = candidates.first().copied().filter(|&v| {
                    let union: ColorSet = inst
                        .edge_colors(v, x)
                        .union(&inst.edge_colors(v, y))
                        .copied()
                        .collect();
                    union.len() == 2
                });
                return Ok(Some(Step::ChordSplit {
                    x,
                    y,
                    anchor,
                    protected,
                }));
            }
        }
        Ok(None)
    }

    fn execute(
        &mut self,
        inst: &Instance,
        step: &Step,
        idx: usize,
        depth: usize,
    ) -> Result<Coloring, EngineError> {
        let g = &inst.graph;
        let l = &inst.lists;
        match step {
            Step::Base { coloring } | Step::Fallback { coloring, .. } => {
                if !verify_coloring(g, l, coloring) {
                    return fail("recorded coloring does not verify");
                }
                Ok(coloring.clone())
            }
            Step::Component { components } => {
                let mut phi = Coloring::new();
                for comp in components {
                    let set: BTreeSet<Vertex> = comp.iter().copied().collect();
                    let child = Instance::new(
                        g.induced(&set),
                        inst.indep.intersection(&set).copied().collect(),
                        inst.path
                            .iter()
                            .copied()
                            .filter(|p| set.contains(p))
                            .collect(),
                        l.restrict(set.iter().copied()),
                    );
                    phi.extend(&self.child(idx, inst, child, depth)?);
                }
                Ok(phi)
            }
            Step::NormalizeP { path, colors } => {
                let mut lists = l.clone();
                for (&p, &c) in path.iter().zip(colors) {
                    if !l.list(p).contains(&c) {
                        return fail(format!("color {c} not in the list of {p}"));
                    }
                    lists.set(p, [c]);
                }
                let mut indep = inst.indep.clone();
                for p in path {
                    indep.remove(p);
                }
                let child = Instance::new(g.clone(), indep, path.clone(), lists);
                self.child(idx, inst, child, depth)
            }
            Step::DelEdge { u, v } => {
                if inst.is_path_edge(*u, *v) || !inst.edge_colors(*u, *v).is_empty() {
                    return fail(format!("edge {u}-{v} may not be deleted"));
                }
                let h = g.delete_edge(*u, *v).or_else(|e| fail(e.to_string()))?;
                let child = Instance::new(h, inst.indep.clone(), inst.path.clone(), l.clone());
                self.child(idx, inst, child, depth)
            }
            Step::FreeVertex { vertex, color } => {
                let u = *vertex;
                let clash = g.neighbors(u).iter().any(|&w| l.list(w).contains(color));
                if inst.on_path(u) || !l.list(u).contains(color) || clash {
                    return fail(format!("color {color} is not free at {u}"));
                }
                let h = g.delete_vertex(u).or_else(|e| fail(e.to_string()))?;
                let mut indep = inst.indep.clone();
                indep.remove(&u);
                let lists = l.restrict(h.vertices());
                let child = Instance::new(h, indep, inst.path.clone(), lists);
                let mut phi = self.child(idx, inst, child, depth)?;
                phi.insert(u, *color);
                Ok(phi)
            }
            Step::CutSplit { cut, anchor } => {
                let v = *cut;
                let (g1, g2) = g
                    .split_at_cut_vertex(v, *anchor)
                    .or_else(|e| fail(e.to_string()))?;
                if inst.path.iter().any(|p| !g1.contains(*p)) {
                    return fail("path is not on the anchored side");
                }
                let first = sub_instance(inst, g1, inst.path.clone());
                let mut phi = self.child(idx, inst, first, depth)?;
                let mut second = sub_instance(inst, g2, vec![v]);
                second.indep.remove(&v);
                second.lists.set(v, [color_of(&phi, v)?]);
                phi.extend(&self.child(idx, inst, second, depth)?);
                Ok(phi)
            }
            Step::TriSplit { x, y, z } => {
                let (x, y, z) = (*x, *y, *z);
                if !inst.indep.contains(&x) {
                    return fail(format!("{x} is not in I"));
                }
                let (ext, int) = g
                    .split_at_triangle([x, y, z])
                    .or_else(|e| fail(e.to_string()))?;
                let ext_vertices: BTreeSet<Vertex> = ext.vertices().collect();
                let first = sub_instance(inst, ext, inst.path.clone());
                let mut phi = self.child(idx, inst, first, depth)?;
                let (cx, cy, cz) = (color_of(&phi, x)?, color_of(&phi, y)?, color_of(&phi, z)?);
                let interior_nbrs: Vec<Vertex> = int
                    .neighbors(z)
                    .iter()
                    .copied()
                    .filter(|w| !ext_vertices.contains(w))
                    .collect();
                let h = int.delete_vertex(z).or_else(|e| fail(e.to_string()))?;
                let mut lists = l.restrict(h.vertices());
                lists.set(x, [cx]);
                lists.set(y, [cy]);
                for w in interior_nbrs {
                    lists.list_mut(w).expect("listed").remove(&cz);
                }
                let indep = inst
                    .indep
                    .iter()
                    .copied()
                    .filter(|v| h.contains(*v) && !ext_vertices.contains(v))
                    .collect();
                let second = Instance::new(h, indep, vec![x, y], lists);
                phi.extend(&self.child(idx, inst, second, depth)?);
                Ok(phi)
            }
            Step::ChordSplit {
                x,
                y,
                anchor,
                protected,
            } => {
                let (x, y) = (*x, *y);
                let (g1, g2) = g
                    .split_along_chord(x, y, *anchor)
                    .or_else(|e| fail(e.to_string()))?;
                if inst.path.iter().any(|p| !g1.contains(*p)) {
                    return fail("path is not on the anchored side");
                }
                let mut first = sub_instance(inst, g1, inst.path.clone());
                let mut apex = None;
                if let Some(v) = *protected {
                    if !(g2.contains(v) && inst.indep.contains(&v)) {
                        return fail(format!("{v} cannot be protected"));
                    }
                    let (h, a) = first
                        .graph
                        .add_outer_apex(x, y)
                        .or_else(|e| fail(e.to_string()))?;
                    let colors: ColorSet = inst
                        .edge_colors(v, x)
                        .union(&inst.edge_colors(v, y))
                        .copied()
                        .collect();
                    first.graph = h;
                    first.lists.set(a, colors);
                    first.indep.insert(a);
                    apex = Some(a);
                }
                let mut phi = self.child(idx, inst, first, depth)?;
                if let Some(a) = apex {
                    phi.remove(a);
                }
                let mut second = sub_instance(inst, g2, vec![x, y]);
                second.indep.remove(&x);
                second.indep.remove(&y);
                second.lists.set(x, [color_of(&phi, x)?]);
                second.lists.set(y, [color_of(&phi, y)?]);
                phi.extend(&self.child(idx, inst, second, depth)?);
                Ok(phi)
            }
            Step::Frontier { picks, .. } => {
                let child = frontier_child(inst, picks)?;
                if self.opts.check_subinstances {
                    check_frontier_lists(inst, &child)?;
                }
                let mut phi = self.child(idx, inst, child, depth)?;
                for &(v, c) in picks {
                    if !l.list(v).contains(&c) {
                        return fail(format!("frontier color {c} not in the list of {v}"));
                    }
                    phi.insert(v, c);
                }
                Ok(phi)
            }
        }
    }

    fn child(
        &mut self,
        idx: usize,
        parent: &Instance,
        child: Instance,
        depth: usize,
    ) -> Result<Coloring, EngineError> {
        let m = child.measure();
        self.trace[idx].children.push(m);
        if m >= parent.measure() {
            return fail(format!(
                "measure did not decrease: {m:?} vs {:?}",
                parent.measure()
            ));
        }
        if self.opts.check_subinstances {
            let report = check_instance(&child);
            if !report.is_empty() {
                return fail(format!(
                    "{} produced an invalid subinstance: {report}",
                    self.trace[idx].step.rule()
                ));
            }
        }
        self.run(&child, depth + 1)
    }
}

fn sub_instance(inst: &Instance, g: PlaneGraph, path: Vec<Vertex>) -> Instance {
    let indep = inst
        .indep
        .iter()
        .copied()
        .filter(|&v| g.contains(v))
        .collect();
    let lists = inst.lists.restrict(g.vertices());
    Instance::new(g, indep, path, lists)
}

fn color_of(phi: &Coloring, v: Vertex) -> Result<Color, EngineError> {
    phi.get(v)
        .map_or_else(|| fail(format!("{v} left uncolored")), Ok)
}

/// The outer cycle `v0 v1 ... vt` with `v0 ∈ P ⊆ {v0, v1}`.
fn oriented_cycle(inst: &Instance) -> Result<Vec<Vertex>, EngineError> {
    let cycle = inst.graph.outer_cycle().or_else(|e| fail(e.to_string()))?;
    let m = cycle.len();
    let pos = |v: Vertex| cycle.iter().position(|&w| w == v);
    let start = match inst.path[..] {
        [p] => pos(p)
            .ok_or(())
            .or_else(|_| fail(format!("{p} is not on the outer cycle")))?,
        [p, q] => {
            let (i, j) = match (pos(p), pos(q)) {
                (Some(i), Some(j)) => (i, j),
                _ => return fail("path is not on the outer cycle"),
            };
            if (i + 1) % m == j {
                i
            } else if (j + 1) % m == i {
                j
            } else {
                return fail("path is not an outer edge");
            }
        }
        _ => return fail("frontier step needs a path of one or two vertices"),
    };
    let mut f = cycle.to_vec();
    f.rotate_left(start);
    Ok(f)
}

fn frontier_choice(inst: &Instance) -> Result<(FrontierRule, Vec<(Vertex, Color)>), EngineError> {
    if inst.path.iter().any(|&p| inst.lists.list(p).len() != 1) {
        return fail("frontier step needs singleton lists on the path");
    }
    let g = &inst.graph;
    let f = oriented_cycle(inst)?;
    let m = f.len() as isize;
    let i = f
        .iter()
        .position(|v| !inst.indep.contains(v) && !inst.on_path(*v))
        .ok_or(EngineError::NoEligibleFrontierVertex)? as isize;
    let at = |k: isize| f[(i + k).rem_euclid(m) as usize];
    let is_chord = |a: isize, b: isize| {
        let d = (b - a).rem_euclid(m);
        d != 1 && d != m - 1 && g.has_edge(at(a), at(b))
    };
    let list = |v: Vertex| inst.lists.list(v);
    let minus = |v: Vertex, out: &[&ColorSet]| -> Vec<Color> {
        list(v)
            .iter()
            .copied()
            .filter(|c| out.iter().all(|o| !o.contains(c)))
            .collect()
    };
    if is_chord(0, -2) {
        return fail(format!("{}-{} is a chord", at(0), at(-2)));
    }
    let (vi, prev, next, next2) = (at(0), at(-1), at(1), at(2));
    if !is_chord(0, 2) {
        let Some(&c) = minus(vi, &[list(prev), list(next)]).first() else {
            return fail(format!("no X1 color at {vi}"));
        };
        return Ok((FrontierRule::X1, vec![(vi, c)]));
    }
    if let Some(&c) = minus(vi, &[list(prev), list(next), list(next2)]).first() {
        return Ok((FrontierRule::X2, vec![(vi, c)]));
    }
    let far = inst.edge_colors(next2, at(4));
    let Some(&c2) = minus(next2, &[list(at(3)), &far]).first() else {
        return fail(format!("no X3 color at {next2}"));
    };
    let across = inst.edge_colors(vi, next2);
    let ci = if !across.contains(&c2) {
        across.first().copied()
    } else {
        inst.edge_colors(vi, next).first().copied()
    };
    let Some(ci) = ci.filter(|&c| c != c2) else {
        return fail(format!("no X3 color at {vi}"));
    };
    let Some(&c1) = list(next).iter().find(|&&c| c != ci && c != c2) else {
        return fail(format!("no X3 color at {next}"));
    };
    Ok((FrontierRule::X3, vec![(vi, ci), (next, c1), (next2, c2)]))
}

fn frontier_child(inst: &Instance, picks: &[(Vertex, Color)]) -> Result<Instance, EngineError> {
    let g = &inst.graph;
    let x: BTreeSet<Vertex> = picks.iter().map(|&(v, _)| v).collect();
    if x.iter().any(|v| inst.on_path(*v)) {
        return fail("frontier step would color a path vertex");
    }
    let h = g.delete_vertices(&x).or_else(|e| fail(e.to_string()))?;
    let mut lists = inst.lists.restrict(h.vertices());
    for &(v, c) in picks {
        for &w in g.neighbors(v) {
            if let Some(l) = lists.list_mut(w) {
                l.remove(&c);
            }
        }
    }
    let indep = inst
        .indep
        .iter()
        .copied()
        .filter(|v| !x.contains(v))
        .collect();
    Ok(Instance::new(h, indep, inst.path.clone(), lists))
}

/// Outer vertices keep their lists; every other vertex loses at most one
/// color.
fn check_frontier_lists(parent: &Instance, child: &Instance) -> Result<(), EngineError> {
    let outer = parent.graph.outer_vertices();
    for v in child.graph.vertices() {
        let (old, new) = (parent.lists.list(v), child.lists.list(v));
        if outer.contains(&v) && old != new {
            return fail(format!("frontier step shrank the list of outer vertex {v}"));
        }
        if new.len() + 1 < old.len() {
            return fail(format!("frontier step removed two colors at {v}"));
        }
    }
    Ok(())
}
