//! Best-first search over plan space, plus plan validation and a brute-force
//! forward-search oracle.
//!
//! Frontier nodes are stored as (parent, refinement) records rather than
//! whole plans. A node's plan is rebuilt by replaying refinements from the
//! nearest cached ancestor; flaw selection is deterministic so replay always
//! reproduces the original child.

pub mod oracle;
pub mod validate;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::heuristics::{evaluate, HeuristicKind, RuleSet};
use crate::model::{DomainTheory, Plan, Problem};
use crate::pocl::{Algorithm, FlawStrategy, Planner, Refinement};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub heuristic: HeuristicKind,
    pub rules: RuleSet,
    /// Upper bound on generated nodes, the root included.
    pub max_nodes: u64,
    pub max_depth: u32,
    pub strategy: FlawStrategy,
    /// Materialized plans kept for replay.
    pub cache_size: usize,
    #[serde(default)]
    pub tie_break: TieBreak,
}

/// Order among frontier nodes with equal heuristic value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Lowest node id first.
    #[default]
    Oldest,
    /// Highest node id first, which dives along plateaus.
    Newest,
}

impl TieBreak {
    fn key(self, id: u32) -> u32 {
        match self {
            TieBreak::Oldest => id,
            TieBreak::Newest => u32::MAX - id,
        }
    }
}

impl std::str::FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oldest" => Ok(TieBreak::Oldest),
            "newest" => Ok(TieBreak::Newest),
            other => Err(format!("unknown tie break {other}")),
        }
    }
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SearchConfig {
            algorithm,
            heuristic: match algorithm {
                Algorithm::Pocl => HeuristicKind::Classical,
                Algorithm::Ipocl => HeuristicKind::Combined,
            },
            rules: RuleSet::default(),
            max_nodes: 1_000_000,
            max_depth: 500,
            strategy: FlawStrategy::Default,
            cache_size: 20_000,
            tie_break: TieBreak::Oldest,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub nodes_generated: u64,
    pub nodes_visited: u64,
    pub max_frontier: u64,
    pub solution_depth: Option<u32>,
    /// Children generated per expanded node.
    pub mean_branching: f64,
    pub max_branching: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SearchStats {
    /// Mean wall time spent per visited node.
    pub fn time_per_node(&self) -> Duration {
        if self.nodes_visited == 0 {
            Duration::ZERO
        } else {
            self.wall_time / self.nodes_visited as u32
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Failure {
    /// The frontier emptied with no node cut off by a limit.
    Exhausted,
    NodeLimit,
    /// The frontier emptied but some nodes were not expanded because of the
    /// depth limit.
    DepthLimit,
}

impl Failure {
    pub fn is_limit(self) -> bool {
        !matches!(self, Failure::Exhausted)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Failure::Exhausted => "search space exhausted",
            Failure::NodeLimit => "node limit exceeded",
            Failure::DepthLimit => "depth limit exceeded",
        })
    }
}

pub struct SearchResult {
    pub outcome: Result<Plan, Failure>,
    pub stats: SearchStats,
    /// Node ids from the root to the solution.
    pub path: Vec<u32>,
    pub trace: String,
}

#[derive(Clone, Copy)]
struct Node {
    parent: u32,
    refinement: Option<Refinement>,
    depth: u16,
}

const ROOT: u32 = 0;

struct Space<'a> {
    planner: &'a Planner,
    nodes: Vec<Node>,
    cache: HashMap<u32, Plan>,
    order: VecDeque<u32>,
    capacity: usize,
}

impl Space<'_> {
    fn remember(&mut self, id: u32, plan: &Plan) {
        if id == ROOT || self.cache.contains_key(&id) {
            return;
        }
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.cache.remove(&old);
            }
        }
        self.cache.insert(id, plan.clone());
        self.order.push_back(id);
    }

    fn plan(&mut self, id: u32) -> Plan {
        if let Some(p) = self.cache.get(&id) {
            return p.clone();
        }
        let mut chain = vec![id];
        let mut cur = self.nodes[id as usize].parent;
        while !self.cache.contains_key(&cur) {
            chain.push(cur);
            cur = self.nodes[cur as usize].parent;
        }
        let mut plan = self.cache[&cur].clone();
        for &n in chain.iter().rev() {
            let node = self.nodes[n as usize];
            let flaw = self.planner.select_flaw(&plan).expect("replayed node has a flaw");
            let r = node.refinement.expect("non-root node");
            plan = self.planner.apply(&plan, &flaw, &r).expect("replay reproduces child");
            plan.parent = Some(node.parent);
            self.remember(n, &plan);
        }
        plan
    }
}

/// Runs best-first search: lowest heuristic value first, ties broken by
/// node id as configured.
pub fn plan_search(domain: &DomainTheory, problem: &Problem, config: &SearchConfig) -> SearchResult {
    let planner = Planner::new(domain, problem, config.algorithm).with_strategy(config.strategy);
    search_with(&planner, config)
}

pub fn search_with(planner: &Planner, config: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    let root = planner.initial_plan();
    let h0 = evaluate(config.heuristic, &root, &config.rules);
    let mut space = Space {
        planner,
        nodes: vec![Node { parent: u32::MAX, refinement: None, depth: 0 }],
        cache: HashMap::new(),
        order: VecDeque::new(),
        capacity: config.cache_size.max(1),
    };
    space.cache.insert(ROOT, root);
    let mut frontier = BinaryHeap::new();
    let tie = config.tie_break;
    frontier.push(Reverse((h0, tie.key(ROOT))));
    let mut stats = SearchStats { nodes_generated: 1, max_frontier: 1, ..SearchStats::default() };
    let mut expanded: u64 = 0;
    let mut children_total: u64 = 0;
    let mut depth_cut = false;
    let mut node_limit = false;
    let mut found = None;
    let mut popped: Vec<u32> = Vec::new();
    'search: while let Some(Reverse((_, key))) = frontier.pop() {
        let id = tie.key(key);
        let plan = space.plan(id);
        stats.nodes_visited += 1;
        popped.push(id);
        if planner.is_complete(&plan) {
            found = Some((id, plan));
            break;
        }
        let depth = space.nodes[id as usize].depth;
        if u32::from(depth) >= config.max_depth {
            depth_cut = true;
            continue;
        }
        let Some(flaw) = planner.select_flaw(&plan) else { continue };
        expanded += 1;
        let mut count = 0u64;
        for r in planner.options(&plan, &flaw) {
            let Some(child) = planner.apply(&plan, &flaw, &r) else { continue };
            if stats.nodes_generated >= config.max_nodes {
                node_limit = true;
                break 'search;
            }
            let h = evaluate(config.heuristic, &child, &config.rules);
            let cid = space.nodes.len() as u32;
            space.nodes.push(Node { parent: id, refinement: Some(r), depth: depth + 1 });
            frontier.push(Reverse((h, tie.key(cid))));
            stats.nodes_generated += 1;
            count += 1;
        }
        children_total += count;
        stats.max_branching = stats.max_branching.max(count);
        stats.max_frontier = stats.max_frontier.max(frontier.len() as u64);
        if count > 0 {
            space.remember(id, &plan);
        }
    }
    stats.mean_branching = if expanded == 0 { 0.0 } else { children_total as f64 / expanded as f64 };
    let (outcome, path) = match found {
        Some((id, mut plan)) => {
            stats.solution_depth = Some(u32::from(space.nodes[id as usize].depth));
            let mut path = vec![id];
            let mut cur = id;
            while cur != ROOT {
                cur = space.nodes[cur as usize].parent;
                path.push(cur);
            }
            path.reverse();
            plan.parent = if id == ROOT { None } else { Some(space.nodes[id as usize].parent) };
            (Ok(plan), path)
        }
        None if node_limit => (Err(Failure::NodeLimit), Vec::new()),
        None if depth_cut => (Err(Failure::DepthLimit), Vec::new()),
        None => (Err(Failure::Exhausted), Vec::new()),
    };
    let trace = render_trace(&mut space, &path, &popped, &outcome);
    stats.wall_time = start.elapsed();
    SearchResult { outcome, stats, path, trace }
}

fn render_trace(space: &mut Space<'_>, path: &[u32], popped: &[u32], outcome: &Result<Plan, Failure>) -> String {
    let mut out = String::new();
    if let Err(f) = outcome {
        let _ = writeln!(out, "no solution: {f}");
        return out;
    }
    let mut children: HashMap<u32, (u64, u64)> = path.iter().map(|&id| (id, (0, 0))).collect();
    for n in space.nodes.iter().skip(1) {
        if let Some(c) = children.get_mut(&n.parent) {
            c.0 += 1;
        }
    }
    for &id in popped.iter().filter(|&&id| id != ROOT) {
        if let Some(c) = children.get_mut(&space.nodes[id as usize].parent) {
            c.1 += 1;
        }
    }
    for (k, &id) in path.iter().enumerate() {
        let plan = space.plan(id);
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "plan {id}");
        let _ = writeln!(out, "reason: {}", plan.describe(&plan.reason));
        match path.get(k + 1) {
            Some(next) => {
                let flaw = space.planner.select_flaw(&plan).expect("path node has a flaw");
                let (n, v) = children[&id];
                let _ = writeln!(out, "now working on: {}", plan.describe_flaw(&flaw.flaw));
                let _ = writeln!(out, "children: {n} (visited {v}; selecting {next})");
            }
            None => {
                let _ = writeln!(out, "solution found");
            }
        }
    }
    out
}
