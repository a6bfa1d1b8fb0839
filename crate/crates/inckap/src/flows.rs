//! Incremental unit-capacity s-t max flow and potential-based parallel-edge
//! flows.
//!
//! Quickest-Increment repeatedly adds the smallest edge set raising the max
//! flow value by one. With unit capacities that set is found as a min-cost
//! flow where built edges cost 0 and unbuilt edges cost 1. The parallel-edge
//! potential model compiles exactly into an XOS instance: one clause per
//! candidate potential `p_i = beta_i * psi(mu_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{ratio_of, RatioCurve, RatioRow};
use crate::instances::SplitMix64;
use crate::objective::Instance;
use crate::EPS;

/// Directed graph with unit-capacity, unit-weight edges and distinguished
/// source and sink. Parallel edges are allowed.
#[derive(Debug, Clone)]
pub struct FlowInstance {
    pub vertices: Vec<String>,
    pub source: usize,
    pub sink: usize,
    pub edges: Vec<(usize, usize)>,
}

impl FlowInstance {
    pub fn new(
        vertices: Vec<String>,
        source: usize,
        sink: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = vertices.len();
        if source >= n || sink >= n {
            return Err(Error::invalid("source or sink out of range"));
        }
        if source == sink {
            return Err(Error::invalid("source and sink must differ"));
        }
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({}, {}) out of range", u, v)));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {}", u)));
            }
        }
        Ok(FlowInstance {
            vertices,
            source,
            sink,
            edges,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Parses a text edge list: first line `s_name t_name`, then one
    /// `u v` pair per line. Vertices are created on first mention.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty graph file"))?;
        let mut names: Vec<String> = Vec::new();
        let lookup = |name: &str, names: &mut Vec<String>| -> usize {
            match names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    names.push(name.to_string());
                    names.len() - 1
                }
            }
        };
        let mut parts = header.split_whitespace();
        let (s_name, t_name) = match (parts.next(), parts.next(), parts.next()) {
            (Some(s), Some(t), None) => (s, t),
            _ => return Err(Error::invalid("first line must be `s_name t_name`")),
        };
        let source = lookup(s_name, &mut names);
        let sink = lookup(t_name, &mut names);
        let mut edges = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let (u, v) = match (parts.next(), parts.next(), parts.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => return Err(Error::invalid(format!("bad edge line: {:?}", line))),
            };
            let u = lookup(u, &mut names);
            let v = lookup(v, &mut names);
            edges.push((u, v));
        }
        FlowInstance::new(names, source, sink, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}\n",
            self.vertices[self.source], self.vertices[self.sink]
        );
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", self.vertices[u], self.vertices[v]));
        }
        out
    }

    /// Two disjoint s-t paths of length 4 plus the blocking chord u1 -> v3:
    /// any competitive ordering must start with the 3-edge path through the
    /// chord and then cannot complete both long paths in 8 edges.
    pub fn crossed_paths() -> Self {
        let names = ["s", "u1", "u2", "u3", "v1", "v2", "v3", "t"];
        let idx = |n: &str| names.iter().position(|&x| x == n).unwrap();
        let edges = [
            ("s", "u1"),
            ("u1", "u2"),
            ("u2", "u3"),
            ("u3", "t"),
            ("s", "v1"),
            ("v1", "v2"),
            ("v2", "v3"),
            ("v3", "t"),
            ("u1", "v3"),
        ];
        FlowInstance::new(
            names.iter().map(|s| s.to_string()).collect(),
            idx("s"),
            idx("t"),
            edges.iter().map(|&(u, v)| (idx(u), idx(v))).collect(),
        )
        .expect("built-in graph is well formed")
    }
}

/// Seeded random DAG with a guaranteed s-t path; vertices are topologically
/// ordered by index with s = 0 and t = n - 1.
pub fn random_dag(max_vertices: usize, max_edges: usize, seed: u64) -> FlowInstance {
    let mut rng = SplitMix64::new(seed);
    let n = 3 + rng.next_below(max_vertices.saturating_sub(2).max(1));
    let n = n.min(max_vertices.max(3));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // spine path s -> ... -> t through a few random interior vertices
    let hops = 1 + rng.next_below(3.min(n - 2));
    let mut spine = vec![0usize];
    let mut prev = 0;
    for _ in 0..hops {
        let lo = prev + 1;
        let hi = n - 1;
        if lo >= hi {
            break;
        }
        let v = lo + rng.next_below(hi - lo);
        spine.push(v);
        prev = v;
    }
    spine.push(n - 1);
    for w in spine.windows(2) {
        edges.push((w[0], w[1]));
    }
    let target = max_edges.min(3 + rng.next_below(max_edges));
    while edges.len() < target {
        let u = rng.next_below(n - 1);
        let v = u + 1 + rng.next_below(n - 1 - u);
        edges.push((u, v));
    }
    FlowInstance::new((0..n).map(|i| format!("v{}", i)).collect(), 0, n - 1, edges)
        .expect("generated graph is well formed")
}

// --- max flow over a built edge subset ------------------------------------

struct Residual {
    n: usize,
    heads: Vec<usize>,
    caps: Vec<i32>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual {
            n,
            heads: Vec::new(),
            caps: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Adds a unit-capacity arc, returns the forward arc id; the paired
    /// reverse arc is `id ^ 1`.
    fn add_arc(&mut self, u: usize, v: usize) -> usize {
        let id = self.heads.len();
        self.heads.push(v);
        self.caps.push(1);
        self.adj[u].push(id);
        self.heads.push(u);
        self.caps.push(0);
        self.adj[v].push(id + 1);
        id
    }

    /// One BFS augmentation; returns the arc path used, if any.
    fn augment(&mut self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.n];
        let mut visited = vec![false; self.n];
        visited[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &arc in &self.adj[u] {
                let v = self.heads[arc];
                if self.caps[arc] > 0 && !visited[v] {
                    visited[v] = true;
                    parent[v] = Some(arc);
                    queue.push_back(v);
                }
            }
        }
        if !visited[t] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let arc = parent[v].unwrap();
            path.push(arc);
            v = self.heads[arc ^ 1];
        }
        path.reverse();
        for &arc in &path {
            self.caps[arc] -= 1;
            self.caps[arc ^ 1] += 1;
        }
        Some(path)
    }
}

fn check_built(fi: &FlowInstance, built: &[usize]) -> Result<()> {
    for &e in built {
        if e >= fi.num_edges() {
            return Err(Error::invalid(format!("edge index {} out of range", e)));
        }
    }
    Ok(())
}

/// Maximum integral s-t flow using only the given edges.
pub fn max_flow(fi: &FlowInstance, built: &[usize]) -> Result<u32> {
    check_built(fi, built)?;
    let mut res = Residual::new(fi.vertices.len());
    for &e in built {
        let (u, v) = fi.edges[e];
        res.add_arc(u, v);
    }
    let mut flow = 0;
    while res.augment(fi.source, fi.sink).is_some() {
        flow += 1;
    }
    Ok(flow)
}

// --- min-cost flow (successive shortest paths, unit capacities) -----------

struct CostResidual {
    n: usize,
    heads: Vec<usize>,
    caps: Vec<i32>,
    costs: Vec<i32>,
    adj: Vec<Vec<usize>>,
}

impl CostResidual {
    fn new(n: usize) -> Self {
        CostResidual {
            n,
            heads: Vec::new(),
            caps: Vec::new(),
            costs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add_arc(&mut self, u: usize, v: usize, cost: i32) -> usize {
        let id = self.heads.len();
        self.heads.push(v);
        self.caps.push(1);
        self.costs.push(cost);
        self.adj[u].push(id);
        self.heads.push(u);
        self.caps.push(0);
        self.costs.push(-cost);
        self.adj[v].push(id + 1);
        id
    }

    /// Bellman-Ford shortest augmenting path (residual costs may be
    /// negative); pushes one unit if the sink is reachable.
    fn augment_cheapest(&mut self, s: usize, t: usize) -> Option<i32> {
        const INF: i64 = i64::MAX / 4;
        let mut dist = vec![INF; self.n];
        let mut parent: Vec<Option<usize>> = vec![None; self.n];
        dist[s] = 0;
        for _ in 0..self.n {
            let mut changed = false;
            for u in 0..self.n {
                if dist[u] == INF {
                    continue;
                }
                for &arc in &self.adj[u] {
                    if self.caps[arc] == 0 {
                        continue;
                    }
                    let v = self.heads[arc];
                    let nd = dist[u] + self.costs[arc] as i64;
                    if nd < dist[v] {
                        dist[v] = nd;
                        parent[v] = Some(arc);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t] == INF {
            return None;
        }
        let mut v = t;
        while v != s {
            let arc = parent[v].unwrap();
            self.caps[arc] -= 1;
            self.caps[arc ^ 1] += 1;
            v = self.heads[arc ^ 1];
        }
        Some(dist[t] as i32)
    }
}

/// `c_j`: the minimum number of edges whose subgraph carries flow value `j`.
/// Computed as a min-cost flow of value `j` with every edge cost 1; with
/// unit capacities the per-edge cost equals the per-unit cost.
pub fn min_edges_for_value(fi: &FlowInstance, j: u32) -> Result<usize> {
    if j == 0 {
        return Err(Error::invalid("flow value must be at least 1"));
    }
    let mut res = CostResidual::new(fi.vertices.len());
    for &(u, v) in &fi.edges {
        res.add_arc(u, v, 1);
    }
    let mut total = 0i64;
    for _ in 0..j {
        match res.augment_cheapest(fi.source, fi.sink) {
            Some(c) => total += c as i64,
            None => {
                return Err(Error::infeasible(format!(
                    "graph does not support flow value {}",
                    j
                )))
            }
        }
    }
    Ok(total as usize)
}

/// Quickest-Increment run: batch sizes, the induced edge ordering, and the
/// `c_j` table.
#[derive(Debug, Clone, Serialize)]
pub struct IncrementTrace {
    /// Edges added per iteration; `batch_sizes[0]` is the shortest-path length.
    pub batch_sizes: Vec<usize>,
    /// Concatenated batches: the incremental edge ordering.
    pub ordering: Vec<usize>,
    /// `c_table[j - 1] = c_j` for j = 1..=X_max.
    pub c_table: Vec<usize>,
    /// Maximum flow value of the full graph.
    pub x_max: u32,
}

/// Iteratively adds the smallest set of edges raising the max flow by one:
/// a min-cost flow of value (current + 1) with built edges free and unbuilt
/// edges at cost 1. New edges are appended in path-traversal order of the
/// flow decomposition.
pub fn quickest_increment(fi: &FlowInstance) -> Result<IncrementTrace> {
    let all: Vec<usize> = (0..fi.num_edges()).collect();
    let x_max = max_flow(fi, &all)?;
    if x_max == 0 {
        return Err(Error::infeasible("sink unreachable in the full graph"));
    }
    let mut built = vec![false; fi.num_edges()];
    let mut ordering = Vec::new();
    let mut batch_sizes = Vec::new();
    for target in 1..=x_max {
        let mut res = CostResidual::new(fi.vertices.len());
        let arc_ids: Vec<usize> = fi
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| res.add_arc(u, v, if built[e] { 0 } else { 1 }))
            .collect();
        for _ in 0..target {
            res.augment_cheapest(fi.source, fi.sink)
                .ok_or_else(|| Error::infeasible("flow target unreachable"))?;
        }
        // edges carrying flow: forward arc saturated
        let used: Vec<bool> = arc_ids.iter().map(|&a| res.caps[a] == 0).collect();
        // decompose into paths from s, consuming used edges in index order
        let mut consumed = vec![false; fi.num_edges()];
        let mut batch = Vec::new();
        for _ in 0..target {
            let mut at = fi.source;
            while at != fi.sink {
                let next = (0..fi.num_edges())
                    .find(|&e| used[e] && !consumed[e] && fi.edges[e].0 == at)
                    .expect("flow conservation provides an out-edge");
                consumed[next] = true;
                if !built[next] {
                    built[next] = true;
                    ordering.push(next);
                    batch.push(next);
                }
                at = fi.edges[next].1;
            }
        }
        // leftover used edges (flow cycles, if any) in index order
        for e in 0..fi.num_edges() {
            if used[e] && !consumed[e] && !built[e] {
                built[e] = true;
                ordering.push(e);
                batch.push(e);
            }
        }
        batch_sizes.push(batch.len());
    }
    // edges never carrying flow go last; the max flow is already reached
    for e in 0..fi.num_edges() {
        if !built[e] {
            ordering.push(e);
        }
    }
    let c_table: Result<Vec<usize>> = (1..=x_max).map(|j| min_edges_for_value(fi, j)).collect();
    Ok(IncrementTrace {
        batch_sizes,
        ordering,
        c_table: c_table?,
        x_max,
    })
}

impl IncrementTrace {
    /// Batch-size estimate from the edge-count table:
    /// `lambda_i <= c_j / (j - i)` for all 0 <= i < j <= r.
    pub fn batch_bound_holds(&self) -> bool {
        // batches are indexed 0..=r with r = X_max - 1
        let r = self.batch_sizes.len().saturating_sub(1);
        for i in 0..=r {
            for j in (i + 1)..=r {
                if j > self.c_table.len() {
                    continue;
                }
                let bound = self.c_table[j - 1] as f64 / (j - i) as f64;
                if self.batch_sizes[i] as f64 > bound + EPS {
                    return false;
                }
            }
        }
        true
    }
}

/// Maximum edge count for the exact `f*(k)` table in `flow_ratio`.
pub const FLOW_RATIO_LIMIT: usize = 24;

/// Maximum edge count for exhaustive ordering search.
pub const FLOW_PERM_LIMIT: usize = 10;

fn flow_opt_table(fi: &FlowInstance) -> Result<Vec<u32>> {
    // opt[k - 1] = f*(k) = max j with c_j <= k
    let all: Vec<usize> = (0..fi.num_edges()).collect();
    let x_max = max_flow(fi, &all)?;
    let mut c = Vec::new();
    for j in 1..=x_max {
        c.push(min_edges_for_value(fi, j)?);
    }
    let mut opt = vec![0u32; fi.num_edges()];
    for (k, o) in opt.iter_mut().enumerate() {
        *o = c.iter().take_while(|&&cj| cj <= k + 1).count() as u32;
    }
    Ok(opt)
}

fn check_edge_permutation(fi: &FlowInstance, ordering: &[usize]) -> Result<()> {
    if ordering.len() != fi.num_edges() {
        return Err(Error::invalid(
            "ordering must cover every edge exactly once",
        ));
    }
    let mut seen = vec![false; fi.num_edges()];
    for &e in ordering {
        if e >= fi.num_edges() || seen[e] {
            return Err(Error::invalid("ordering is not an edge permutation"));
        }
        seen[e] = true;
    }
    Ok(())
}

/// Ratio curve over edge counts k = 1..|E|: optimum flow with the best k
/// edges versus flow with the first k edges of the ordering.
pub fn flow_ratio(fi: &FlowInstance, ordering: &[usize]) -> Result<RatioCurve> {
    if fi.num_edges() > FLOW_RATIO_LIMIT {
        return Err(Error::capability(format!(
            "flow_ratio supports |E| <= {}, got {}",
            FLOW_RATIO_LIMIT,
            fi.num_edges()
        )));
    }
    check_edge_permutation(fi, ordering)?;
    let opt = flow_opt_table(fi)?;
    let mut rows = Vec::with_capacity(fi.num_edges());
    let mut overall: f64 = 1.0;
    for k in 1..=fi.num_edges() {
        let alg = max_flow(fi, &ordering[..k])?;
        let ratio = ratio_of(opt[k - 1] as f64, alg as f64);
        overall = overall.max(ratio);
        rows.push(RatioRow {
            capacity: k as f64,
            opt: opt[k - 1] as f64,
            alg: alg as f64,
            ratio,
        });
    }
    Ok(RatioCurve { rows, overall })
}

struct FlowOrderSearch<'a> {
    fi: &'a FlowInstance,
    opt: &'a [u32],
    res: Residual,
    best_ratio: f64,
    best_order: Option<Vec<usize>>,
}

impl FlowOrderSearch<'_> {
    fn dfs(&mut self, prefix: &mut Vec<usize>, used: &mut Vec<bool>, flow: u32, cur_max: f64) {
        if self.best_order.is_some() && cur_max >= self.best_ratio {
            return;
        }
        if prefix.len() == self.fi.num_edges() {
            if self.best_order.is_none() || cur_max < self.best_ratio {
                self.best_ratio = cur_max;
                self.best_order = Some(prefix.clone());
            }
            return;
        }
        for e in 0..self.fi.num_edges() {
            if used[e] {
                continue;
            }
            // add edge e: fresh arcs, try a single augmentation
            let (u, v) = self.fi.edges[e];
            let arc = self.res.add_arc(u, v);
            let path = self.res.augment(self.fi.source, self.fi.sink);
            let new_flow = flow + path.is_some() as u32;
            used[e] = true;
            prefix.push(e);
            let k = prefix.len();
            let ratio = ratio_of(self.opt[k - 1] as f64, new_flow as f64);
            self.dfs(prefix, used, new_flow, cur_max.max(ratio));
            prefix.pop();
            used[e] = false;
            if let Some(path) = path {
                for &a in &path {
                    self.res.caps[a] += 1;
                    self.res.caps[a ^ 1] -= 1;
                }
            }
            // retract the arcs for edge e (they are the most recent)
            self.res.heads.truncate(arc);
            self.res.caps.truncate(arc);
            self.res.adj[u].pop();
            self.res.adj[v].pop();
        }
    }
}

/// Exhaustive minimum competitive ratio over all edge orderings.
pub fn best_flow_ordering(fi: &FlowInstance) -> Result<(Vec<usize>, f64)> {
    if fi.num_edges() > FLOW_PERM_LIMIT {
        return Err(Error::capability(format!(
            "best_flow_ordering supports |E| <= {}, got {}",
            FLOW_PERM_LIMIT,
            fi.num_edges()
        )));
    }
    let opt = flow_opt_table(fi)?;
    let mut search = FlowOrderSearch {
        fi,
        opt: &opt,
        res: Residual::new(fi.vertices.len()),
        best_ratio: f64::INFINITY,
        best_order: None,
    };
    let mut prefix = Vec::new();
    let mut used = vec![false; fi.num_edges()];
    search.dfs(&mut prefix, &mut used, 0, 1.0);
    let order = search.best_order.expect("at least one ordering evaluated");
    Ok((order, search.best_ratio))
}

// --- potential-based parallel-edge flows -----------------------------------

/// Potential-loss families with exact inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Psi {
    Identity,
    /// Signed quadratic: psi(x) = x * |x|.
    Quadratic,
}

impl Psi {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Psi::Identity => x,
            Psi::Quadratic => x * x.abs(),
        }
    }

    pub fn invert(&self, y: f64) -> f64 {
        match self {
            Psi::Identity => y,
            Psi::Quadratic => y.signum() * y.abs().sqrt(),
        }
    }
}

/// Parallel s-t edges with loss coefficients beta, capacities mu, a shared
/// potential-loss function, and knapsack weights for the incremental side.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct PotentialInstance {
    pub beta: Vec<f64>,
    pub mu: Vec<f64>,
    pub psi: Psi,
    pub weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPotential {
    beta: Vec<f64>,
    mu: Vec<f64>,
    psi: Psi,
    weights: Vec<f64>,
}

impl TryFrom<RawPotential> for PotentialInstance {
    type Error = Error;
    fn try_from(raw: RawPotential) -> Result<Self> {
        PotentialInstance::new(raw.beta, raw.mu, raw.psi, raw.weights)
    }
}

impl From<PotentialInstance> for RawPotential {
    fn from(p: PotentialInstance) -> Self {
        RawPotential {
            beta: p.beta,
            mu: p.mu,
            psi: p.psi,
            weights: p.weights,
        }
    }
}

impl PotentialInstance {
    pub fn new(beta: Vec<f64>, mu: Vec<f64>, psi: Psi, weights: Vec<f64>) -> Result<Self> {
        let m = beta.len();
        if m == 0 {
            return Err(Error::invalid("need at least one edge"));
        }
        if mu.len() != m || weights.len() != m {
            return Err(Error::invalid("beta, mu, weights must have equal length"));
        }
        if beta.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::invalid("loss coefficients beta must be positive"));
        }
        if mu.iter().any(|&u| !(u >= 1.0 - EPS)) {
            return Err(Error::invalid("capacities mu must be at least 1"));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("weights must be positive"));
        }
        Ok(PotentialInstance {
            beta,
            mu,
            psi,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Candidate potential of edge i: the largest potential difference that
    /// keeps edge i itself feasible.
    pub fn candidate_potential(&self, i: usize) -> f64 {
        self.beta[i] * self.psi.apply(self.mu[i])
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawPotential =
            serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))?;
        PotentialInstance::try_from(raw)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Exact XOS compilation: clause i fixes the potential at `p_i`; edge e
/// contributes its induced flow if feasible, otherwise 0.
pub fn potential_to_xos(p: &PotentialInstance) -> Result<Instance> {
    let m = p.len();
    let mut clauses = Vec::with_capacity(m);
    for i in 0..m {
        let pot = p.candidate_potential(i);
        let clause: Vec<f64> = (0..m)
            .map(|e| {
                let x = p.psi.invert(pot / p.beta[e]);
                if x <= p.mu[e] + EPS {
                    x
                } else {
                    0.0
                }
            })
            .collect();
        clauses.push(clause);
    }
    Instance::new(
        (1..=m).map(|i| format!("e{}", i)).collect(),
        p.weights.clone(),
        clauses,
    )
}

/// Brute-force reference: max over all sub-subsets and candidate potentials
/// of the feasible flow sum. Certifies `potential_to_xos`.
pub fn potential_eval_oracle(p: &PotentialInstance, set: &[usize]) -> Result<f64> {
    if set.len() > 15 {
        return Err(Error::capability("oracle supports |S| <= 15"));
    }
    for &e in set {
        if e >= p.len() {
            return Err(Error::invalid(format!("edge index {} out of range", e)));
        }
    }
    let candidates: Vec<f64> = (0..p.len()).map(|i| p.candidate_potential(i)).collect();
    let mut best = 0.0_f64;
    for mask in 0u32..(1 << set.len()) {
        let sub: Vec<usize> = set
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        for &pot in &candidates {
            let mut sum = 0.0;
            let mut feasible = true;
            for &e in &sub {
                let x = p.psi.invert(pot / p.beta[e]);
                if x > p.mu[e] + EPS {
                    feasible = false;
                    break;
                }
                sum += x;
            }
            if feasible {
                best = best.max(sum);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossed_paths_max_flow() {
        let g = FlowInstance::crossed_paths();
        let all: Vec<usize> = (0..9).collect();
        assert_eq!(max_flow(&g, &all).unwrap(), 2);
        assert_eq!(max_flow(&g, &[]).unwrap(), 0);
        // blocking path s, u1, v3, t
        assert_eq!(max_flow(&g, &[0, 8, 7]).unwrap(), 1);
    }

    #[test]
    fn crossed_paths_min_edges() {
        let g = FlowInstance::crossed_paths();
        assert_eq!(min_edges_for_value(&g, 1).unwrap(), 3);
        assert_eq!(min_edges_for_value(&g, 2).unwrap(), 8);
        assert!(matches!(
            min_edges_for_value(&g, 3),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn parallel_edges_min_edges() {
        let g =
            FlowInstance::new(vec!["s".into(), "t".into()], 0, 1, vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(min_edges_for_value(&g, 2).unwrap(), 2);
        let trace = quickest_increment(&g).unwrap();
        assert_eq!(trace.batch_sizes, vec![1, 1]);
        let curve = flow_ratio(&g, &trace.ordering).unwrap();
        assert!((curve.overall - 1.0).abs() < EPS);
    }

    #[test]
    fn crossed_paths_quickest_increment() {
        let g = FlowInstance::crossed_paths();
        let trace = quickest_increment(&g).unwrap();
        assert_eq!(trace.batch_sizes, vec![3, 6]);
        assert_eq!(trace.x_max, 2);
        assert_eq!(trace.c_table, vec![3, 8]);
        assert!(trace.batch_bound_holds());
        // the sizes sum to the edges used by the final two-path solution
        assert_eq!(trace.batch_sizes.iter().sum::<usize>(), 9);
        let curve = flow_ratio(&g, &trace.ordering).unwrap();
        assert!((curve.overall - 2.0).abs() < EPS);
        let at_8 = &curve.rows[7];
        assert_eq!(at_8.opt, 2.0);
        assert_eq!(at_8.alg, 1.0);
    }

    #[test]
    fn single_path_trace() {
        let g = FlowInstance::new(
            (0..5).map(|i| format!("v{}", i)).collect(),
            0,
            4,
            vec![(0, 1), (1, 2), (2, 3), (3, 4)],
        )
        .unwrap();
        let trace = quickest_increment(&g).unwrap();
        assert_eq!(trace.batch_sizes, vec![4]);
        let curve = flow_ratio(&g, &trace.ordering).unwrap();
        assert!((curve.overall - 1.0).abs() < EPS);
        let (_, best) = best_flow_ordering(&g).unwrap();
        assert!((best - 1.0).abs() < EPS);
    }

    #[test]
    fn unreachable_sink_is_infeasible() {
        let g = FlowInstance::new(vec!["s".into(), "a".into(), "t".into()], 0, 2, vec![(0, 1)])
            .unwrap();
        assert!(matches!(quickest_increment(&g), Err(Error::Infeasible(_))));
    }

    #[test]
    fn crossed_paths_best_ordering_is_two() {
        let g = FlowInstance::crossed_paths();
        let (order, ratio) = best_flow_ordering(&g).unwrap();
        assert!((ratio - 2.0).abs() < EPS);
        assert_eq!(order.len(), 9);
    }

    #[test]
    fn crossed_paths_orders_missing_the_blocking_path_are_bad_at_three() {
        let g = FlowInstance::crossed_paths();
        // start along the upper 4-edge path instead of the blocking path
        let pi = vec![0, 1, 2, 3, 4, 5, 6, 7, 8];
        let curve = flow_ratio(&g, &pi).unwrap();
        let at_3 = &curve.rows[2];
        assert!(at_3.ratio.is_infinite() || at_3.ratio >= 2.0 - EPS);
    }

    #[test]
    fn quickest_increment_meets_factor_two_on_random_dags() {
        for seed in 0..25 {
            let g = random_dag(8, 14, seed);
            let trace = match quickest_increment(&g) {
                Ok(t) => t,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => panic!("{}", e),
            };
            assert!(trace.batch_bound_holds(), "seed {}", seed);
            let curve = flow_ratio(&g, &trace.ordering).unwrap();
            assert!(
                curve.overall <= 2.0 + EPS,
                "seed {}: {}",
                seed,
                curve.overall
            );
        }
    }

    #[test]
    fn min_edges_matches_exhaustive_subset_minimum() {
        for seed in 0..10 {
            let g = random_dag(7, 10, seed + 100);
            let m = g.num_edges();
            if m > 12 {
                continue;
            }
            let all: Vec<usize> = (0..m).collect();
            let x_max = max_flow(&g, &all).unwrap();
            for j in 1..=x_max {
                let mcf = min_edges_for_value(&g, j).unwrap();
                let mut exhaustive = usize::MAX;
                for mask in 0u32..(1 << m) {
                    let sub: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
                    if sub.len() < exhaustive && max_flow(&g, &sub).unwrap() >= j {
                        exhaustive = sub.len();
                    }
                }
                assert_eq!(mcf, exhaustive, "seed {} j {}", seed, j);
            }
        }
    }

    #[test]
    fn graph_text_round_trip() {
        let g = FlowInstance::crossed_paths();
        let text = g.to_text();
        let back = FlowInstance::parse(&text).unwrap();
        assert_eq!(back.num_edges(), 9);
        let all: Vec<usize> = (0..9).collect();
        assert_eq!(max_flow(&back, &all).unwrap(), 2);
    }

    #[test]
    fn potential_identity_example() {
        let p = PotentialInstance::new(
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            Psi::Identity,
            vec![1.0, 1.0],
        )
        .unwrap();
        let inst = potential_to_xos(&p).unwrap();
        assert!((inst.evaluate(&[0, 1]).unwrap() - 2.0).abs() < EPS);
        assert!((inst.evaluate(&[0]).unwrap() - 1.0).abs() < EPS);
        assert_eq!(inst.clause(0), &[1.0, 1.0]);
        assert_eq!(inst.clause(1), &[0.0, 2.0]);
    }

    #[test]
    fn potential_quadratic_example() {
        let p = PotentialInstance::new(
            vec![1.0, 4.0],
            vec![2.0, 1.0],
            Psi::Quadratic,
            vec![1.0, 1.0],
        )
        .unwrap();
        let inst = potential_to_xos(&p).unwrap();
        assert!((inst.evaluate(&[0, 1]).unwrap() - 3.0).abs() < EPS);
        assert!((potential_eval_oracle(&p, &[0, 1]).unwrap() - 3.0).abs() < EPS);
    }

    #[test]
    fn potential_single_edge_saturates() {
        for psi in [Psi::Identity, Psi::Quadratic] {
            let p = PotentialInstance::new(vec![2.0], vec![3.0], psi, vec![1.0]).unwrap();
            let inst = potential_to_xos(&p).unwrap();
            assert!((inst.evaluate(&[0]).unwrap() - 3.0).abs() < EPS);
            assert!((potential_eval_oracle(&p, &[0]).unwrap() - 3.0).abs() < EPS);
        }
        let p = PotentialInstance::new(vec![1.0], vec![1.0], Psi::Identity, vec![1.0]).unwrap();
        assert_eq!(potential_eval_oracle(&p, &[]).unwrap(), 0.0);
    }

    #[test]
    fn potential_rejects_bad_parameters() {
        assert!(PotentialInstance::new(vec![0.0], vec![1.0], Psi::Identity, vec![1.0]).is_err());
        assert!(PotentialInstance::new(vec![1.0], vec![0.5], Psi::Identity, vec![1.0]).is_err());
    }

    #[test]
    fn xos_matches_oracle_on_random_instances() {
        let mut rng = SplitMix64::new(77);
        for trial in 0..30 {
            let m = 2 + rng.next_below(5);
            let psi = if trial % 2 == 0 {
                Psi::Identity
            } else {
                Psi::Quadratic
            };
            let beta: Vec<f64> = (0..m).map(|_| 0.5 + 3.0 * rng.next_f64()).collect();
            let mu: Vec<f64> = (0..m).map(|_| 1.0 + 3.0 * rng.next_f64()).collect();
            let weights: Vec<f64> = (0..m).map(|_| 1.0 + 4.0 * rng.next_f64()).collect();
            let p = PotentialInstance::new(beta, mu, psi, weights).unwrap();
            let inst = potential_to_xos(&p).unwrap();
            for mask in 0u32..(1 << m) {
                let set: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
                let a = inst.evaluate(&set).unwrap();
                let b = potential_eval_oracle(&p, &set).unwrap();
                assert!(
                    (a - b).abs() < 1e-9,
                    "trial {} mask {:b}: {} vs {}",
                    trial,
                    mask,
                    a,
                    b
                );
            }
        }
    }

    // The continuum of potentials is dominated by the finite candidate set.
    #[test]
    fn candidate_potentials_dominate_dense_grid() {
        let mut rng = SplitMix64::new(8);
        for trial in 0..10 {
            let m = 2 + rng.next_below(4);
            let psi = if trial % 2 == 0 {
                Psi::Identity
            } else {
                Psi::Quadratic
            };
            let beta: Vec<f64> = (0..m).map(|_| 0.5 + 2.0 * rng.next_f64()).collect();
            let mu: Vec<f64> = (0..m).map(|_| 1.0 + 2.0 * rng.next_f64()).collect();
            let p = PotentialInstance::new(beta, mu, psi, vec![1.0; m]).unwrap();
            let set: Vec<usize> = (0..m).collect();
            let finite = potential_eval_oracle(&p, &set).unwrap();
            let p_max = (0..m)
                .map(|i| p.candidate_potential(i))
                .fold(0.0_f64, f64::max);
            let mut grid_best = 0.0_f64;
            for step in 0..=2000 {
                let pot = p_max * step as f64 / 2000.0;
                let sum: f64 = (0..m)
                    .map(|e| {
                        let x = psi.invert(pot / p.beta[e]);
                        if x <= p.mu[e] + EPS {
                            x
                        } else {
                            0.0
                        }
                    })
                    .sum();
                grid_best = grid_best.max(sum);
            }
            assert!(
                grid_best <= finite + 1e-6,
                "trial {}: {} > {}",
                trial,
                grid_best,
                finite
            );
        }
    }
}
