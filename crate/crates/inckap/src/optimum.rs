//! Exhaustive optimum oracle: `f*(C)`, canonical optimum sets, the
//! breakpoint table of the step function `f*`, and dual-density-ordered
//! prefixes of optimum sets.
//!
//! `f*` is a right-continuous nondecreasing step function whose jumps lie
//! on subset weights, so both the table and the supremum reductions in the
//! evaluator are exact.

use crate::error::{Error, Result};
use crate::objective::Instance;
use crate::{ENUM_LIMIT, EPS};

/// Optimum at one capacity: the value `f*(C)` and the canonical set
/// attaining it (max value, then min weight, then lexicographically
/// smallest index set).
#[derive(Debug, Clone)]
pub struct OptimumPoint {
    pub capacity: f64,
    pub value: f64,
    pub set: Vec<usize>,
}

/// All distinct subset weights with the optimum value at each; the finite
/// support of `f*`.
#[derive(Debug, Clone)]
pub struct BreakpointTable {
    /// (capacity, f*(capacity)) rows, capacities strictly increasing.
    pub rows: Vec<(f64, f64)>,
}

impl BreakpointTable {
    /// `f*(c)`: value at the largest breakpoint `<= c + EPS`.
    pub fn value_at(&self, c: f64) -> f64 {
        match self.rows.partition_point(|&(b, _)| b <= c + EPS) {
            0 => 0.0,
            idx => self.rows[idx - 1].1,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("capacity,optimum_value\n");
        for &(c, v) in &self.rows {
            out.push_str(&format!("{},{}\n", c, v));
        }
        out
    }
}

fn check_enum_limit(inst: &Instance) -> Result<()> {
    if inst.len() > ENUM_LIMIT {
        return Err(Error::capability(format!(
            "exhaustive enumeration supports m <= {}, got {}",
            ENUM_LIMIT,
            inst.len()
        )));
    }
    Ok(())
}

struct OptSearch<'a> {
    inst: &'a Instance,
    capacity: f64,
    // per-clause suffix sums: suffix[i][d] = sum of clause i values over elements >= d
    suffix: Vec<Vec<f64>>,
    best_value: f64,
    best_weight: f64,
    best_set: Vec<usize>,
}

impl<'a> OptSearch<'a> {
    fn run(inst: &'a Instance, capacity: f64) -> OptimumPoint {
        let m = inst.len();
        let k = inst.num_clauses();
        let mut suffix = vec![vec![0.0; m + 1]; k];
        for i in 0..k {
            for d in (0..m).rev() {
                suffix[i][d] = suffix[i][d + 1] + inst.clause(i)[d];
            }
        }
        let mut search = OptSearch {
            inst,
            capacity,
            suffix,
            best_value: 0.0,
            best_weight: 0.0,
            best_set: Vec::new(),
        };
        let mut clause_sums = vec![0.0; k];
        let mut chosen = Vec::new();
        search.dfs(0, 0.0, &mut clause_sums, &mut chosen);
        OptimumPoint {
            capacity,
            value: search.best_value,
            set: search.best_set,
        }
    }

    fn dfs(
        &mut self,
        depth: usize,
        weight: f64,
        clause_sums: &mut Vec<f64>,
        chosen: &mut Vec<usize>,
    ) {
        let value = clause_sums
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let value = if chosen.is_empty() { 0.0 } else { value };
        // Improvement order: value, then weight. DFS visits sets in
        // lexicographic order of their index sequences, so the first set
        // found among ties is the canonical one.
        if value > self.best_value + EPS
            || (value > self.best_value - EPS && weight < self.best_weight - EPS)
        {
            self.best_value = value;
            self.best_weight = weight;
            self.best_set = chosen.clone();
        }
        if depth == self.inst.len() {
            return;
        }
        // Bound: no completion can exceed max_i (clause_sums[i] + suffix[i][depth]).
        let bound = clause_sums
            .iter()
            .enumerate()
            .map(|(i, &s)| s + self.suffix[i][depth])
            .fold(f64::NEG_INFINITY, f64::max);
        if bound < self.best_value - EPS {
            return;
        }
        // include `depth` first: keeps lexicographic visiting order
        let w = self.inst.weight(depth);
        if weight + w <= self.capacity + EPS {
            for (i, s) in clause_sums.iter_mut().enumerate() {
                *s += self.inst.clause(i)[depth];
            }
            chosen.push(depth);
            self.dfs(depth + 1, weight + w, clause_sums, chosen);
            chosen.pop();
            for (i, s) in clause_sums.iter_mut().enumerate() {
                *s -= self.inst.clause(i)[depth];
            }
        }
        self.dfs(depth + 1, weight, clause_sums, chosen);
    }
}

/// Exhaustive optimum for capacity `c`, with deterministic tie-breaking.
pub fn optimum(inst: &Instance, c: f64) -> Result<OptimumPoint> {
    check_enum_limit(inst)?;
    if !(c >= 0.0) {
        return Err(Error::invalid(format!("capacity must be >= 0, got {}", c)));
    }
    Ok(OptSearch::run(inst, c))
}

/// Every distinct subset weight (deduplicated at EPS) with its optimum value.
pub fn breakpoints(inst: &Instance) -> Result<BreakpointTable> {
    check_enum_limit(inst)?;
    let m = inst.len();
    let k = inst.num_clauses();
    // Collect (weight, value) over all subsets via iterative DFS on masks.
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(1 << m);
    let mut clause_sums = vec![0.0; k];
    collect(inst, 0, 0.0, &mut clause_sums, true, &mut pairs);
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut running_max = 0.0_f64;
    for (w, v) in pairs {
        running_max = running_max.max(v);
        match rows.last_mut() {
            Some(last) if (w - last.0).abs() <= EPS => last.1 = running_max,
            _ => rows.push((w, running_max)),
        }
    }
    Ok(BreakpointTable { rows })
}

fn collect(
    inst: &Instance,
    depth: usize,
    weight: f64,
    clause_sums: &mut Vec<f64>,
    empty: bool,
    out: &mut Vec<(f64, f64)>,
) {
    if depth == inst.len() {
        let value = if empty {
            0.0
        } else {
            clause_sums
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        out.push((weight, value));
        return;
    }
    collect(inst, depth + 1, weight, clause_sums, empty, out);
    for (i, s) in clause_sums.iter_mut().enumerate() {
        *s += inst.clause(i)[depth];
    }
    collect(
        inst,
        depth + 1,
        weight + inst.weight(depth),
        clause_sums,
        false,
        out,
    );
    for (i, s) in clause_sums.iter_mut().enumerate() {
        *s -= inst.clause(i)[depth];
    }
}

/// Reorders a set so that dual density `gamma_e / w(e)` is nonincreasing;
/// ties by larger gamma, then by lower element index.
pub fn order_by_dual_density(inst: &Instance, set: &[usize]) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Ok(Vec::new());
    }
    let cert = inst.dual_solution(set)?;
    let mut order = cert.subset.clone();
    order.sort_by(|&a, &b| {
        let ga = cert.gamma_of(a).unwrap();
        let gb = cert.gamma_of(b).unwrap();
        let da = ga / inst.weight(a);
        let db = gb / inst.weight(b);
        db.partial_cmp(&da)
            .unwrap()
            .then(gb.partial_cmp(&ga).unwrap())
            .then(a.cmp(&b))
    });
    Ok(order)
}

/// The canonical optimum set for capacity `c_prime`, in dual-density order.
pub fn ordered_optimum(inst: &Instance, c_prime: f64) -> Result<Vec<usize>> {
    let opt = optimum(inst, c_prime)?;
    order_by_dual_density(inst, &opt.set)
}

/// Longest prefix of `ordered_optimum(c_prime)` with cumulative weight
/// at most `c`.
pub fn prefix_set(inst: &Instance, c_prime: f64, c: f64) -> Result<Vec<usize>> {
    if !(c >= 0.0) || c > c_prime + EPS {
        return Err(Error::invalid(format!(
            "prefix capacity must satisfy 0 <= C <= C', got C = {}, C' = {}",
            c, c_prime
        )));
    }
    let order = ordered_optimum(inst, c_prime)?;
    let mut out = Vec::new();
    let mut weight = 0.0;
    for e in order {
        weight += inst.weight(e);
        if weight > c + EPS {
            break;
        }
        out.push(e);
    }
    Ok(out)
}
