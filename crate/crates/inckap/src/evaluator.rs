//! Exact competitive-ratio measurement and exhaustive best-ordering search.
//!
//! Both `f*` and the prefix-value function of an ordering are
//! right-continuous step functions whose jumps lie on subset weights, so the
//! supremum of their ratio over all capacities is attained on the breakpoint
//! set and can be evaluated exactly.

use crate::error::{Error, Result};
use crate::objective::Instance;
use crate::optimum::{breakpoints, BreakpointTable};
use crate::{EPS, PERM_LIMIT};

/// One measured capacity: optimum value, prefix value, and their ratio.
#[derive(Debug, Clone)]
pub struct RatioRow {
    pub capacity: f64,
    pub opt: f64,
    pub alg: f64,
    pub ratio: f64,
}

/// Ratio curve over the breakpoint set, with its maximum.
#[derive(Debug, Clone)]
pub struct RatioCurve {
    pub rows: Vec<RatioRow>,
    pub overall: f64,
}

impl RatioCurve {
    /// CSV with header `capacity,opt,alg,ratio`; infinities print as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("capacity,opt,alg,ratio\n");
        for row in &self.rows {
            let ratio = if row.ratio.is_infinite() {
                "inf".to_string()
            } else {
                format!("{}", row.ratio)
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.capacity, row.opt, row.alg, ratio
            ));
        }
        out
    }
}

/// Ratio convention: 0/0 is 1 (nothing required, nothing delivered),
/// positive/0 is infinite (an unaffordable or worthless prefix is not
/// competitive).
pub fn ratio_of(opt: f64, alg: f64) -> f64 {
    if opt <= EPS {
        1.0
    } else if alg <= EPS {
        f64::INFINITY
    } else {
        opt / alg
    }
}

fn check_permutation(inst: &Instance, ordering: &[usize]) -> Result<()> {
    let m = inst.len();
    if ordering.len() != m {
        return Err(Error::invalid(format!(
            "ordering has {} entries for {} elements",
            ordering.len(),
            m
        )));
    }
    let mut seen = vec![false; m];
    for &e in ordering {
        if e >= m || seen[e] {
            return Err(Error::invalid(format!(
                "ordering is not a permutation (element {})",
                e
            )));
        }
        seen[e] = true;
    }
    Ok(())
}

/// Value of the longest prefix of `ordering` with cumulative weight <= c.
pub fn prefix_value(inst: &Instance, ordering: &[usize], c: f64) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(Error::invalid(format!("capacity must be >= 0, got {}", c)));
    }
    let mut weight = 0.0;
    let mut len = 0;
    for &e in ordering {
        if e >= inst.len() {
            return Err(Error::invalid(format!("element index {} out of range", e)));
        }
        weight += inst.weight(e);
        if weight > c + EPS {
            break;
        }
        len += 1;
    }
    inst.evaluate(&ordering[..len])
}

/// Evaluates the ratio at every breakpoint of `f*`; the maximum over rows is
/// the exact competitive ratio of the ordering.
pub fn competitive_ratio(inst: &Instance, ordering: &[usize]) -> Result<RatioCurve> {
    check_permutation(inst, ordering)?;
    let table = breakpoints(inst)?;
    competitive_ratio_with_table(inst, ordering, &table)
}

pub fn competitive_ratio_with_table(
    inst: &Instance,
    ordering: &[usize],
    table: &BreakpointTable,
) -> Result<RatioCurve> {
    // prefix cumulative weights and values, computed once
    let m = inst.len();
    let mut prefix_weights = Vec::with_capacity(m + 1);
    let mut prefix_values = Vec::with_capacity(m + 1);
    prefix_weights.push(0.0);
    prefix_values.push(0.0);
    let mut weight = 0.0;
    for j in 0..ordering.len() {
        weight += inst.weight(ordering[j]);
        prefix_weights.push(weight);
        prefix_values.push(inst.evaluate(&ordering[..=j])?);
    }
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut overall: f64 = 1.0;
    for &(c, opt) in &table.rows {
        let idx = prefix_weights.partition_point(|&w| w <= c + EPS);
        let alg = prefix_values[idx - 1];
        let ratio = ratio_of(opt, alg);
        overall = overall.max(ratio);
        rows.push(RatioRow {
            capacity: c,
            opt,
            alg,
            ratio,
        });
    }
    Ok(RatioCurve { rows, overall })
}

struct BestSearch<'a> {
    inst: &'a Instance,
    table: &'a BreakpointTable,
    best_ratio: f64,
    best_order: Option<Vec<usize>>,
}

impl BestSearch<'_> {
    /// Ratio contribution of breakpoints in [w_lo, w_hi), where the fitting
    /// prefix has value `alg`. The optimum is nondecreasing, so the worst
    /// ratio in the segment sits at its last breakpoint.
    fn segment_max(&self, w_lo: f64, w_hi: f64, alg: f64) -> f64 {
        let lo = self.table.rows.partition_point(|&(c, _)| c + EPS < w_lo);
        let hi = if w_hi.is_finite() {
            self.table.rows.partition_point(|&(c, _)| c + EPS < w_hi)
        } else {
            self.table.rows.len()
        };
        if hi > lo {
            ratio_of(self.table.rows[hi - 1].1, alg)
        } else {
            1.0
        }
    }

    fn dfs(
        &mut self,
        prefix: &mut Vec<usize>,
        used: &mut Vec<bool>,
        weight: f64,
        value: f64,
        cur_max: f64,
    ) {
        if self.best_order.is_some() && cur_max >= self.best_ratio {
            return; // no strict improvement possible below this node
        }
        let m = self.inst.len();
        if prefix.len() == m {
            // all breakpoints at or above the full weight
            let tail = self.segment_max(weight, f64::INFINITY, value);
            let total = cur_max.max(tail);
            if self.best_order.is_none() || total < self.best_ratio {
                self.best_ratio = total;
                self.best_order = Some(prefix.clone());
            }
            return;
        }
        for e in 0..m {
            if used[e] {
                continue;
            }
            let w_new = weight + self.inst.weight(e);
            // breakpoints in [weight, w_new) see the current prefix
            let seg = self.segment_max(weight, w_new, value);
            let next_max = cur_max.max(seg);
            used[e] = true;
            prefix.push(e);
            let v_new = self.inst.evaluate(prefix).expect("indices are valid");
            self.dfs(prefix, used, w_new, v_new, next_max);
            prefix.pop();
            used[e] = false;
        }
    }
}

/// Exhaustive branch-and-bound over all orderings; returns the
/// lexicographically smallest ordering attaining the minimum ratio.
pub fn best_ordering(inst: &Instance) -> Result<(Vec<usize>, f64)> {
    let m = inst.len();
    if m > PERM_LIMIT {
        return Err(Error::capability(format!(
            "best_ordering supports m <= {}, got {}",
            PERM_LIMIT, m
        )));
    }
    let table = breakpoints(inst)?;
    let mut search = BestSearch {
        inst,
        table: &table,
        best_ratio: f64::INFINITY,
        best_order: None,
    };
    let mut prefix = Vec::with_capacity(m);
    let mut used = vec![false; m];
    search.dfs(&mut prefix, &mut used, 0.0, 0.0, 1.0);
    let order = search
        .best_order
        .expect("at least one ordering is evaluated");
    Ok((order, search.best_ratio))
}
