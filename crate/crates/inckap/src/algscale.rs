//! Capacity/value-scaling assembly of incremental orderings.
//!
//! Phases grow the capacity by at least a factor delta and the target
//! optimum value by at least a factor rho(M); each phase's optimum set is
//! appended in dual-density order (phases 3+), with special first-element
//! rules in phases 1 and 2. Already-placed elements are skipped, and
//! elements never captured by any phase are appended by singleton density.

use serde::Serialize;

use crate::error::Result;
use crate::objective::Instance;
use crate::optimum::{breakpoints, optimum, order_by_dual_density};
use crate::EPS;

/// The scaling constants: lambda is the unique real root of
/// x^7 - 2x^6 - 3x^5 - 3x^4 - 3x^3 - 2x^2 - x - 1 = 0, delta = lambda^3 / (lambda^2 + 1).
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub lambda: f64,
    pub delta: f64,
}

impl Constants {
    /// rho(M) = max(lambda * sqrt(M), 2M).
    pub fn rho(&self, m_bound: f64) -> f64 {
        (self.lambda * m_bound.sqrt()).max(2.0 * m_bound)
    }
}

fn lambda_poly(x: f64) -> f64 {
    ((((((x - 2.0) * x - 3.0) * x - 3.0) * x - 3.0) * x - 2.0) * x - 1.0) * x - 1.0
}

fn lambda_poly_deriv(x: f64) -> f64 {
    (((((7.0 * x - 12.0) * x - 15.0) * x - 12.0) * x - 9.0) * x - 4.0) * x - 1.0
}

/// Bracketed bisection on [3, 4], then Newton polish to machine precision.
pub fn compute_constants() -> Constants {
    let (mut lo, mut hi) = (3.0_f64, 4.0_f64);
    debug_assert!(lambda_poly(lo) < 0.0 && lambda_poly(hi) > 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if lambda_poly(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..4 {
        lambda -= lambda_poly(lambda) / lambda_poly_deriv(lambda);
    }
    Constants {
        lambda,
        delta: lambda.powi(3) / (lambda * lambda + 1.0),
    }
}

/// One phase: the capacity and the canonical optimum set targeted there.
#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    pub capacity: f64,
    /// Element indices of the targeted optimum set.
    pub target: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseSchedule {
    pub phases: Vec<Phase>,
    pub rho: f64,
    pub m_bound: f64,
}

/// Full element permutation with prefix weight/value step data.
#[derive(Debug, Clone, Serialize)]
pub struct IncrementalOrdering {
    pub order: Vec<usize>,
    /// Cumulative weight after each prefix (length m).
    pub prefix_weights: Vec<f64>,
    /// Objective value of each prefix (length m).
    pub prefix_values: Vec<f64>,
}

/// Capacity schedule: C_1 = min weight; each later phase is the smallest
/// candidate in {delta * C_prev} ∪ {breakpoints above it} whose optimum
/// value reaches rho * f*(C_prev); if the threshold is unreachable below
/// the total weight, the schedule jumps straight to C_N = w(E).
pub fn phase_schedule(inst: &Instance) -> Result<PhaseSchedule> {
    let report = inst.validate();
    let constants = compute_constants();
    let rho = constants.rho(report.m_bound);
    let table = breakpoints(inst)?;
    let total = inst.total_weight();

    let c1 = inst.min_weight();
    let mut phases = vec![Phase {
        capacity: c1,
        target: optimum(inst, c1)?.set,
    }];
    let mut prev_c = c1;
    let mut prev_f = table.value_at(c1);

    while prev_c < total - EPS {
        let lower = constants.delta * prev_c;
        let threshold = rho * prev_f - EPS;
        let mut candidates: Vec<f64> = vec![lower];
        candidates.extend(table.rows.iter().map(|r| r.0).filter(|&b| b > lower + EPS));
        let qualifying = candidates
            .into_iter()
            .filter(|&c| c <= total + EPS)
            .find(|&c| table.value_at(c) >= threshold);
        match qualifying {
            Some(c) if c < total - EPS => {
                phases.push(Phase {
                    capacity: c,
                    target: optimum(inst, c)?.set,
                });
                prev_c = c;
                prev_f = table.value_at(c);
            }
            _ => {
                phases.push(Phase {
                    capacity: total,
                    target: optimum(inst, total)?.set,
                });
                break;
            }
        }
    }
    Ok(PhaseSchedule {
        phases,
        rho,
        m_bound: report.m_bound,
    })
}

/// Phase-2 head: the element with the largest singleton value
/// (ties: larger weight, then lower index).
fn phase2_head(inst: &Instance, target: &[usize]) -> Option<usize> {
    target.iter().copied().max_by(|&a, &b| {
        let fa = inst.singleton_value(a);
        let fb = inst.singleton_value(b);
        fa.partial_cmp(&fb)
            .unwrap()
            .then(inst.weight(a).partial_cmp(&inst.weight(b)).unwrap())
            .then(b.cmp(&a))
    })
}

/// Assembles the permutation phase by phase.
pub fn build_ordering(inst: &Instance) -> Result<IncrementalOrdering> {
    let schedule = phase_schedule(inst)?;
    build_ordering_from_schedule(inst, &schedule)
}

pub fn build_ordering_from_schedule(
    inst: &Instance,
    schedule: &PhaseSchedule,
) -> Result<IncrementalOrdering> {
    let m = inst.len();
    let mut placed = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let push = |e: usize, placed: &mut Vec<bool>, order: &mut Vec<usize>| {
        if !placed[e] {
            placed[e] = true;
            order.push(e);
        }
    };

    for (i, phase) in schedule.phases.iter().enumerate() {
        let phase_order: Vec<usize> = match i {
            0 => phase.target.clone(),
            1 => {
                let mut v = Vec::with_capacity(phase.target.len());
                if let Some(head) = phase2_head(inst, &phase.target) {
                    v.push(head);
                    let mut rest: Vec<usize> = phase
                        .target
                        .iter()
                        .copied()
                        .filter(|&e| e != head)
                        .collect();
                    rest.sort_unstable();
                    v.extend(rest);
                }
                v
            }
            _ => order_by_dual_density(inst, &phase.target)?,
        };
        for e in phase_order {
            push(e, &mut placed, &mut order);
        }
    }

    // Elements never captured by any phase, by descending singleton density.
    let mut leftovers: Vec<usize> = (0..m).filter(|&e| !placed[e]).collect();
    leftovers.sort_by(|&a, &b| {
        let da = inst.singleton_value(a) / inst.weight(a);
        let db = inst.singleton_value(b) / inst.weight(b);
        db.partial_cmp(&da).unwrap().then(a.cmp(&b))
    });
    for e in leftovers {
        push(e, &mut placed, &mut order);
    }

    let mut prefix_weights = Vec::with_capacity(m);
    let mut prefix_values = Vec::with_capacity(m);
    let mut weight = 0.0;
    for j in 0..m {
        weight += inst.weight(order[j]);
        prefix_weights.push(weight);
        prefix_values.push(inst.evaluate(&order[..=j])?);
    }
    Ok(IncrementalOrdering {
        order,
        prefix_weights,
        prefix_values,
    })
}

impl IncrementalOrdering {
    /// JSON export: element names in order, plus the phase schedule.
    pub fn to_json(&self, inst: &Instance, schedule: &PhaseSchedule) -> String {
        #[derive(Serialize)]
        struct PhaseOut {
            capacity: f64,
            target: Vec<String>,
        }
        #[derive(Serialize)]
        struct Out {
            order: Vec<String>,
            phases: Vec<PhaseOut>,
        }
        let out = Out {
            order: self
                .order
                .iter()
                .map(|&e| inst.element_name(e).to_string())
                .collect(),
            phases: schedule
                .phases
                .iter()
                .map(|p| PhaseOut {
                    capacity: p.capacity,
                    target: p
                        .target
                        .iter()
                        .map(|&e| inst.element_name(e).to_string())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("ordering serializes")
    }
}
