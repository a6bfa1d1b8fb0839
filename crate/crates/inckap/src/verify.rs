//! Built-in verification suites: worst-case bound certificates, the
//! dual-estimate lemmas on randomized instances, and the flow results.

use crate::algscale::{build_ordering_from_schedule, compute_constants, phase_schedule};
use crate::error::Result;
use crate::evaluator::{best_ordering, competitive_ratio};
use crate::flows::{
    best_flow_ordering, flow_ratio, max_flow, min_edges_for_value, potential_eval_oracle,
    potential_to_xos, quickest_increment, random_dag, FlowInstance, PotentialInstance, Psi,
};
use crate::instances::{gen_m_bound, gen_random_xos, gen_sqrt6, SplitMix64};
use crate::objective::Instance;
use crate::optimum::{optimum, prefix_set};
use crate::Error;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

pub fn render(checks: &[Check]) -> (String, bool) {
    let mut out = String::new();
    let mut all = true;
    for c in checks {
        all &= c.passed;
        out.push_str(&format!(
            "{} {}: {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    (out, all)
}

/// Worst-case bound certificates: the 2-element family forces ratio M, the
/// 10-element family forces ratio at least sqrt(6), and the scaling
/// algorithm stays within rho(M) on seeded random instances.
pub fn suite_bounds(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m_value in [1.0, 2.0, 4.0] {
        let inst = gen_m_bound(m_value)?;
        let (_, ratio) = best_ordering(&inst)?;
        checks.push(Check::new(
            format!("m_bound M={}", m_value),
            (ratio - m_value).abs() <= 1e-9,
            format!("best ratio {} (expected {})", ratio, m_value),
        ));
    }
    {
        let inst = gen_sqrt6();
        let (_, ratio) = best_ordering(&inst)?;
        checks.push(Check::new(
            "sqrt6",
            ratio >= 2.449,
            format!("best ratio {} (lower bound 2.449)", ratio),
        ));
    }
    {
        let c = compute_constants();
        let mut worst: f64 = 0.0;
        let mut rng = SplitMix64::new(seed);
        let mut ok = true;
        for m_value in [1.0, 2.0, 4.0] {
            for _ in 0..25 {
                let m = 3 + rng.next_below(8);
                let inst = gen_random_xos(m, 3, m_value, rng.next_u64())?;
                let schedule = phase_schedule(&inst)?;
                let ord = build_ordering_from_schedule(&inst, &schedule)?;
                let ratio = competitive_ratio(&inst, &ord.order)?.overall;
                worst = worst.max(ratio / c.rho(m_value));
                ok &= ratio <= schedule.rho + 1e-6;
            }
        }
        checks.push(Check::new(
            "alg_scale within rho",
            ok,
            format!("worst ratio/rho over 75 random instances: {:.6}", worst),
        ));
    }
    Ok(checks)
}

struct LemmaSample {
    instance: Instance,
    c_lo: f64,
    c_hi: f64,
}

fn lemma_samples(seed: u64, count: usize) -> Result<Vec<LemmaSample>> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = 4 + rng.next_below(7);
        let instance = gen_random_xos(m, 3, 1.0 + 3.0 * rng.next_f64(), rng.next_u64())?;
        let total = instance.total_weight();
        let min_w = instance.min_weight();
        let c_hi = min_w + (total - min_w) * rng.next_f64();
        let c_lo = min_w + (c_hi - min_w) * rng.next_f64();
        out.push(LemmaSample {
            instance,
            c_lo,
            c_hi,
        });
    }
    Ok(out)
}

/// The dual-estimate lemmas on 200 randomized samples each:
/// subset duals are dominated by subset values, and optima at larger
/// capacities are bounded through density prefixes.
pub fn suite_lemmas(seed: u64) -> Result<Vec<Check>> {
    let tol = 1e-6;
    let mut checks = Vec::new();

    // f(X) >= sum of gamma*(Y) over X, for X subset of Y
    {
        let mut rng = SplitMix64::new(seed ^ 0x1111);
        let mut pass = 0;
        let total = 200;
        for _ in 0..total {
            let m = 4 + rng.next_below(7);
            let inst = gen_random_xos(m, 3, 2.0, rng.next_u64())?;
            let y: Vec<usize> = (0..m).filter(|_| rng.next_f64() < 0.7).collect();
            if y.is_empty() {
                pass += 1;
                continue;
            }
            let x: Vec<usize> = y.iter().copied().filter(|_| rng.next_f64() < 0.6).collect();
            let cert = inst.dual_solution(&y)?;
            let restricted: f64 = x.iter().filter_map(|&e| cert.gamma_of(e)).sum();
            if restricted <= inst.evaluate(&x)? + tol {
                pass += 1;
            }
        }
        checks.push(Check::new(
            "dual restriction lemma",
            pass == total,
            format!("{}/{} samples", pass, total),
        ));
    }

    // f*(C') <= (C'/C)(f(prefix) + M) and the corollary with f*(C)
    let samples = lemma_samples(seed ^ 0x2222, 200)?;
    let mut pass_prefix = 0;
    let mut pass_corollary = 0;
    for s in &samples {
        let m_bound = s.instance.validate().m_bound;
        let f_hi = optimum(&s.instance, s.c_hi)?.value;
        let prefix = prefix_set(&s.instance, s.c_hi, s.c_lo)?;
        let f_prefix = s.instance.evaluate(&prefix)?;
        if f_hi <= s.c_hi / s.c_lo * (f_prefix + m_bound) + tol {
            pass_prefix += 1;
        }
        let f_lo = optimum(&s.instance, s.c_lo)?.value;
        if f_hi <= s.c_hi / s.c_lo * (f_lo + m_bound) + tol {
            pass_corollary += 1;
        }
    }
    checks.push(Check::new(
        "density prefix estimate",
        pass_prefix == samples.len(),
        format!("{}/{} samples", pass_prefix, samples.len()),
    ));
    checks.push(Check::new(
        "optimum ratio corollary",
        pass_corollary == samples.len(),
        format!("{}/{} samples", pass_corollary, samples.len()),
    ));
    Ok(checks)
}

/// Flow results: Quickest-Increment factor 2 with the batch-size estimate,
/// the exact ratio-2 certificate on the built-in lower-bound graph, the
/// min-cost edge counts against exhaustive minima, and the potential-to-XOS
/// compilation against its brute-force oracle.
pub fn suite_flows(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    {
        let g = FlowInstance::crossed_paths();
        let trace = quickest_increment(&g)?;
        let curve = flow_ratio(&g, &trace.ordering)?;
        checks.push(Check::new(
            "crossed_paths quickest-increment",
            (curve.overall - 2.0).abs() <= 1e-9
                && trace.batch_sizes == vec![3, 6]
                && trace.batch_bound_holds(),
            format!("ratio {}, batches {:?}", curve.overall, trace.batch_sizes),
        ));
        let (_, best) = best_flow_ordering(&g)?;
        checks.push(Check::new(
            "crossed_paths best ordering",
            (best - 2.0).abs() <= 1e-9,
            format!("best ratio {}", best),
        ));
    }
    {
        let mut ok = true;
        let mut worst: f64 = 1.0;
        let mut tested = 0;
        let mut s = seed;
        while tested < 50 {
            s += 1;
            let g = random_dag(10, 20, s);
            let trace = match quickest_increment(&g) {
                Ok(t) => t,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e),
            };
            let curve = flow_ratio(&g, &trace.ordering)?;
            ok &= curve.overall <= 2.0 + 1e-9 && trace.batch_bound_holds();
            worst = worst.max(curve.overall);
            tested += 1;
        }
        checks.push(Check::new(
            "quickest-increment factor 2",
            ok,
            format!("worst ratio {} over {} random DAGs", worst, tested),
        ));
    }
    {
        let mut ok = true;
        let mut tested = 0;
        let mut s = seed ^ 0x4444;
        while tested < 20 {
            s += 1;
            let g = random_dag(7, 12, s);
            if g.num_edges() > 12 {
                continue;
            }
            let all: Vec<usize> = (0..g.num_edges()).collect();
            let x_max = max_flow(&g, &all)?;
            for j in 1..=x_max {
                let mcf = min_edges_for_value(&g, j)?;
                let mut exhaustive = usize::MAX;
                for mask in 0u32..(1 << g.num_edges()) {
                    let sub: Vec<usize> =
                        (0..g.num_edges()).filter(|&e| mask >> e & 1 == 1).collect();
                    if sub.len() < exhaustive && max_flow(&g, &sub)? >= j {
                        exhaustive = sub.len();
                    }
                }
                ok &= mcf == exhaustive;
            }
            tested += 1;
        }
        checks.push(Check::new(
            "min-cost edge counts",
            ok,
            format!("{} graphs cross-checked exhaustively", tested),
        ));
    }
    {
        let mut rng = SplitMix64::new(seed ^ 0x5555);
        let mut ok = true;
        for trial in 0..50 {
            let m = 1 + rng.next_below(8);
            let psi = if trial % 2 == 0 {
                Psi::Identity
            } else {
                Psi::Quadratic
            };
            let beta: Vec<f64> = (0..m).map(|_| 0.5 + 3.0 * rng.next_f64()).collect();
            let mu: Vec<f64> = (0..m).map(|_| 1.0 + 3.0 * rng.next_f64()).collect();
            let weights: Vec<f64> = (0..m).map(|_| 1.0 + 4.0 * rng.next_f64()).collect();
            let p = PotentialInstance::new(beta, mu, psi, weights)?;
            let inst = potential_to_xos(&p)?;
            ok &= inst.validate().ok;
            for mask in 0u32..(1 << m) {
                let set: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
                let a = inst.evaluate(&set)?;
                let b = potential_eval_oracle(&p, &set)?;
                ok &= (a - b).abs() <= 1e-9;
            }
        }
        checks.push(Check::new(
            "potential-to-XOS compilation",
            ok,
            "50 random parallel-edge instances, all subsets".to_string(),
        ));
    }
    Ok(checks)
}
