//! XOS instances: ground set, weights, clause matrix, and closed-form
//! LP-dual certificates.
//!
//! An instance encodes a monotone fractionally subadditive objective as a
//! pointwise maximum of `k` linear clauses over `m` elements,
//! `f(S) = max_i sum_{e in S} v[i][e]`. For nonnegative clause values this
//! is automatically monotone and fractionally subadditive, and the optimal
//! dual of the covering LP for any subset `X` is available in closed form:
//! pick the clause achieving `f(X)` and read off its coefficients.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{DUAL_CHECK_LIMIT, EPS};

/// Ground set with positive weights and an XOS clause matrix.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    elements: Vec<String>,
    weights: Vec<f64>,
    /// `clauses[i][e]` is the value of element `e` in clause `i`.
    clauses: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    elements: Vec<String>,
    weights: Vec<f64>,
    clauses: Vec<Vec<f64>>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;
    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.elements, raw.weights, raw.clauses)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            elements: inst.elements,
            weights: inst.weights,
            clauses: inst.clauses,
        }
    }
}

/// Result of checking the modeling assumptions on an instance.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// `M = max_e f({e})`, the singleton-value bound.
    pub m_bound: f64,
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Optimal dual solution of the covering LP for a subset `X`: per-element
/// values summing to `f(X)` and feasible against every subset's value.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    /// The certified subset, sorted ascending.
    pub subset: Vec<usize>,
    /// `gamma[j]` is the dual value of `subset[j]`.
    pub gamma: Vec<f64>,
    /// Index of the clause achieving `f(X)`.
    pub clause_index: usize,
}

impl DualCertificate {
    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }

    pub fn gamma_of(&self, element: usize) -> Option<f64> {
        self.subset
            .iter()
            .position(|&e| e == element)
            .map(|j| self.gamma[j])
    }
}

impl Instance {
    /// Structural checks only: dimensions agree, m >= 1, k >= 1, weights
    /// finite and positive, clause values finite and nonnegative. The
    /// M-boundedness assumption is reported by [`Instance::validate`].
    pub fn new(elements: Vec<String>, weights: Vec<f64>, clauses: Vec<Vec<f64>>) -> Result<Self> {
        let m = elements.len();
        if m == 0 {
            return Err(Error::invalid("instance needs at least one element"));
        }
        if weights.len() != m {
            return Err(Error::invalid(format!(
                "got {} weights for {} elements",
                weights.len(),
                m
            )));
        }
        if clauses.is_empty() {
            return Err(Error::invalid("instance needs at least one clause"));
        }
        for (i, row) in clauses.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!(
                    "clause {} has {} entries for {} elements",
                    i,
                    row.len(),
                    m
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::invalid(format!(
                    "clause {} contains a negative or non-finite value {}",
                    i, v
                )));
            }
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::invalid(format!("non-finite weight {}", w)));
        }
        Ok(Instance {
            elements,
            weights,
            clauses,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn element_name(&self, e: usize) -> &str {
        &self.elements[e]
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn clause(&self, i: usize) -> &[f64] {
        &self.clauses[i]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `f({e}) = max_i v[i][e]`.
    pub fn singleton_value(&self, e: usize) -> f64 {
        self.clauses
            .iter()
            .map(|row| row[e])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_subset(&self, set: &[usize]) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for &e in set {
            if e >= self.len() {
                return Err(Error::invalid(format!(
                    "element index {} out of range (m = {})",
                    e,
                    self.len()
                )));
            }
            out.insert(e);
        }
        Ok(out)
    }

    /// `f(S)`: pointwise maximum over clauses of the clause sum on `S`.
    /// The empty set evaluates to 0.
    pub fn evaluate(&self, set: &[usize]) -> Result<f64> {
        let set = self.check_subset(set)?;
        if set.is_empty() {
            return Ok(0.0);
        }
        Ok(self
            .clauses
            .iter()
            .map(|row| set.iter().map(|&e| row[e]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Checks the modeling assumptions: positive weights and singleton
    /// values at least 1 (M-boundedness). Monotonicity and fractional
    /// subadditivity hold automatically for nonnegative clause matrices.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (e, &w) in self.weights.iter().enumerate() {
            if w <= EPS {
                violations.push(format!("nonpositive weight: element {} has w = {}", e, w));
            }
        }
        let mut m_bound: f64 = 0.0;
        for e in 0..self.len() {
            let fe = self.singleton_value(e);
            m_bound = m_bound.max(fe);
            if fe < 1.0 - EPS {
                violations.push(format!(
                    "singleton value below 1: f({{{}}}) = {}",
                    self.elements[e], fe
                ));
            }
        }
        ValidationReport {
            m_bound,
            ok: violations.is_empty(),
            violations,
        }
    }

    /// Closed-form optimal dual for the covering LP of `X`: the clause
    /// achieving `f(X)` (ties: lowest clause index) gives `gamma_e = v[i*][e]`.
    pub fn dual_solution(&self, x: &[usize]) -> Result<DualCertificate> {
        let set = self.check_subset(x)?;
        if set.is_empty() {
            return Err(Error::invalid("dual_solution requires a nonempty subset"));
        }
        let mut best_i = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, row) in self.clauses.iter().enumerate() {
            let v: f64 = set.iter().map(|&e| row[e]).sum();
            if v > best_v + EPS {
                best_v = v;
                best_i = i;
            }
        }
        let subset: Vec<usize> = set.into_iter().collect();
        let gamma = subset.iter().map(|&e| self.clauses[best_i][e]).collect();
        Ok(DualCertificate {
            subset,
            gamma,
            clause_index: best_i,
        })
    }

    /// Exhaustive weak-duality check: the certificate sums to `f(X)` and
    /// `sum_{e in B ∩ X} gamma_e <= f(B)` for every `B ⊆ E`.
    pub fn verify_dual_feasible(&self, cert: &DualCertificate) -> Result<bool> {
        let m = self.len();
        if m > DUAL_CHECK_LIMIT {
            return Err(Error::capability(format!(
                "exhaustive dual check supports m <= {}, got {}",
                DUAL_CHECK_LIMIT, m
            )));
        }
        let fx = self.evaluate(&cert.subset)?;
        if (cert.total() - fx).abs() > EPS {
            return Ok(false);
        }
        // gamma as a dense vector, zero outside X.
        let mut g = vec![0.0; m];
        for (j, &e) in cert.subset.iter().enumerate() {
            if e >= m {
                return Err(Error::invalid(format!(
                    "certificate element {} out of range",
                    e
                )));
            }
            g[e] = cert.gamma[j];
        }
        for mask in 0..(1u32 << m) {
            let mut gsum = 0.0;
            let mut clause_best = f64::NEG_INFINITY;
            for row in &self.clauses {
                let mut s = 0.0;
                let mut bits = mask;
                while bits != 0 {
                    let e = bits.trailing_zeros() as usize;
                    s += row[e];
                    bits &= bits - 1;
                }
                clause_best = clause_best.max(s);
            }
            let mut bits = mask;
            while bits != 0 {
                let e = bits.trailing_zeros() as usize;
                gsum += g[e];
                bits &= bits - 1;
            }
            let fb = if mask == 0 { 0.0 } else { clause_best };
            if gsum > fb + EPS {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawInstance =
            serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))?;
        Instance::try_from(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_m_bound, gen_random_xos, gen_sqrt6, SplitMix64};

    const SQRT6: f64 = 2.449489742783178;

    fn e2() -> Vec<usize> {
        vec![1, 2, 3]
    }

    fn e3() -> Vec<usize> {
        vec![4, 5, 6, 7, 8, 9]
    }

    #[test]
    fn evaluate_sqrt6_sets() {
        let inst = gen_sqrt6();
        assert!((inst.evaluate(&e2()).unwrap() - SQRT6).abs() < EPS);
        assert!((inst.evaluate(&e3()).unwrap() - 6.0).abs() < EPS);
        assert_eq!(inst.evaluate(&[]).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_rejects_unknown_index() {
        let inst = gen_m_bound(4.0).unwrap();
        assert!(matches!(inst.evaluate(&[7]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn validate_m_instance() {
        let inst = gen_m_bound(4.0).unwrap();
        let rep = inst.validate();
        assert!(rep.ok);
        assert!((rep.m_bound - 4.0).abs() < EPS);
    }

    #[test]
    fn validate_rejects_zero_weight() {
        let inst = Instance::new(
            vec!["a".into(), "b".into()],
            vec![0.0, 1.0],
            vec![vec![1.0, 1.0]],
        )
        .unwrap();
        let rep = inst.validate();
        assert!(!rep.ok);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.contains("nonpositive weight")));
    }

    #[test]
    fn validate_sqrt6() {
        let rep = gen_sqrt6().validate();
        assert!(rep.ok);
        assert!((rep.m_bound - 1.0).abs() < EPS);
    }

    #[test]
    fn dual_on_sqrt6_e2() {
        let inst = gen_sqrt6();
        let cert = inst.dual_solution(&e2()).unwrap();
        let g = SQRT6 / 3.0;
        assert_eq!(cert.gamma.len(), 3);
        for &v in &cert.gamma {
            assert!((v - g).abs() < EPS);
        }
        assert!((cert.total() - SQRT6).abs() < EPS);
        assert!(inst.verify_dual_feasible(&cert).unwrap());
    }

    #[test]
    fn dual_on_sqrt6_singleton_prefers_singleton_clause() {
        let inst = gen_sqrt6();
        let cert = inst.dual_solution(&[1]).unwrap();
        assert!((cert.total() - 1.0).abs() < EPS);
        assert!((cert.gamma[0] - 1.0).abs() < EPS);
    }

    #[test]
    fn dual_on_m_instance() {
        let inst = gen_m_bound(4.0).unwrap();
        let cert = inst.dual_solution(&[0, 1]).unwrap();
        assert_eq!(cert.clause_index, 0);
        assert!((cert.gamma_of(0).unwrap() - 1.0).abs() < EPS);
        assert!((cert.gamma_of(1).unwrap() - 4.0).abs() < EPS);
        assert!(inst.verify_dual_feasible(&cert).unwrap());
    }

    #[test]
    fn dual_rejects_empty_subset() {
        let inst = gen_m_bound(2.0).unwrap();
        assert!(matches!(
            inst.dual_solution(&[]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn inflated_certificate_is_rejected() {
        let inst = gen_sqrt6();
        let mut cert = inst.dual_solution(&e2()).unwrap();
        cert.gamma[0] += 1.0;
        assert!(!inst.verify_dual_feasible(&cert).unwrap());
    }

    #[test]
    fn dual_check_capability_limit() {
        let m = 21;
        let inst = Instance::new(
            (0..m).map(|i| format!("e{}", i)).collect(),
            vec![1.0; m],
            vec![vec![1.0; m]],
        )
        .unwrap();
        let cert = inst.dual_solution(&[0]).unwrap();
        assert!(matches!(
            inst.verify_dual_feasible(&cert),
            Err(Error::CapabilityLimit(_))
        ));
    }

    #[test]
    fn monotone_on_random_instances() {
        let mut rng = SplitMix64::new(11);
        for seed in 0..20 {
            let inst = gen_random_xos(8, 4, 3.0, seed).unwrap();
            for _ in 0..50 {
                let t: Vec<usize> = (0..8).filter(|_| rng.next_f64() < 0.5).collect();
                let s: Vec<usize> = t.iter().copied().filter(|_| rng.next_f64() < 0.5).collect();
                assert!(inst.evaluate(&s).unwrap() <= inst.evaluate(&t).unwrap() + EPS);
            }
        }
    }

    // Fractional subadditivity against randomized covers: draw random sets
    // B_i and uniform alpha_i, rescale so every element of X is covered with
    // total mass at least 1, and check f(X) <= sum alpha_i f(B_i).
    #[test]
    fn fractional_subadditivity_random_covers() {
        let mut rng = SplitMix64::new(23);
        for seed in 0..10 {
            let m = 6;
            let inst = gen_random_xos(m, 4, 2.0, seed).unwrap();
            for _ in 0..20 {
                let x: Vec<usize> = (0..m).filter(|_| rng.next_f64() < 0.5).collect();
                if x.is_empty() {
                    continue;
                }
                let n_sets = 4;
                let mut sets: Vec<Vec<usize>> = (0..n_sets)
                    .map(|_| (0..m).filter(|_| rng.next_f64() < 0.6).collect())
                    .collect();
                sets.push(x.clone()); // guarantee coverability
                let mut alpha: Vec<f64> = sets.iter().map(|_| 0.1 + rng.next_f64()).collect();
                // scale up until every e in X has cover mass >= 1
                for &e in &x {
                    let mass: f64 = sets
                        .iter()
                        .zip(&alpha)
                        .filter(|(b, _)| b.contains(&e))
                        .map(|(_, a)| *a)
                        .sum();
                    if mass < 1.0 {
                        let scale = 1.0 / mass;
                        for a in alpha.iter_mut() {
                            *a *= scale;
                        }
                    }
                }
                let lhs = inst.evaluate(&x).unwrap();
                let rhs: f64 = sets
                    .iter()
                    .zip(&alpha)
                    .map(|(b, a)| a * inst.evaluate(b).unwrap())
                    .sum();
                assert!(lhs <= rhs + 1e-6, "FS violated: {} > {}", lhs, rhs);
            }
        }
    }

    // Lemma: for X ⊆ Y, the dual of Y restricted to X is dominated by f(X).
    #[test]
    fn dual_restriction_bounded_by_subset_value() {
        let mut rng = SplitMix64::new(5);
        for seed in 0..50 {
            let m = 4 + (seed as usize % 7);
            let inst = gen_random_xos(m, 3, 2.5, seed).unwrap();
            let y: Vec<usize> = (0..m).filter(|_| rng.next_f64() < 0.7).collect();
            if y.is_empty() {
                continue;
            }
            let x: Vec<usize> = y.iter().copied().filter(|_| rng.next_f64() < 0.6).collect();
            let cert = inst.dual_solution(&y).unwrap();
            let restricted: f64 = x.iter().filter_map(|&e| cert.gamma_of(e)).sum();
            assert!(restricted <= inst.evaluate(&x).unwrap() + EPS);
        }
    }

    #[test]
    fn json_round_trip() {
        let inst = gen_sqrt6();
        let json = inst.to_json().unwrap();
        let back = Instance::from_json(&json).unwrap();
        assert_eq!(back.len(), inst.len());
        assert_eq!(back.num_clauses(), inst.num_clauses());
        assert_eq!(back.evaluate(&e2()).unwrap(), inst.evaluate(&e2()).unwrap());
    }

    #[test]
    fn structural_rejections() {
        assert!(Instance::new(vec![], vec![], vec![vec![]]).is_err());
        assert!(Instance::new(vec!["a".into()], vec![1.0], vec![]).is_err());
        assert!(Instance::new(vec!["a".into()], vec![1.0, 2.0], vec![vec![1.0]]).is_err());
        assert!(Instance::new(vec!["a".into()], vec![1.0], vec![vec![-1.0]]).is_err());
    }
}
