//! Built-in lower-bound instances and seeded random generators.

use crate::error::{Error, Result};
use crate::objective::Instance;

/// SplitMix64 pseudo-random generator.
///
/// Fixed algorithm so seeds reproduce across implementations: state advances
/// by 0x9E3779B97F4A7C15 per draw; output mixing multiplies by
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with 30/27/31-bit xor-shifts.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in {0, 1, ..., n-1}.
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Two elements, weights (1, 2), one clause (1, M). Any ordering competitive
/// at capacity 1 must start with the light element and then pays a factor of
/// M at capacity 2.
pub fn gen_m_bound(m_value: f64) -> Result<Instance> {
    if !(m_value >= 1.0) {
        return Err(Error::invalid(format!("M must be >= 1, got {}", m_value)));
    }
    Instance::new(
        vec!["e1".into(), "e2".into()],
        vec![1.0, 2.0],
        vec![vec![1.0, m_value]],
    )
}

/// The 1-bounded lower-bound instance: E1 = {e1} (weight 101),
/// E2 = {e2,e3,e4} (weight 102 each), E3 = {e5,...,e10} (weight 103 each);
/// clauses are the indicators of E1 and E3, (sqrt(6)/3) times the indicator
/// of E2, and singleton clauses for e2, e3, e4. No ordering beats ratio
/// sqrt(6) here.
pub fn gen_sqrt6() -> Instance {
    let m = 10;
    let g = 6.0_f64.sqrt() / 3.0;
    let elements = (1..=m).map(|i| format!("e{}", i)).collect();
    let mut weights = vec![103.0; m];
    weights[0] = 101.0;
    for w in weights.iter_mut().take(4).skip(1) {
        *w = 102.0;
    }
    let mut clauses = Vec::new();
    let mut c_e1 = vec![0.0; m];
    c_e1[0] = 1.0;
    clauses.push(c_e1);
    let mut c_e2 = vec![0.0; m];
    for v in c_e2.iter_mut().take(4).skip(1) {
        *v = g;
    }
    clauses.push(c_e2);
    let mut c_e3 = vec![0.0; m];
    for v in c_e3.iter_mut().skip(4) {
        *v = 1.0;
    }
    clauses.push(c_e3);
    for e in 1..4 {
        let mut c = vec![0.0; m];
        c[e] = 1.0;
        clauses.push(c);
    }
    Instance::new(elements, weights, clauses).expect("built-in instance is well formed")
}

/// Seeded random XOS instance: weights in [1, 10], clause values in [0, M],
/// then each element's column is rescaled so its maximum (the singleton
/// value) lands on a target drawn uniformly from [1, M].
pub fn gen_random_xos(m: usize, k: usize, m_value: f64, seed: u64) -> Result<Instance> {
    if m < 1 || k < 1 {
        return Err(Error::invalid("need m >= 1 and k >= 1"));
    }
    if !(m_value >= 1.0) {
        return Err(Error::invalid(format!("M must be >= 1, got {}", m_value)));
    }
    let mut rng = SplitMix64::new(seed);
    let weights: Vec<f64> = (0..m).map(|_| 1.0 + 9.0 * rng.next_f64()).collect();
    let mut clauses: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..m).map(|_| m_value * rng.next_f64()).collect())
        .collect();
    for e in 0..m {
        let target = 1.0 + (m_value - 1.0) * rng.next_f64();
        let cmax = clauses.iter().map(|row| row[e]).fold(0.0, f64::max);
        if cmax <= 0.0 {
            clauses[0][e] = target;
        } else {
            let scale = target / cmax;
            for row in clauses.iter_mut() {
                row[e] *= scale;
            }
        }
    }
    Instance::new(
        (1..=m).map(|i| format!("e{}", i)).collect(),
        weights,
        clauses,
    )
}

/// Random weighted-coverage instance over a small universe with unit item
/// values, compiled exactly into XOS clauses: one clause per assignment of
/// each coverable universe item to one of the sets containing it. Exponential
/// in the universe size; a test utility, not a scalable feature.
pub fn gen_coverage(universe_size: usize, m: usize, seed: u64) -> Result<Instance> {
    if universe_size == 0 || universe_size > 12 {
        return Err(Error::invalid("universe size must be in 1..=12"));
    }
    if m < 1 {
        return Err(Error::invalid("need at least one set"));
    }
    let mut rng = SplitMix64::new(seed);
    // Random nonempty subsets of the universe.
    let sets: Vec<Vec<usize>> = (0..m)
        .map(|_| loop {
            let s: Vec<usize> = (0..universe_size)
                .filter(|_| rng.next_f64() < 0.5)
                .collect();
            if !s.is_empty() {
                break s;
            }
        })
        .collect();
    let weights: Vec<f64> = (0..m).map(|_| 1.0 + 9.0 * rng.next_f64()).collect();
    let instance = compile_coverage(&sets, universe_size, weights)?;
    Ok(instance)
}

/// Exact XOS compilation of a unit-value coverage objective.
pub fn compile_coverage(
    sets: &[Vec<usize>],
    universe_size: usize,
    weights: Vec<f64>,
) -> Result<Instance> {
    let m = sets.len();
    // owners[u] = sets containing universe item u
    let owners: Vec<Vec<usize>> = (0..universe_size)
        .map(|u| (0..m).filter(|&i| sets[i].contains(&u)).collect())
        .collect();
    let covered: Vec<usize> = (0..universe_size)
        .filter(|&u| !owners[u].is_empty())
        .collect();
    let clause_count: usize = covered
        .iter()
        .map(|&u| owners[u].len())
        .try_fold(1usize, |acc, d| acc.checked_mul(d))
        .ok_or_else(|| Error::capability("coverage compilation overflow"))?;
    if clause_count > 1 << 20 {
        return Err(Error::capability(format!(
            "coverage compilation would need {} clauses",
            clause_count
        )));
    }
    // Mixed-radix enumeration of assignments item -> owning set.
    let mut clauses = Vec::with_capacity(clause_count);
    let mut counter = vec![0usize; covered.len()];
    loop {
        let mut clause = vec![0.0; m];
        for (j, &u) in covered.iter().enumerate() {
            let set_idx = owners[u][counter[j]];
            clause[set_idx] += 1.0;
        }
        clauses.push(clause);
        // increment
        let mut pos = 0;
        loop {
            if pos == covered.len() {
                let names = (1..=m).map(|i| format!("X{}", i)).collect();
                return Instance::new(names, weights, clauses);
            }
            counter[pos] += 1;
            if counter[pos] < owners[covered[pos]].len() {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}

/// Direct coverage evaluation, used to certify the compiled clause matrix.
pub fn coverage_value(sets: &[Vec<usize>], selection: &[usize]) -> f64 {
    let mut covered = std::collections::BTreeSet::new();
    for &i in selection {
        for &u in &sets[i] {
            covered.insert(u);
        }
    }
    covered.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::EPS;

    #[test]
    fn m_bound_rejects_small_m() {
        assert!(gen_m_bound(0.5).is_err());
    }

    #[test]
    fn m_bound_unit() {
        let inst = gen_m_bound(1.0).unwrap();
        assert!((inst.singleton_value(0) - 1.0).abs() < EPS);
        assert!((inst.singleton_value(1) - 1.0).abs() < EPS);
    }

    #[test]
    fn sqrt6_reference_values() {
        let inst = gen_sqrt6();
        let rep = inst.validate();
        assert!(rep.ok);
        for e in 0..10 {
            assert!((inst.singleton_value(e) - 1.0).abs() < EPS);
        }
        assert!((inst.evaluate(&[4]).unwrap() - 1.0).abs() < EPS);
    }

    #[test]
    fn random_xos_is_valid_and_reproducible() {
        let a = gen_random_xos(6, 3, 1.0, 7).unwrap();
        let b = gen_random_xos(6, 3, 1.0, 7).unwrap();
        let rep = a.validate();
        assert!(rep.ok, "{:?}", rep.violations);
        assert!(rep.m_bound <= 1.0 + EPS);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn random_xos_degenerate() {
        let inst = gen_random_xos(1, 1, 1.0, 0).unwrap();
        assert!((inst.evaluate(&[0]).unwrap() - 1.0).abs() < EPS);
    }

    #[test]
    fn coverage_disjoint_and_identical_sets() {
        let sets = vec![vec![0], vec![1]];
        let inst = compile_coverage(&sets, 2, vec![1.0, 1.0]).unwrap();
        assert!((inst.evaluate(&[0, 1]).unwrap() - 2.0).abs() < EPS);

        let dup = vec![vec![0, 1], vec![0, 1]];
        let inst = compile_coverage(&dup, 2, vec![1.0, 1.0]).unwrap();
        assert!((inst.evaluate(&[0, 1]).unwrap() - inst.evaluate(&[0]).unwrap()).abs() < EPS);
    }

    #[test]
    fn coverage_compilation_matches_direct_evaluation() {
        let mut rng = SplitMix64::new(3);
        let universe = 6;
        let m = 5;
        let sets: Vec<Vec<usize>> = (0..m)
            .map(|_| loop {
                let s: Vec<usize> = (0..universe).filter(|_| rng.next_f64() < 0.5).collect();
                if !s.is_empty() {
                    break s;
                }
            })
            .collect();
        let inst = compile_coverage(&sets, universe, vec![1.0; m]).unwrap();
        for mask in 0u32..(1 << m) {
            let sel: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let direct = coverage_value(&sets, &sel);
            let xos = inst.evaluate(&sel).unwrap();
            assert!(
                (direct - xos).abs() < EPS,
                "mask {:b}: direct {} vs xos {}",
                mask,
                direct,
                xos
            );
        }
    }

    #[test]
    fn generator_outputs_pass_validate() {
        for seed in 0..10 {
            assert!(gen_random_xos(8, 4, 4.0, seed).unwrap().validate().ok);
            assert!(gen_coverage(5, 4, seed).unwrap().validate().ok);
        }
        assert!(gen_sqrt6().validate().ok);
        assert!(gen_m_bound(4.0).unwrap().validate().ok);
    }
}
