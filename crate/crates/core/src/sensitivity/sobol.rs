//! Variance-based global sensitivity: first-order and total-order indices
//! from a Saltelli design over a scrambled Sobol' sequence.
//!
//! The design draws N points in 2D dimensions, splits them into matrices A
//! and B, and evaluates the model on A, B, and the D column-swapped
//! matrices AB_i, for N*(D+2) evaluations total. First-order indices use
//! the Saltelli (2010) estimator mean(f(B) * (f(AB_i) - f(A))) / V; total
//! order uses the Jansen estimator mean((f(A) - f(AB_i))^2) / (2V).

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;

use super::substream;

/// Direction-number seeds (degree, polynomial coefficient bits, initial
/// odd m values) for Sobol' dimensions 2..=20; dimension 1 is the binary
/// radical inverse. Standard primitive-polynomial table.
const DIRECTION_SEEDS: &[(u32, u32, &[u32])] = &[
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
];

/// Most dimensions the built-in sequence supports.
pub const MAX_SOBOL_DIMS: usize = DIRECTION_SEEDS.len() + 1;

const BITS: usize = 32;

/// A scrambled Sobol' low-discrepancy sequence with random access by
/// point index. The per-dimension XOR scramble is drawn from the seed, so
/// equal seeds give bit-identical points.
pub struct SobolSequence {
    dims: usize,
    directions: Vec<[u32; BITS]>,
    scramble: Vec<u32>,
}

impl SobolSequence {
    pub fn new(dims: usize, seed: u64) -> Result<Self> {
        if dims == 0 || dims > MAX_SOBOL_DIMS {
            return Err(Error::validation(
                "sobol",
                format!("sequence supports 1..={MAX_SOBOL_DIMS} dimensions, got {dims}"),
            ));
        }
        let mut directions = Vec::with_capacity(dims);
        // first dimension: plain binary radical inverse
        let mut first = [0u32; BITS];
        for (k, v) in first.iter_mut().enumerate() {
            *v = 1u32 << (BITS - 1 - k);
        }
        directions.push(first);
        for &(degree, poly, m_init) in DIRECTION_SEEDS.iter().take(dims.saturating_sub(1)) {
            directions.push(direction_numbers(degree, poly, m_init));
        }

        let mut rng = substream(seed, 0);
        let scramble = (0..dims).map(|_| rng.random::<u32>()).collect();
        Ok(Self {
            dims,
            directions,
            scramble,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// The `index`-th point, each coordinate in [0, 1).
    pub fn point(&self, index: u32) -> Vec<f64> {
        (0..self.dims).map(|d| self.coordinate(d, index)).collect()
    }

    pub fn coordinate(&self, dim: usize, index: u32) -> f64 {
        let mut bits = self.scramble[dim];
        let mut i = index;
        let mut k = 0;
        while i != 0 {
            if i & 1 != 0 {
                bits ^= self.directions[dim][k];
            }
            i >>= 1;
            k += 1;
        }
        bits as f64 / (1u64 << BITS) as f64
    }
}

/// Expand initial m values through the primitive-polynomial recurrence and
/// shift them into 32-bit direction numbers.
fn direction_numbers(degree: u32, poly: u32, m_init: &[u32]) -> [u32; BITS] {
    let s = degree as usize;
    let mut m = [0u64; BITS];
    for (k, &v) in m_init.iter().enumerate() {
        m[k] = v as u64;
    }
    for k in s..BITS {
        let mut value = m[k - s] ^ (m[k - s] << s);
        for j in 1..s {
            let coeff = (poly >> (s - 1 - j)) & 1;
            if coeff == 1 {
                value ^= m[k - j] << j;
            }
        }
        m[k] = value;
    }
    let mut v = [0u32; BITS];
    for k in 0..BITS {
        v[k] = (m[k] as u32) << (BITS - 1 - k);
    }
    v
}

/// A uniformly distributed model input over [lo, hi].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformInput {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolResult {
    pub inputs: Vec<String>,
    /// First-order indices, one per input.
    pub s1: Vec<f64>,
    /// Total-order indices, one per input.
    pub st: Vec<f64>,
    pub n_base: usize,
    pub evaluations: usize,
    pub seed: u64,
    /// Total variance the indices are normalized by.
    pub variance: f64,
    /// Set when the base sample size is not a power of two.
    pub warning: Option<String>,
}

/// Estimate first- and total-order indices of `model` over independent
/// uniform inputs with a Saltelli design of `n_base * (d + 2)` evaluations.
///
/// A constant model (zero output variance) reports all indices as zero.
pub fn sobol_indices<F>(
    model: F,
    inputs: &[UniformInput],
    n_base: usize,
    seed: u64,
) -> Result<SobolResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = inputs.len();
    if d == 0 {
        return Err(Error::validation("sobol", "no inputs to analyze"));
    }
    if 2 * d > MAX_SOBOL_DIMS {
        return Err(Error::validation(
            "sobol",
            format!("supports at most {} inputs, got {d}", MAX_SOBOL_DIMS / 2),
        ));
    }
    if n_base < 2 || n_base > u32::MAX as usize {
        return Err(Error::validation(
            "sobol",
            format!("base sample size {n_base} out of range"),
        ));
    }
    for input in inputs {
        if !input.lo.is_finite() || !input.hi.is_finite() || input.lo >= input.hi {
            return Err(Error::validation(
                "sobol",
                format!(
                    "input '{}' has an empty range [{}, {}]",
                    input.name, input.lo, input.hi
                ),
            ));
        }
    }
    let warning = (!n_base.is_power_of_two()).then(|| {
        format!(
            "base sample size {n_base} is not a power of two; the quasi-random design loses balance"
        )
    });

    let seq = SobolSequence::new(2 * d, seed)?;
    let scale = |unit: f64, input: &UniformInput| input.lo + (input.hi - input.lo) * unit;
    let mut matrix_a = Vec::with_capacity(n_base);
    let mut matrix_b = Vec::with_capacity(n_base);
    for i in 0..n_base {
        let point = seq.point(i as u32);
        let a: Vec<f64> = inputs
            .iter()
            .enumerate()
            .map(|(j, input)| scale(point[j], input))
            .collect();
        let b: Vec<f64> = inputs
            .iter()
            .enumerate()
            .map(|(j, input)| scale(point[d + j], input))
            .collect();
        matrix_a.push(a);
        matrix_b.push(b);
    }

    // evaluation layout: [A; B; AB_0; ...; AB_{d-1}]
    let total = n_base * (d + 2);
    let ys = exec::map_indexed(total, |idx| {
        let block = idx / n_base;
        let row = idx % n_base;
        match block {
            0 => model(&matrix_a[row]),
            1 => model(&matrix_b[row]),
            _ => {
                let swapped = block - 2;
                let mut point = matrix_a[row].clone();
                point[swapped] = matrix_b[row][swapped];
                model(&point)
            }
        }
    });

    let f_a = &ys[0..n_base];
    let f_b = &ys[n_base..2 * n_base];
    let combined: Vec<f64> = f_a.iter().chain(f_b.iter()).copied().collect();
    let (_, std_dev) = super::mean_and_std(&combined);
    let variance = std_dev * std_dev;

    let mut s1 = vec![0.0; d];
    let mut st = vec![0.0; d];
    if variance > 1e-12 {
        for i in 0..d {
            let f_ab = &ys[(2 + i) * n_base..(3 + i) * n_base];
            let mut first = 0.0;
            let mut total_order = 0.0;
            for row in 0..n_base {
                first += f_b[row] * (f_ab[row] - f_a[row]);
                total_order += (f_a[row] - f_ab[row]).powi(2);
            }
            s1[i] = first / (n_base as f64 * variance);
            st[i] = total_order / (2.0 * n_base as f64 * variance);
        }
    }

    Ok(SobolResult {
        inputs: inputs.iter().map(|i| i.name.clone()).collect(),
        s1,
        st,
        n_base,
        evaluations: total,
        seed,
        variance,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_dimension_is_the_binary_radical_inverse() {
        let seq = unscrambled(1);
        let expect = [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(seq.coordinate(0, i as u32), *e);
        }
    }

    #[test]
    fn second_dimension_matches_the_classic_sequence() {
        let seq = unscrambled(2);
        let expect = [0.0, 0.5, 0.75, 0.25];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(seq.coordinate(1, i as u32), *e);
        }
    }

    fn unscrambled(dims: usize) -> SobolSequence {
        let mut seq = SobolSequence::new(dims, 0).unwrap();
        seq.scramble = vec![0; dims];
        seq
    }

    #[test]
    fn every_dimension_is_stratified() {
        // the first 256 points of each dimension hit all 256 dyadic bins
        // exactly once; XOR scrambling preserves this
        for scrambled in [false, true] {
            let mut seq = SobolSequence::new(MAX_SOBOL_DIMS, 99).unwrap();
            if !scrambled {
                seq.scramble = vec![0; MAX_SOBOL_DIMS];
            }
            for dim in 0..MAX_SOBOL_DIMS {
                let mut bins = vec![0usize; 256];
                for i in 0..256u32 {
                    let x = seq.coordinate(dim, i);
                    assert!((0.0..1.0).contains(&x));
                    bins[(x * 256.0) as usize] += 1;
                }
                assert!(
                    bins.iter().all(|&c| c == 1),
                    "dimension {dim} not stratified"
                );
            }
        }
    }

    #[test]
    fn sequences_are_seed_deterministic() {
        let a = SobolSequence::new(4, 42).unwrap();
        let b = SobolSequence::new(4, 42).unwrap();
        let c = SobolSequence::new(4, 43).unwrap();
        assert_eq!(a.point(17), b.point(17));
        assert_ne!(a.point(17), c.point(17));
    }

    #[test]
    fn additive_model_recovers_known_shares() {
        // y = x0 + 2*x1 over [0,1]^2: V = (1 + 4) / 12, S1 = (1/12)/V and
        // (4/12)/V, no interactions
        let inputs = vec![
            UniformInput {
                name: "x0".into(),
                lo: 0.0,
                hi: 1.0,
            },
            UniformInput {
                name: "x1".into(),
                lo: 0.0,
                hi: 1.0,
            },
        ];
        let result = sobol_indices(|x| x[0] + 2.0 * x[1], &inputs, 1024, 7).unwrap();
        assert!(
            (result.s1[0] - 0.2).abs() < 0.02,
            "s1[0] = {}",
            result.s1[0]
        );
        assert!(
            (result.s1[1] - 0.8).abs() < 0.02,
            "s1[1] = {}",
            result.s1[1]
        );
        assert!((result.st[0] - 0.2).abs() < 0.02);
        assert!((result.st[1] - 0.8).abs() < 0.02);
    }

    #[test]
    fn constant_model_has_zero_indices() {
        let inputs = vec![UniformInput {
            name: "x".into(),
            lo: 0.0,
            hi: 1.0,
        }];
        let result = sobol_indices(|_| 42.0, &inputs, 512, 7).unwrap();
        assert_eq!(result.s1, vec![0.0]);
        assert_eq!(result.st, vec![0.0]);
    }

    #[test]
    fn non_power_of_two_warns_but_runs() {
        let inputs = vec![UniformInput {
            name: "x".into(),
            lo: 0.0,
            hi: 1.0,
        }];
        let result = sobol_indices(|x| x[0], &inputs, 1000, 7).unwrap();
        assert!(result.warning.is_some());
        assert_eq!(result.evaluations, 3000);
    }

    #[test]
    fn too_many_inputs_are_rejected() {
        let inputs: Vec<UniformInput> = (0..11)
            .map(|i| UniformInput {
                name: format!("x{i}"),
                lo: 0.0,
                hi: 1.0,
            })
            .collect();
        assert!(sobol_indices(|x| x[0], &inputs, 64, 7).is_err());
    }

    #[test]
    fn same_seed_same_indices() {
        let inputs = vec![
            UniformInput {
                name: "x0".into(),
                lo: 0.0,
                hi: 1.0,
            },
            UniformInput {
                name: "x1".into(),
                lo: 0.0,
                hi: 1.0,
            },
        ];
        let f = |x: &[f64]| x[0] * x[1] + x[0];
        let a = sobol_indices(f, &inputs, 256, 11).unwrap();
        let b = sobol_indices(f, &inputs, 256, 11).unwrap();
        assert_eq!(a, b);
    }
}
