//! Fuzzy AHP weight derivation from reciprocal pairwise-comparison
//! matrices of triangular fuzzy numbers, with Saaty consistency checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangular fuzzy number (lower, middle, upper), all positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tfn {
    l: f64,
    m: f64,
    u: f64,
}

impl Tfn {
    pub fn new(l: f64, m: f64, u: f64) -> Result<Self> {
        if !(l.is_finite() && m.is_finite() && u.is_finite()) || l <= 0.0 || l > m || m > u {
            return Err(Error::InvalidTfn { l, m, u });
        }
        Ok(Self { l, m, u })
    }

    pub fn crisp(v: f64) -> Result<Self> {
        Self::new(v, v, v)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Componentwise product.
    pub fn mul(&self, other: &Tfn) -> Tfn {
        Tfn {
            l: self.l * other.l,
            m: self.m * other.m,
            u: self.u * other.u,
        }
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Tfn) -> Tfn {
        Tfn {
            l: self.l + other.l,
            m: self.m + other.m,
            u: self.u + other.u,
        }
    }

    /// Componentwise n-th root; preserves ordering for positive components.
    pub fn nth_root(&self, n: u32) -> Tfn {
        let p = 1.0 / n as f64;
        Tfn {
            l: self.l.powf(p),
            m: self.m.powf(p),
            u: self.u.powf(p),
        }
    }

    /// Fuzzy division with bound reversal: (l1/u2, m1/m2, u1/l2).
    pub fn div_fuzzy(&self, denom: &Tfn) -> Tfn {
        Tfn {
            l: self.l / denom.u,
            m: self.m / denom.m,
            u: self.u / denom.l,
        }
    }

    /// Fuzzy reciprocal: 1/(l, m, u) = (1/u, 1/m, 1/l).
    pub fn reciprocal(&self) -> Tfn {
        Tfn {
            l: 1.0 / self.u,
            m: 1.0 / self.m,
            u: 1.0 / self.l,
        }
    }

    /// Crisp centroid (l + m + u) / 3.
    pub fn centroid(&self) -> f64 {
        (self.l + self.m + self.u) / 3.0
    }

    fn scale(&self, k: f64) -> Tfn {
        Tfn {
            l: self.l * k,
            m: self.m * k,
            u: self.u * k,
        }
    }

    fn approx_eq(&self, other: &Tfn, rel: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0);
        close(self.l, other.l) && close(self.m, other.m) && close(self.u, other.u)
    }
}

const ONE: Tfn = Tfn {
    l: 1.0,
    m: 1.0,
    u: 1.0,
};

/// Reciprocal n-by-n grid of pairwise TFN comparisons with unit diagonal.
///
/// The lower triangle is always rebuilt from the upper one, so a matrix is
/// reciprocal by construction no matter how it was supplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMatrix {
    n: usize,
    entries: Vec<Vec<Tfn>>,
}

impl ComparisonMatrix {
    /// Build from the strict upper triangle, row-major.
    pub fn from_upper_triangle(n: usize, upper: &[Tfn]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Matrix(format!("size {n} is below the 2x2 minimum")));
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(Error::Matrix(format!(
                "expected {expected} upper-triangle entries for a {n}x{n} matrix, got {}",
                upper.len()
            )));
        }
        let mut entries = vec![vec![ONE; n]; n];
        let mut it = upper.iter();
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in (i + 1)..n {
                let cell = *it.next().expect("length checked above");
                entries[i][j] = cell;
                entries[j][i] = cell.reciprocal();
            }
        }
        Ok(Self { n, entries })
    }

    /// Build from full rows, checking the unit diagonal and reciprocity
    /// before canonicalizing the lower triangle.
    pub fn from_rows(rows: Vec<Vec<Tfn>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Matrix(format!(
                "rows do not form a square matrix of size >= 2 (n = {n})"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row[i].approx_eq(&ONE, 1e-9) {
                return Err(Error::Matrix(format!(
                    "diagonal entry ({i}, {i}) is not (1, 1, 1)"
                )));
            }
            for (j, cell) in row.iter().enumerate().skip(i + 1) {
                if !rows[j][i].approx_eq(&cell.reciprocal(), 1e-6) {
                    return Err(Error::Matrix(format!(
                        "entry ({j}, {i}) is not the reciprocal of entry ({i}, {j})"
                    )));
                }
            }
        }
        let upper: Vec<Tfn> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| rows[i][j])
            .collect();
        Self::from_upper_triangle(n, &upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Tfn {
        &self.entries[i][j]
    }

    pub fn upper_triangle(&self) -> Vec<(usize, usize, Tfn)> {
        (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.entries[i][j]))
            .collect()
    }

    /// Crisp matrix of TFN middle values.
    pub fn midpoints(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|t| t.m()).collect())
            .collect()
    }
}

/// Cellwise arithmetic mean of several experts' matrices; the lower
/// triangle is rebuilt by reciprocity after averaging.
pub fn aggregate_experts(matrices: &[ComparisonMatrix]) -> Result<ComparisonMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Matrix("no expert matrices supplied".to_string()))?;
    let n = first.n();
    if matrices.iter().any(|m| m.n() != n) {
        return Err(Error::Matrix(
            "expert matrices disagree on the criteria count".to_string(),
        ));
    }
    let k = 1.0 / matrices.len() as f64;
    let upper: Vec<Tfn> = first
        .upper_triangle()
        .iter()
        .map(|&(i, j, _)| {
            matrices
                .iter()
                .map(|m| *m.entry(i, j))
                .fold(
                    Tfn {
                        l: 0.0,
                        m: 0.0,
                        u: 0.0,
                    },
                    |acc, t| acc.add(&t),
                )
                .scale(k)
        })
        .collect();
    ComparisonMatrix::from_upper_triangle(n, &upper)
}

/// Fuzzy and crisp weights derived from one comparison matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    /// Row geometric means, componentwise.
    pub geometric_means: Vec<Tfn>,
    /// Geometric means divided (bound-reversed) by their fuzzy sum.
    pub fuzzy_weights: Vec<Tfn>,
    /// Centroid-defuzzified weights, renormalized to sum to 1.
    pub crisp_weights: Vec<f64>,
}

/// Geometric-mean weight derivation: row geometric means, fuzzy
/// normalization with bound-reversed division, centroid defuzzification,
/// and a final renormalization so the crisp weights sum to 1.
pub fn derive_weights(matrix: &ComparisonMatrix) -> WeightReport {
    let n = matrix.n();
    let geometric_means: Vec<Tfn> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| *matrix.entry(i, j))
                .fold(ONE, |acc, t| acc.mul(&t))
                .nth_root(n as u32)
        })
        .collect();
    let sum = geometric_means
        .iter()
        .skip(1)
        .fold(geometric_means[0], |acc, t| acc.add(t));
    let fuzzy_weights: Vec<Tfn> = geometric_means.iter().map(|g| g.div_fuzzy(&sum)).collect();
    let raw: Vec<f64> = fuzzy_weights.iter().map(Tfn::centroid).collect();
    let total: f64 = raw.iter().sum();
    let crisp_weights = raw.iter().map(|w| w / total).collect();
    WeightReport {
        geometric_means,
        fuzzy_weights,
        crisp_weights,
    }
}

/// Saaty random-index values for n = 1..=10.
const RANDOM_INDEX: [f64; 10] = [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49];

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;

/// How the principal eigenvalue behind a consistency ratio is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrMode {
    /// Power-iteration principal eigenpair of the crisp matrix.
    Eigenvector,
    /// lambda_max evaluated with externally supplied weights.
    GivenWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub mode: CrMode,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub consistent: bool,
}

/// Principal eigenpair of a positive matrix by power iteration, with the
/// eigenvector normalized to sum to 1.
pub fn principal_eigen(matrix: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = matrix.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda_prev = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let mut next = vec![0.0; n];
        for (i, row) in matrix.iter().enumerate() {
            next[i] = row.iter().zip(&v).map(|(a, x)| a * x).sum();
        }
        let sum: f64 = next.iter().sum();
        for x in &mut next {
            *x /= sum;
        }
        // Rayleigh-style estimate from the already-normalized vectors
        let lambda = sum;
        let shift = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        v = next;
        if (lambda - lambda_prev).abs() <= POWER_TOLERANCE * lambda.abs().max(1.0)
            && shift <= POWER_TOLERANCE
        {
            return Ok((lambda, v));
        }
        lambda_prev = lambda;
    }
    Err(Error::PowerIterationDiverged(POWER_MAX_ITER))
}

fn check_positive_square(matrix: &[Vec<f64>]) -> Result<usize> {
    let n = matrix.len();
    if n < 2 || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Matrix(format!(
            "crisp matrix is not square of size >= 2 (n = {n})"
        )));
    }
    if matrix.iter().flatten().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::Matrix(
            "crisp matrix has non-positive entries".to_string(),
        ));
    }
    Ok(n)
}

/// Consistency ratio CR = CI / RI with CI = (lambda_max - n) / (n - 1).
///
/// `GivenWeights` evaluates lambda_max as the mean of (A w)_j / w_j over
/// the supplied weights; `Eigenvector` uses the Perron eigenvalue. Sizes
/// up to 2 have RI = 0 and are reported as consistent with CR = 0.
pub fn consistency_ratio(
    matrix: &[Vec<f64>],
    weights: Option<&[f64]>,
    mode: CrMode,
) -> Result<ConsistencyReport> {
    let n = check_positive_square(matrix)?;
    if n > RANDOM_INDEX.len() {
        return Err(Error::RandomIndexUnavailable(n));
    }
    let lambda_max = match mode {
        CrMode::Eigenvector => principal_eigen(matrix)?.0,
        CrMode::GivenWeights => {
            let w = weights.ok_or_else(|| {
                Error::Matrix("given-weights mode requires a weight vector".to_string())
            })?;
            if w.len() != n || w.iter().any(|&x| x <= 0.0 || x.is_nan()) {
                return Err(Error::Matrix(
                    "weight vector must be positive and match the matrix size".to_string(),
                ));
            }
            let mut acc = 0.0;
            for (j, row) in matrix.iter().enumerate() {
                let aw: f64 = row.iter().zip(w).map(|(a, x)| a * x).sum();
                acc += aw / w[j];
            }
            acc / n as f64
        }
    };
    let ci = (lambda_max - n as f64) / (n as f64 - 1.0);
    let ri = RANDOM_INDEX[n - 1];
    let cr = if ri == 0.0 { 0.0 } else { ci / ri };
    Ok(ConsistencyReport {
        mode,
        lambda_max,
        ci,
        ri,
        cr,
        consistent: cr < 0.10,
    })
}
