//! Per-class weights on the probability simplex, learned by minimizing a
//! discrimination energy over the training pixels.
//!
//! For each training pixel `Z_m^k` of class `m` and every other class `m'`
//! the energy accumulates `φ(w_m·d(Z_m^k, Σ_m) − w_{m'}·d(Z_m^k, Σ_{m'}))`
//! with `φ(s) = s / (1 + λ|s|)`, averaged over the pixels of each class.
//! Minimizing it pulls training pixels towards their own prototype and away
//! from the others. The weights are constrained to `w ≥ 0, Σ w = 1`.
//!
//! The optimizer is projected gradient descent: the gradient comes from
//! central differences, is projected onto the tangent space `Σ δ = 0`, and
//! every trial point is projected back onto the simplex. A backtracking line
//! search makes the accepted energies non-increasing.

use alloc::vec;
use alloc::vec::Vec;

use crate::distance::DistanceKind;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix3;

/// Simplex tolerance on `|Σ w − 1|`.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("no classes".into()));
        }
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and non-negative".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidWeights(alloc::format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(w))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_feasible(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0) && (self.0.iter().sum::<f64>() - 1.0).abs() < SIMPLEX_TOL
    }
}

impl core::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Euclidean projection onto `{w ≥ 0, Σ w = 1}` (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    // Re-normalize the rounding residue so the sum is 1 to machine precision.
    let s: f64 = w.iter().sum();
    if s > 0.0 {
        w.iter_mut().for_each(|x| *x /= s);
    }
    w
}

/// `φ(s) = s / (1 + λ|s|)`.
pub fn phi(s: f64, lambda: f64) -> f64 {
    s / (1.0 + lambda * s.abs())
}

/// One class of the training set: its prototype covariance and the training
/// pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingClass {
    pub prototype: HermitianMatrix3,
    pub samples: Vec<HermitianMatrix3>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    classes: Vec<TrainingClass>,
}

impl TrainingSet {
    pub fn new(classes: Vec<TrainingClass>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidWeights("training set needs at least two classes".into()));
        }
        for (m, c) in classes.iter().enumerate() {
            if c.samples.is_empty() {
                return Err(Error::InvalidWeights(alloc::format!("class {} has no samples", m + 1)));
            }
            if !c.prototype.is_positive_definite() || !c.samples.iter().all(HermitianMatrix3::is_positive_definite) {
                return Err(Error::InvalidWeights(alloc::format!(
                    "class {} holds a matrix that is not positive definite",
                    m + 1
                )));
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[TrainingClass] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// `d(Z_m^k, Σ_{m'})` for every class, sample and prototype.
    pub fn distance_table(&self, kind: DistanceKind, looks: f64) -> Result<DistanceTable> {
        let m = self.classes.len();
        let protos: Vec<_> = self.classes.iter().map(|c| c.prototype).collect();
        let mut rows = Vec::with_capacity(m);
        for class in &self.classes {
            let mut d = Vec::with_capacity(class.samples.len() * m);
            for z in &class.samples {
                for p in &protos {
                    d.push(kind.eval(z, p, looks)?);
                }
            }
            rows.push(d);
        }
        Ok(DistanceTable { num_classes: m, rows })
    }
}

/// Precomputed sample-to-prototype distances, `rows[m][k·M + m']`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    num_classes: usize,
    rows: Vec<Vec<f64>>,
}

impl DistanceTable {
    /// Builds a table from raw per-class rows of `M` distances per sample.
    pub fn from_rows(num_classes: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != num_classes || rows.iter().any(|r| r.is_empty() || r.len() % num_classes != 0) {
            return Err(Error::InvalidWeights("malformed distance table".into()));
        }
        Ok(Self { num_classes, rows })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Energy of the given weights. Defined for any real vector, so finite
    /// differences may step off the simplex.
    pub fn energy(&self, w: &[f64], lambda: f64) -> f64 {
        let m = self.num_classes;
        let mut total = 0.0;
        for (own, row) in self.rows.iter().enumerate() {
            let count = row.len() / m;
            let mut class_sum = 0.0;
            for d in row.chunks_exact(m) {
                let own_term = w[own] * d[own];
                for (other, &d_other) in d.iter().enumerate() {
                    if other != own {
                        class_sum += phi(own_term - w[other] * d_other, lambda);
                    }
                }
            }
            total += class_sum / count as f64;
        }
        total
    }
}

/// `energy(w)` computed directly from the training set.
pub fn energy(weights: &WeightVector, train: &TrainingSet, kind: DistanceKind, looks: f64, lambda: f64) -> Result<f64> {
    Ok(train.distance_table(kind, looks)?.energy(weights.as_slice(), lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub lambda: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    /// Stop once an accepted step improves the energy by less than this.
    pub min_improvement: f64,
    /// Finite-difference step for the gradient.
    pub fd_step: f64,
    pub max_halvings: u32,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { lambda: 1.0, max_iters: 500, initial_step: 0.1, min_improvement: 1e-8, fd_step: 1e-6, max_halvings: 40 }
    }
}

/// One accepted iterate. Iteration 0 is the uniform starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub energy: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedWeights {
    pub weights: WeightVector,
    pub energy: f64,
    pub trace: Vec<TraceEntry>,
}

/// Central-difference gradient, projected onto `Σ δ = 0`.
pub fn projected_gradient(table: &DistanceTable, w: &[f64], lambda: f64, h: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(w.len());
    let mut probe = w.to_vec();
    for i in 0..w.len() {
        probe[i] = w[i] + h;
        let up = table.energy(&probe, lambda);
        probe[i] = w[i] - h;
        let down = table.energy(&probe, lambda);
        probe[i] = w[i];
        g.push((up - down) / (2.0 * h));
    }
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter_mut().for_each(|v| *v -= mean);
    g
}

/// Minimizes the energy over the simplex, starting from uniform weights.
pub fn optimize_table(table: &DistanceTable, config: &OptimizerConfig) -> Result<OptimizedWeights> {
    if !(config.lambda > 0.0) {
        return Err(Error::DomainError("lambda must be positive"));
    }
    let m = table.num_classes();
    let mut w = vec![1.0 / m as f64; m];
    let mut e = table.energy(&w, config.lambda);
    if !e.is_finite() {
        return Err(Error::NonFiniteEnergy { iteration: 0 });
    }
    let mut trace = vec![TraceEntry { iteration: 0, energy: e, weights: w.clone() }];

    for iteration in 1..=config.max_iters {
        let g = projected_gradient(table, &w, config.lambda, config.fd_step);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEnergy { iteration });
        }
        if g.iter().all(|v| *v == 0.0) {
            break;
        }
        let mut step = config.initial_step;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            let trial = project_to_simplex(&trial);
            let e_trial = table.energy(&trial, config.lambda);
            if !e_trial.is_finite() {
                return Err(Error::NonFiniteEnergy { iteration });
            }
            if e_trial < e {
                accepted = Some((trial, e_trial));
                break;
            }
            step *= 0.5;
        }
        let Some((next, e_next)) = accepted else { break };
        let improvement = e - e_next;
        w = next;
        e = e_next;
        trace.push(TraceEntry { iteration, energy: e, weights: w.clone() });
        if improvement < config.min_improvement {
            break;
        }
    }
    Ok(OptimizedWeights { weights: WeightVector(w), energy: e, trace })
}

pub fn optimize_weights(
    train: &TrainingSet,
    kind: DistanceKind,
    looks: f64,
    config: &OptimizerConfig,
) -> Result<OptimizedWeights> {
    optimize_table(&train.distance_table(kind, looks)?, config)
}
