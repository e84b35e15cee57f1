//! Levenberg-Marquardt weighted least squares.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::lineshape::Model;
use crate::error::{Error, Result};
use crate::measurement::Measurement;

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when every |Δθ_j| < `param_tol`·|θ_j|.
    pub param_tol: f64,
    /// Stop when the relative cost decrease of an accepted step is below this.
    pub cost_tol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            param_tol: 1e-8,
            cost_tol: 1e-10,
            initial_lambda: 1e-3,
        }
    }
}

/// Outcome of a fit. Immutable once produced.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub params: Vec<f64>,
    /// Scaled covariance (JᵀWJ)⁻¹·χ²_red, ordered like `params`.
    pub covariance: DMatrix<f64>,
    /// Σ w_i (y_i − f_i)².
    pub cost: f64,
    pub reduced_chi2: f64,
    pub dof: usize,
    pub derived: BTreeMap<String, Measurement>,
    /// Quantities held fixed during the fit (e.g. the instrument width).
    pub fixed: BTreeMap<String, f64>,
    /// Named yes/no outcomes such as reliability or regime comparisons.
    pub flags: BTreeMap<String, bool>,
    pub converged: bool,
    pub n_iter: usize,
    pub warnings: Vec<String>,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.params[i])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.covariance[(i, i)].max(0.0).sqrt())
    }

    pub fn measurement(&self, name: &str) -> Option<Measurement> {
        Some(Measurement::new(self.param(name)?, self.sigma(name)?))
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.params.len())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }

    pub fn derived(&self, name: &str) -> Option<Measurement> {
        self.derived.get(name).copied()
    }
}

/// Observations (x_i, y_i) with weights w_i.
#[derive(Debug, Clone, Copy)]
pub struct Data<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub weights: &'a [f64],
}

struct Problem<'a, M> {
    model: &'a M,
    data: Data<'a>,
    bounds: Option<&'a [(f64, f64)]>,
}

impl<M: Model> Problem<'_, M> {
    fn cost(&self, p: &[f64]) -> f64 {
        let d = &self.data;
        (0..d.x.len())
            .map(|i| {
                let r = d.y[i] - self.model.eval(d.x[i], p);
                d.weights[i] * r * r
            })
            .sum()
    }

    /// Returns (JᵀWJ, JᵀW r).
    fn normal_equations(&self, p: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        let n = p.len();
        let d = &self.data;
        let mut a = DMatrix::zeros(n, n);
        let mut g = DVector::zeros(n);
        let mut grad = vec![0.0; n];
        for i in 0..d.x.len() {
            self.model.gradient(d.x[i], p, &mut grad);
            let w = d.weights[i];
            let r = d.y[i] - self.model.eval(d.x[i], p);
            for j in 0..n {
                g[j] += w * grad[j] * r;
                for k in 0..=j {
                    a[(j, k)] += w * grad[j] * grad[k];
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                a[(k, j)] = a[(j, k)];
            }
        }
        (a, g)
    }

    fn clamp(&self, p: &mut [f64]) {
        if let Some(bounds) = self.bounds {
            for (v, &(lo, hi)) in p.iter_mut().zip(bounds) {
                *v = v.clamp(lo, hi);
            }
        }
    }
}

/// Minimizes Σ w_i (y_i − f(x_i; θ))² from `init`, optionally clamping each
/// parameter to a closed interval.
pub fn lm_minimize<M: Model>(
    model: &M,
    data: Data<'_>,
    init: &[f64],
    bounds: Option<&[(f64, f64)]>,
    options: LmOptions,
) -> Result<FitResult> {
    let names = model.param_names();
    let n = names.len();
    if init.len() != n {
        return Err(Error::Input(format!(
            "expected {n} initial values, got {}",
            init.len()
        )));
    }
    let m = data.x.len();
    if data.y.len() != m || data.weights.len() != m {
        return Err(Error::Input("x, y and weights differ in length".into()));
    }
    if m < n + 3 {
        return Err(Error::InsufficientData(format!(
            "{m} points for {n} parameters (need at least {})",
            n + 3
        )));
    }
    if let Some(b) = bounds {
        if b.len() != n {
            return Err(Error::Input(format!("expected {n} bounds, got {}", b.len())));
        }
        for (j, (&v, &(lo, hi))) in init.iter().zip(b).enumerate() {
            if !(lo <= v && v <= hi) {
                return Err(Error::Input(format!(
                    "initial {} = {v} outside [{lo}, {hi}]",
                    names[j]
                )));
            }
        }
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite initial parameter".into()));
    }

    let problem = Problem { model, data, bounds };
    let mut theta = init.to_vec();
    let mut cost = problem.cost(&theta);
    let mut lambda = options.initial_lambda;
    let mut converged = false;
    let mut n_iter = 0;

    while n_iter < options.max_iter && !converged {
        n_iter += 1;
        let (a, g) = problem.normal_equations(&theta);
        check_columns(&a, names)?;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let mut accepted = false;
        while lambda < 1e20 {
            let mut damped = a.clone();
            for j in 0..n {
                damped[(j, j)] += lambda * a[(j, j)];
            }
            let Some(chol) = Cholesky::new(damped) else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&g);
            let mut trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            problem.clamp(&mut trial);
            let trial_cost = problem.cost(&trial);
            if trial_cost.is_finite() && trial_cost < cost {
                let rel_cost = (cost - trial_cost) / cost;
                let small_step = theta
                    .iter()
                    .zip(&trial)
                    .all(|(old, new)| (new - old).abs() <= options.param_tol * old.abs().max(f64::MIN_POSITIVE));
                theta = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                converged = rel_cost < options.cost_tol || small_step;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step exists at any damping: θ is a minimum to
            // working precision.
            converged = true;
        }
    }

    if converged {
        polish(&problem, &mut theta, &mut cost);
    }

    let dof = m - n;
    let reduced_chi2 = cost / dof as f64;
    let (a, _) = problem.normal_equations(&theta);
    check_columns(&a, names)?;
    let covariance = scaled_inverse(&a, names)? * reduced_chi2;

    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!("did not converge within {} iterations", options.max_iter));
    }
    if let Some(b) = bounds {
        for (j, (&v, &(lo, hi))) in theta.iter().zip(b).enumerate() {
            if v == lo || v == hi {
                warnings.push(format!("{} at bound {v}", names[j]));
            }
        }
    }

    Ok(FitResult {
        names: names.iter().map(|s| s.to_string()).collect(),
        params: theta,
        covariance,
        cost,
        reduced_chi2,
        dof,
        derived: BTreeMap::new(),
        fixed: BTreeMap::new(),
        flags: BTreeMap::new(),
        converged,
        n_iter,
        warnings,
    })
}

/// A few undamped Gauss-Newton steps, each kept only if it lowers the cost,
/// so that a converged result is a fixed point of a subsequent refit.
fn polish<M: Model>(problem: &Problem<'_, M>, theta: &mut Vec<f64>, cost: &mut f64) {
    for _ in 0..3 {
        let (a, g) = problem.normal_equations(theta);
        let Some(chol) = Cholesky::new(a) else {
            return;
        };
        let step = chol.solve(&g);
        let mut trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
        problem.clamp(&mut trial);
        let c = problem.cost(&trial);
        if !(c < *cost) {
            return;
        }
        *theta = trial;
        *cost = c;
    }
}

fn check_columns(a: &DMatrix<f64>, names: &[&str]) -> Result<()> {
    for j in 0..a.nrows() {
        if !(a[(j, j)] > 0.0) || !a[(j, j)].is_finite() {
            return Err(Error::Singular(format!(
                "{} has no influence on the model",
                names[j]
            )));
        }
    }
    Ok(())
}

/// Inverse of a symmetric positive definite matrix via Cholesky after
/// diagonal equilibration. On failure, names the direction of the smallest
/// eigenvalue of the equilibrated matrix.
fn scaled_inverse(a: &DMatrix<f64>, names: &[&str]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let d = DVector::from_iterator(n, (0..n).map(|j| 1.0 / a[(j, j)].sqrt()));
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[i] * d[j]);
    let eig = SymmetricEigen::new(scaled.clone());
    let (imin, &lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty");
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let chol = if lmin > 1e-14 * lmax {
        Cholesky::new(scaled)
    } else {
        None
    };
    let Some(chol) = chol else {
        let v = eig.eigenvectors.column(imin);
        let mut terms: Vec<(usize, f64)> = v.iter().cloned().enumerate().filter(|(_, c)| c.abs() > 1e-3).collect();
        terms.sort_by(|x, y| y.1.abs().total_cmp(&x.1.abs()));
        let combo = terms
            .iter()
            .map(|&(j, c)| format!("{c:+.3}·{}", names[j]))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(Error::Singular(combo));
    };
    let inv = chol.inverse();
    Ok(DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * d[i] * d[j]))
}
