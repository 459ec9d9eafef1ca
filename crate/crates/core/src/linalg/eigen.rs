use crate::error::{Error, Result};
use crate::exec::Execution;

use super::sparse::SparseMatrix;

/// Settings for [`inverse_power_principal`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseIterOptions {
    pub shift: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub exec: Execution,
}

impl Default for InverseIterOptions {
    fn default() -> Self {
        Self {
            shift: 0.0,
            tol: 1e-10,
            max_iter: 10_000,
            exec: Execution::default(),
        }
    }
}

/// Snapshot of the iteration after a step.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenIterState {
    pub shift: f64,
    pub iterate: Vec<f64>,
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Converged principal eigenpair of `A v = λ M v`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalEigenpair {
    pub lambda: f64,
    /// `vᵀ M v = 1`, largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// `‖M^{-1/2}(A v − λ M v)‖₂`.
    pub residual: f64,
    /// Roundoff level of the residual; the iteration stops once it is reached
    /// even if `tol` is smaller.
    pub residual_floor: f64,
    pub iterations: usize,
    /// Residual after each iteration.
    pub history: Vec<f64>,
}

/// Multiple of `ε‖M^{-1/2} A M^{-1/2}‖∞` treated as the attainable residual.
const RESIDUAL_FLOOR_FACTOR: f64 = 64.0;

fn weighted_norm(v: &[f64], mass: &[f64]) -> f64 {
    v.iter().zip(mass).map(|(x, m)| x * x * m).sum::<f64>().sqrt()
}

/// Shifted inverse iteration for the smallest eigenpair of `A v = λ M v`.
///
/// `A − shift·M` is factorised once; the start vector is the mass-normalised
/// all-ones vector.
pub fn inverse_power_principal(
    a: &SparseMatrix,
    massdiag: &[f64],
    opts: &InverseIterOptions,
) -> Result<PrincipalEigenpair> {
    let n = a.dim();
    if massdiag.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: massdiag.len(),
        });
    }
    if let Some((index, &value)) = massdiag.iter().enumerate().find(|(_, &m)| !(m > 0.0)) {
        return Err(Error::NonPositiveMass { index, value });
    }
    let lu = a.to_banded_shifted(massdiag, opts.shift)?.factor()?;
    let floor = RESIDUAL_FLOOR_FACTOR * f64::EPSILON * a.scaled_norm_inf(massdiag);
    let target = opts.tol.max(floor);

    let mut v = vec![1.0; n];
    let s = weighted_norm(&v, massdiag);
    v.iter_mut().for_each(|x| *x /= s);

    let mut av = vec![0.0; n];
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter.max(1) {
        let mut y: Vec<f64> = v.iter().zip(massdiag).map(|(x, m)| x * m).collect();
        lu.solve_in_place(&mut y)?;
        let s = weighted_norm(&y, massdiag);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Consistency(format!("inverse iterate has norm {s} at step {it}")));
        }
        y.iter_mut().for_each(|x| *x /= s);
        v = y;
        a.spmv_into(&v, &mut av, opts.exec);
        let lambda: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
        residual = av
            .iter()
            .zip(&v)
            .zip(massdiag)
            .map(|((ai, vi), m)| {
                let r = ai - lambda * m * vi;
                r * r / m
            })
            .sum::<f64>()
            .sqrt();
        history.push(residual);
        if residual <= target {
            normalize_sign(&mut v);
            return Ok(PrincipalEigenpair {
                lambda,
                vector: v,
                residual,
                residual_floor: floor,
                iterations: it,
                history,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// Flips `v` so that its largest-magnitude entry is positive.
pub fn normalize_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Rayleigh quotient `vᵀAv / vᵀMv`.
pub fn rayleigh_quotient(a: &SparseMatrix, massdiag: &[f64], v: &[f64]) -> Result<f64> {
    let av = a.spmv(v)?;
    let num: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
    let den: f64 = v.iter().zip(massdiag).map(|(x, m)| x * x * m).sum();
    Ok(num / den)
}
