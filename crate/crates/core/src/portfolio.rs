//! Portfolio variance, minimum-variance portfolios, and factor hedges.
//!
//! A separable portfolio carries one weight vector per domain and its full
//! weight vector is `w_c ⊗ w_m`. On a separable covariance both the
//! minimum-variance problem and the factor-exposure computation split into
//! independent per-domain problems.

use std::fmt::Write as _;

use crate::covariance::{KroneckerCovarianceModel, COUNTRY_MODE, MATURITY_MODE};
use crate::error::{Error, Result};
use crate::factors::{ComposedFactor, Domain, FactorDecomposition};
use crate::linalg::symmetrize;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative eigenvalue floor below which a covariance is treated as singular.
pub const PD_RELATIVE_TOL: f64 = 1e-12;
/// Relative singular-value cutoff for the pseudoinverse.
pub const PINV_RELATIVE_TOL: f64 = 1e-12;
/// Residual above which a hedge system is reported as inconsistent.
pub const HEDGE_RESIDUAL_THRESHOLD: f64 = 1e-8;
/// Level, slope and curvature.
pub const DEFAULT_HEDGED_FACTORS: usize = 3;

/// `wᵀ Σ w`.
pub fn portfolio_variance(w: &DVector<f64>, sigma: &DMatrix<f64>) -> Result<f64> {
    if sigma.nrows() != sigma.ncols() || sigma.nrows() != w.len() {
        return Err(Error::ShapeMismatch(format!(
            "weights of length {} against a {}x{} covariance",
            w.len(),
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    Ok(w.dot(&(sigma * w)))
}

/// Rejects matrices whose smallest eigenvalue is not above
/// `PD_RELATIVE_TOL` times the largest.
pub fn check_positive_definite(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::ShapeMismatch(format!(
            "covariance must be square and nonempty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let values = SymmetricEigen::new(symmetrize(m)).eigenvalues;
    let (min, max) = (values.min(), values.max());
    if !(max > 0.0 && min > PD_RELATIVE_TOL * max) {
        return Err(Error::Singular {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    Ok(())
}

/// `Σ⁻¹1 / (1ᵀΣ⁻¹1)`.
pub fn min_variance_full(sigma: &DMatrix<f64>) -> Result<DVector<f64>> {
    check_positive_definite(sigma)?;
    let n = sigma.nrows();
    let chol = symmetrize(sigma).cholesky().ok_or(Error::Singular {
        min_eigenvalue: f64::NAN,
        max_eigenvalue: f64::NAN,
    })?;
    let x = chol.solve(&DVector::from_element(n, 1.0));
    let total = x.sum();
    Ok(x / total)
}

/// Per-domain weights; the full portfolio is `country ⊗ maturity`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableWeights {
    pub maturity: DVector<f64>,
    pub country: DVector<f64>,
}

impl SeparableWeights {
    pub fn full(&self) -> DVector<f64> {
        self.country.kronecker(&self.maturity)
    }
}

/// Minimum-variance portfolio solved separately in each domain.
pub fn min_variance_separable(model: &KroneckerCovarianceModel) -> Result<SeparableWeights> {
    model.require_order_two()?;
    Ok(SeparableWeights {
        maturity: min_variance_full(&model.thetas()[MATURITY_MODE])?,
        country: min_variance_full(&model.thetas()[COUNTRY_MODE])?,
    })
}

/// `uᵀw` computed per domain as `(u_cᵀ w_c)(u_mᵀ w_m)`.
pub fn factor_exposure(w: &SeparableWeights, f: &ComposedFactor) -> Result<f64> {
    if w.maturity.len() != f.maturity_loading.len() || w.country.len() != f.country_loading.len() {
        return Err(Error::ShapeMismatch(format!(
            "weights {}x{} against factor loadings {}x{}",
            w.maturity.len(),
            w.country.len(),
            f.maturity_loading.len(),
            f.country_loading.len()
        )));
    }
    Ok(f.country_loading.dot(&w.country) * f.maturity_loading.dot(&w.maturity))
}

/// Moore-Penrose pseudoinverse via SVD; singular values at or below
/// `rtol * s_max` are dropped.
pub fn pseudo_inverse(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let cutoff = rtol * svd.singular_values.max();
    let inv = svd
        .singular_values
        .map(|s| if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 });
    v_t.transpose() * DMatrix::from_diagonal(&inv) * u.transpose()
}

/// Minimum-norm least-squares solution of `a w = b`.
pub fn pseudo_inverse_solve(a: &DMatrix<f64>, b: &DVector<f64>, rtol: f64) -> Result<DVector<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if a.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    if a.nrows() == 0 {
        return Ok(DVector::zeros(a.ncols()));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let cutoff = rtol * svd.singular_values.max();
    let mut coeffs = u.transpose() * b;
    for (c, &s) in coeffs.iter_mut().zip(svd.singular_values.iter()) {
        *c = if s > cutoff && s > 0.0 { *c / s } else { 0.0 };
    }
    Ok(v_t.transpose() * coeffs)
}

/// Long one asset of a domain, self-financed, orthogonal to the leading
/// `factors_hedged` factors of that domain.
#[derive(Debug, Clone, Copy)]
pub struct HedgeSpec<'a> {
    pub decomposition: &'a FactorDecomposition,
    pub domain: Domain,
    /// Zero-based asset held long.
    pub target: usize,
    pub factors_hedged: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct HedgeOptions {
    pub residual_threshold: f64,
    /// Turn an inconsistent system into an error instead of a flag.
    pub strict: bool,
    pub pinv_rtol: f64,
}

impl Default for HedgeOptions {
    fn default() -> Self {
        Self {
            residual_threshold: HEDGE_RESIDUAL_THRESHOLD,
            strict: false,
            pinv_rtol: PINV_RELATIVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeResult {
    pub domain: Domain,
    pub target: usize,
    pub factors_hedged: usize,
    pub weights: DVector<f64>,
    /// `||A w - b||`.
    pub residual: f64,
    /// `u_kᵀ w` for each hedged factor of the domain.
    pub exposures: Vec<f64>,
    pub consistent: bool,
}

/// Stacks `[δ_targetᵀ; 1ᵀ; U[:, ..r]ᵀ]` and `b = (1, 0, ..., 0)`.
pub fn hedge_system(spec: &HedgeSpec<'_>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if spec.decomposition.order() != 2 {
        return Err(Error::InvalidHedge(
            "hedging needs an order-2 (maturity x country) decomposition".into(),
        ));
    }
    let u = spec.decomposition.domain_eigenvectors(spec.domain);
    let n = u.nrows();
    if spec.target >= n {
        return Err(Error::InvalidHedge(format!(
            "target {} outside the {} {} assets",
            spec.target,
            n,
            spec.domain.name()
        )));
    }
    if n < 2 || spec.factors_hedged > n - 2 {
        return Err(Error::InvalidHedge(format!(
            "cannot hedge {} factors in a {}-asset {} domain (at most {})",
            spec.factors_hedged,
            n,
            spec.domain.name(),
            n.saturating_sub(2)
        )));
    }
    let rows = 2 + spec.factors_hedged;
    let mut a = DMatrix::zeros(rows, n);
    a[(0, spec.target)] = 1.0;
    a.row_mut(1).fill(1.0);
    for k in 0..spec.factors_hedged {
        a.row_mut(2 + k).copy_from(&u.column(k).transpose());
    }
    let mut b = DVector::zeros(rows);
    b[0] = 1.0;
    Ok((a, b))
}

/// Solves the hedge system with the pseudoinverse and reports its residual.
pub fn hedge(spec: &HedgeSpec<'_>, opts: &HedgeOptions) -> Result<HedgeResult> {
    let (a, b) = hedge_system(spec)?;
    let weights = pseudo_inverse_solve(&a, &b, opts.pinv_rtol)?;
    let residual = (&a * &weights - &b).norm();
    let consistent = residual <= opts.residual_threshold;
    if !consistent && opts.strict {
        return Err(Error::InconsistentHedge {
            residual,
            threshold: opts.residual_threshold,
        });
    }
    let u = spec.decomposition.domain_eigenvectors(spec.domain);
    let exposures = (0..spec.factors_hedged)
        .map(|k| u.column(k).dot(&weights))
        .collect();
    Ok(HedgeResult {
        domain: spec.domain,
        target: spec.target,
        factors_hedged: spec.factors_hedged,
        weights,
        residual,
        exposures,
        consistent,
    })
}

/// `asset,weight` rows.
pub fn weights_csv(labels: &[String], weights: &DVector<f64>) -> String {
    let mut out = String::from("asset,weight\n");
    for (label, w) in labels.iter().zip(weights.iter()) {
        let _ = writeln!(out, "{label},{w}");
    }
    out
}

/// Labels of the full (country-major) weight vector, `COUNTRY:maturity`.
pub fn full_labels(maturities: &[String], countries: &[String]) -> Vec<String> {
    countries
        .iter()
        .flat_map(|c| maturities.iter().map(move |m| format!("{c}:{m}")))
        .collect()
}
