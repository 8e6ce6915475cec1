//! Multilinear PCA of a separable model.
//!
//! Each `Θ_n` is diagonalized on its own. For an order-2 model the
//! eigenpairs of the full covariance follow by Kronecker composition:
//! `u = u_c[k] ⊗ u_m[l]` with eigenvalue `sigma2 * λ_c[k] * λ_m[l]`, sitting
//! at global position `k * I_m + l`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::covariance::{KroneckerCovarianceModel, COUNTRY_MODE, MATURITY_MODE};
use crate::error::{Error, Result};
use crate::linalg::{sorted_symmetric_eigen, EIGEN_CLIP_TOL};
use crate::tensor::{multi_mode_product, DenseTensor};

/// Axis of an order-2 return model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Maturity,
    Country,
}

impl Domain {
    pub fn mode(self) -> usize {
        match self {
            Domain::Maturity => MATURITY_MODE,
            Domain::Country => COUNTRY_MODE,
        }
    }

    /// Superscript tag used in factor symbols, `m` or `c`.
    pub fn tag(self) -> &'static str {
        match self {
            Domain::Maturity => "m",
            Domain::Country => "c",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Maturity => "maturity",
            Domain::Country => "country",
        }
    }

    /// Interpretation labels attached to the leading factors by position.
    pub fn default_labels(self) -> &'static [&'static str] {
        match self {
            Domain::Maturity => &["Global level", "Global slope", "Global curvature"],
            Domain::Country => &["Global risk premium"],
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maturity" => Ok(Domain::Maturity),
            "country" => Ok(Domain::Country),
            other => Err(Error::InvalidHedge(format!("unknown domain {other:?}"))),
        }
    }
}

/// Per-mode eigenvectors (columns) and eigenvalues, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorDecomposition {
    eigenvectors: Vec<DMatrix<f64>>,
    eigenvalues: Vec<DVector<f64>>,
    sigma2: f64,
    dims: Vec<usize>,
}

impl FactorDecomposition {
    pub fn eigenvectors(&self, mode: usize) -> &DMatrix<f64> {
        &self.eigenvectors[mode]
    }

    pub fn eigenvalues(&self, mode: usize) -> &DVector<f64> {
        &self.eigenvalues[mode]
    }

    pub fn domain_eigenvectors(&self, domain: Domain) -> &DMatrix<f64> {
        &self.eigenvectors[domain.mode()]
    }

    pub fn domain_eigenvalues(&self, domain: Domain) -> &DVector<f64> {
        &self.eigenvalues[domain.mode()]
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    fn require_order_two(&self) -> Result<()> {
        if self.order() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "composed factors need an order-2 decomposition, got order {}",
                self.order()
            )));
        }
        Ok(())
    }

    /// `U_n diag(λ_n) U_nᵀ`.
    pub fn reconstruct_theta(&self, mode: usize) -> DMatrix<f64> {
        let u = &self.eigenvectors[mode];
        u * DMatrix::from_diagonal(&self.eigenvalues[mode]) * u.transpose()
    }
}

/// Eigendecomposition of every `Θ_n` with the deterministic sign convention
/// (largest-magnitude entry of each eigenvector positive).
pub fn decompose(model: &KroneckerCovarianceModel) -> Result<FactorDecomposition> {
    let mut eigenvectors = Vec::with_capacity(model.order());
    let mut eigenvalues = Vec::with_capacity(model.order());
    for theta in model.thetas() {
        let (values, vectors) = sorted_symmetric_eigen(theta);
        let min = values.min();
        if min < -EIGEN_CLIP_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        eigenvalues.push(values.map(|v| v.max(0.0)));
        eigenvectors.push(vectors);
    }
    Ok(FactorDecomposition {
        eigenvectors,
        eigenvalues,
        sigma2: model.sigma2(),
        dims: model.dims().to_vec(),
    })
}

/// A global factor `u = u_c[k] ⊗ u_m[l]` and its eigenvalue in `Σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedFactor {
    /// Zero-based position `k * I_m + l`.
    pub index: usize,
    pub country_index: usize,
    pub maturity_index: usize,
    pub maturity_loading: DVector<f64>,
    pub country_loading: DVector<f64>,
    pub loading: DVector<f64>,
    /// `sigma2 * λ_c[k] * λ_m[l]`.
    pub eigenvalue: f64,
}

pub fn composed_factor(
    d: &FactorDecomposition,
    country_index: usize,
    maturity_index: usize,
) -> Result<ComposedFactor> {
    d.require_order_two()?;
    let (im, ic) = (d.dims[MATURITY_MODE], d.dims[COUNTRY_MODE]);
    if country_index >= ic || maturity_index >= im {
        return Err(Error::IndexOutOfRange(format!(
            "factor (country {country_index}, maturity {maturity_index}) outside {ic}x{im}"
        )));
    }
    let maturity_loading = d.eigenvectors[MATURITY_MODE]
        .column(maturity_index)
        .into_owned();
    let country_loading = d.eigenvectors[COUNTRY_MODE]
        .column(country_index)
        .into_owned();
    let loading = country_loading.kronecker(&maturity_loading);
    Ok(ComposedFactor {
        index: country_index * im + maturity_index,
        country_index,
        maturity_index,
        eigenvalue: d.sigma2
            * d.eigenvalues[COUNTRY_MODE][country_index]
            * d.eigenvalues[MATURITY_MODE][maturity_index],
        maturity_loading,
        country_loading,
        loading,
    })
}

/// Every composed eigenpair, sorted by eigenvalue descending (ties by index).
pub fn all_composed_eigenpairs(d: &FactorDecomposition) -> Result<Vec<ComposedFactor>> {
    d.require_order_two()?;
    let (im, ic) = (d.dims[MATURITY_MODE], d.dims[COUNTRY_MODE]);
    let mut out = Vec::with_capacity(im * ic);
    for k in 0..ic {
        for l in 0..im {
            out.push(composed_factor(d, k, l)?);
        }
    }
    out.sort_by(|a, b| {
        b.eigenvalue
            .total_cmp(&a.eigenvalue)
            .then(a.index.cmp(&b.index))
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRow {
    /// One-based factor number.
    pub factor: usize,
    pub symbol: String,
    pub label: Option<String>,
    pub fraction: f64,
    pub cumulative: f64,
}

/// Explained-variance table: factor, symbol, interpretation, percentage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceTable {
    pub title: String,
    pub rows: Vec<VarianceRow>,
}

impl VarianceTable {
    /// Rows for `values`, normalized by their sum. `tag` goes in the symbol
    /// (`u1^(tag)`).
    pub fn from_eigenvalues(title: &str, tag: &str, values: &[f64]) -> Self {
        let total: f64 = values.iter().sum();
        let mut cumulative = 0.0;
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let fraction = if total > 0.0 { v / total } else { 0.0 };
                cumulative += fraction;
                VarianceRow {
                    factor: i + 1,
                    symbol: format!("u{}^({tag})", i + 1),
                    label: None,
                    fraction,
                    cumulative: cumulative.min(1.0),
                }
            })
            .collect();
        Self {
            title: title.to_string(),
            rows,
        }
    }

    /// Attaches labels to the leading rows by position.
    pub fn with_labels<S: AsRef<str>>(mut self, labels: &[S]) -> Self {
        for (row, label) in self.rows.iter_mut().zip(labels) {
            row.label = Some(label.as_ref().to_string());
        }
        self
    }

    /// Keeps the first `n` rows.
    pub fn leading(mut self, n: usize) -> Self {
        self.rows.truncate(n);
        self
    }

    /// Percentages with two decimals, in row order.
    pub fn percentages(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| format!("{:.2}", 100.0 * r.fraction))
            .collect()
    }

    pub fn render(&self) -> String {
        let headers = [
            "Factor",
            "Symbol",
            "Economic interpretation",
            "Variance explained [%]",
        ];
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.factor.to_string(),
                    r.symbol.clone(),
                    r.label.clone().unwrap_or_default(),
                    format!("{:.2}", 100.0 * r.fraction),
                ]
            })
            .collect();
        render_table(&self.title, &headers, &cells, &[true, false, false, true])
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("factor,symbol,interpretation,variance_explained_pct,cumulative_pct\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.2},{:.2}",
                r.factor,
                r.symbol,
                csv_field(r.label.as_deref().unwrap_or("")),
                100.0 * r.fraction,
                100.0 * r.cumulative
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_table<const N: usize>(
    title: &str,
    headers: &[&str; N],
    rows: &[[String; N]],
    right_align: &[bool; N],
) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if right_align[i] {
                    format!("{:>w$}", c, w = widths[i])
                } else {
                    format!("{:<w$}", c, w = widths[i])
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    if !title.is_empty() {
        out.push_str(title);
        out.push('\n');
    }
    out.push_str(&line(headers.to_vec()));
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .join("-+-"),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

/// Explained-variance table of one domain with the default position labels.
pub fn variance_table(d: &FactorDecomposition, domain: Domain) -> Result<VarianceTable> {
    d.require_order_two()?;
    let title = format!("{}-domain factors", capitalize(domain.name()));
    Ok(VarianceTable::from_eigenvalues(
        &title,
        domain.tag(),
        d.domain_eigenvalues(domain).as_slice(),
    )
    .with_labels(domain.default_labels()))
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

/// Factor loadings of one domain with one factor per column.
pub fn loadings_csv(d: &FactorDecomposition, domain: Domain, axis_labels: &[String]) -> String {
    let u = d.domain_eigenvectors(domain);
    let mut out = String::from(domain.name());
    for f in 1..=u.ncols() {
        let _ = write!(out, ",u{f}^({})", domain.tag());
    }
    out.push('\n');
    for (i, label) in axis_labels.iter().enumerate().take(u.nrows()) {
        out.push_str(&csv_field(label));
        for f in 0..u.ncols() {
            let _ = write!(out, ",{}", u[(i, f)]);
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct LoadingsJson<'a> {
    domain: Domain,
    axis_labels: &'a [String],
    factors: Vec<FactorJson>,
}

#[derive(Serialize)]
struct FactorJson {
    factor: usize,
    eigenvalue: f64,
    loadings: Vec<f64>,
}

pub fn loadings_json(d: &FactorDecomposition, domain: Domain, axis_labels: &[String]) -> String {
    let u = d.domain_eigenvectors(domain);
    let values = d.domain_eigenvalues(domain);
    let doc = LoadingsJson {
        domain,
        axis_labels,
        factors: (0..u.ncols())
            .map(|f| FactorJson {
                factor: f + 1,
                eigenvalue: values[f],
                loadings: u.column(f).iter().copied().collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("loadings serialization cannot fail")
}

/// Classical PCA of one country's domestic curve returns.
#[derive(Debug, Clone, PartialEq)]
pub struct DomesticPca {
    pub country: usize,
    /// Columns sorted by explained variance, sign-fixed.
    pub eigenvectors: DMatrix<f64>,
    /// Explained-variance fractions, summing to one.
    pub fractions: DVector<f64>,
}

/// PCA of the maturity fibres `X_t[:, country]` over time (demeaned, `T-1`
/// normalized).
pub fn domestic_pca(samples: &[DenseTensor], country: usize) -> Result<DomesticPca> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            actual: samples.len(),
        });
    }
    let dims = samples[0].dims();
    if dims.len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "domestic PCA needs order-2 samples, got dims {dims:?}"
        )));
    }
    if samples.iter().any(|s| s.dims() != dims) {
        return Err(Error::ShapeMismatch("samples differ in dims".into()));
    }
    let (im, ic) = (dims[0], dims[1]);
    if country >= ic {
        return Err(Error::IndexOutOfRange(format!(
            "country {country} outside 0..{ic}"
        )));
    }
    let t = samples.len();
    let mut fibres = DMatrix::zeros(im, t);
    for (k, s) in samples.iter().enumerate() {
        fibres
            .column_mut(k)
            .copy_from_slice(&s.data()[country * im..(country + 1) * im]);
    }
    let mean = fibres.column_mean();
    let max_abs = fibres.amax();
    for mut col in fibres.column_iter_mut() {
        col -= &mean;
    }
    let cov = &fibres * fibres.transpose() / (t - 1) as f64;
    let total = cov.trace();
    if total <= 0.0 || (total / im as f64).sqrt() <= 1e-12 * max_abs {
        return Err(Error::DegenerateData(format!(
            "country {country} has zero return variance"
        )));
    }
    let (values, vectors) = sorted_symmetric_eigen(&cov);
    let fractions = values.map(|v| v.max(0.0));
    let sum = fractions.sum();
    Ok(DomesticPca {
        country,
        eigenvectors: vectors,
        fractions: fractions / sum,
    })
}

/// Level/slope/curvature explained variance per economy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomesticTable {
    pub rows: Vec<DomesticRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomesticRow {
    pub economy: String,
    /// Leading fractions (up to three).
    pub fractions: Vec<f64>,
}

pub fn domestic_table(samples: &[DenseTensor], countries: &[String]) -> Result<DomesticTable> {
    let rows = countries
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let pca = domestic_pca(samples, j)?;
            Ok(DomesticRow {
                economy: name.clone(),
                fractions: pca.fractions.iter().take(3).copied().collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DomesticTable { rows })
}

impl DomesticTable {
    const HEADERS: [&'static str; 4] = ["Economy", "Level", "Slope", "Curvature"];

    fn cells(&self) -> Vec<[String; 4]> {
        self.rows
            .iter()
            .map(|r| {
                let pct = |i: usize| {
                    r.fractions
                        .get(i)
                        .map(|f| format!("{:.2}", 100.0 * f))
                        .unwrap_or_default()
                };
                [r.economy.clone(), pct(0), pct(1), pct(2)]
            })
            .collect()
    }

    pub fn render(&self) -> String {
        render_table(
            "Domestic PCA, variance explained [%]",
            &Self::HEADERS,
            &self.cells(),
            &[false, true, true, true],
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("economy,level_pct,slope_pct,curvature_pct\n");
        for [e, a, b, c] in self.cells() {
            let _ = writeln!(out, "{},{a},{b},{c}", csv_field(&e));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

/// Core tensor of `sample` in the factor bases: `sample x_n U_nᵀ` for every mode.
pub fn factor_scores(sample: &DenseTensor, d: &FactorDecomposition) -> Result<DenseTensor> {
    if sample.dims() != d.dims() {
        return Err(Error::ShapeMismatch(format!(
            "sample dims {:?} differ from decomposition dims {:?}",
            sample.dims(),
            d.dims()
        )));
    }
    let transposed: Vec<DMatrix<f64>> = d.eigenvectors.iter().map(|u| u.transpose()).collect();
    multi_mode_product(sample, &transposed)
}

/// Inverse of [`factor_scores`].
pub fn reconstruct_sample(scores: &DenseTensor, d: &FactorDecomposition) -> Result<DenseTensor> {
    if scores.dims() != d.dims() {
        return Err(Error::ShapeMismatch(format!(
            "score dims {:?} differ from decomposition dims {:?}",
            scores.dims(),
            d.dims()
        )));
    }
    multi_mode_product(scores, &d.eigenvectors)
}
