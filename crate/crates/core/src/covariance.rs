//! Kronecker-separable second-moment model.
//!
//! The covariance of a vectorized order-N sample is modelled as
//! `sigma2 * (Θ_{N-1} ⊗ ... ⊗ Θ_0)` where every per-mode density matrix
//! `Θ_n` is symmetric PSD with unit trace. For return panels mode 0 is the
//! maturity axis and mode 1 the country axis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_asymmetry, min_eigenvalue, symmetrize, EIGEN_CLIP_TOL};
use crate::tensor::{kronecker_reversed, DenseTensor};

/// Tolerance for symmetry, PSD and unit-trace checks on `Θ_n`.
pub const MODEL_TOL: f64 = 1e-10;

/// Maturity axis of an order-2 model.
pub const MATURITY_MODE: usize = 0;
/// Country axis of an order-2 model.
pub const COUNTRY_MODE: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerCovarianceModel {
    sigma2: f64,
    thetas: Vec<DMatrix<f64>>,
    dims: Vec<usize>,
    sample_count: usize,
    demeaned: bool,
    axis_labels: Option<Vec<Vec<String>>>,
}

impl KroneckerCovarianceModel {
    /// Builds a model from its parameters, checking every invariant.
    pub fn new(sigma2: f64, thetas: Vec<DMatrix<f64>>) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "sigma2 must be finite and nonnegative, got {sigma2}"
            )));
        }
        if thetas.is_empty() {
            return Err(Error::InvalidModel("model needs at least one mode".into()));
        }
        let mut dims = Vec::with_capacity(thetas.len());
        for (n, theta) in thetas.iter().enumerate() {
            if theta.nrows() != theta.ncols() || theta.nrows() == 0 {
                return Err(Error::InvalidModel(format!(
                    "theta for mode {n} must be square and nonempty, got {}x{}",
                    theta.nrows(),
                    theta.ncols()
                )));
            }
            if theta.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "theta for mode {n} has non-finite entries"
                )));
            }
            let asym = max_asymmetry(theta);
            if asym > MODEL_TOL {
                return Err(Error::InvalidModel(format!(
                    "theta for mode {n} is not symmetric (max asymmetry {asym:e})"
                )));
            }
            let trace = theta.trace();
            if (trace - 1.0).abs() > MODEL_TOL {
                return Err(Error::InvalidModel(format!(
                    "theta for mode {n} has trace {trace}, expected 1"
                )));
            }
            let min_eig = min_eigenvalue(theta);
            if min_eig < -EIGEN_CLIP_TOL {
                return Err(Error::InvalidModel(format!(
                    "theta for mode {n} is not PSD (min eigenvalue {min_eig:e})"
                )));
            }
            dims.push(theta.nrows());
        }
        Ok(Self {
            sigma2,
            thetas,
            dims,
            sample_count: 0,
            demeaned: false,
            axis_labels: None,
        })
    }

    /// Attaches per-mode axis labels (maturity labels, country codes).
    pub fn with_axis_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.dims.len()
            || labels.iter().zip(&self.dims).any(|(l, &d)| l.len() != d)
        {
            return Err(Error::ShapeMismatch(format!(
                "axis labels do not match model dims {:?}",
                self.dims
            )));
        }
        self.axis_labels = Some(labels);
        Ok(self)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn thetas(&self) -> &[DMatrix<f64>] {
        &self.thetas
    }

    pub fn theta(&self, mode: usize) -> Result<&DMatrix<f64>> {
        self.thetas.get(mode).ok_or(Error::ModeOutOfRange {
            mode,
            order: self.order(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of scalar entries in one sample.
    pub fn element_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn demeaned(&self) -> bool {
        self.demeaned
    }

    pub fn axis_labels(&self) -> Option<&[Vec<String>]> {
        self.axis_labels.as_deref()
    }

    /// Axis labels for one mode, defaulting to `"1".."I_n"`.
    pub fn labels_for(&self, mode: usize) -> Vec<String> {
        match &self.axis_labels {
            Some(labels) => labels[mode].clone(),
            None => (1..=self.dims[mode]).map(|i| i.to_string()).collect(),
        }
    }

    pub(crate) fn require_order_two(&self) -> Result<()> {
        if self.order() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "operation needs an order-2 (maturity x country) model, got order {}",
                self.order()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            sigma2: self.sigma2,
            dims: self.dims.clone(),
            thetas: self
                .thetas
                .iter()
                .map(|t| t.row_iter().map(|r| r.iter().copied().collect()).collect())
                .collect(),
            sample_count: self.sample_count,
            demeaned: self.demeaned,
            axis_labels: self.axis_labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::ModelParse(e.to_string()))?;
        let mut thetas = Vec::with_capacity(file.thetas.len());
        for (n, rows) in file.thetas.iter().enumerate() {
            let size = rows.len();
            if rows.iter().any(|r| r.len() != size) {
                return Err(Error::ModelParse(format!("theta {n} is not square")));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            thetas.push(DMatrix::from_row_slice(size, size, &flat));
        }
        let model = Self::new(file.sigma2, thetas).map_err(|e| Error::ModelParse(e.to_string()))?;
        if model.dims != file.dims {
            return Err(Error::ModelParse(format!(
                "declared dims {:?} disagree with theta shapes {:?}",
                file.dims, model.dims
            )));
        }
        let mut model = Self {
            sample_count: file.sample_count,
            demeaned: file.demeaned,
            ..model
        };
        if let Some(labels) = file.axis_labels {
            model = model
                .with_axis_labels(labels)
                .map_err(|e| Error::ModelParse(e.to_string()))?;
        }
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    sigma2: f64,
    dims: Vec<usize>,
    thetas: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    sample_count: usize,
    #[serde(default)]
    demeaned: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis_labels: Option<Vec<Vec<String>>>,
}

fn check_samples(samples: &[DenseTensor]) -> Result<&[usize]> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            required: 2,
            actual: samples.len(),
        });
    }
    let dims = samples[0].dims();
    if let Some((t, s)) = samples.iter().enumerate().find(|(_, s)| s.dims() != dims) {
        return Err(Error::ShapeMismatch(format!(
            "sample {t} has dims {:?}, expected {:?}",
            s.dims(),
            dims
        )));
    }
    Ok(dims)
}

/// Element-wise mean over samples.
pub fn mean_tensor(samples: &[DenseTensor]) -> Result<DenseTensor> {
    let first = samples
        .first()
        .ok_or(Error::EmptyInput("mean of zero samples"))?;
    let mut acc = vec![0.0; first.len()];
    for s in samples {
        for (a, x) in acc.iter_mut().zip(s.data()) {
            *a += x;
        }
    }
    let n = samples.len() as f64;
    DenseTensor::new(
        first.dims().to_vec(),
        acc.into_iter().map(|a| a / n).collect(),
    )
}

fn centered(samples: &[DenseTensor], demean: bool) -> Result<Vec<DenseTensor>> {
    if !demean {
        return Ok(samples.to_vec());
    }
    let mean = mean_tensor(samples)?;
    samples.iter().map(|s| s.sub(&mean)).collect()
}

/// Single-pass closed-form estimators of `sigma2` and every `Θ_n`.
///
/// `sigma2 = Σ_t ||X_t||² / (T-1)` and
/// `Θ_n = Σ_t X_t(n) X_t(n)ᵀ / (sigma2 (T-1))`, symmetrized. With `demean`
/// the element-wise sample mean is removed first; the `T-1` denominator is
/// used either way.
pub fn estimate(samples: &[DenseTensor], demean: bool) -> Result<KroneckerCovarianceModel> {
    let dims = check_samples(samples)?.to_vec();
    let count = samples.len();
    let data = centered(samples, demean)?;

    let energy: f64 = data.iter().map(DenseTensor::squared_norm).sum();
    let sigma2 = energy / (count - 1) as f64;

    let max_abs = samples
        .iter()
        .flat_map(|s| s.data().iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let rms = (sigma2 / dims.iter().product::<usize>() as f64).sqrt();
    if sigma2 == 0.0 || rms <= 1e-12 * max_abs {
        return Err(Error::DegenerateData(
            "total variance is zero; all samples are identical".into(),
        ));
    }

    let mut thetas = Vec::with_capacity(dims.len());
    for (mode, &size) in dims.iter().enumerate() {
        let mut scatter = DMatrix::zeros(size, size);
        for x in &data {
            let unfolded = x.unfold(mode)?.matrix;
            scatter += &unfolded * unfolded.transpose();
        }
        thetas.push(symmetrize(&scatter) / energy);
    }

    Ok(KroneckerCovarianceModel {
        sigma2,
        thetas,
        dims,
        sample_count: count,
        demeaned: demean,
        axis_labels: None,
    })
}

/// `sigma2 * (Θ_{N-1} ⊗ ... ⊗ Θ_0)`.
pub fn full_covariance(model: &KroneckerCovarianceModel) -> DMatrix<f64> {
    kronecker_reversed(&model.thetas).expect("model has at least one mode") * model.sigma2
}

/// Covariance block between countries `i` and `j`: `sigma2 * Θc[i,j] * Θm`.
pub fn cross_country_block(
    model: &KroneckerCovarianceModel,
    i: usize,
    j: usize,
) -> Result<DMatrix<f64>> {
    model.require_order_two()?;
    let countries = model.dims[COUNTRY_MODE];
    if i >= countries || j >= countries {
        return Err(Error::IndexOutOfRange(format!(
            "country pair ({i}, {j}) outside 0..{countries}"
        )));
    }
    let weight = model.sigma2 * model.thetas[COUNTRY_MODE][(i, j)];
    Ok(&model.thetas[MATURITY_MODE] * weight)
}

/// Distinct parameters of an unrestricted covariance versus the separable model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParameterCounts {
    pub full: u64,
    pub separable: u64,
}

pub fn parameter_counts(dims: &[usize]) -> Result<ParameterCounts> {
    if dims.is_empty() {
        return Err(Error::EmptyInput("parameter_counts needs at least one dim"));
    }
    let k: u64 = dims.iter().map(|&d| d as u64).product();
    let full = (k * k + k) / 2;
    let separable = 1 + dims
        .iter()
        .map(|&d| {
            let d = d as u64;
            (d * d + d) / 2
        })
        .sum::<u64>();
    Ok(ParameterCounts { full, separable })
}

/// Unrestricted sample covariance of the vectorized samples, `T-1` normalized.
pub fn sample_covariance(samples: &[DenseTensor], demean: bool) -> Result<DMatrix<f64>> {
    check_samples(samples)?;
    let data = centered(samples, demean)?;
    let k = data[0].len();
    let mut columns = DMatrix::zeros(k, data.len());
    for (t, x) in data.iter().enumerate() {
        columns.column_mut(t).copy_from_slice(x.data());
    }
    Ok(&columns * columns.transpose() / (data.len() - 1) as f64)
}

/// How far the unrestricted sample covariance is from the separable model.
#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityReport {
    /// `||S - Σ||_F / ||S||_F`.
    pub relative_error: f64,
    pub full_params: u64,
    pub separable_params: u64,
    /// Relative errors of the blocks along the last mode (country pairs for
    /// order-2 models), row-major.
    pub per_block_errors: Vec<Vec<f64>>,
}

pub fn separability_diagnostic(
    samples: &[DenseTensor],
    model: &KroneckerCovarianceModel,
) -> Result<SeparabilityReport> {
    let dims = check_samples(samples)?;
    if dims != model.dims() {
        return Err(Error::ShapeMismatch(format!(
            "samples have dims {:?}, model has {:?}",
            dims,
            model.dims()
        )));
    }
    let s = sample_covariance(samples, model.demeaned)?;
    let s_norm = s.norm();
    if s_norm == 0.0 {
        return Err(Error::DegenerateData(
            "sample covariance is identically zero".into(),
        ));
    }
    let sigma = full_covariance(model);
    let relative_error = (&s - &sigma).norm() / s_norm;

    let blocks = *model.dims.last().expect("nonempty dims");
    let size = model.element_count() / blocks;
    let per_block_errors = (0..blocks)
        .map(|i| {
            (0..blocks)
                .map(|j| {
                    let sb = s.view((i * size, j * size), (size, size));
                    let mb = sigma.view((i * size, j * size), (size, size));
                    let diff = (sb - mb).norm();
                    let base = sb.norm();
                    if diff == 0.0 {
                        0.0
                    } else if base == 0.0 {
                        f64::INFINITY
                    } else {
                        diff / base
                    }
                })
                .collect()
        })
        .collect();

    let counts = parameter_counts(dims)?;
    Ok(SeparabilityReport {
        relative_error,
        full_params: counts.full,
        separable_params: counts.separable,
        per_block_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating(t: usize) -> Vec<DenseTensor> {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        (0..t)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                DenseTensor::from_matrix(&(&m * sign))
            })
            .collect()
    }

    fn e1e1() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])
    }

    #[test]
    fn alternating_rank_one_samples() {
        for t in [2usize, 4, 10] {
            let model = estimate(&alternating(t), true).unwrap();
            let expected = t as f64 / (t as f64 - 1.0);
            assert!((model.sigma2() - expected).abs() < 1e-14);
            assert_eq!(model.theta(0).unwrap(), &e1e1());
            assert_eq!(model.theta(1).unwrap(), &e1e1());
            assert_eq!(model.sample_count(), t);
            assert!(model.demeaned());
        }
    }

    #[test]
    fn zero_samples_are_degenerate() {
        let zeros = vec![DenseTensor::zeros(vec![2, 3]).unwrap(); 5];
        assert!(matches!(
            estimate(&zeros, true),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            estimate(&zeros, false),
            Err(Error::DegenerateData(_))
        ));
        // identical nonzero samples vanish after demeaning
        let same = vec![DenseTensor::new(vec![2], vec![0.1, 0.7]).unwrap(); 3];
        assert!(matches!(
            estimate(&same, true),
            Err(Error::DegenerateData(_))
        ));
        assert!(estimate(&same, false).is_ok());
    }

    #[test]
    fn estimate_rejects_bad_inputs() {
        let one = vec![DenseTensor::zeros(vec![2, 2]).unwrap()];
        assert!(matches!(
            estimate(&one, true),
            Err(Error::InsufficientSamples { actual: 1, .. })
        ));
        let mixed = vec![
            DenseTensor::zeros(vec![2, 2]).unwrap(),
            DenseTensor::zeros(vec![2, 3]).unwrap(),
        ];
        assert!(matches!(
            estimate(&mixed, true),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn full_covariance_of_scaled_identities() {
        let half = DMatrix::identity(2, 2) * 0.5;
        let model = KroneckerCovarianceModel::new(4.0, vec![half.clone(), half.clone()]).unwrap();
        assert_eq!(full_covariance(&model), DMatrix::identity(4, 4));
        let zero = KroneckerCovarianceModel::new(0.0, vec![half.clone(), half]).unwrap();
        assert_eq!(full_covariance(&zero), DMatrix::zeros(4, 4));
    }

    #[test]
    fn block_structure() {
        let theta_m = DMatrix::from_row_slice(2, 2, &[0.6, 0.1, 0.1, 0.4]);
        let theta_c = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.25, 0.1, 0.0, 0.05, //
                0.1, 0.25, 0.02, 0.0, //
                0.0, 0.02, 0.25, 0.0, //
                0.05, 0.0, 0.0, 0.25,
            ],
        );
        let model = KroneckerCovarianceModel::new(4.0, vec![theta_m.clone(), theta_c]).unwrap();
        let diag = cross_country_block(&model, 1, 1).unwrap();
        assert!((diag - &theta_m).norm() < 1e-15);
        assert_eq!(
            cross_country_block(&model, 0, 2).unwrap(),
            DMatrix::zeros(2, 2)
        );
        let sigma = full_covariance(&model);
        for i in 0..4 {
            for j in 0..4 {
                let block = cross_country_block(&model, i, j).unwrap();
                let slice = sigma.view((2 * i, 2 * j), (2, 2));
                assert!((block.clone() - slice).norm() < 1e-12);
                assert!((block.trace() - 4.0 * model.theta(1).unwrap()[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(matches!(
            cross_country_block(&model, 4, 0),
            Err(Error::IndexOutOfRange(_))
        ));
        let order_one =
            KroneckerCovarianceModel::new(1.0, vec![DMatrix::identity(2, 2) * 0.5]).unwrap();
        assert!(cross_country_block(&order_one, 0, 0).is_err());
    }

    #[test]
    fn parameter_count_examples() {
        let c = parameter_counts(&[15, 8]).unwrap();
        assert_eq!((c.full, c.separable), (7260, 157));
        let c = parameter_counts(&[1]).unwrap();
        assert_eq!((c.full, c.separable), (1, 2));
        let c = parameter_counts(&[2, 2]).unwrap();
        assert_eq!((c.full, c.separable), (10, 7));
        assert!(parameter_counts(&[]).is_err());
    }

    #[test]
    fn model_validation() {
        let ok = DMatrix::identity(2, 2) * 0.5;
        assert!(KroneckerCovarianceModel::new(-1.0, vec![ok.clone()]).is_err());
        assert!(KroneckerCovarianceModel::new(1.0, vec![]).is_err());
        let bad_trace = DMatrix::identity(2, 2);
        assert!(KroneckerCovarianceModel::new(1.0, vec![bad_trace]).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.5]);
        assert!(KroneckerCovarianceModel::new(1.0, vec![asym]).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[0.5, 0.9, 0.9, 0.5]);
        assert!(KroneckerCovarianceModel::new(1.0, vec![indefinite]).is_err());
    }

    #[test]
    fn diagnostic_on_exactly_separable_samples() {
        let samples = alternating(6);
        let model = estimate(&samples, true).unwrap();
        let report = separability_diagnostic(&samples, &model).unwrap();
        assert_eq!(report.relative_error, 0.0);
        assert_eq!(
            report.per_block_errors,
            vec![vec![0.0, 0.0], vec![0.0, 0.0]]
        );
        assert_eq!((report.full_params, report.separable_params), (10, 7));

        assert!(separability_diagnostic(&samples[..1], &model).is_err());
        let zeros = vec![DenseTensor::zeros(vec![2, 2]).unwrap(); 3];
        assert!(matches!(
            separability_diagnostic(&zeros, &model),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let theta_m = DMatrix::from_row_slice(2, 2, &[0.7, 0.1 / 3.0, 0.1 / 3.0, 0.3]);
        let theta_c = DMatrix::identity(3, 3) / 3.0;
        let model = KroneckerCovarianceModel::new(std::f64::consts::PI, vec![theta_m, theta_c])
            .unwrap()
            .with_axis_labels(vec![
                vec!["1".into(), "2".into()],
                vec!["US".into(), "GB".into(), "JP".into()],
            ])
            .unwrap();
        let text = model.to_json();
        let back = KroneckerCovarianceModel::from_json(&text).unwrap();
        assert_eq!(back, model);
        assert!(matches!(
            KroneckerCovarianceModel::from_json("{\"sigma2\": 1.0}"),
            Err(Error::ModelParse(_))
        ));
    }
}
