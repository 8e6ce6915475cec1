//! Curve panels: ingestion, validation, and tensorization of returns.
//!
//! The on-disk format is a long CSV with header
//! `date,country,maturity_years,rate`, ISO dates, rates in percentage
//! points, rows in any order, and a blank rate marking a missing cell.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use chrono::NaiveDate;
use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

pub const PANEL_HEADER: [&str; 4] = ["date", "country", "maturity_years", "rate"];
const DATE_FORMAT: &str = "%Y-%m-%d";

/// Input encodings understood by [`load_curve_panel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PanelFormat {
    #[default]
    LongCsv,
}

/// Rates on a (date, maturity, country) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePanel {
    dates: Vec<NaiveDate>,
    maturities: Vec<f64>,
    countries: Vec<String>,
    // [date][country][maturity], maturity fastest
    rates: Vec<Option<f64>>,
    // forward-filled values per (country, maturity) series
    fill_counts: Vec<usize>,
}

impl CurvePanel {
    /// `rates` is laid out date-major, then country, then maturity (fastest).
    pub fn new(
        dates: Vec<NaiveDate>,
        maturities: Vec<f64>,
        countries: Vec<String>,
        rates: Vec<Option<f64>>,
    ) -> Result<Self> {
        if maturities.is_empty() || countries.is_empty() || dates.is_empty() {
            return Err(Error::MalformedPanel("panel has an empty axis".into()));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::MalformedPanel(format!(
                "dates not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if maturities.iter().any(|m| !m.is_finite()) {
            return Err(Error::MalformedPanel("non-finite maturity".into()));
        }
        if let Some(w) = maturities.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::MalformedPanel(format!(
                "maturities not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = countries.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::MalformedPanel(format!(
                "duplicate country code {dup}"
            )));
        }
        let expected = dates.len() * maturities.len() * countries.len();
        if rates.len() != expected {
            return Err(Error::MalformedPanel(format!(
                "rate grid has {} cells, axes need {}",
                rates.len(),
                expected
            )));
        }
        if rates.iter().flatten().any(|r| !r.is_finite()) {
            return Err(Error::MalformedPanel("non-finite rate".into()));
        }
        let series = maturities.len() * countries.len();
        Ok(Self {
            dates,
            maturities,
            countries,
            rates,
            fill_counts: vec![0; series],
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn maturities(&self) -> &[f64] {
        &self.maturities
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn maturity_labels(&self) -> Vec<String> {
        self.maturities.iter().map(|m| format!("{m}")).collect()
    }

    fn cell(&self, t: usize, maturity: usize, country: usize) -> usize {
        let (im, ic) = (self.maturities.len(), self.countries.len());
        t * im * ic + country * im + maturity
    }

    /// Rate at date `t`, maturity `maturity`, country `country`; `None` if missing.
    pub fn rate(&self, t: usize, maturity: usize, country: usize) -> Option<f64> {
        self.rates[self.cell(t, maturity, country)]
    }

    pub fn is_missing(&self, t: usize, maturity: usize, country: usize) -> bool {
        self.rate(t, maturity, country).is_none()
    }

    /// Coordinates `(t, maturity, country)` of every missing cell.
    pub fn missing_cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for t in 0..self.dates.len() {
            for j in 0..self.countries.len() {
                for i in 0..self.maturities.len() {
                    if self.is_missing(t, i, j) {
                        out.push((t, i, j));
                    }
                }
            }
        }
        out
    }

    /// Number of forward-filled values in the (maturity, country) series.
    pub fn fill_count(&self, maturity: usize, country: usize) -> usize {
        self.fill_counts[country * self.maturities.len() + maturity]
    }

    fn describe(&self, t: usize, maturity: usize, country: usize) -> String {
        format!(
            "(date {}, maturity {}y, country {})",
            self.dates[t], self.maturities[maturity], self.countries[country]
        )
    }

    /// Copy with each missing cell replaced by the last observed value of its
    /// series. A series that starts with a missing cell cannot be filled.
    pub fn forward_filled(&self) -> Result<CurvePanel> {
        let mut out = self.clone();
        for j in 0..self.countries.len() {
            for i in 0..self.maturities.len() {
                let mut last = None;
                for t in 0..self.dates.len() {
                    let idx = self.cell(t, i, j);
                    match self.rates[idx] {
                        Some(r) => last = Some(r),
                        None => {
                            let fill = last.ok_or_else(|| {
                                Error::MissingData(format!(
                                    "{} has no earlier observation to carry forward",
                                    self.describe(t, i, j)
                                ))
                            })?;
                            out.rates[idx] = Some(fill);
                            out.fill_counts[j * self.maturities.len() + i] += 1;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Writes the panel in the long CSV format, rows ordered by date, country,
    /// then maturity.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(PANEL_HEADER).map_err(csv_error)?;
        for (t, date) in self.dates.iter().enumerate() {
            let date = date.format(DATE_FORMAT).to_string();
            for (j, country) in self.countries.iter().enumerate() {
                for (i, maturity) in self.maturities.iter().enumerate() {
                    let rate = self
                        .rate(t, i, j)
                        .map(|r| format!("{r}"))
                        .unwrap_or_default();
                    w.write_record([
                        date.as_str(),
                        country.as_str(),
                        &format!("{maturity}"),
                        &rate,
                    ])
                    .map_err(csv_error)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::MalformedPanel(format!("{other:?}")),
        }
    } else {
        Error::MalformedPanel(e.to_string())
    }
}

/// Parses a curve panel. Countries keep the order of first appearance;
/// dates and maturities are sorted ascending. Cells with a blank rate or
/// no row at all are recorded as missing.
pub fn load_curve_panel<R: Read>(source: R, format: PanelFormat) -> Result<CurvePanel> {
    match format {
        PanelFormat::LongCsv => load_long_csv(source),
    }
}

fn load_long_csv<R: Read>(source: R) -> Result<CurvePanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(PANEL_HEADER.iter().copied()) {
        return Err(Error::MalformedPanel(format!(
            "expected header `{}`, found `{}`",
            PANEL_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut cells: HashMap<(NaiveDate, usize, u64), Option<f64>> = HashMap::new();
    let mut countries: Vec<String> = Vec::new();
    let mut country_index: HashMap<String, usize> = HashMap::new();
    let mut dates = BTreeSet::new();
    let mut maturities: Vec<f64> = Vec::new();

    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(csv_error)?;
        let date = NaiveDate::parse_from_str(&record[0], DATE_FORMAT).map_err(|_| {
            Error::MalformedPanel(format!("line {line}: invalid date {:?}", &record[0]))
        })?;
        let country = record[1].trim();
        if country.is_empty() {
            return Err(Error::MalformedPanel(format!("line {line}: empty country")));
        }
        let maturity: f64 = record[2].trim().parse().map_err(|_| {
            Error::MalformedPanel(format!("line {line}: invalid maturity {:?}", &record[2]))
        })?;
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(Error::MalformedPanel(format!(
                "line {line}: maturity must be a positive year count, got {maturity}"
            )));
        }
        let rate_field = record[3].trim();
        let rate = if rate_field.is_empty() {
            None
        } else {
            let r: f64 = rate_field.parse().map_err(|_| {
                Error::MalformedPanel(format!("line {line}: non-numeric rate {rate_field:?}"))
            })?;
            if !r.is_finite() {
                return Err(Error::MalformedPanel(format!(
                    "line {line}: non-finite rate {rate_field:?}"
                )));
            }
            Some(r)
        };

        let j = *country_index.entry(country.to_string()).or_insert_with(|| {
            countries.push(country.to_string());
            countries.len() - 1
        });
        if cells.insert((date, j, maturity.to_bits()), rate).is_some() {
            return Err(Error::MalformedPanel(format!(
                "line {line}: duplicate cell (date {date}, country {country}, maturity {maturity})"
            )));
        }
        dates.insert(date);
        maturities.push(maturity);
    }

    if cells.is_empty() {
        return Err(Error::MalformedPanel("panel has no data rows".into()));
    }
    maturities.sort_by(f64::total_cmp);
    maturities.dedup();
    let dates: Vec<NaiveDate> = dates.into_iter().collect();

    let mut rates = Vec::with_capacity(dates.len() * countries.len() * maturities.len());
    for date in &dates {
        for j in 0..countries.len() {
            for m in &maturities {
                rates.push(cells.get(&(*date, j, m.to_bits())).copied().flatten());
            }
        }
    }
    CurvePanel::new(dates, maturities, countries, rates)
}

/// How a rate series becomes a return series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMethod {
    /// `r_{t+1} - r_t`, in percentage points.
    #[default]
    FirstDifference,
    /// `ln(r_{t+1} / r_t)`; needs strictly positive rates.
    LogRatio,
}

/// Treatment of missing cells before returns are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Strict,
    ForwardFill,
}

/// Applies `policy`; under `Strict` any missing cell is an error.
pub fn apply_missing_policy(panel: &CurvePanel, policy: MissingPolicy) -> Result<CurvePanel> {
    match policy {
        MissingPolicy::Strict => {
            let missing = panel.missing_cells();
            if missing.is_empty() {
                Ok(panel.clone())
            } else {
                Err(Error::MissingData(
                    missing
                        .iter()
                        .map(|&(t, i, j)| panel.describe(t, i, j))
                        .collect::<Vec<_>>()
                        .join("; "),
                ))
            }
        }
        MissingPolicy::ForwardFill => panel.forward_filled(),
    }
}

/// Order-2 return samples `X_t[i, j]` (maturity `i`, country `j`).
#[derive(Debug, Clone)]
pub struct ReturnSet {
    pub samples: Vec<DenseTensor>,
    pub method: ReturnMethod,
    pub maturities: Vec<f64>,
    pub countries: Vec<String>,
    /// Date at the end of each return period.
    pub dates: Vec<NaiveDate>,
}

impl ReturnSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Domestic curve return of country `j` at sample `t` (a maturity fibre).
    pub fn maturity_fibre(&self, t: usize, j: usize) -> DVector<f64> {
        let im = self.maturities.len();
        DVector::from_column_slice(&self.samples[t].data()[j * im..(j + 1) * im])
    }

    /// Cross-country returns at maturity `i` and sample `t` (a country fibre).
    pub fn country_fibre(&self, t: usize, i: usize) -> DVector<f64> {
        let im = self.maturities.len();
        DVector::from_iterator(
            self.countries.len(),
            (0..self.countries.len()).map(|j| self.samples[t].data()[j * im + i]),
        )
    }

    pub fn axis_labels(&self) -> Vec<Vec<String>> {
        vec![
            self.maturities.iter().map(|m| format!("{m}")).collect(),
            self.countries.clone(),
        ]
    }
}

/// Tensorizes period returns of a complete panel into `T` samples of dims
/// `(I_m, I_c)`.
pub fn compute_returns(panel: &CurvePanel, method: ReturnMethod) -> Result<ReturnSet> {
    let periods = panel.dates.len().saturating_sub(1);
    if periods == 0 {
        return Err(Error::InsufficientSamples {
            required: 2,
            actual: panel.dates.len(),
        });
    }
    let panel = apply_missing_policy(panel, MissingPolicy::Strict)?;
    let (im, ic) = (panel.maturities.len(), panel.countries.len());
    let mut samples = Vec::with_capacity(periods);
    for t in 0..periods {
        let mut data = Vec::with_capacity(im * ic);
        for j in 0..ic {
            for i in 0..im {
                let now = panel.rate(t, i, j).expect("complete panel");
                let next = panel.rate(t + 1, i, j).expect("complete panel");
                let value = match method {
                    ReturnMethod::FirstDifference => next - now,
                    ReturnMethod::LogRatio => {
                        if now <= 0.0 || next <= 0.0 {
                            let bad = if now <= 0.0 { t } else { t + 1 };
                            return Err(Error::MalformedPanel(format!(
                                "log returns need positive rates; {} is {}",
                                panel.describe(bad, i, j),
                                now.min(next)
                            )));
                        }
                        (next / now).ln()
                    }
                };
                data.push(value);
            }
        }
        samples.push(DenseTensor::new(vec![im, ic], data)?);
    }
    Ok(ReturnSet {
        samples,
        method,
        maturities: panel.maturities.clone(),
        countries: panel.countries.clone(),
        dates: panel.dates[1..].to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PanelIssue {
    MissingCell {
        date: String,
        maturity: f64,
        country: String,
    },
    NonMonotoneDates {
        earlier: String,
        later: String,
    },
    ConstantSeries {
        maturity: f64,
        country: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilledSeries {
    pub maturity: f64,
    pub country: String,
    pub filled: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelSummary {
    pub date_count: usize,
    pub first_date: String,
    pub last_date: String,
    pub maturities: Vec<f64>,
    pub countries: Vec<String>,
    pub missing_cells: usize,
    pub median_spacing_days: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<PanelIssue>,
    pub filled: Vec<FilledSeries>,
    pub summary: PanelSummary,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

impl std::fmt::Display for PanelIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PanelIssue::MissingCell {
                date,
                maturity,
                country,
            } => write!(
                f,
                "missing cell: date {date}, maturity {maturity}y, country {country}"
            ),
            PanelIssue::NonMonotoneDates { earlier, later } => {
                write!(f, "non-monotone dates: {earlier} then {later}")
            }
            PanelIssue::ConstantSeries { maturity, country } => {
                write!(
                    f,
                    "constant series: maturity {maturity}y, country {country}"
                )
            }
        }
    }
}

/// Lists data problems without touching the panel.
pub fn validate_panel(panel: &CurvePanel) -> ValidationReport {
    let mut issues = Vec::new();
    for w in panel.dates.windows(2) {
        if w[0] >= w[1] {
            issues.push(PanelIssue::NonMonotoneDates {
                earlier: w[0].to_string(),
                later: w[1].to_string(),
            });
        }
    }
    let missing = panel.missing_cells();
    for &(t, i, j) in &missing {
        issues.push(PanelIssue::MissingCell {
            date: panel.dates[t].to_string(),
            maturity: panel.maturities[i],
            country: panel.countries[j].clone(),
        });
    }
    let mut filled = Vec::new();
    for (j, country) in panel.countries.iter().enumerate() {
        for (i, &maturity) in panel.maturities.iter().enumerate() {
            let observed: Vec<f64> = (0..panel.dates.len())
                .filter_map(|t| panel.rate(t, i, j))
                .collect();
            if observed.len() >= 2 && observed.iter().all(|&r| r == observed[0]) {
                issues.push(PanelIssue::ConstantSeries {
                    maturity,
                    country: country.clone(),
                });
            }
            let count = panel.fill_count(i, j);
            if count > 0 {
                filled.push(FilledSeries {
                    maturity,
                    country: country.clone(),
                    filled: count,
                });
            }
        }
    }

    let mut spacing: Vec<i64> = panel
        .dates
        .windows(2)
        .map(|w| (w[1] - w[0]).num_days())
        .collect();
    spacing.sort_unstable();
    let median_spacing_days = match spacing.len() {
        0 => None,
        n if n % 2 == 1 => Some(spacing[n / 2] as f64),
        n => Some((spacing[n / 2 - 1] + spacing[n / 2]) as f64 / 2.0),
    };

    ValidationReport {
        issues,
        filled,
        summary: PanelSummary {
            date_count: panel.dates.len(),
            first_date: panel.dates[0].to_string(),
            last_date: panel.dates[panel.dates.len() - 1].to_string(),
            maturities: panel.maturities.clone(),
            countries: panel.countries.clone(),
            missing_cells: missing.len(),
            median_spacing_days,
        },
    }
}
