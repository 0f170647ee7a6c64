//! Regression instances: loading, synthetic generation and perturbation.
//!
//! A [`Dataset`] stores the design matrix row-major. When `has_intercept` is
//! set, column 0 of every design row is the constant 1 and the remaining
//! columns are the predictors `x_1 .. x_{d-1}`.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{QregError, Result};

/// Quantile level `tau`, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Quantile(f64);

impl Quantile {
    pub fn new(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau < 1.0 {
            Ok(Quantile(tau))
        } else {
            Err(QregError::InvalidQuantile(tau))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Quantile {
    fn default() -> Self {
        Quantile(0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    design: Vec<f64>,
    response: Vec<f64>,
    has_intercept: bool,
    perturbed: bool,
}

impl Dataset {
    /// Builds an instance with an intercept from predictor rows and responses.
    pub fn new(predictors: &[Vec<f64>], response: Vec<f64>) -> Result<Self> {
        let width = predictors.first().map_or(0, Vec::len);
        let mut design = Vec::with_capacity(predictors.len() * (width + 1));
        for (i, row) in predictors.iter().enumerate() {
            if row.len() != width {
                return Err(QregError::Ragged {
                    row: i + 1,
                    expected: width,
                    found: row.len(),
                });
            }
            design.push(1.0);
            design.extend_from_slice(row);
        }
        Self::from_design(design, response, width + 1, true)
    }

    /// Builds an instance from a row-major design matrix with `d` columns.
    pub fn from_design(
        design: Vec<f64>,
        response: Vec<f64>,
        d: usize,
        has_intercept: bool,
    ) -> Result<Self> {
        if d == 0 {
            return Err(QregError::InvalidArgument("dimension must be at least 1".into()));
        }
        let n = response.len();
        if design.len() != n * d {
            return Err(QregError::DimensionMismatch {
                expected: n * d,
                found: design.len(),
            });
        }
        if n < d {
            return Err(QregError::TooFewPoints { n, d });
        }
        for i in 0..n {
            let finite = response[i].is_finite()
                && design[i * d..(i + 1) * d].iter().all(|v| v.is_finite());
            if !finite {
                return Err(QregError::NonFinite { point: i });
            }
        }
        Ok(Dataset {
            n,
            d,
            design,
            response,
            has_intercept,
            perturbed: false,
        })
    }

    /// The seven-point instance used as the worked example throughout the
    /// test-suite (`t1 .. t7`, predicting `A2` from `A1`).
    pub fn running_example() -> Self {
        let x = [3.15, 1.97, 1.369, 0.149, -0.39, -0.51, -2.04];
        let y = [3.13, 1.0, 2.43, 1.287, 0.222, -0.65, 7.30];
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        Dataset::new(&rows, y.to_vec()).expect("running example is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    /// Set when the coordinates were jittered by [`perturb`]; solvers report
    /// their final answer against the unperturbed data in that case.
    #[inline]
    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    /// Design row `X_i` (length `d`).
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.design[i * self.d..(i + 1) * self.d]
    }

    /// Predictor values of point `i`, without the constant column.
    pub fn predictors(&self, i: usize) -> &[f64] {
        let row = self.row(i);
        if self.has_intercept {
            &row[1..]
        } else {
            row
        }
    }

    #[inline]
    pub fn y(&self, i: usize) -> f64 {
        self.response[i]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// Index into `beta` of the coefficient the randomized solver searches
    /// over: the first predictor's slope.
    pub fn search_index(&self) -> usize {
        usize::from(self.has_intercept)
    }

    /// `X_i . beta`.
    #[inline]
    pub fn predict(&self, i: usize, beta: &[f64]) -> f64 {
        self.row(i).iter().zip(beta).map(|(x, b)| x * b).sum()
    }

    #[inline]
    pub fn residual(&self, i: usize, beta: &[f64]) -> f64 {
        self.response[i] - self.predict(i, beta)
    }

    /// Max absolute value of design column `m`, or 1 for an all-zero column.
    pub fn column_scale(&self, m: usize) -> f64 {
        scale_of((0..self.n).map(|i| self.design[i * self.d + m]))
    }

    pub fn response_scale(&self) -> f64 {
        scale_of(self.response.iter().copied())
    }

    /// Tolerance below which a residual counts as zero.
    pub fn zero_tolerance(&self) -> f64 {
        1e-9 * self.response_scale()
    }

    /// Copy holding only the points in `ids`, in that order.
    pub fn subset(&self, ids: &[usize]) -> Result<Dataset> {
        let mut design = Vec::with_capacity(ids.len() * self.d);
        let mut response = Vec::with_capacity(ids.len());
        for &i in ids {
            design.extend_from_slice(self.row(i));
            response.push(self.response[i]);
        }
        Dataset::from_design(design, response, self.d, self.has_intercept)
    }
}

fn scale_of(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    pub header: bool,
    /// Zero-based column holding the response; `None` means the last column.
    pub response_column: Option<usize>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| QregError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, options)
}

/// Parses comma separated numeric rows. Rows and columns in errors are
/// 1-based and count the header line when present.
pub fn read_csv(reader: impl Read, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut record = csv::StringRecord::new();
    let row_offset = usize::from(options.header);
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(QregError::Csv(e.to_string())),
        }
        let row_no = rows.len() + 1 + row_offset;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(QregError::Ragged {
                row: row_no,
                expected,
                found: record.len(),
            });
        }
        let parsed = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field.parse::<f64>().map_err(|_| QregError::Parse {
                    row: row_no,
                    column: c + 1,
                    value: field.to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(parsed);
    }

    let width = width.unwrap_or(0);
    if width < 2 {
        return Err(QregError::Csv(format!(
            "need at least 2 columns (predictors and response), found {width}"
        )));
    }
    let response_col = options.response_column.unwrap_or(width - 1);
    if response_col >= width {
        return Err(QregError::InvalidArgument(format!(
            "response column {response_col} out of range for {width} columns"
        )));
    }

    let mut predictors = Vec::with_capacity(rows.len());
    let mut response = Vec::with_capacity(rows.len());
    for row in rows {
        response.push(row[response_col]);
        predictors.push(
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != response_col)
                .map(|(_, &v)| v)
                .collect::<Vec<_>>(),
        );
    }
    Dataset::new(&predictors, response)
}

/// Writes predictors followed by the response, one point per line, with a
/// header `x1,..,x{d-1},y`. Values use the shortest round-trip representation.
pub fn write_csv(ds: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let p = ds.predictors(0).len();
    let mut header: Vec<String> = (1..=p).map(|m| format!("x{m}")).collect();
    header.push("y".into());
    w.write_record(&header)
        .map_err(|e| QregError::Csv(e.to_string()))?;
    for i in 0..ds.n() {
        let fields = ds
            .predictors(i)
            .iter()
            .chain(std::iter::once(&ds.response[i]))
            .map(|v| v.to_string());
        w.write_record(fields)
            .map_err(|e| QregError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| QregError::Csv(e.to_string()))
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| QregError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(ds, std::io::BufWriter::new(file))
}

/// Parameters for [`generate_synthetic`].
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    /// True coefficients in design order (intercept first), length `d`.
    pub beta: Vec<f64>,
    pub noise_scale: f64,
    pub outlier_fraction: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `beta = (1, 2, .., d)`, unit noise, no outliers.
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        SyntheticSpec {
            n,
            d,
            beta: (1..=d).map(|v| v as f64).collect(),
            noise_scale: 1.0,
            outlier_fraction: 0.0,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub dataset: Dataset,
    /// Indices whose noise was inflated x100, ascending.
    pub outliers: Vec<usize>,
}

/// Outlier noise multiplier.
pub const OUTLIER_INFLATION: f64 = 100.0;

/// Linear data with Gaussian noise; predictors uniform on [-10, 10] and
/// `floor(outlier_fraction * n)` points carrying inflated noise.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Synthetic> {
    let SyntheticSpec {
        n,
        d,
        ref beta,
        noise_scale,
        outlier_fraction,
        seed,
    } = *spec;
    if !(0.0..1.0).contains(&outlier_fraction) {
        return Err(QregError::InvalidArgument(format!(
            "outlier fraction must lie in [0, 1), got {outlier_fraction}"
        )));
    }
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(QregError::InvalidArgument(format!(
            "noise scale must be finite and non-negative, got {noise_scale}"
        )));
    }
    if d == 0 || beta.len() != d {
        return Err(QregError::DimensionMismatch {
            expected: d,
            found: beta.len(),
        });
    }
    if n < d {
        return Err(QregError::TooFewPoints { n, d });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let n_outliers = (outlier_fraction * n as f64).floor() as usize;
    let mut outliers = rand::seq::index::sample(&mut rng, n, n_outliers).into_vec();
    outliers.sort_unstable();
    let mut is_outlier = vec![false; n];
    for &i in &outliers {
        is_outlier[i] = true;
    }

    let mut design = Vec::with_capacity(n * d);
    let mut response = Vec::with_capacity(n);
    for &outlier in &is_outlier {
        let start = design.len();
        design.push(1.0);
        for _ in 1..d {
            design.push(rng.random_range(-10.0..=10.0));
        }
        let clean: f64 = design[start..].iter().zip(beta).map(|(x, b)| x * b).sum();
        let mut noise = noise_scale * normal.sample(&mut rng);
        if outlier {
            noise *= OUTLIER_INFLATION;
        }
        response.push(clean + noise);
    }
    Ok(Synthetic {
        dataset: Dataset::from_design(design, response, d, true)?,
        outliers,
    })
}

/// Jitters every predictor and response value to break ties and coincidences.
///
/// Each coordinate `c` of a column with scale `s` becomes `c * (1 + u) + u'`
/// where `u ~ U[-m, m]` and `u' ~ U[-m*s, m*s]`. The constant column is left
/// alone. `magnitude == 0` returns an identical copy.
pub fn perturb(ds: &Dataset, magnitude: f64, seed: u64) -> Result<Dataset> {
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(QregError::InvalidArgument(format!(
            "perturbation magnitude must be finite and non-negative, got {magnitude}"
        )));
    }
    if magnitude == 0.0 {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = usize::from(ds.has_intercept);
    let scales: Vec<f64> = (0..ds.d).map(|m| ds.column_scale(m)).collect();
    let y_scale = ds.response_scale();

    let mut jitter = |c: f64, scale: f64| {
        let u = rng.random_range(-magnitude..=magnitude);
        let v = rng.random_range(-magnitude * scale..=magnitude * scale);
        c * (1.0 + u) + v
    };

    let mut out = ds.clone();
    for i in 0..ds.n {
        for (m, &scale) in scales.iter().enumerate().skip(first) {
            let k = i * ds.d + m;
            out.design[k] = jitter(ds.design[k], scale);
        }
        out.response[i] = jitter(ds.response[i], y_scale);
    }
    out.perturbed = true;
    Ok(out)
}
