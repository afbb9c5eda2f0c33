//! Finite distance spaces.
//!
//! A [`DistanceSpace`] is an immutable collection of items identified by insertion
//! index, together with a symmetric distance oracle. Items are either points in
//! `R^p` under the L2 norm ([`PointSet`]) or rows of an explicit
//! [`DistanceMatrix`]. The triangle inequality is not assumed unless
//! `metric_claimed` is set.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

/// Default absolute/relative slack for triangle-inequality checks.
pub const DEFAULT_TRIANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("item index {index} out of range for a space of {n} items")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("no items")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: dimension mismatch, expected {expected} coordinates, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {index} has {found} coordinates, expected {expected}")]
    PointDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("operation requires a Euclidean (coordinate) space")]
    NotEuclidean,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let dim = points.first().ok_or(SpaceError::Empty)?.len();
        if dim == 0 {
            return Err(SpaceError::PointDimension {
                index: 0,
                expected: 1,
                found: 0,
            });
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(SpaceError::PointDimension {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(SpaceError::NonFinite { index });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    /// Points on the real line.
    ///
    /// # Panics
    /// If `values` is empty or contains a non-finite value.
    pub fn from_1d(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| vec![v]).collect()).expect("valid 1-D point list")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }
}

/// Squared L2 distance.
#[inline]
pub fn sq_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sq_euclidean(a, b).sqrt()
}

/// Explicit `n x n` distance table. Construction does not validate the axioms;
/// use [`validate_space`] for that.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// All-zero matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let n = rows.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(SpaceError::Parse {
                    line: r + 2,
                    msg: format!("row {r} has {} entries, expected {n}", row.len()),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
        self.entries[j * self.n + i] = value;
    }

    /// Sets only `(i, j)`; used to build deliberately invalid tables.
    pub fn set_entry(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backing {
    Points(PointSet),
    Matrix(DistanceMatrix),
}

/// A finite space of items with a distance oracle. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpace {
    backing: Backing,
    metric_claimed: bool,
}

impl DistanceSpace {
    /// Euclidean space; the L2 norm is a metric, so `metric_claimed` is set.
    pub fn euclidean(points: PointSet) -> Self {
        Self {
            backing: Backing::Points(points),
            metric_claimed: true,
        }
    }

    pub fn from_matrix(matrix: DistanceMatrix, metric_claimed: bool) -> Self {
        Self {
            backing: Backing::Matrix(matrix),
            metric_claimed,
        }
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    pub fn metric_claimed(&self) -> bool {
        self.metric_claimed
    }

    pub fn len(&self) -> usize {
        match &self.backing {
            Backing::Points(p) => p.len(),
            Backing::Matrix(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Option<&PointSet> {
        match &self.backing {
            Backing::Points(p) => Some(p),
            Backing::Matrix(_) => None,
        }
    }

    pub fn require_points(&self) -> Result<&PointSet, SpaceError> {
        self.points().ok_or(SpaceError::NotEuclidean)
    }

    /// Checked distance lookup.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64, SpaceError> {
        let n = self.len();
        for index in [i, j] {
            if index >= n {
                return Err(SpaceError::IndexOutOfRange { index, n });
            }
        }
        Ok(self.d(i, j))
    }

    /// Unchecked distance lookup for inner loops.
    ///
    /// # Panics
    /// If either index is out of range.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        match &self.backing {
            Backing::Points(p) => euclidean(p.point(i), p.point(j)),
            Backing::Matrix(m) => m.get(i, j),
        }
    }

    /// Sub-space on `items`, re-indexed `0..items.len()` in the given order.
    pub fn restrict(&self, items: &[usize]) -> DistanceSpace {
        let backing = match &self.backing {
            Backing::Points(p) => Backing::Points(PointSet {
                dim: p.dim,
                coords: items.iter().flat_map(|&i| p.point(i).iter().copied()).collect(),
            }),
            Backing::Matrix(m) => {
                let mut sub = DistanceMatrix::zeros(items.len());
                for (a, &i) in items.iter().enumerate() {
                    for (b, &j) in items.iter().enumerate() {
                        sub.set_entry(a, b, m.get(i, j));
                    }
                }
                Backing::Matrix(sub)
            }
        };
        DistanceSpace {
            backing,
            metric_claimed: self.metric_claimed,
        }
    }

    /// Full pairwise table.
    pub fn to_matrix(&self) -> DistanceMatrix {
        match &self.backing {
            Backing::Matrix(m) => m.clone(),
            Backing::Points(_) => {
                let n = self.len();
                let mut m = DistanceMatrix::zeros(n);
                for i in 0..n {
                    for j in i + 1..n {
                        m.set(i, j, self.d(i, j));
                    }
                }
                m
            }
        }
    }
}

/// One violated axiom, with the first offending index tuple.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite { i: usize, j: usize },
    NonZeroDiagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonFinite { i, j } => write!(f, "non-finite distance at ({i}, {j})"),
            Violation::NonZeroDiagonal { i, value } => {
                write!(f, "d({i}, {i}) = {value}, expected 0")
            }
            Violation::Negative { i, j } => write!(f, "negative distance at ({i}, {j})"),
            Violation::Asymmetric { i, j } => write!(f, "d({i}, {j}) != d({j}, {i})"),
            Violation::Triangle { i, j, k } => {
                write!(f, "triangle inequality fails: d({i}, {k}) > d({i}, {j}) + d({j}, {k})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks symmetry, zero diagonal and non-negativity, plus the triangle
/// inequality when the space claims to be a metric.
pub fn validate_space(space: &DistanceSpace) -> ValidationReport {
    validate_space_with_tolerance(space, DEFAULT_TRIANGLE_TOLERANCE)
}

/// As [`validate_space`]; a triangle is accepted when
/// `d(i,k) <= d(i,j) + d(j,k) + tol * (1 + d(i,k))`.
pub fn validate_space_with_tolerance(space: &DistanceSpace, tol: f64) -> ValidationReport {
    let n = space.len();
    let m = space.to_matrix();
    let mut non_finite = None;
    let mut diagonal = None;
    let mut negative = None;
    let mut asymmetric = None;
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if !v.is_finite() {
                non_finite.get_or_insert(Violation::NonFinite { i, j });
                continue;
            }
            if i == j {
                if v != 0.0 {
                    diagonal.get_or_insert(Violation::NonZeroDiagonal { i, value: v });
                }
                continue;
            }
            if v < 0.0 {
                negative.get_or_insert(Violation::Negative { i, j });
            }
            if j > i && v != m.get(j, i) {
                asymmetric.get_or_insert(Violation::Asymmetric { i, j });
            }
        }
    }
    let mut triangle = None;
    if space.metric_claimed() && non_finite.is_none() {
        'outer: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let direct = m.get(i, k);
                    if direct > m.get(i, j) + m.get(j, k) + tol * (1.0 + direct) {
                        triangle = Some(Violation::Triangle { i, j, k });
                        break 'outer;
                    }
                }
            }
        }
    }
    ValidationReport {
        violations: [non_finite, diagonal, negative, asymmetric, triangle]
            .into_iter()
            .flatten()
            .collect(),
    }
}

/// On-disk layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFormat {
    /// One point per line, comma-separated, optional `# dim=<p>` header.
    Coordinates,
    /// First line `n`, then `n` rows of `n` comma-separated values.
    Matrix,
}

impl FromStr for SpaceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coordinates" | "coords" => Ok(SpaceFormat::Coordinates),
            "matrix" => Ok(SpaceFormat::Matrix),
            other => Err(format!("unknown space format `{other}`")),
        }
    }
}

fn parse_values(line: &str, lineno: usize) -> Result<Vec<f64>, SpaceError> {
    line.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>().map_err(|_| SpaceError::Parse {
                line: lineno,
                msg: format!("cannot parse `{tok}` as a number"),
            })
        })
        .collect()
}

/// Parses a space from text. Matrix input is rejected if asymmetric.
pub fn parse_space(
    text: &str,
    format: SpaceFormat,
    metric_claimed: bool,
) -> Result<DistanceSpace, SpaceError> {
    match format {
        SpaceFormat::Coordinates => parse_coordinates(text).map(DistanceSpace::euclidean),
        SpaceFormat::Matrix => {
            let m = parse_matrix(text)?;
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    if m.get(i, j) != m.get(j, i) {
                        return Err(SpaceError::Asymmetric { i, j });
                    }
                }
            }
            Ok(DistanceSpace::from_matrix(m, metric_claimed))
        }
    }
}

fn parse_coordinates(text: &str) -> Result<PointSet, SpaceError> {
    let mut declared: Option<usize> = None;
    let mut dim: Option<usize> = None;
    let mut coords = Vec::new();
    let mut count = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("dim=") {
                let p = value.trim().parse::<usize>().map_err(|_| SpaceError::Parse {
                    line: lineno,
                    msg: format!("invalid dimension header `{line}`"),
                })?;
                if p == 0 {
                    return Err(SpaceError::Parse {
                        line: lineno,
                        msg: "dimension must be positive".into(),
                    });
                }
                declared = Some(p);
            }
            continue;
        }
        let values = parse_values(line, lineno)?;
        let expected = *dim.get_or_insert(declared.unwrap_or(values.len()));
        if values.len() != expected {
            return Err(SpaceError::DimensionMismatch {
                line: lineno,
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpaceError::NonFinite { index: count });
        }
        coords.extend(values);
        count += 1;
    }
    match dim {
        None => Err(SpaceError::Empty),
        Some(dim) => Ok(PointSet { dim, coords }),
    }
}

fn parse_matrix(text: &str) -> Result<DistanceMatrix, SpaceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(SpaceError::Empty)?;
    let n = header.parse::<usize>().map_err(|_| SpaceError::Parse {
        line: first,
        msg: format!("expected item count, found `{header}`"),
    })?;
    if n == 0 {
        return Err(SpaceError::Empty);
    }
    let mut entries = Vec::with_capacity(n * n);
    for row in 0..n {
        let (lineno, line) = lines.next().ok_or_else(|| SpaceError::Parse {
            line: first,
            msg: format!("expected {n} rows, found {row}"),
        })?;
        let values = parse_values(line, lineno)?;
        if values.len() != n {
            return Err(SpaceError::Parse {
                line: lineno,
                msg: format!("row {row} has {} entries, expected {n}", values.len()),
            });
        }
        entries.extend(values);
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(SpaceError::Parse {
            line: lineno,
            msg: format!("unexpected content after {n} rows"),
        });
    }
    Ok(DistanceMatrix { n, entries })
}

/// Renders a space. `{}` formatting of `f64` is shortest-round-trip, so
/// reading the text back reproduces every value bit for bit.
pub fn format_space(space: &DistanceSpace, format: SpaceFormat) -> Result<String, SpaceError> {
    let mut out = String::new();
    match format {
        SpaceFormat::Coordinates => {
            let points = space.require_points()?;
            writeln!(out, "# dim={}", points.dim()).unwrap();
            for p in points.iter() {
                write_row(&mut out, p);
            }
        }
        SpaceFormat::Matrix => {
            let m = space.to_matrix();
            writeln!(out, "{}", m.len()).unwrap();
            for i in 0..m.len() {
                write_row(&mut out, m.row(i));
            }
        }
    }
    Ok(out)
}

fn write_row(out: &mut String, values: &[f64]) {
    for (c, v) in values.iter().enumerate() {
        if c > 0 {
            out.push(',');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn load_space(
    path: &Path,
    format: SpaceFormat,
    metric_claimed: bool,
) -> Result<DistanceSpace, SpaceError> {
    parse_space(&fs::read_to_string(path)?, format, metric_claimed)
}

pub fn save_space(space: &DistanceSpace, path: &Path, format: SpaceFormat) -> Result<(), SpaceError> {
    fs::write(path, format_space(space, format)?)?;
    Ok(())
}

/// Guesses the layout of an unlabelled file: a `# dim=` header means
/// coordinates; otherwise a well-formed matrix is preferred.
pub fn detect_format(text: &str) -> SpaceFormat {
    if text.lines().any(|l| l.trim_start().starts_with("# dim=")) {
        return SpaceFormat::Coordinates;
    }
    if parse_matrix(text).is_ok() {
        SpaceFormat::Matrix
    } else {
        SpaceFormat::Coordinates
    }
}
