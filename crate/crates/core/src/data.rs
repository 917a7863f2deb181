//! Dataset representation, CSV ingestion and the dataset transformations
//! used by the importance measures and paired tests.
//!
//! Cells are stored column-major as `f64`. Categorical columns hold level
//! codes (`0.0, 1.0, ...`) assigned in order of first appearance.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    Categorical { levels: Vec<String> },
}

impl FeatureKind {
    pub fn level_count(&self) -> Option<usize> {
        match self {
            FeatureKind::Numeric => None,
            FeatureKind::Categorical { levels } => Some(levels.len()),
        }
    }
}

/// Column names and kinds, without data. Carried by fitted models so
/// prediction inputs can be decoded the same way as training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<String>,
    pub kinds: Vec<FeatureKind>,
}

impl FeatureSchema {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    kinds: Vec<FeatureKind>,
    columns: Vec<Vec<f64>>,
    response: Vec<f64>,
}

impl Dataset {
    pub fn new(
        names: Vec<String>,
        kinds: Vec<FeatureKind>,
        columns: Vec<Vec<f64>>,
        response: Vec<f64>,
    ) -> Result<Self> {
        let n = response.len();
        if names.len() != kinds.len() || names.len() != columns.len() {
            return Err(Error::Schema(format!(
                "{} names, {} kinds, {} columns",
                names.len(),
                kinds.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::Schema(format!(
                    "column {} has {} rows, response has {}",
                    names[j],
                    col.len(),
                    n
                )));
            }
            match &kinds[j] {
                FeatureKind::Numeric => {
                    if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                        return Err(Error::NonNumeric {
                            row,
                            col: names[j].clone(),
                            value: col[row].to_string(),
                        });
                    }
                }
                FeatureKind::Categorical { levels } => {
                    let bad = col.iter().position(|&v| {
                        v < 0.0 || v.fract() != 0.0 || v as usize >= levels.len()
                    });
                    if let Some(row) = bad {
                        return Err(Error::Schema(format!(
                            "level code {} out of range at row {row}, column {}",
                            col[row], names[j]
                        )));
                    }
                }
            }
        }
        if let Some(row) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonNumeric {
                row,
                col: "<response>".into(),
                value: response[row].to_string(),
            });
        }
        Ok(Self {
            names,
            kinds,
            columns,
            response,
        })
    }

    /// All-numeric dataset named `x1..xp`.
    pub fn from_numeric(columns: Vec<Vec<f64>>, response: Vec<f64>) -> Result<Self> {
        let p = columns.len();
        Self::new(
            (1..=p).map(|j| format!("x{j}")).collect(),
            vec![FeatureKind::Numeric; p],
            columns,
            response,
        )
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[FeatureKind] {
        &self.kinds
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn value(&self, row: usize, j: usize) -> f64 {
        self.columns[j][row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema {
            names: self.names.clone(),
            kinds: self.kinds.clone(),
        }
    }

    pub fn response_mean(&self) -> f64 {
        if self.response.is_empty() {
            0.0
        } else {
            self.response.iter().sum::<f64>() / self.n() as f64
        }
    }

    /// New dataset with the given rows (duplicates allowed), in order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            names: self.names.clone(),
            kinds: self.kinds.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            response: rows.iter().map(|&i| self.response[i]).collect(),
        }
    }

    /// Same features, different response.
    pub fn with_response(&self, response: Vec<f64>) -> Result<Dataset> {
        if response.len() != self.n() {
            return Err(Error::Schema(format!(
                "response has {} rows, dataset has {}",
                response.len(),
                self.n()
            )));
        }
        let mut out = self.clone();
        out.response = response;
        Ok(out)
    }

    /// Replace column `j` with new values of the same kind.
    pub fn with_column(&self, j: usize, values: Vec<f64>) -> Result<Dataset> {
        self.check_index(j)?;
        let mut columns = self.columns.clone();
        columns[j] = values;
        Dataset::new(
            self.names.clone(),
            self.kinds.clone(),
            columns,
            self.response.clone(),
        )
    }

    /// Append a numeric column.
    pub fn with_numeric_column(&self, name: &str, values: Vec<f64>) -> Result<Dataset> {
        let mut names = self.names.clone();
        let mut kinds = self.kinds.clone();
        let mut columns = self.columns.clone();
        names.push(name.to_string());
        kinds.push(FeatureKind::Numeric);
        columns.push(values);
        Dataset::new(names, kinds, columns, self.response.clone())
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.p() {
            Err(Error::IndexOutOfRange {
                index: j,
                len: self.p(),
            })
        } else {
            Ok(())
        }
    }
}

/// Column role in a schema declaration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Numeric,
    Categorical,
    Response,
}

/// Mapping column name -> role, as read from a JSON schema file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnSchema(pub HashMap<String, ColumnRole>);

impl ColumnSchema {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let schema: ColumnSchema = serde_json::from_str(text)?;
        let responses = schema
            .0
            .values()
            .filter(|r| **r == ColumnRole::Response)
            .count();
        if responses != 1 {
            return Err(Error::Schema(format!(
                "exactly one response column required, found {responses}"
            )));
        }
        Ok(schema)
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    load_csv_reader(file, schema)
}

/// Parse CSV text with a header row. Every header column must appear in the
/// schema and exactly one must be the response.
pub fn load_csv_reader<R: std::io::Read>(reader: R, schema: &ColumnSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyFile);
    }
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateName(h.clone()));
        }
    }
    let roles: Vec<ColumnRole> = header
        .iter()
        .map(|h| {
            schema
                .0
                .get(h)
                .copied()
                .ok_or_else(|| Error::Schema(format!("column {h:?} not declared in schema")))
        })
        .collect::<Result<_>>()?;
    for name in schema.0.keys() {
        if !seen.contains(name.as_str()) {
            return Err(Error::Schema(format!("schema column {name:?} missing from file")));
        }
    }
    let response_col = roles
        .iter()
        .position(|r| *r == ColumnRole::Response)
        .ok_or_else(|| Error::Schema("no response column".into()))?;

    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut level_maps: Vec<Option<HashMap<String, usize>>> = Vec::new();
    let mut col_of_header = vec![usize::MAX; header.len()];
    for (c, role) in roles.iter().enumerate() {
        match role {
            ColumnRole::Response => {}
            ColumnRole::Numeric => {
                col_of_header[c] = names.len();
                names.push(header[c].clone());
                kinds.push(FeatureKind::Numeric);
                columns.push(Vec::new());
                level_maps.push(None);
            }
            ColumnRole::Categorical => {
                col_of_header[c] = names.len();
                names.push(header[c].clone());
                kinds.push(FeatureKind::Categorical { levels: Vec::new() });
                columns.push(Vec::new());
                level_maps.push(Some(HashMap::new()));
            }
        }
    }

    let mut response = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Schema(format!(
                "row {row} has {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row,
                    col: header[c].clone(),
                });
            }
            let parse = || {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::NonNumeric {
                        row,
                        col: header[c].clone(),
                        value: cell.to_string(),
                    })
            };
            if c == response_col {
                response.push(parse()?);
                continue;
            }
            let j = col_of_header[c];
            match &mut level_maps[j] {
                None => columns[j].push(parse()?),
                Some(map) => {
                    let next = map.len();
                    let code = *map.entry(cell.to_string()).or_insert(next);
                    if code == next {
                        if let FeatureKind::Categorical { levels } = &mut kinds[j] {
                            levels.push(cell.to_string());
                        }
                    }
                    columns[j].push(code as f64);
                }
            }
        }
    }
    if response.is_empty() {
        return Err(Error::EmptyFile);
    }
    Dataset::new(names, kinds, columns, response)
}

/// Read feature rows for prediction. Columns are matched to the schema by
/// name; extra columns are ignored.
pub fn load_feature_rows<R: std::io::Read>(reader: R, schema: &FeatureSchema) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let positions: Vec<usize> = schema
        .names
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("column {name:?} missing from input")))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let mut x = Vec::with_capacity(positions.len());
        for (j, &c) in positions.iter().enumerate() {
            let cell = record.get(c).unwrap_or("").trim();
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row,
                    col: schema.names[j].clone(),
                });
            }
            match &schema.kinds[j] {
                FeatureKind::Numeric => {
                    let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                        Error::NonNumeric {
                            row,
                            col: schema.names[j].clone(),
                            value: cell.to_string(),
                        }
                    })?;
                    x.push(v);
                }
                FeatureKind::Categorical { levels } => {
                    let code = levels.iter().position(|l| l == cell).ok_or_else(|| {
                        Error::UnknownLevel {
                            col: schema.names[j].clone(),
                            level: cell.to_string(),
                        }
                    })?;
                    x.push(code as f64);
                }
            }
        }
        rows.push(x);
    }
    Ok(rows)
}

/// Re-express `ds` in the categorical codes of `reference`, e.g. to align a
/// held-out file with the training data. Names must match in order; a level
/// absent from `reference` is an error.
pub fn recode_like(ds: &Dataset, reference: &FeatureSchema) -> Result<Dataset> {
    if ds.names != reference.names {
        return Err(Error::Schema("columns differ from the reference schema".into()));
    }
    let mut columns = ds.columns.clone();
    for (j, (kind, target)) in ds.kinds.iter().zip(&reference.kinds).enumerate() {
        match (kind, target) {
            (FeatureKind::Numeric, FeatureKind::Numeric) => {}
            (FeatureKind::Categorical { levels: own }, FeatureKind::Categorical { levels }) => {
                let map = own
                    .iter()
                    .map(|l| {
                        levels.iter().position(|r| r == l).ok_or_else(|| Error::UnknownLevel {
                            col: ds.names[j].clone(),
                            level: l.clone(),
                        })
                    })
                    .collect::<Result<Vec<usize>>>()?;
                for v in columns[j].iter_mut() {
                    *v = map[*v as usize] as f64;
                }
            }
            _ => return Err(Error::Schema(format!("column {:?} changes kind", ds.names[j]))),
        }
    }
    Dataset::new(ds.names.clone(), reference.kinds.clone(), columns, ds.response.clone())
}

/// Write the dataset as CSV with the response in a final column.
pub fn write_csv<W: std::io::Write>(ds: &Dataset, response_name: &str, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = ds.names.iter().map(String::as_str).collect();
    header.push(response_name);
    wtr.write_record(&header)?;
    for i in 0..ds.n() {
        let mut rec: Vec<String> = (0..ds.p())
            .map(|j| match &ds.kinds[j] {
                FeatureKind::Numeric => ds.columns[j][i].to_string(),
                FeatureKind::Categorical { levels } => levels[ds.columns[j][i] as usize].clone(),
            })
            .collect();
        rec.push(ds.response[i].to_string());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Stratum id per row; the vehicle for conditional permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataSpec {
    pub assignment: Vec<usize>,
}

impl StrataSpec {
    pub fn single(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
        }
    }

    fn groups(&self) -> Vec<Vec<usize>> {
        let mut by_id: Vec<(usize, usize)> =
            self.assignment.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        by_id.sort_unstable();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut last = None;
        for (s, i) in by_id {
            if last != Some(s) {
                groups.push(Vec::new());
                last = Some(s);
            }
            groups.last_mut().unwrap().push(i);
        }
        groups
    }
}

pub fn permute_feature(ds: &Dataset, j: usize, seed: u64) -> Result<Dataset> {
    permute_features(ds, &[j], seed)
}

/// Apply one shared row permutation to every listed column, keeping the
/// joint distribution of the block intact.
pub fn permute_features(ds: &Dataset, features: &[usize], seed: u64) -> Result<Dataset> {
    for &j in features {
        ds.check_index(j)?;
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..ds.n()).collect();
    order.shuffle(&mut rng);
    let mut out = ds.clone();
    for &j in features {
        out.columns[j] = order.iter().map(|&i| ds.columns[j][i]).collect();
    }
    Ok(out)
}

/// Permute column `j` independently within each stratum.
pub fn conditional_permute_feature(
    ds: &Dataset,
    j: usize,
    strata: &StrataSpec,
    seed: u64,
) -> Result<Dataset> {
    ds.check_index(j)?;
    if strata.assignment.len() != ds.n() {
        return Err(Error::StrataLengthMismatch {
            expected: ds.n(),
            got: strata.assignment.len(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut col = ds.columns[j].clone();
    for rows in strata.groups() {
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng);
        for (&dst, &src) in rows.iter().zip(&shuffled) {
            col[dst] = ds.columns[j][src];
        }
    }
    let mut out = ds.clone();
    out.columns[j] = col;
    Ok(out)
}

/// Default strata for conditionally permuting `j`: k-means on the other
/// features (numeric standardized, categoricals one-hot) into ceil(sqrt(n))
/// clusters.
pub fn default_strata(ds: &Dataset, j: usize, seed: u64) -> Result<StrataSpec> {
    ds.check_index(j)?;
    let n = ds.n();
    let mut embed: Vec<Vec<f64>> = vec![Vec::new(); n];
    for c in (0..ds.p()).filter(|&c| c != j) {
        match &ds.kinds[c] {
            FeatureKind::Numeric => {
                let col = &ds.columns[c];
                let mean = col.iter().sum::<f64>() / n as f64;
                let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
                let sd = var.sqrt();
                for (i, e) in embed.iter_mut().enumerate() {
                    e.push(if sd > 0.0 { (col[i] - mean) / sd } else { 0.0 });
                }
            }
            FeatureKind::Categorical { levels } => {
                for (i, e) in embed.iter_mut().enumerate() {
                    let code = ds.columns[c][i] as usize;
                    e.extend((0..levels.len()).map(|l| if l == code { 1.0 } else { 0.0 }));
                }
            }
        }
    }
    if embed.first().is_none_or(|e| e.is_empty()) {
        return Ok(StrataSpec::single(n));
    }
    let clusters = (n as f64).sqrt().ceil() as usize;
    Ok(StrataSpec {
        assignment: kmeans(&embed, clusters, seed),
    })
}

fn kmeans(points: &[Vec<f64>], clusters: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    let clusters = clusters.clamp(1, n);
    let mut rng = rng_from_seed(seed);
    let mut centers: Vec<Vec<f64>> = rand::seq::index::sample(&mut rng, n, clusters)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();
    let dist2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..50 {
        let mut changed = false;
        for (i, pt) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = dist2(pt, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; clusters];
        let mut counts = vec![0usize; clusters];
        for (pt, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(pt) {
                *s += v;
            }
        }
        for c in 0..clusters {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    assignment
}

pub fn drop_feature(ds: &Dataset, j: usize) -> Result<Dataset> {
    drop_features(ds, &[j])
}

pub fn drop_features(ds: &Dataset, features: &[usize]) -> Result<Dataset> {
    for &j in features {
        ds.check_index(j)?;
    }
    let keep: Vec<usize> = (0..ds.p()).filter(|j| !features.contains(j)).collect();
    Ok(Dataset {
        names: keep.iter().map(|&j| ds.names[j].clone()).collect(),
        kinds: keep.iter().map(|&j| ds.kinds[j].clone()).collect(),
        columns: keep.iter().map(|&j| ds.columns[j].clone()).collect(),
        response: ds.response.clone(),
    })
}

/// Remove the listed coordinates from a feature vector.
pub fn drop_coordinates(x: &[f64], features: &[usize]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|(j, _)| !features.contains(j))
        .map(|(_, v)| *v)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDist {
    StandardGaussian,
    Uniform01,
}

/// Append `q` independent noise columns named `noise_1..noise_q`.
pub fn augment_noise(ds: &Dataset, q: usize, dist: NoiseDist, seed: u64) -> Result<Dataset> {
    let mut rng = rng_from_seed(seed);
    let mut out = ds.clone();
    for i in 1..=q {
        let values: Vec<f64> = (0..ds.n())
            .map(|_| match dist {
                NoiseDist::StandardGaussian => StandardNormal.sample(&mut rng),
                NoiseDist::Uniform01 => rng.random::<f64>(),
            })
            .collect();
        let mut name = format!("noise_{i}");
        while out.names.contains(&name) {
            name.push('_');
        }
        out.names.push(name);
        out.kinds.push(FeatureKind::Numeric);
        out.columns.push(values);
    }
    Ok(out)
}

/// Draw `k` row indices from `0..n`, returned sorted. When `required` is
/// set the draw is uniform over all draws containing it at least once.
pub fn draw_subsample(
    n: usize,
    k: usize,
    with_replacement: bool,
    required: Option<usize>,
    seed: u64,
) -> Result<Vec<usize>> {
    draw_subsample_with(n, k, with_replacement, required, &mut rng_from_seed(seed))
}

pub(crate) fn draw_subsample_with(
    n: usize,
    k: usize,
    with_replacement: bool,
    required: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParam(format!(
            "subsample needs n >= 1 and k >= 1, got n={n}, k={k}"
        )));
    }
    if let Some(r) = required {
        if r >= n {
            return Err(Error::InvalidParam(format!("required row {r} >= n={n}")));
        }
    }
    let mut out = if with_replacement {
        match required {
            None => (0..k).map(|_| rng.random_range(0..n)).collect::<Vec<_>>(),
            Some(r) => {
                // Position of the first occurrence of `r` follows a geometric
                // law truncated to 1..=k; earlier draws avoid `r`, later ones
                // are unrestricted.
                let q = 1.0 - 1.0 / n as f64;
                let first = if q == 0.0 {
                    1
                } else {
                    let u: f64 = rng.random();
                    let tail = 1.0 - q.powi(k as i32);
                    let j = ((1.0 - u * tail).ln() / q.ln()).ceil() as usize;
                    j.clamp(1, k)
                };
                let mut v = Vec::with_capacity(k);
                for _ in 1..first {
                    let x = rng.random_range(0..n - 1);
                    v.push(if x >= r { x + 1 } else { x });
                }
                v.push(r);
                for _ in first..k {
                    v.push(rng.random_range(0..n));
                }
                v
            }
        }
    } else {
        if k > n {
            return Err(Error::KTooLarge { k, n });
        }
        match required {
            None => rand::seq::index::sample(rng, n, k).into_vec(),
            Some(r) => {
                let mut v: Vec<usize> = rand::seq::index::sample(rng, n - 1, k - 1)
                    .into_iter()
                    .map(|x| if x >= r { x + 1 } else { x })
                    .collect();
                v.push(r);
                v
            }
        }
    };
    out.sort_unstable();
    Ok(out)
}
