use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DatasetError, Result};

/// One image's feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub instance_id: String,
    pub object_id: String,
    pub x: Vec<f64>,
}

/// Named half-open index ranges over the feature dimensions
/// (for example color / shape / object descriptor blocks).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, [usize; 2]>", into = "BTreeMap<String, [usize; 2]>")]
pub struct CategorySlices {
    slices: BTreeMap<String, Range<usize>>,
}

impl CategorySlices {
    pub fn new(slices: BTreeMap<String, Range<usize>>) -> Result<Self> {
        let mut ordered: Vec<(&String, &Range<usize>)> = slices.iter().collect();
        ordered.sort_by_key(|(_, r)| (r.start, r.end));
        for (name, r) in &ordered {
            if name.is_empty() {
                return Err(DatasetError::InvalidManifest("empty category name".into()));
            }
            if r.start >= r.end {
                return Err(DatasetError::InvalidManifest(format!(
                    "category `{name}` has empty range [{}, {})",
                    r.start, r.end
                )));
            }
        }
        for pair in ordered.windows(2) {
            let ((a, ra), (b, rb)) = (pair[0], pair[1]);
            if rb.start < ra.end {
                return Err(DatasetError::InvalidManifest(format!(
                    "categories `{a}` and `{b}` overlap"
                )));
            }
        }
        Ok(CategorySlices { slices })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| DatasetError::InvalidManifest(e.to_string()))
    }

    pub fn get(&self, category: &str) -> Option<Range<usize>> {
        self.slices.get(category).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Range<usize>)> {
        self.slices.iter().map(|(k, v)| (k.as_str(), v.clone()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.slices.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    fn check_within(&self, dim: usize) -> Result<()> {
        for (name, r) in &self.slices {
            if r.end > dim {
                return Err(DatasetError::InvalidManifest(format!(
                    "category `{name}` range [{}, {}) exceeds feature dimension {dim}",
                    r.start, r.end
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<BTreeMap<String, [usize; 2]>> for CategorySlices {
    type Error = DatasetError;

    fn try_from(raw: BTreeMap<String, [usize; 2]>) -> Result<Self> {
        CategorySlices::new(raw.into_iter().map(|(k, [s, e])| (k, s..e)).collect())
    }
}

impl From<CategorySlices> for BTreeMap<String, [usize; 2]> {
    fn from(c: CategorySlices) -> Self {
        c.slices.into_iter().map(|(k, r)| (k, [r.start, r.end])).collect()
    }
}

pub fn load_category_manifest(path: impl AsRef<Path>) -> Result<CategorySlices> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| DatasetError::io(&path, e))?;
    CategorySlices::from_json_str(&text)
}

/// Per-image feature vectors grouped by object.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    instances: Vec<Instance>,
    dim: usize,
    category_slices: Option<CategorySlices>,
}

impl FeatureTable {
    pub fn new(dim: usize, instances: Vec<Instance>) -> Result<Self> {
        if dim == 0 {
            return Err(DatasetError::InvalidArgument(
                "feature dimension must be at least 1".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            if inst.x.len() != dim {
                return Err(DatasetError::DimensionMismatch {
                    line: i as u64 + 2,
                    expected: dim,
                    found: inst.x.len(),
                });
            }
            if inst.object_id.is_empty() {
                return Err(DatasetError::MalformedRow {
                    line: i as u64 + 2,
                    reason: "empty object_id".into(),
                });
            }
            if !seen.insert(inst.instance_id.as_str()) {
                return Err(DatasetError::DuplicateInstanceId(inst.instance_id.clone()));
            }
        }
        Ok(FeatureTable {
            instances,
            dim,
            category_slices: None,
        })
    }

    /// Parses the `instance_id,object_id,f0,...` CSV format.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();

        let header = match records.next() {
            Some(rec) => rec.map_err(|e| csv_error(e, 1))?,
            None => {
                return Err(DatasetError::MalformedHeader {
                    line: 1,
                    reason: "empty input".into(),
                })
            }
        };
        if header.len() < 3 || &header[0] != "instance_id" || &header[1] != "object_id" {
            return Err(DatasetError::MalformedHeader {
                line: 1,
                reason: "expected `instance_id,object_id,f0,...`".into(),
            });
        }
        let dim = header.len() - 2;

        let mut instances = Vec::new();
        let mut seen = HashSet::new();
        for rec in records {
            let rec = rec.map_err(|e| csv_error(e, 0))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() == 1 && rec[0].is_empty() {
                continue;
            }
            if rec.len() < 3 {
                return Err(DatasetError::MalformedRow {
                    line,
                    reason: format!("expected at least 3 columns, found {}", rec.len()),
                });
            }
            if rec.len() - 2 != dim {
                return Err(DatasetError::DimensionMismatch {
                    line,
                    expected: dim,
                    found: rec.len() - 2,
                });
            }
            let instance_id = rec[0].to_string();
            let object_id = rec[1].to_string();
            if instance_id.is_empty() || object_id.is_empty() {
                return Err(DatasetError::MalformedRow {
                    line,
                    reason: "empty instance_id or object_id".into(),
                });
            }
            let x = rec
                .iter()
                .skip(2)
                .enumerate()
                .map(|(j, field)| match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(DatasetError::MalformedRow {
                        line,
                        reason: format!("column f{j}: `{field}` is not a finite number"),
                    }),
                })
                .collect::<Result<Vec<f64>>>()?;
            if !seen.insert(instance_id.clone()) {
                return Err(DatasetError::DuplicateInstanceId(instance_id));
            }
            instances.push(Instance {
                instance_id,
                object_id,
                x,
            });
        }
        Ok(FeatureTable {
            instances,
            dim,
            category_slices: None,
        })
    }

    pub fn with_category_slices(mut self, slices: CategorySlices) -> Result<Self> {
        slices.check_within(self.dim)?;
        self.category_slices = Some(slices);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn category_slices(&self) -> Option<&CategorySlices> {
        self.category_slices.as_ref()
    }

    pub fn object_ids(&self) -> BTreeSet<String> {
        self.instances.iter().map(|i| i.object_id.clone()).collect()
    }

    /// Instances belonging to `objects`, in table order.
    pub fn subset_by_objects(&self, objects: &BTreeSet<String>) -> FeatureTable {
        FeatureTable {
            instances: self
                .instances
                .iter()
                .filter(|i| objects.contains(&i.object_id))
                .cloned()
                .collect(),
            dim: self.dim,
            category_slices: self.category_slices.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(writer);
        write!(w, "instance_id,object_id")?;
        for j in 0..self.dim {
            write!(w, ",f{j}")?;
        }
        writeln!(w)?;
        for inst in &self.instances {
            write!(w, "{},{}", csv_field(&inst.instance_id), csv_field(&inst.object_id))?;
            for v in &inst.x {
                // `{}` on f64 is the shortest representation that round-trips.
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.trim() != s {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_error(e: csv::Error, fallback_line: u64) -> DatasetError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    match e.kind() {
        csv::ErrorKind::Utf8 { .. } => DatasetError::InvalidUtf8 { line },
        csv::ErrorKind::Io(_) => DatasetError::MalformedRow {
            line,
            reason: e.to_string(),
        },
        _ => DatasetError::MalformedRow {
            line,
            reason: e.to_string(),
        },
    }
}

pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let file = File::open(path.as_ref()).map_err(|e| DatasetError::io(&path, e))?;
    FeatureTable::from_reader(BufReader::new(file))
}

pub fn write_features(table: &FeatureTable, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref()).map_err(|e| DatasetError::io(&path, e))?;
    table.write_csv(file).map_err(|e| DatasetError::io(&path, e))
}
