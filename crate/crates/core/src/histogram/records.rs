//! Record databases, schemas and the JSON/CSV interchange formats.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::point::Histogram;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
}

/// Ordered attributes; the record space is their product, indexed row-major
/// with the first attribute most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if let Some(a) = attributes.iter().find(|a| a.values.is_empty()) {
            return Err(Error::InvalidParameter(format!(
                "attribute `{}` has an empty domain",
                a.name
            )));
        }
        let schema = Schema { attributes };
        if schema.try_k()? < 2 {
            return Err(Error::InvalidParameter(
                "schema must have K >= 2 records".into(),
            ));
        }
        Ok(schema)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Schema = serde_json::from_str(text)?;
        Schema::new(raw.attributes)
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    fn try_k(&self) -> Result<usize> {
        self.attributes.iter().try_fold(1usize, |acc, a| {
            acc.checked_mul(a.values.len())
                .ok_or_else(|| Error::InvalidParameter("record space too large".into()))
        })
    }

    /// Number of distinct records.
    pub fn k(&self) -> usize {
        self.try_k().expect("validated at construction")
    }

    /// Cell index of a record given one value per attribute, in schema order.
    pub fn record_index(&self, values: &[&str]) -> Option<usize> {
        if values.len() != self.attributes.len() {
            return None;
        }
        let mut idx = 0usize;
        for (attr, v) in self.attributes.iter().zip(values) {
            let pos = attr.values.iter().position(|x| x == v)?;
            idx = idx * attr.values.len() + pos;
        }
        Some(idx)
    }

    /// Attribute values of the record at `index`.
    pub fn record_values(&self, mut index: usize) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.attributes.len());
        for attr in self.attributes.iter().rev() {
            let m = attr.values.len();
            out.push(attr.values[index % m].as_str());
            index /= m;
        }
        out.reverse();
        out
    }
}

/// Counts records per cell. Rows are value lists in schema order; `row`
/// numbers in errors are 1-based data rows.
pub fn histogram_of_records<R: AsRef<str>>(
    records: &[Vec<R>],
    schema: &Schema,
) -> Result<Histogram> {
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for (r, rec) in records.iter().enumerate() {
        if rec.len() != schema.attributes.len() {
            return Err(Error::Ingestion {
                row: r + 1,
                column: "<row>".into(),
                value: format!("{} fields, expected {}", rec.len(), schema.attributes.len()),
            });
        }
        let mut idx = 0usize;
        for (attr, v) in schema.attributes.iter().zip(rec) {
            let v = v.as_ref();
            let pos = attr
                .values
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::Ingestion {
                    row: r + 1,
                    column: attr.name.clone(),
                    value: v.to_string(),
                })?;
            idx = idx * attr.values.len() + pos;
        }
        *counts.entry(idx).or_default() += 1;
    }
    Histogram::from_cells(schema.k(), counts.into_iter().collect())
}

/// Reads a record CSV whose header names the schema attributes (any order).
pub fn read_records_csv<R: Read>(reader: R, schema: &Schema) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut columns = Vec::with_capacity(schema.attributes.len());
    for attr in &schema.attributes {
        let pos = headers
            .iter()
            .position(|h| h.trim() == attr.name)
            .ok_or_else(|| Error::Ingestion {
                row: 0,
                column: attr.name.clone(),
                value: "missing column".into(),
            })?;
        columns.push(pos);
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        out.push(
            columns
                .iter()
                .map(|&c| row.get(c).unwrap_or("").trim().to_string())
                .collect(),
        );
    }
    Ok(out)
}

/// Writes one record per unit of count, grouped by cell in index order.
pub fn write_records_csv<W: Write>(writer: W, schema: &Schema, h: &Histogram) -> Result<()> {
    if h.k() != schema.k() {
        return Err(Error::mismatch(schema.k(), h.k()));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(schema.attributes.iter().map(|a| a.name.as_str()))?;
    for (idx, count) in h.nonzero() {
        let values = schema.record_values(idx);
        for _ in 0..count {
            w.write_record(&values)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct HistogramJson {
    n: u64,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    counts: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cells: Option<Vec<(usize, u64)>>,
}

/// Dense `counts` for densely stored histograms, sparse `cells` otherwise.
pub fn histogram_to_json(h: &Histogram) -> serde_json::Value {
    let doc = if h.is_sparse() {
        HistogramJson {
            n: h.n(),
            k: h.k(),
            counts: None,
            cells: Some(h.nonzero().collect()),
        }
    } else {
        HistogramJson {
            n: h.n(),
            k: h.k(),
            counts: Some(h.to_dense()),
            cells: None,
        }
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

pub fn histogram_from_json(text: &str) -> Result<Histogram> {
    let doc: HistogramJson = serde_json::from_str(text)?;
    let h = match (doc.counts, doc.cells) {
        (Some(counts), None) => {
            if counts.len() != doc.k {
                return Err(Error::mismatch(doc.k, counts.len()));
            }
            Histogram::new(counts)?
        }
        (None, Some(cells)) => Histogram::from_cells(doc.k, cells)?,
        _ => {
            return Err(Error::InvalidParameter(
                "histogram JSON needs exactly one of `counts` or `cells`".into(),
            ))
        }
    };
    if h.n() != doc.n {
        return Err(Error::InvalidParameter(format!(
            "declared n = {} but counts sum to {}",
            doc.n,
            h.n()
        )));
    }
    Ok(h)
}
