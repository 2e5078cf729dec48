use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub year: f64,
    pub value: f64,
    pub unit: String,
}

/// Observed proxy of capacity over time. Years strictly increase and values
/// are positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySeries {
    pub label: String,
    pub observations: Vec<Observation>,
}

impl CapacitySeries {
    pub fn new(label: impl Into<String>, observations: Vec<Observation>) -> Result<Self> {
        let s = Self {
            label: label.into(),
            observations,
        };
        s.validate()?;
        Ok(s)
    }

    /// Series from `(year, value)` pairs with a blank unit.
    pub fn from_pairs(label: impl Into<String>, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            label,
            pairs
                .iter()
                .map(|&(year, value)| Observation {
                    year,
                    value,
                    unit: String::new(),
                })
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (i, o) in self.observations.iter().enumerate() {
            if !o.year.is_finite() {
                return Err(Error::Config(format!("{}: year {} is not finite", self.label, o.year)));
            }
            if !(o.value.is_finite() && o.value > 0.0) {
                return Err(Error::Domain {
                    arg: "value",
                    value: o.value,
                    reason: "observations must be positive",
                });
            }
            if i > 0 && o.year <= self.observations[i - 1].year {
                return Err(Error::Config(format!(
                    "{}: years must strictly increase ({} after {})",
                    self.label,
                    o.year,
                    self.observations[i - 1].year
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn years(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.year).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }
}

/// Reads series from CSV with header columns `year`, `value` and optional
/// `label` and `unit`, in any order. Rows are grouped by label in order of
/// first appearance; without a `label` column every row belongs to one series
/// labelled `series`.
pub fn read_series_csv(text: &str) -> Result<Vec<CapacitySeries>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Config("series CSV is empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let missing = |name: &str| Error::Syntax {
        line: 1,
        column: 1,
        message: format!("missing `{name}` column"),
    };
    let year_i = find("year").ok_or_else(|| missing("year"))?;
    let value_i = find("value").ok_or_else(|| missing("value"))?;
    let label_i = find("label");
    let unit_i = find("unit");

    let mut out: Vec<CapacitySeries> = Vec::new();
    for (idx, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let err = |column: usize, message: String| Error::Syntax {
            line: idx + 1,
            column: column + 1,
            message,
        };
        if f.len() != cols.len() {
            return Err(err(0, format!("expected {} fields, found {}", cols.len(), f.len())));
        }
        let num = |k: usize| {
            f[k].parse::<f64>()
                .map_err(|_| err(k, format!("bad number `{}`", f[k])))
        };
        let obs = Observation {
            year: num(year_i)?,
            value: num(value_i)?,
            unit: unit_i.map(|k| f[k].to_string()).unwrap_or_default(),
        };
        let label = label_i.map_or("series", |k| f[k]);
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.observations.push(obs),
            None => out.push(CapacitySeries {
                label: label.to_string(),
                observations: vec![obs],
            }),
        }
    }
    for s in &out {
        s.validate()?;
    }
    Ok(out)
}
