//! AHP ranking of portfolio alternatives from measured iteration counts.
//!
//! Each attribute (problem instance) contributes a priority vector derived
//! from the ratio matrix of its column-normalized values. The weighted sum
//! of these vectors orders the alternatives: a smaller priority means fewer
//! iterations and therefore a better rank.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Relative tolerance under which two priorities count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AhpError {
    #[error("decision matrix needs at least one alternative and one attribute")]
    Empty,
    #[error("row {row} has {got} values, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("objective value for `{alternative}` on `{attribute}` must be positive, got {value}")]
    NonPositive {
        alternative: String,
        attribute: String,
        value: f64,
    },
    #[error("expected {expected} attribute weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("attribute weights must be non-negative and sum to 1")]
    BadWeights,
    #[error("attribute index {0} out of range")]
    AttributeIndex(usize),
    #[error("label count mismatch: {0}")]
    Labels(String),
    #[error("missing value for `{alternative}` on `{attribute}`")]
    MissingCell {
        alternative: String,
        attribute: String,
    },
    #[error("duplicate value for `{alternative}` on `{attribute}`")]
    DuplicateCell {
        alternative: String,
        attribute: String,
    },
    #[error("input line {line}: {message}")]
    Input { line: usize, message: String },
}

/// Column-normalized objective values, alternatives by attributes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    pub alternatives: Vec<String>,
    pub attributes: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl DecisionMatrix {
    pub fn column(&self, attribute: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[attribute]).collect()
    }
}

/// Normalizes each column of raw objective values `obj[alternative][attribute]`
/// by its sum.
pub fn decision_matrix(
    obj: &[Vec<f64>],
    alternatives: &[String],
    attributes: &[String],
) -> Result<DecisionMatrix, AhpError> {
    if obj.is_empty() || attributes.is_empty() {
        return Err(AhpError::Empty);
    }
    if alternatives.len() != obj.len() {
        return Err(AhpError::Labels(format!(
            "{} alternatives for {} rows",
            alternatives.len(),
            obj.len()
        )));
    }
    for (row, values) in obj.iter().enumerate() {
        if values.len() != attributes.len() {
            return Err(AhpError::Ragged {
                row,
                got: values.len(),
                expected: attributes.len(),
            });
        }
        for (col, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AhpError::NonPositive {
                    alternative: alternatives[row].clone(),
                    attribute: attributes[col].clone(),
                    value: v,
                });
            }
        }
    }
    let sums: Vec<f64> = (0..attributes.len())
        .map(|c| obj.iter().map(|row| row[c]).sum())
        .collect();
    let values = obj
        .iter()
        .map(|row| row.iter().zip(&sums).map(|(v, s)| v / s).collect())
        .collect();
    Ok(DecisionMatrix {
        alternatives: alternatives.to_vec(),
        attributes: attributes.to_vec(),
        values,
    })
}

/// Pairwise ratio matrix `omega[j][k] = a_j / a_k` of one column.
pub fn ratio_matrix(column: &[f64]) -> Vec<Vec<f64>> {
    column
        .iter()
        .map(|&a| column.iter().map(|&b| a / b).collect())
        .collect()
}

fn log_row_means(omega: &[Vec<f64>]) -> Vec<f64> {
    omega
        .iter()
        .map(|row| row.iter().map(|v| v.ln()).sum::<f64>() / row.len() as f64)
        .collect()
}

/// Geometric mean of each row of a ratio matrix, computed through logs.
pub fn geometric_row_means(omega: &[Vec<f64>]) -> Vec<f64> {
    log_row_means(omega).into_iter().map(f64::exp).collect()
}

/// Normalized priority vector of one attribute.
///
/// The log means are shifted by their maximum before exponentiating. The
/// shift cancels in the normalization but keeps the largest weight at
/// exactly 1, which avoids overflow and rounding drift.
pub fn priority_vector(matrix: &DecisionMatrix, attribute: usize) -> Result<Vec<f64>, AhpError> {
    if attribute >= matrix.attributes.len() {
        return Err(AhpError::AttributeIndex(attribute));
    }
    let logs = log_row_means(&ratio_matrix(&matrix.column(attribute)));
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub alternatives: Vec<String>,
    pub priorities: Vec<f64>,
    /// Competition ranks, 1 = best (smallest priority).
    pub ranks: Vec<usize>,
    pub tied: Vec<bool>,
}

impl RankVector {
    /// CSV with header `alternative,priority,rank`, in input order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alternative,priority,rank\n");
        for i in 0..self.alternatives.len() {
            out.push_str(&format!(
                "{},{:.10},{}\n",
                csv_field(&self.alternatives[i]),
                self.priorities[i],
                self.ranks[i]
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Full audit trail of a ranking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankAudit {
    pub matrix: DecisionMatrix,
    pub attribute_weights: Vec<f64>,
    pub priority_vectors: Vec<Vec<f64>>,
    pub result: RankVector,
}

impl RankAudit {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit serializes")
    }
}

fn resolve_weights(matrix: &DecisionMatrix, weights: Option<&[f64]>) -> Result<Vec<f64>, AhpError> {
    let g = matrix.attributes.len();
    let Some(w) = weights else {
        return Ok(vec![1.0 / g as f64; g]);
    };
    if w.len() != g {
        return Err(AhpError::WeightCount {
            expected: g,
            got: w.len(),
        });
    }
    if w.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(AhpError::BadWeights);
    }
    Ok(w.to_vec())
}

/// Weighted sum of the attribute priority vectors and the resulting ranks.
pub fn rank_alternatives(
    matrix: &DecisionMatrix,
    weights: Option<&[f64]>,
) -> Result<RankVector, AhpError> {
    Ok(rank_with_audit(matrix, weights)?.result)
}

pub fn rank_with_audit(
    matrix: &DecisionMatrix,
    weights: Option<&[f64]>,
) -> Result<RankAudit, AhpError> {
    let weights = resolve_weights(matrix, weights)?;
    let n = matrix.alternatives.len();
    let pvs = (0..matrix.attributes.len())
        .map(|a| priority_vector(matrix, a))
        .collect::<Result<Vec<_>, _>>()?;
    let priorities: Vec<f64> = (0..n)
        .map(|i| weights.iter().zip(&pvs).map(|(w, pv)| w * pv[i]).sum())
        .collect();
    let (ranks, tied) = competition_ranks(&priorities);
    Ok(RankAudit {
        matrix: matrix.clone(),
        attribute_weights: weights,
        priority_vectors: pvs,
        result: RankVector {
            alternatives: matrix.alternatives.clone(),
            priorities,
            ranks,
            tied,
        },
    })
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Ascending competition ranking: tied values share the smaller rank and the
/// following rank is skipped. Ties keep input order.
fn competition_ranks(values: &[f64]) -> (Vec<usize>, Vec<bool>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0; n];
    let mut tied = vec![false; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && same(values[order[start]], values[order[end]]) {
            end += 1;
        }
        for &i in &order[start..end] {
            ranks[i] = start + 1;
            tied[i] = end - start > 1;
        }
        start = end;
    }
    (ranks, tied)
}

/// Raw objective table read from `alternative,attribute,obj_value` rows.
/// Labels keep their order of first appearance.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveTable {
    pub alternatives: Vec<String>,
    pub attributes: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl ObjectiveTable {
    pub fn decision_matrix(&self) -> Result<DecisionMatrix, AhpError> {
        decision_matrix(&self.values, &self.alternatives, &self.attributes)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alternative,attribute,obj_value\n");
        for (i, alt) in self.alternatives.iter().enumerate() {
            for (j, attr) in self.attributes.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(alt),
                    csv_field(attr),
                    self.values[i][j]
                ));
            }
        }
        out
    }
}

pub fn parse_objective_csv(text: &str) -> Result<ObjectiveTable, AhpError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| AhpError::Input {
        line: 1,
        message: e.to_string(),
    })?;
    let expected = ["alternative", "attribute", "obj_value"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(AhpError::Input {
            line: 1,
            message: "header must be `alternative,attribute,obj_value`".into(),
        });
    }
    let mut alternatives: Vec<String> = Vec::new();
    let mut attributes: Vec<String> = Vec::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| AhpError::Input {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(AhpError::Input {
                line,
                message: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let index_of = |labels: &mut Vec<String>, s: &str| {
            labels.iter().position(|l| l == s).unwrap_or_else(|| {
                labels.push(s.to_string());
                labels.len() - 1
            })
        };
        let alt = index_of(&mut alternatives, &record[0]);
        let attr = index_of(&mut attributes, &record[1]);
        let value: f64 = record[2].parse().map_err(|_| AhpError::Input {
            line,
            message: format!("`{}` is not a number", &record[2]),
        })?;
        if cells.insert((alt, attr), value).is_some() {
            return Err(AhpError::DuplicateCell {
                alternative: alternatives[alt].clone(),
                attribute: attributes[attr].clone(),
            });
        }
    }
    if alternatives.is_empty() {
        return Err(AhpError::Empty);
    }
    let mut values = vec![vec![0.0; attributes.len()]; alternatives.len()];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = *cells.get(&(i, j)).ok_or_else(|| AhpError::MissingCell {
                alternative: alternatives[i].clone(),
                attribute: attributes[j].clone(),
            })?;
        }
    }
    Ok(ObjectiveTable {
        alternatives,
        attributes,
        values,
    })
}
