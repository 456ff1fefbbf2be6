//! Real-valued vertex functions with an explicit support.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBall, SemiplanarGraph};

/// A real value per vertex, defined on `support`. Values outside the support
/// are meaningless and never read.
#[derive(Debug, Clone)]
pub struct ScalarField {
    values: Vec<f64>,
    support: Vec<bool>,
}

impl ScalarField {
    /// Field defined on every vertex.
    pub fn full(values: Vec<f64>) -> Self {
        let support = vec![true; values.len()];
        Self { values, support }
    }

    pub fn constant(vertex_count: usize, c: f64) -> Self {
        Self::full(vec![c; vertex_count])
    }

    /// Field defined only on the listed vertices.
    pub fn on_support(vertex_count: usize, entries: &[(usize, f64)]) -> Self {
        let mut values = vec![0.0; vertex_count];
        let mut support = vec![false; vertex_count];
        for &(v, x) in entries {
            values[v] = x;
            support[v] = true;
        }
        Self { values, support }
    }

    /// Seeded uniform random field on the full vertex set.
    pub fn random(vertex_count: usize, seed: u64, lo: f64, hi: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::full((0..vertex_count).map(|_| rng.gen_range(lo..hi)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_defined(&self, v: usize) -> bool {
        self.support[v]
    }

    pub fn get(&self, v: usize) -> Option<f64> {
        self.support[v].then(|| self.values[v])
    }

    /// Value at `v`; errors when `v` is outside the support.
    pub fn value(&self, v: usize) -> Result<f64> {
        self.get(v).ok_or(Error::MissingValue { vertex: v })
    }

    pub fn set(&mut self, v: usize, x: f64) {
        self.values[v] = x;
        self.support[v] = true;
    }

    pub fn support_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(|&v| self.support[v])
    }

    pub fn covers(&self, vertices: &[usize]) -> bool {
        vertices.iter().all(|&v| self.support[v])
    }

    /// `a*self + b*other` on the intersection of supports.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        let support = self
            .support
            .iter()
            .zip(&other.support)
            .map(|(&x, &y)| x && y)
            .collect();
        ScalarField { values, support }
    }

    /// Degree-weighted ball average `sum f d_x / sum d_x`.
    pub fn ball_average(&self, graph: &SemiplanarGraph, ball: &GraphBall) -> Result<f64> {
        let mut num = 0.0;
        for &v in &ball.members {
            num += self.value(v)? * graph.degree(v) as f64;
        }
        Ok(num / ball.volume as f64)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum DomainFile {
    Full,
    Region { support: Vec<usize> },
}

/// On-disk field format: a value per vertex plus the domain it is defined on.
#[derive(Debug, Serialize, Deserialize)]
struct FieldFile {
    values: Vec<f64>,
    domain: DomainFile,
}

pub fn save_field<P: AsRef<Path>>(field: &ScalarField, path: P) -> Result<()> {
    let full = field.support.iter().all(|&s| s);
    let file = FieldFile {
        values: field.values.clone(),
        domain: if full {
            DomainFile::Full
        } else {
            DomainFile::Region {
                support: field.support_vertices().collect(),
            }
        },
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(())
}

pub fn load_field<P: AsRef<Path>>(path: P, vertex_count: usize) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path)?;
    let file: FieldFile = serde_json::from_str(&text)?;
    if file.values.len() != vertex_count {
        return Err(Error::FileFormat {
            detail: format!(
                "field has {} values but the graph has {} vertices",
                file.values.len(),
                vertex_count
            ),
        });
    }
    let support = match file.domain {
        DomainFile::Full => vec![true; vertex_count],
        DomainFile::Region { support } => {
            let mut flags = vec![false; vertex_count];
            for v in support {
                if v >= vertex_count {
                    return Err(Error::FileFormat {
                        detail: format!("field domain names unknown vertex {v}"),
                    });
                }
                flags[v] = true;
            }
            flags
        }
    };
    Ok(ScalarField {
        values: file.values,
        support,
    })
}
