use serde::{Deserialize, Serialize};

use super::AccuracyMatrix;
use crate::error::{Error, Result};
use crate::ovo::argmax_first;

/// Winning model for one destination site (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestEntry {
    pub model: usize,
    pub site: usize,
}

/// One row per destination site: which foreign model scored highest there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestTable {
    pub rows: Vec<BestEntry>,
}

impl BestTable {
    /// Winning model indices in site order.
    pub fn models(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.model).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionResult {
    /// 0-based index of the elected local model.
    pub global_model: usize,
    /// How many sites named each model as their best.
    pub counts: Vec<usize>,
    pub best: BestTable,
}

/// Election plus the matrix it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionTrace {
    pub matrix: AccuracyMatrix,
    #[serde(flatten)]
    pub result: ElectionResult,
}

impl ElectionTrace {
    pub fn global_model(&self) -> usize {
        self.result.global_model
    }
}

/// Column-wise argmax over foreign models; ties go to the smallest index.
pub fn select_best_per_site(matrix: &AccuracyMatrix) -> BestTable {
    let n = matrix.n();
    let rows = (0..n)
        .map(|site| {
            let mut best: Option<usize> = None;
            for model in (0..n).filter(|&m| m != site) {
                if best.is_none_or(|b| matrix.get(model, site) > matrix.get(b, site)) {
                    best = Some(model);
                }
            }
            BestEntry {
                model: best.expect("matrix has at least two sites"),
                site,
            }
        })
        .collect();
    BestTable { rows }
}

/// Mode of the best-model column; frequency ties go to the smallest index.
pub fn elect_global_model(best: &BestTable) -> Result<ElectionResult> {
    if best.rows.is_empty() {
        return Err(Error::EmptyInput("best table"));
    }
    let n = best
        .rows
        .iter()
        .map(|r| r.model.max(r.site) + 1)
        .max()
        .unwrap_or(0)
        .max(best.rows.len());
    let mut counts = vec![0usize; n];
    for r in &best.rows {
        counts[r.model] += 1;
    }
    Ok(ElectionResult {
        global_model: argmax_first(&counts),
        counts,
        best: best.clone(),
    })
}

/// Election straight from a matrix, bypassing training.
pub fn elect_from_matrix(matrix: AccuracyMatrix) -> ElectionTrace {
    let best = select_best_per_site(&matrix);
    let result = elect_global_model(&best).expect("matrix has at least two sites");
    ElectionTrace { matrix, result }
}
