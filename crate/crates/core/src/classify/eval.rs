use serde::{Deserialize, Serialize};

use super::{predict, train_classifier, ClassifierModel, ClassifierParams, FeatureConfig, FeatureVector};
use crate::corpus::Category;
use crate::error::{Error, Result};
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub category: Category,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold items of this class.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Rows are gold classes, columns predictions, both in
    /// [`Category::ALL`] order.
    pub confusion: [[usize; 3]; 3],
    pub per_class: [ClassMetrics; 3],
    pub macro_f1: f64,
    pub accuracy: f64,
    /// Cohen's kappa between gold and predictions; `None` when chance
    /// agreement is 1.
    pub kappa: Option<f64>,
    pub n: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn report_from_predictions(gold: &[Category], predicted: &[Category]) -> Result<EvalReport> {
    if gold.is_empty() {
        return Err(Error::Empty("gold labels"));
    }
    if gold.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "{} gold labels but {} predictions",
            gold.len(),
            predicted.len()
        )));
    }
    let mut cm = [[0usize; 3]; 3];
    for (g, p) in gold.iter().zip(predicted) {
        cm[g.index()][p.index()] += 1;
    }
    let n = gold.len();
    let row = |c: usize| cm[c].iter().sum::<usize>();
    let col = |c: usize| (0..3).map(|r| cm[r][c]).sum::<usize>();
    let per_class = std::array::from_fn(|c| {
        let precision = ratio(cm[c][c], col(c));
        let recall = ratio(cm[c][c], row(c));
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            category: Category::ALL[c],
            precision,
            recall,
            f1,
            support: row(c),
        }
    });
    let trace: usize = (0..3).map(|c| cm[c][c]).sum();
    let marginal: usize = (0..3).map(|c| row(c) * col(c)).sum();
    let kappa = (marginal != n * n).then(|| {
        let nn = (n * n) as f64;
        (trace as f64 * n as f64 - marginal as f64) / (nn - marginal as f64)
    });
    let macro_f1 = per_class.iter().map(|m: &ClassMetrics| m.f1).sum::<f64>() / 3.0;
    Ok(EvalReport {
        confusion: cm,
        per_class,
        macro_f1,
        accuracy: trace as f64 / n as f64,
        kappa,
        n,
    })
}

pub fn evaluate(model: &ClassifierModel, gold: &[(FeatureVector, Category)]) -> Result<EvalReport> {
    let labels: Vec<Category> = gold.iter().map(|(_, c)| *c).collect();
    let predicted: Vec<Category> = gold.iter().map(|(fv, _)| predict(model, fv).category).collect();
    report_from_predictions(&labels, &predicted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    /// Fold index of every input item.
    pub folds: Vec<usize>,
    pub fold_macro_f1: Vec<f64>,
    pub mean_macro_f1: f64,
    /// Sample standard deviation (k - 1 denominator).
    pub std_macro_f1: f64,
}

/// Folds are stratified by class and seeded with `params.seed`; every fold
/// trains with the same params.
pub fn cross_validate(
    data: &[(FeatureVector, Category)],
    k: usize,
    params: &ClassifierParams,
    features: FeatureConfig,
) -> Result<CvReport> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if data.len() < k {
        return Err(Error::invalid(format!("{} items cannot fill {k} folds", data.len())));
    }
    params.validate()?;
    let labels: Vec<usize> = data.iter().map(|(_, c)| c.index()).collect();
    let folds = sampling::stratified_folds(&labels, k, params.seed);
    let mut scores = Vec::with_capacity(k);
    for fold in 0..k {
        let (test, train): (Vec<_>, Vec<_>) = data.iter().zip(&folds).partition(|(_, f)| **f == fold);
        let train: Vec<_> = train.into_iter().map(|(x, _)| x.clone()).collect();
        let test: Vec<_> = test.into_iter().map(|(x, _)| x.clone()).collect();
        let model = train_classifier(&train, params, features)?;
        scores.push(evaluate(&model, &test)?.macro_f1);
    }
    let mean = scores.iter().sum::<f64>() / k as f64;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    Ok(CvReport {
        k,
        folds,
        fold_macro_f1: scores,
        mean_macro_f1: mean,
        std_macro_f1: var.sqrt(),
    })
}
