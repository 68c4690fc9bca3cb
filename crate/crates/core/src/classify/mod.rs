//! Tweet features and a one-vs-rest linear max-margin classifier over
//! {aggression, grief, other}.
//!
//! Each class gets a binary separator trained by stochastic subgradient
//! descent on the L2-regularized hinge loss (Pegasos): at step `t` the step
//! size is `1 / (lambda * t)`, the weights shrink by `1 - 1/t`, and examples
//! inside the margin add `step * y * x`. The bias is treated as a weight on a
//! constant feature and is regularized with the rest.

mod eval;
mod features;
mod io;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use eval::{cross_validate, evaluate, report_from_predictions, ClassMetrics, CvReport, EvalReport};
pub use features::{extract_features, FeatureConfig, FeatureVector};
pub use io::{read_model, write_model, MODEL_HEADER};

use crate::corpus::Category;
use crate::error::{Error, Result};
use crate::sampling;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Loss multipliers in class order; `None` weighs every class equally.
    pub class_weights: Option<[f64; 3]>,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            lambda: 0.01,
            epochs: 50,
            seed: 1,
            class_weights: None,
        }
    }
}

impl ClassifierParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("classifier epochs must be positive"));
        }
        if let Some(w) = self.class_weights {
            if w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::invalid("class weights must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    weights: [BTreeMap<String, f64>; 3],
    bias: [f64; 3],
    params: ClassifierParams,
    features: FeatureConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub category: Category,
    /// Scores in [`Category::ALL`] order.
    pub scores: [f64; 3],
}

impl ClassifierModel {
    /// Zero weights are dropped.
    pub fn from_parts(
        weights: [BTreeMap<String, f64>; 3],
        bias: [f64; 3],
        params: ClassifierParams,
        features: FeatureConfig,
    ) -> Self {
        let weights = weights.map(|mut w| {
            w.retain(|_, v| *v != 0.0);
            w
        });
        ClassifierModel {
            weights,
            bias,
            params,
            features,
        }
    }

    pub fn classes(&self) -> [Category; 3] {
        Category::ALL
    }

    pub fn weights(&self, class: Category) -> &BTreeMap<String, f64> {
        &self.weights[class.index()]
    }

    pub fn bias(&self, class: Category) -> f64 {
        self.bias[class.index()]
    }

    pub fn params(&self) -> &ClassifierParams {
        &self.params
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.features
    }
}

/// `score_c = w_c . x + b_c`; the highest score wins and exact ties go to the
/// earlier class in aggression, grief, other order.
pub fn predict(model: &ClassifierModel, fv: &FeatureVector) -> Prediction {
    let mut scores = model.bias;
    for (c, score) in scores.iter_mut().enumerate() {
        let w = &model.weights[c];
        let dot: f64 = fv.iter().map(|(f, v)| w.get(f).map_or(0.0, |wf| wf * v)).sum();
        *score += dot;
    }
    let mut best = 0;
    for c in 1..3 {
        if scores[c] > scores[best] {
            best = c;
        }
    }
    Prediction {
        category: Category::ALL[best],
        scores,
    }
}

/// One binary separator stored as `scale * v`, so the per-step shrink is O(1).
struct ScaledWeights {
    v: Vec<f64>,
    scale: f64,
}

impl ScaledWeights {
    fn dot(&self, x: &[(usize, f64)]) -> f64 {
        self.scale * x.iter().map(|&(i, xi)| self.v[i] * xi).sum::<f64>()
    }

    fn shrink(&mut self, factor: f64) {
        if factor == 0.0 {
            self.v.iter_mut().for_each(|x| *x = 0.0);
            self.scale = 1.0;
        } else {
            self.scale *= factor;
        }
    }

    fn add(&mut self, x: &[(usize, f64)], coef: f64) {
        let c = coef / self.scale;
        for &(i, xi) in x {
            self.v[i] += c * xi;
        }
    }
}

pub fn train_classifier(
    data: &[(FeatureVector, Category)],
    params: &ClassifierParams,
    features: FeatureConfig,
) -> Result<ClassifierModel> {
    if data.is_empty() {
        return Err(Error::Empty("classifier training data"));
    }
    params.validate()?;

    // Index 0 is the constant bias feature.
    let names: BTreeSet<&str> = data.iter().flat_map(|(fv, _)| fv.iter().map(|(k, _)| k)).collect();
    let names: Vec<&str> = names.into_iter().collect();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i + 1)).collect();
    let rows: Vec<Vec<(usize, f64)>> = data
        .iter()
        .map(|(fv, _)| {
            std::iter::once((0, 1.0))
                .chain(fv.iter().map(|(k, v)| (index[k], v)))
                .collect()
        })
        .collect();
    let dim = names.len() + 1;
    let mut sep: Vec<ScaledWeights> = (0..3)
        .map(|_| ScaledWeights {
            v: vec![0.0; dim],
            scale: 1.0,
        })
        .collect();

    let mut rng = sampling::rng(params.seed);
    let mut t: u64 = 0;
    for _ in 0..params.epochs {
        for i in sampling::shuffled_indices(data.len(), &mut rng) {
            t += 1;
            let eta = 1.0 / (params.lambda * t as f64);
            let label = data[i].1;
            let cw = params.class_weights.map_or(1.0, |w| w[label.index()]);
            let x = &rows[i];
            for (c, w) in sep.iter_mut().enumerate() {
                let y = if label.index() == c { 1.0 } else { -1.0 };
                let margin = y * w.dot(x);
                w.shrink(1.0 - 1.0 / t as f64);
                if margin < 1.0 {
                    w.add(x, eta * y * cw);
                }
            }
        }
    }

    let mut weights: [BTreeMap<String, f64>; 3] = Default::default();
    let mut bias = [0.0; 3];
    for (c, w) in sep.iter().enumerate() {
        bias[c] = w.scale * w.v[0];
        for (j, name) in names.iter().enumerate() {
            let val = w.scale * w.v[j + 1];
            if val != 0.0 {
                weights[c].insert(name.to_string(), val);
            }
        }
    }
    Ok(ClassifierModel::from_parts(weights, bias, params.clone(), features))
}
