//! Cohen's kappa, agreement matrices and disagreement listings for two
//! annotators.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Annotation, Category, Codebook, LabeledCorpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairItem {
    pub id: String,
    pub label_a: String,
    pub label_b: String,
}

/// Two annotators' labels over the same items, with an ordered label domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationPair {
    items: Vec<PairItem>,
    labels: Vec<String>,
}

/// Which label space to compare annotators in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelLevel {
    /// The three collapsed categories.
    #[default]
    Collapsed,
    /// The codebook's fine codes.
    Fine,
}

impl std::str::FromStr for LabelLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collapsed" => Ok(LabelLevel::Collapsed),
            "fine" => Ok(LabelLevel::Fine),
            other => Err(Error::invalid(format!("unknown label level {other:?}"))),
        }
    }
}

impl AnnotationPair {
    pub fn new<I, S>(items: I, labels: Vec<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let domain: HashSet<&str> = labels.iter().map(String::as_str).collect();
        if domain.len() != labels.len() {
            return Err(Error::invalid("label domain has duplicates"));
        }
        let mut ids = HashSet::new();
        let mut out = Vec::new();
        for (id, a, b) in items {
            let item = PairItem {
                id: id.into(),
                label_a: a.into(),
                label_b: b.into(),
            };
            for l in [&item.label_a, &item.label_b] {
                if !domain.contains(l.as_str()) {
                    return Err(Error::invalid(format!(
                        "label {l:?} on item {:?} is outside the label domain",
                        item.id
                    )));
                }
            }
            if !ids.insert(item.id.clone()) {
                return Err(Error::invalid(format!("duplicate item id {:?}", item.id)));
            }
            out.push(item);
        }
        Ok(AnnotationPair { items: out, labels })
    }

    /// Pairs two annotation lists on tweet id. Items are ordered as in `a`;
    /// tweets coded by only one side are skipped.
    pub fn from_annotations(
        a: &[Annotation],
        b: &[Annotation],
        codebook: &Codebook,
        level: LabelLevel,
    ) -> Result<Self> {
        let label = |ann: &Annotation| -> Result<String> {
            Ok(match level {
                LabelLevel::Collapsed => codebook.collapse(&ann.fine_code)?.as_str().to_string(),
                LabelLevel::Fine => {
                    codebook.collapse(&ann.fine_code)?;
                    ann.fine_code.clone()
                }
            })
        };
        let b_by_id: HashMap<&str, &Annotation> = b.iter().map(|x| (x.tweet_id.as_str(), x)).collect();
        let mut items = Vec::new();
        for x in a {
            if let Some(y) = b_by_id.get(x.tweet_id.as_str()) {
                items.push((x.tweet_id.clone(), label(x)?, label(y)?));
            }
        }
        let labels = match level {
            LabelLevel::Collapsed => Category::ALL.iter().map(|c| c.as_str().to_string()).collect(),
            LabelLevel::Fine => codebook.fine_codes().map(String::from).collect(),
        };
        AnnotationPair::new(items, labels)
    }

    /// Pairs two annotators inside one corpus.
    pub fn from_corpus(
        corpus: &LabeledCorpus,
        annotator_a: &str,
        annotator_b: &str,
        level: LabelLevel,
    ) -> Result<Self> {
        let pick = |who: &str| -> Vec<Annotation> {
            corpus
                .annotations()
                .iter()
                .filter(|x| x.annotator_id == who)
                .cloned()
                .collect()
        };
        let a = pick(annotator_a);
        let b = pick(annotator_b);
        if a.is_empty() || b.is_empty() {
            let missing = if a.is_empty() { annotator_a } else { annotator_b };
            return Err(Error::invalid(format!("annotator {missing:?} has no annotations")));
        }
        // Keep corpus tweet order rather than annotation order.
        let pos: HashMap<&str, usize> = corpus
            .tweets()
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect();
        let mut a = a;
        a.sort_by_key(|x| pos[x.tweet_id.as_str()]);
        Self::from_annotations(&a, &b, corpus.codebook(), level)
    }

    pub fn items(&self) -> &[PairItem] {
        &self.items
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The same pair with annotators swapped.
    pub fn swapped(&self) -> Self {
        AnnotationPair {
            items: self
                .items
                .iter()
                .map(|i| PairItem {
                    id: i.id.clone(),
                    label_a: i.label_b.clone(),
                    label_b: i.label_a.clone(),
                })
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub n_items: usize,
}

/// Square count matrix; rows are annotator A's labels, columns B's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl AgreementMatrix {
    pub fn diagonal(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn get(&self, a: &str, b: &str) -> Option<usize> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.counts[i][j])
    }
}

pub fn agreement_matrix(pair: &AnnotationPair) -> AgreementMatrix {
    let index: HashMap<&str, usize> = pair.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let k = pair.labels.len();
    let mut counts = vec![vec![0usize; k]; k];
    for item in &pair.items {
        counts[index[item.label_a.as_str()]][index[item.label_b.as_str()]] += 1;
    }
    AgreementMatrix {
        labels: pair.labels.clone(),
        counts,
    }
}

/// Cohen's kappa from the agreement matrix: `(p_o - p_e) / (1 - p_e)` with
/// `p_e` the sum over labels of the product of the two marginal rates.
pub fn cohen_kappa(pair: &AnnotationPair) -> Result<KappaResult> {
    let n = pair.len();
    if n == 0 {
        return Err(Error::Empty("annotation pair has no items"));
    }
    let m = agreement_matrix(pair);
    let nf = n as f64;
    let k = m.labels.len();
    let observed = m.diagonal() as f64 / nf;
    let mut expected = 0.0;
    for i in 0..k {
        let row: usize = m.counts[i].iter().sum();
        let col: usize = (0..k).map(|r| m.counts[r][i]).sum();
        // Integer product keeps the marginal term exact and symmetric in (a, b).
        expected += (row * col) as f64;
    }
    let expected = expected / (nf * nf);
    if expected >= 1.0 {
        return Err(Error::KappaUndefined);
    }
    Ok(KappaResult {
        kappa: (observed - expected) / (1.0 - expected),
        observed_agreement: observed,
        expected_agreement: expected,
        n_items: n,
    })
}

/// Items the two annotators labelled differently, in input order.
pub fn disagreements(pair: &AnnotationPair) -> Vec<PairItem> {
    pair.items.iter().filter(|i| i.label_a != i.label_b).cloned().collect()
}
