use std::collections::HashMap;

use super::{best_tag, score_with, scored_features, Tag, TaggedSentence, TaggerFeatures, TaggerModel, TrainingMeta};
use crate::error::{Error, Result};
use crate::sampling;

/// Weight plus the bookkeeping for lazy averaging.
#[derive(Default, Clone, Copy)]
struct Cell {
    total: f64,
    stamp: u64,
}

struct Averager {
    weights: HashMap<String, HashMap<Tag, f64>>,
    cells: HashMap<(String, Tag), Cell>,
    instances: u64,
}

impl Averager {
    fn bump(&mut self, feature: &str, tag: Tag, delta: f64) {
        let per_tag = self.weights.entry(feature.to_string()).or_default();
        let w = per_tag.entry(tag).or_insert(0.0);
        let cell = self.cells.entry((feature.to_string(), tag)).or_default();
        cell.total += (self.instances - cell.stamp) as f64 * *w;
        cell.stamp = self.instances;
        *w += delta;
    }

    fn update(&mut self, truth: Tag, guess: Tag, features: &[String]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        for f in features {
            self.bump(f, truth, 1.0);
            self.bump(f, guess, -1.0);
        }
    }

    fn averaged(self) -> HashMap<String, HashMap<Tag, f64>> {
        let n = self.instances as f64;
        let mut out: HashMap<String, HashMap<Tag, f64>> = HashMap::new();
        for (feature, per_tag) in self.weights {
            for (tag, w) in per_tag {
                let cell = self.cells[&(feature.clone(), tag)];
                let total = cell.total + (self.instances - cell.stamp) as f64 * w;
                let avg = total / n;
                if avg != 0.0 {
                    out.entry(feature.clone()).or_default().insert(tag, avg);
                }
            }
        }
        out
    }
}

/// Averaged-perceptron training over `source` followed by `target`. Sentence
/// order is reshuffled each epoch from a generator seeded with `seed`; the
/// previous-tag feature uses the tag predicted during training.
pub fn train_tagger(
    source: &[TaggedSentence],
    target: &[TaggedSentence],
    features: TaggerFeatures,
    epochs: usize,
    seed: u64,
) -> Result<TaggerModel> {
    if epochs == 0 {
        return Err(Error::invalid("tagger epochs must be positive"));
    }
    let corpus: Vec<&TaggedSentence> = source.iter().chain(target).collect();
    if corpus.iter().all(|s| s.is_empty()) {
        return Err(Error::Empty("tagger training corpus"));
    }
    let mut rng = sampling::rng(seed);
    let mut avg = Averager {
        weights: HashMap::new(),
        cells: HashMap::new(),
        instances: 0,
    };
    for _ in 0..epochs {
        for idx in sampling::shuffled_indices(corpus.len(), &mut rng) {
            let sent = corpus[idx];
            let mut prev = None;
            for (i, &gold) in sent.tags.iter().enumerate() {
                let feats = scored_features(&features, &sent.tokens, i, prev, sent.domain);
                let guess = best_tag(&score_with(&avg.weights, &feats));
                avg.update(gold, guess, &feats);
                prev = Some(guess);
            }
        }
    }
    Ok(TaggerModel::from_weights(
        avg.averaged(),
        features,
        TrainingMeta { epochs, seed },
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{tag, tagger_accuracy, Domain};
    use super::*;

    fn memorizable() -> Vec<TaggedSentence> {
        [
            vec![("i", "O"), ("miss", "V"), ("lil", "A"), ("b", "^"), ("!", ",")],
            vec![("@tyquan", "@"), ("opps", "N"), ("ran", "V")],
            vec![("#gbe", "#"), ("4", "$"), ("life", "N"), (":(", "E")],
            vec![("rip", "V"), ("lil", "A"), ("b", "^")],
            vec![("smh", "!"), ("the", "D"), ("opps", "N")],
        ]
        .iter()
        .map(|p| TaggedSentence::from_pairs(p, Domain::Target).unwrap())
        .collect()
    }

    #[test]
    fn memorizes_training_set() {
        let data = memorizable();
        let model = train_tagger(&[], &data, TaggerFeatures::default(), 10, 1).unwrap();
        assert_eq!(tagger_accuracy(&model, &data).unwrap(), 1.0);
        let t = tag(&model, data[1].tokens(), Domain::Target);
        assert_eq!(t, data[1].tags());
    }

    #[test]
    fn seven_of_ten() {
        let data = memorizable();
        let model = train_tagger(&[], &data, TaggerFeatures::default(), 10, 1).unwrap();
        // 10 gold tokens, 3 of them deliberately mislabelled.
        let gold = vec![
            TaggedSentence::from_pairs(
                &[("i", "O"), ("miss", "N"), ("lil", "A"), ("b", "^"), ("!", ",")],
                Domain::Target,
            )
            .unwrap(),
            TaggedSentence::from_pairs(&[("@tyquan", "@"), ("opps", "V"), ("ran", "V")], Domain::Target).unwrap(),
            TaggedSentence::from_pairs(&[("smh", "!"), ("the", "N")], Domain::Target).unwrap(),
        ];
        assert!((tagger_accuracy(&model, &gold).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn all_wrong_is_zero() {
        let data = memorizable();
        let model = train_tagger(&[], &data, TaggerFeatures::default(), 10, 1).unwrap();
        let toks = data[0].tokens().to_vec();
        let wrong: Vec<Tag> = tag(&model, &toks, Domain::Target)
            .into_iter()
            .map(|t| super::super::TagSet::tags().nth((t.index() + 1) % 25).unwrap())
            .collect();
        let gold = vec![TaggedSentence::new(toks, wrong, Domain::Target).unwrap()];
        assert_eq!(tagger_accuracy(&model, &gold).unwrap(), 0.0);
    }

    #[test]
    fn deterministic() {
        let data = memorizable();
        let a = train_tagger(&data[..2], &data[2..], TaggerFeatures::default(), 5, 9).unwrap();
        let b = train_tagger(&data[..2], &data[2..], TaggerFeatures::default(), 5, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(train_tagger(&[], &[], TaggerFeatures::default(), 3, 0).is_err());
        assert!(train_tagger(&memorizable(), &[], TaggerFeatures::default(), 0, 0).is_err());
    }
}
