//! Plain-text renderings of reports.

use std::fmt::Write as _;

use streetlex::agreement::AgreementMatrix;
use streetlex::classify::CvReport;
use streetlex::pipeline::PipelineReport;
use streetlex::{Category, EvalReport, KappaResult};

pub fn kappa(k: &KappaResult, m: &AgreementMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kappa     {:.6}", k.kappa);
    let _ = writeln!(s, "observed  {:.6}", k.observed_agreement);
    let _ = writeln!(s, "expected  {:.6}", k.expected_agreement);
    let _ = writeln!(s, "items     {}", k.n_items);
    s.push_str(&matrix(&m.labels, &m.counts));
    s
}

fn matrix(labels: &[String], counts: &[Vec<usize>]) -> String {
    let w = labels.iter().map(String::len).max().unwrap_or(0).max(6);
    let mut s = format!("{:w$}", "");
    for l in labels {
        let _ = write!(s, " {l:>w$}");
    }
    s.push('\n');
    for (l, row) in labels.iter().zip(counts) {
        let _ = write!(s, "{l:w$}");
        for c in row {
            let _ = write!(s, " {c:>w$}");
        }
        s.push('\n');
    }
    s
}

pub fn eval(r: &EvalReport) -> String {
    let mut s = String::from("class        precision  recall      f1  support\n");
    for m in &r.per_class {
        let _ = writeln!(
            s,
            "{:<12} {:>9.4} {:>7.4} {:>7.4} {:>8}",
            m.category.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        );
    }
    let kappa = r.kappa.map_or("undefined".to_string(), |k| format!("{k:.4}"));
    let _ = writeln!(
        s,
        "macro-F1 {:.4}  accuracy {:.4}  kappa {kappa}  n {}",
        r.macro_f1, r.accuracy, r.n
    );
    s.push_str("confusion (rows gold, columns predicted)\n");
    let labels: Vec<String> = Category::ALL.iter().map(|c| c.as_str().to_string()).collect();
    let counts: Vec<Vec<usize>> = r.confusion.iter().map(|row| row.to_vec()).collect();
    s.push_str(&matrix(&labels, &counts));
    s
}

pub fn cv(r: &CvReport) -> String {
    let mut s = String::new();
    for (i, f) in r.fold_macro_f1.iter().enumerate() {
        let _ = writeln!(s, "fold {i}  macro-F1 {f:.4}");
    }
    let _ = writeln!(
        s,
        "k {}  mean macro-F1 {:.4}  std {:.4}",
        r.k, r.mean_macro_f1, r.std_macro_f1
    );
    s
}

pub fn pipeline(r: &PipelineReport) -> String {
    let mut s = String::from("# effective configuration\n");
    s.push_str(&r.config.to_toml());
    s.push_str("\n# run\n");
    let _ = writeln!(s, "parallel pairs      {}", r.parallel_pairs);
    let _ = writeln!(s, "glossary entries    {}", r.glossary_entries);
    let _ = writeln!(
        s,
        "tagger sentences    {} train, {} held out",
        r.tagger_train_sentences, r.tagger_test_sentences
    );
    if let Some(a) = r.tagger_accuracy {
        let _ = writeln!(s, "tagger accuracy     {a:.4}");
    }
    let _ = writeln!(s, "tweets              {} ({} labeled)", r.tweets, r.labeled_tweets);
    let _ = writeln!(s, "classifier split    {} train, {} test", r.train_size, r.test_size);
    s.push_str("\n# held-out evaluation\n");
    s.push_str(&eval(&r.evaluation));
    let _ = writeln!(
        s,
        "\nmajority baseline: macro-F1 {:.4}  accuracy {:.4}",
        r.majority_baseline.macro_f1, r.majority_baseline.accuracy
    );
    s
}
