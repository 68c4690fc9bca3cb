//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streetlex::affect::affect_features;
use streetlex::agreement::{cohen_kappa, AnnotationPair};
use streetlex::align::{extract_glossary, train_model1, ParallelPair};
use streetlex::classify::{predict, report_from_predictions, train_classifier};
use streetlex::config::PipelineConfig;
use streetlex::corpus::{tokenize, TokenKind};
use streetlex::pipeline::{run_pipeline, PipelineInputs};
use streetlex::postag::{tagger_accuracy, train_tagger, Domain, TagSet, TaggerFeatures};
use streetlex::synth;
use streetlex::{Category, ClassifierParams, FeatureConfig, FeatureVector, TaggedSentence};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

// 1. Kappa against a brute-force evaluation of the formula.

fn brute_kappa(a: &[usize], b: &[usize]) -> Option<f64> {
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    // Chance agreement as the rate of matches over all n^2 cross pairings.
    let mut chance = 0usize;
    for x in a {
        for y in b {
            chance += usize::from(x == y);
        }
    }
    let po = agree / n;
    let pe = chance as f64 / (n * n);
    (pe < 1.0).then(|| (po - pe) / (1.0 - pe))
}

fn labels3() -> Vec<String> {
    ["aggression", "grief", "other"].map(String::from).to_vec()
}

fn pair_of(a: &[usize], b: &[usize]) -> AnnotationPair {
    let l = labels3();
    let items: Vec<(String, String, String)> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&x, &y))| (format!("t{i}"), l[x].clone(), l[y].clone()))
        .collect();
    AnnotationPair::new(items, l).unwrap()
}

fn kappa_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    let mut undefined = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=50);
        // Skewed draws so some cases have degenerate marginals.
        let bias = rng.gen_range(0.0..1.0);
        let draw = |rng: &mut ChaCha8Rng| if rng.gen_bool(bias) { 0 } else { rng.gen_range(0..3) };
        let a: Vec<usize> = (0..n).map(|_| draw(&mut rng)).collect();
        let b: Vec<usize> = (0..n).map(|_| draw(&mut rng)).collect();
        let got = cohen_kappa(&pair_of(&a, &b));
        match (brute_kappa(&a, &b), got) {
            (Some(want), Ok(k)) => worst = worst.max((want - k.kappa).abs()),
            (None, Err(_)) => undefined += 1,
            (want, got) => return Err(format!("case {case}: oracle {want:?}, implementation {got:?}")),
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;

    let a = [[0; 5], [1; 5]].concat();
    let b = vec![0, 0, 0, 0, 2, 1, 1, 1, 1, 2];
    let k = cohen_kappa(&pair_of(&a, &b)).map_err(|e| e.to_string())?;
    ensure((k.kappa - 2.0 / 3.0).abs() <= 1e-9, || {
        format!("fixture kappa {}", k.kappa)
    })?;
    ensure(
        (k.observed_agreement - 0.8).abs() <= 1e-12 && (k.expected_agreement - 0.4).abs() <= 1e-12,
        || format!("fixture p_o {} p_e {}", k.observed_agreement, k.expected_agreement),
    )?;
    within(start.elapsed(), 1.0)?;
    Ok(format!(
        "200 cases, max deviation {worst:e}, {undefined} undefined; fixture kappa {:.12}",
        k.kappa
    ))
}

// 2. Model 1.

fn pp(s: &[&str], g: &[&str]) -> ParallelPair {
    ParallelPair::new(s, g).unwrap()
}

fn model1() -> Outcome {
    let start = Instant::now();
    let toy = [pp(&["opp", "run"], &["enemy", "flee"]), pp(&["opp"], &["enemy"])];
    let toy_table = train_model1(&toy, 1, false).map_err(|e| e.to_string())?;
    // Hand EM step: opp sees enemy with weight 1/2 + 1 and flee with 1/2.
    for (g, s, want) in [
        ("enemy", "opp", 0.75),
        ("flee", "opp", 0.25),
        ("enemy", "run", 0.5),
        ("flee", "run", 0.5),
    ] {
        let got = toy_table.prob(g, s);
        ensure((got - want).abs() <= 1e-12, || {
            format!("t({g}|{s}) = {got}, want {want}")
        })?;
    }

    let pairs = synth::parallel_pairs(50, 3);
    let mut worst_sum = 0.0f64;
    for it in 1..=20 {
        let t = train_model1(&pairs, it, true).map_err(|e| e.to_string())?;
        for s in t.sources() {
            let total: f64 = t.distribution(s).map_or(0.0, |d| d.values().sum());
            worst_sum = worst_sum.max((total - 1.0).abs());
        }
    }
    ensure(worst_sum <= 1e-9, || format!("distribution sum off by {worst_sum:e}"))?;
    let t = train_model1(&pairs, 20, true).map_err(|e| e.to_string())?;
    let ll = t.log_likelihoods();
    ensure(ll.len() == 21, || format!("{} log-likelihood entries", ll.len()))?;
    for w in ll.windows(2) {
        // Relative slack for rounding once EM has converged.
        ensure(w[1] >= w[0] - 1e-12 * w[0].abs(), || {
            format!("log-likelihood fell {} -> {}", w[0], w[1])
        })?;
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "t(enemy|opp) = {:.12}; max sum error {worst_sum:e}; LL {:.3} -> {:.3}",
        toy_table.prob("enemy", "opp"),
        ll[0],
        ll[20]
    ))
}

// 3. Tagger.

fn memorizable(seed: u64) -> Vec<TaggedSentence> {
    let syms = TagSet::symbols();
    let words: Vec<(String, &str)> = (0..40).map(|i| (format!("w{i}"), syms[i % syms.len()])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..30)
        .map(|_| {
            let len = rng.gen_range(2..8);
            let pairs: Vec<(&str, &str)> = (0..len)
                .map(|_| {
                    let (w, t) = &words[rng.gen_range(0..words.len())];
                    (w.as_str(), *t)
                })
                .collect();
            TaggedSentence::from_pairs(&pairs, Domain::Target).unwrap()
        })
        .collect()
}

fn tagger() -> Outcome {
    let start = Instant::now();
    let corpus = memorizable(5);
    let model = train_tagger(&[], &corpus, TaggerFeatures::default(), 10, 5).map_err(|e| e.to_string())?;
    let train_acc = tagger_accuracy(&model, &corpus).map_err(|e| e.to_string())?;
    ensure(train_acc == 1.0, || {
        format!("memorizable training accuracy {train_acc}")
    })?;

    let d = synth::domain_shift(1);
    let aug = train_tagger(&d.source, &d.target_train, TaggerFeatures::default(), 10, 1).map_err(|e| e.to_string())?;
    let pooled_features = TaggerFeatures {
        augment: false,
        ..TaggerFeatures::default()
    };
    let pooled = train_tagger(&d.source, &d.target_train, pooled_features, 10, 1).map_err(|e| e.to_string())?;
    let a = tagger_accuracy(&aug, &d.target_test).map_err(|e| e.to_string())?;
    let p = tagger_accuracy(&pooled, &d.target_test).map_err(|e| e.to_string())?;
    ensure(a > p, || format!("augmented {a} not above pooled {p}"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "memorized {train_acc:.3}; target accuracy augmented {a:.4} vs pooled {p:.4}"
    ))
}

// 4. Classifier.

fn separable() -> Vec<(FeatureVector, Category)> {
    (0..30)
        .map(|i| {
            let c = Category::ALL[i % 3];
            let fv: FeatureVector = [
                (format!("own:{}", c.as_str()), 1.0),
                ("uni:the".to_string(), (i % 4) as f64),
            ]
            .into_iter()
            .collect();
            (fv, c)
        })
        .collect()
}

fn classifier() -> Outcome {
    use Category::{Aggression as A, Grief as G, Other as O};
    let start = Instant::now();
    let data = separable();
    let params = ClassifierParams {
        epochs: 50,
        ..ClassifierParams::default()
    };
    let model = train_classifier(&data, &params, FeatureConfig::default()).map_err(|e| e.to_string())?;
    let right = data.iter().filter(|(fv, c)| predict(&model, fv).category == *c).count();
    ensure(right == data.len(), || {
        format!("separable training accuracy {right}/{}", data.len())
    })?;

    let inputs = PipelineInputs {
        corpus: synth::planted_corpus(150, 7),
        tagged_source: synth::standard_sentences(60, 8),
        tagged_target: synth::tagged_tweets(60, 9),
        parallel: synth::parallel_pairs(300, 10),
        lexicon: synth::lexicon(),
    };
    let out = run_pipeline(&inputs, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    let r = &out.report;
    ensure(r.test_size == 45, || format!("held out {} of 150", r.test_size))?;
    let f1 = r.evaluation.macro_f1;
    let base = r.majority_baseline.macro_f1;
    ensure(f1 >= 0.9 && f1 > base, || {
        format!("planted macro-F1 {f1}, majority {base}")
    })?;

    // Hand-computed from the confusion matrix [[2,1,1],[0,3,0],[1,0,2]].
    let gold = [A, A, A, A, G, G, G, O, O, O];
    let pred = [A, A, G, O, G, G, G, A, O, O];
    let rep = report_from_predictions(&gold, &pred).map_err(|e| e.to_string())?;
    let want = [
        (2.0 / 3.0, 1.0 / 2.0, 4.0 / 7.0),
        (3.0 / 4.0, 1.0, 6.0 / 7.0),
        (2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0),
    ];
    for (m, (p, rc, f)) in rep.per_class.iter().zip(want) {
        for (got, w, what) in [(m.precision, p, "precision"), (m.recall, rc, "recall"), (m.f1, f, "f1")] {
            ensure((got - w).abs() <= 1e-12, || {
                format!("{} {what} {got}, want {w}", m.category.as_str())
            })?;
        }
    }
    ensure((rep.macro_f1 - 44.0 / 63.0).abs() <= 1e-12, || {
        format!("hand macro-F1 {}", rep.macro_f1)
    })?;
    ensure((rep.accuracy - 0.7).abs() <= 1e-12, || {
        format!("hand accuracy {}", rep.accuracy)
    })?;
    ensure(rep.kappa.is_some_and(|k| (k - 37.0 / 67.0).abs() <= 1e-12), || {
        format!("hand kappa {:?}", rep.kappa)
    })?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "separable {right}/30; planted macro-F1 {f1:.4} vs majority {base:.4}; hand report exact"
    ))
}

// 5. Glossary-mediated affect.

fn glossary_affect() -> Outcome {
    let lexicon = synth::lexicon();
    let table = train_model1(&synth::parallel_pairs(300, 10), 10, true).map_err(|e| e.to_string())?;
    let glossary = extract_glossary(&table, 0.5, 2).map_err(|e| e.to_string())?;
    // Slang whose learned gloss is scored, while the slang itself is not.
    let words: Vec<&str> = synth::SLANG
        .iter()
        .map(|(s, _)| *s)
        .filter(|s| lexicon.get(s).is_none())
        .filter(|s| glossary.get(s).is_some_and(|e| lexicon.get(&e.gloss).is_some()))
        .collect();
    ensure(words.len() >= 2, || {
        format!("only {} resolvable slang words", words.len())
    })?;
    let tweet = words.join(" ");
    let tokens = tokenize(&tweet);
    ensure(tokens.iter().all(|t| lexicon.get(&t.lower()).is_none()), || {
        "a token is in the lexicon".into()
    })?;
    let with = affect_features(&tokens, &lexicon, Some(&glossary));
    let without = affect_features(&tokens, &lexicon, None);
    ensure(with.coverage > 0.0, || {
        format!("coverage with glossary {}", with.coverage)
    })?;
    ensure(without.coverage == 0.0, || {
        format!("coverage without glossary {}", without.coverage)
    })?;
    Ok(format!(
        "{tweet:?}: coverage {:.3} with glossary, {} without",
        with.coverage, without.coverage
    ))
}

// 6. Tokenizer round trip.

const PIECES: &[&str] = &[
    "#rip",
    "@lil_b",
    "http://t.co/x?y=1.",
    "https://a.b/c)",
    ":)",
    ":-(",
    "<3",
    "😂",
    "👍🏾",
    "🇺🇸",
    "👨\u{200d}👩",
    "e\u{301}",
    "don't",
    "3.14",
    "1,000",
    "!!!",
    "...",
    "opp",
    "GBE",
    "\u{a0}",
    "\t",
    "\n",
    " ",
    "  ",
];

fn fuzz_input(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    for _ in 0..rng.gen_range(0..16) {
        match rng.gen_range(0..3) {
            0 => s.push_str(PIECES[rng.gen_range(0..PIECES.len())]),
            1 => s.push(rng.gen::<char>()),
            _ => s.push(char::from(rng.gen_range(0x20u8..0x7f))),
        }
    }
    s
}

fn tokenizer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = 2000;
    for case in 0..cases {
        let text = fuzz_input(&mut rng);
        let chars: Vec<char> = text.chars().collect();
        let mut rebuilt = String::new();
        let mut pos = 0;
        for t in tokenize(&text) {
            let fail = |what: &str| format!("case {case} {text:?}: {what} at {t:?}");
            ensure(
                t.span.start >= pos && t.span.start < t.span.end && t.span.end <= chars.len(),
                || fail("bad span"),
            )?;
            let gap: String = chars[pos..t.span.start].iter().collect();
            ensure(gap.chars().all(char::is_whitespace), || fail("non-whitespace gap"))?;
            let slice: String = chars[t.span.start..t.span.end].iter().collect();
            ensure(slice == t.surface, || fail("surface differs from span"))?;
            ensure(!t.surface.chars().any(char::is_whitespace), || {
                fail("whitespace in token")
            })?;
            ensure(t.kind != TokenKind::Hashtag || t.surface.starts_with('#'), || {
                fail("hashtag without #")
            })?;
            ensure(t.kind != TokenKind::Mention || t.surface.starts_with('@'), || {
                fail("mention without @")
            })?;
            rebuilt.push_str(&gap);
            rebuilt.push_str(&t.surface);
            pos = t.span.end;
        }
        let tail: String = chars[pos..].iter().collect();
        ensure(tail.chars().all(char::is_whitespace), || {
            format!("case {case} {text:?}: dropped tail")
        })?;
        rebuilt.push_str(&tail);
        ensure(rebuilt == text, || format!("case {case} {text:?}: rebuilt {rebuilt:?}"))?;
    }
    Ok(format!("{cases} fuzzed inputs reconstructed exactly"))
}

// 7. Reproducible CLI pipeline.

const OUTPUTS: &[&str] = &[
    "alignment.ttable",
    "glossary.tsv",
    "tagger.model",
    "features.jsonl",
    "classifier.model",
    "report.json",
    "report.txt",
];

fn run_cli(config: &Path, out: &Path) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_streetlex"))
        .arg("--config")
        .arg(config)
        .arg("pipeline")
        .arg("--output-dir")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    Ok(o.stdout)
}

fn reproducible() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pipeline.toml");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("run");
    let start = Instant::now();
    let first_stdout = run_cli(&config, &out)?;
    let first_time = start.elapsed();
    let first: Vec<Vec<u8>> = OUTPUTS
        .iter()
        .map(|f| std::fs::read(out.join(f)).unwrap_or_default())
        .collect();
    std::fs::remove_dir_all(&out).map_err(|e| e.to_string())?;
    let second_stdout = run_cli(&config, &out)?;
    for (name, a) in OUTPUTS.iter().zip(&first) {
        let b = std::fs::read(out.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(!a.is_empty() && *a == b, || format!("{name} differs between runs"))?;
    }
    ensure(first_stdout == second_stdout, || "printed reports differ".into())?;
    within(first_time, 30.0)?;
    Ok(format!(
        "{} output files identical; one run {:.2}s",
        OUTPUTS.len(),
        first_time.as_secs_f64()
    ))
}

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("kappa oracle", kappa_oracle),
        ("model 1 EM", model1),
        ("tagger", tagger),
        ("classifier", classifier),
        ("glossary-mediated affect", glossary_affect),
        ("tokenizer round trip", tokenizer),
        ("pipeline reproducibility", reproducible),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
