//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

mod support;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use corpusforge_core::clean::{clean_article, CleanConfig, TagAction};
use corpusforge_core::cluster::{read_manifest, Bucket};
use corpusforge_core::dedup::{
    aggregate_score, find_knee, knee_pool, prune_corpus, score_buckets, MinHasher, ScoreOptions, SimilarityRecord,
    Trigram,
};
use corpusforge_core::encode::read_encoded;
use corpusforge_core::ingest::{parse_dump, serialize_pages};
use corpusforge_core::jsonl::{read_all, write_all};
use corpusforge_core::pipeline::{self, files};
use corpusforge_core::stats::{cosine_delta, reference_axis, Axis, FreqProfile};
use corpusforge_core::{CleanArticle, MinHashSignature, Project, RawPage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use support::{dump_xml, fixture_dir, pipeline_config, synthetic_corpus, write_bz2, SyntheticCorpus};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, format!("{what} took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn page(text: &str) -> RawPage {
    RawPage { page_id: 1, title: "Test".into(), namespace: 0, text: text.into(), is_redirect: false }
}

fn golden_cleaning() -> Outcome {
    let dir = fixture_dir().join("golden");
    let mut inputs: Vec<_> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "wiki"))
        .collect();
    inputs.sort();
    check(inputs.len() >= 30, format!("only {} fixtures", inputs.len()))?;
    let wikipedia = CleanConfig::for_language("sr", Project::Wikipedia);
    let wikiquote = CleanConfig::for_language("sr", Project::Wikiquote);
    let started = Instant::now();
    let mut failures = Vec::new();
    for input in &inputs {
        let stem = input.file_stem().unwrap().to_string_lossy().to_string();
        let cfg = if stem.ends_with(".wikiquote") { &wikiquote } else { &wikipedia };
        let source = fs::read_to_string(input).map_err(|e| e.to_string())?;
        let expected = fs::read_to_string(input.with_extension("txt")).map_err(|e| format!("{stem}: {e}"))?;
        let cats_path = input.with_extension("cats");
        let expected_cats: Vec<String> = match fs::read_to_string(&cats_path) {
            Ok(s) => s.lines().map(String::from).collect(),
            Err(_) => Vec::new(),
        };
        match clean_article(&page(&source), cfg) {
            Ok(a) if a.text == expected && a.categories == expected_cats => {}
            Ok(a) => failures.push(format!("{stem}: got {:?} {:?}", a.text, a.categories)),
            Err(d) => failures.push(format!("{stem}: dropped ({d})")),
        }
    }
    let elapsed = started.elapsed();
    check(failures.is_empty(), failures.join("; "))?;
    within(elapsed, Duration::from_secs(5), "suite")?;
    Ok(format!("{} fixtures match, {:.3}s", inputs.len(), elapsed.as_secs_f64()))
}

struct MarkupGen {
    rng: ChaCha8Rng,
    words: Vec<&'static str>,
}

impl MarkupGen {
    fn word(&mut self) -> &'static str {
        self.words.choose(&mut self.rng).unwrap()
    }

    fn words(&mut self, n: usize) -> String {
        (0..n).map(|_| self.word()).collect::<Vec<_>>().join(" ")
    }

    fn fragment(&mut self, depth: usize) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        if leaf {
            let n = self.rng.gen_range(1..5);
            return self.words(n);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..22) {
            0 => format!("{{{{{}|{}|ključ={}}}}}", self.word(), self.fragment(d), self.fragment(d)),
            1 => format!("{{{{cquote|{}}}}}", self.fragment(d)),
            2 => format!("{{{{ppoem|{}\n{}}}}}", self.fragment(d), self.fragment(d)),
            3 => format!("[[{}|{}]]", self.word(), self.fragment(d)),
            4 => format!("[[{}]]", self.word()),
            5 => format!("[[Datoteka:{}.jpg|mini|{}]]", self.word(), self.fragment(d)),
            6 => format!("[[Kategorija:{}]]", self.word()),
            7 => format!("[[en:{}]]", self.word()),
            8 => format!("[https://example.org/{} {}]", self.word(), self.fragment(d)),
            9 => {
                let close = if self.rng.gen_bool(0.8) { "\n|}" } else { "" };
                format!(
                    "\n{{| class=\"wikitable\"\n! {} !! {}\n|-\n| {} || {}{close}\n",
                    self.word(),
                    self.word(),
                    self.fragment(d),
                    self.fragment(d)
                )
            }
            10 => format!("<!-- {} -->", self.fragment(d)),
            11 => format!("<ref name=\"{}\">{}</ref>", self.word(), self.fragment(d)),
            12 => format!("<span style=\"color:red\">{}</span>", self.fragment(d)),
            13 => format!("<math>\\frac{{{{a}}}}{{{}}}</math>", self.word()),
            14 => format!("\n== {} ==\n{}", self.word(), self.fragment(d)),
            15 => format!("'''{}'''", self.fragment(d)),
            16 => format!("{{{{{{1|{}}}}}}}", self.word()),
            17 => "__TOC__".to_string(),
            18 => format!("{{{{{}|", self.word()),
            19 => format!("<nowiki>{}</nowiki>", self.fragment(d)),
            20 => format!("<gallery>\n{}.jpg|{}\n</gallery>", self.word(), self.fragment(d)),
            _ => format!("{}\n\n{}", self.fragment(d), self.fragment(d)),
        }
    }
}

/// Output with preserved elements cut out; their content is kept verbatim
/// by design and may legitimately contain braces.
fn outside_preserved(text: &str, cfg: &CleanConfig) -> String {
    let mut out = text.to_string();
    for name in &cfg.tags.preserve {
        debug_assert_eq!(cfg.tags.action(name), TagAction::Preserve);
        let re = Regex::new(&format!(r"(?s)<{name}\b[^>]*>.*?</{name}>")).unwrap();
        out = re.replace_all(&out, "").into_owned();
    }
    out
}

fn residue_fuzz() -> Outcome {
    const FORBIDDEN: [&str; 6] = ["{{", "}}", "[[", "]]", "{|", "<!--"];
    let cfg = CleanConfig::for_language("sr", Project::Wikipedia);
    let mut gen = MarkupGen {
        rng: ChaCha8Rng::seed_from_u64(7),
        words: vec!["grad", "reka", "most", "kula", "polje", "selo", "put", "dolina", "jezero", "brdo", "šuma", "Дунав"],
    };
    let started = Instant::now();
    let mut cleaned = 0;
    let mut bad = Vec::new();
    let mut inside_preserved = 0;
    for i in 0..1000 {
        let parts = gen.rng.gen_range(2..6);
        let source: String = (0..parts).map(|_| gen.fragment(10)).collect::<Vec<_>>().join(" ");
        let Ok(article) = clean_article(&page(&source), &cfg) else { continue };
        cleaned += 1;
        let outside = outside_preserved(&article.text, &cfg);
        if let Some(tok) = FORBIDDEN.iter().find(|t| outside.contains(*t)) {
            bad.push(format!("#{i} contains {tok:?}: {:?}", article.text));
        } else if FORBIDDEN.iter().any(|t| article.text.contains(t)) {
            inside_preserved += 1;
        }
    }
    let elapsed = started.elapsed();
    check(bad.is_empty(), format!("{} residue outputs, first: {}", bad.len(), bad.first().cloned().unwrap_or_default()))?;
    within(elapsed, Duration::from_secs(60), "fuzz")?;
    Ok(format!(
        "1000 articles, {cleaned} non-empty, 0 with residue ({inside_preserved} have braces only inside preserved tags), {:.2}s",
        elapsed.as_secs_f64()
    ))
}

/// Brute-force Jaccard, independent of the library.
fn exact_jaccard(a: &HashSet<Trigram>, b: &HashSet<Trigram>) -> f64 {
    let inter = a.iter().filter(|t| b.contains(*t)).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Probability that a Binomial(128, j) / 128 estimate lands within `tol` of `j`.
fn pass_probability(j: f64, tol: f64) -> f64 {
    let n = 128u64;
    let mut ln_choose = 0.0f64;
    let mut total = 0.0;
    for x in 0..=n {
        if x > 0 {
            ln_choose += ((n - x + 1) as f64).ln() - (x as f64).ln();
        }
        if (x as f64 / n as f64 - j).abs() <= tol + 1e-12 {
            total += (ln_choose + x as f64 * j.ln() + (n - x) as f64 * (1.0 - j).ln()).exp();
        }
    }
    total
}

fn minhash_accuracy() -> Outcome {
    const UNION: usize = 250;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let hasher = MinHasher::new(128, 42);
    let mut per_j: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let mut worst = (0.0f64, 0.0f64);
    let mut over = 0;
    for pair in 0..200 {
        let k = (pair % 9 + 1) as u32;
        let j = k as f64 / 10.0;
        let mut pool = BTreeSet::new();
        while pool.len() < UNION {
            pool.insert([rng.gen::<u32>(), rng.gen::<u32>(), rng.gen::<u32>()]);
        }
        let pool: Vec<Trigram> = pool.into_iter().collect();
        let shared = UNION * k as usize / 10;
        let a_only = (UNION - shared) / 2;
        let a: HashSet<Trigram> = pool[..shared + a_only].iter().copied().collect();
        let b: HashSet<Trigram> = pool[..shared].iter().chain(&pool[shared + a_only..]).copied().collect();
        let truth = exact_jaccard(&a, &b);
        check((truth - j).abs() < 1e-12, format!("planted {j} but oracle says {truth}"))?;
        let sa = hasher.signature(&a);
        let sb = hasher.signature(&b);
        let est = sa.values.iter().zip(&sb.values).filter(|(x, y)| x == y).count() as f64 / 128.0;
        let err = (est - j).abs();
        if err > worst.1 {
            worst = (j, err);
        }
        if err > 0.12 {
            over += 1;
        }
        per_j.entry(k).or_default().push(est);
    }
    let elapsed = started.elapsed();
    let ideal: f64 = per_j.iter().map(|(k, ests)| pass_probability(*k as f64 / 10.0, 0.12).powi(ests.len() as i32)).product();
    check(
        over == 0,
        format!(
            "{over} of 200 pairs off by more than 0.12 (worst {:.4} at J={}); an exact 128-sample estimator meets \
             this bound on all 200 pairs with probability {ideal:.3}",
            worst.1, worst.0
        ),
    )?;
    for (k, ests) in &per_j {
        let j = *k as f64 / 10.0;
        let mean = ests.iter().sum::<f64>() / ests.len() as f64;
        let bound = 3.0 * (j * (1.0 - j) / 128.0).sqrt();
        check((mean - j).abs() <= bound, format!("J={j}: mean {mean:.4} outside ±{bound:.4}"))?;
    }
    within(elapsed, Duration::from_secs(10), "minhash")?;
    Ok(format!("200 pairs, worst |error| {:.4} at J={}, all J means within bound, {:.2}s", worst.1, worst.0, elapsed.as_secs_f64()))
}

fn signature(matching: usize, perms: usize, offset: u64) -> MinHashSignature {
    MinHashSignature { values: (0..perms as u64).map(|i| if (i as usize) < matching { i } else { i + offset }).collect(), seed: 1 }
}

fn aggregation_rules() -> Outcome {
    check(aggregate_score(&[0.9]) == 0.3, format!("[0.9] -> {}", aggregate_score(&[0.9])))?;
    check(aggregate_score(&[]).to_bits() == 0.0f64.to_bits(), format!("[] -> {:?}", aggregate_score(&[])))?;
    // 64 of 128 positions agree: similarity exactly 0.5.
    let mut sigs = HashMap::new();
    sigs.insert(1, signature(128, 128, 0));
    sigs.insert(2, signature(64, 128, 1000));
    sigs.insert(3, signature(65, 128, 2000));
    let at_half = Bucket { category: "a".into(), chunk_index: 0, members: vec![1, 2] };
    let above = Bucket { category: "b".into(), chunk_index: 0, members: vec![1, 3] };
    let scores = score_buckets(&[at_half, above], &sigs, &ScoreOptions::default()).map_err(|e| e.to_string())?;
    let r2 = &scores.records[&2];
    check(r2.top_scores.is_empty() && r2.aggregate == 0.0, format!("pair at 0.5 recorded: {r2:?}"))?;
    let r3 = &scores.records[&3];
    check(r3.top_scores == vec![65.0 / 128.0], format!("pair above 0.5 not recorded: {r3:?}"))?;
    Ok("[0.9] -> 0.3, [] -> 0.0, similarity 0.5 not recorded, 65/128 recorded".into())
}

struct SyntheticRun {
    corpus: SyntheticCorpus,
    _dir: tempfile::TempDir,
    workdir_1: std::path::PathBuf,
    workdir_8: std::path::PathBuf,
    elapsed: Duration,
}

fn synthetic_run() -> Result<SyntheticRun, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = synthetic_corpus(500, 500, 2024);
    let archive = dir.path().join("srwiki-20240101-pages-articles.xml.bz2");
    write_bz2(&archive, dump_xml(&corpus.pages).as_bytes());
    let workdir_1 = dir.path().join("workers-1");
    let workdir_8 = dir.path().join("workers-8");
    let started = Instant::now();
    pipeline::run(&pipeline_config(&workdir_1, &archive, 1, 42), None).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    pipeline::run(&pipeline_config(&workdir_8, &archive, 8, 42), None).map_err(|e| e.to_string())?;
    Ok(SyntheticRun { corpus, _dir: dir, workdir_1, workdir_8, elapsed })
}

fn ids_in(path: &Path) -> Result<HashSet<u64>, String> {
    let records: Vec<serde_json::Value> = read_all(path).map_err(|e| e.to_string())?;
    Ok(records.iter().map(|r| r["id"].as_u64().unwrap()).collect())
}

/// Aggregates of every bucketed article, recomputed from the run's
/// intermediates.
fn aggregates(workdir: &Path, seed: u64) -> Result<BTreeMap<u64, SimilarityRecord>, String> {
    let encoded = read_encoded(&workdir.join(files::ENCODED)).map_err(|e| e.to_string())?;
    let buckets = read_manifest(&workdir.join(files::BUCKETS)).map_err(|e| e.to_string())?;
    let hasher = MinHasher::new(128, seed);
    let sigs: HashMap<u64, MinHashSignature> = encoded.iter().map(|e| (e.page_id, hasher.sign_vector(&e.vector))).collect();
    Ok(score_buckets(&buckets, &sigs, &ScoreOptions::default()).map_err(|e| e.to_string())?.records)
}

fn synthetic_dedup(run: &SyntheticRun) -> Outcome {
    let removed = ids_in(&run.workdir_1.join(files::REMOVED))?;
    let kept = ids_in(&run.workdir_1.join(files::CORPUS))?;
    let c = &run.corpus;
    let templated_removed = c.templated.iter().filter(|id| removed.contains(id)).count();
    let distinct_removed = c.distinct.iter().filter(|id| removed.contains(id)).count();
    check(kept.len() + removed.len() == 1000, format!("{} kept + {} removed", kept.len(), removed.len()))?;
    let t_pct = 100.0 * templated_removed as f64 / c.templated.len() as f64;
    let d_pct = 100.0 * distinct_removed as f64 / c.distinct.len() as f64;

    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(run.workdir_1.join(files::DEDUP_SUMMARY)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let knee = &summary["knee"];
    check(knee["found"] == true, "no knee found")?;
    let cutoff = knee["cutoff"].as_f64().unwrap();
    let records = aggregates(&run.workdir_1, 42)?;
    let max_of = |ids: &HashSet<u64>| ids.iter().map(|id| records[id].aggregate).fold(f64::MIN, f64::max);
    let min_of = |ids: &HashSet<u64>| ids.iter().map(|id| records[id].aggregate).fold(f64::MAX, f64::min);
    let (distinct_max, templated_min) = (max_of(&c.distinct), min_of(&c.templated));

    check(t_pct >= 95.0, format!("only {t_pct:.1}% of templated articles removed"))?;
    check(d_pct <= 5.0, format!("{d_pct:.1}% of distinct articles removed"))?;
    // The cutoff is itself one of the pooled scores, so it can coincide with
    // the low population's maximum; removal is strictly above it.
    check(
        distinct_max <= cutoff && cutoff < templated_min,
        format!("cutoff {cutoff:.4} does not separate distinct max {distinct_max:.4} from templated min {templated_min:.4}"),
    )?;
    within(run.elapsed, Duration::from_secs(120), "pipeline")?;
    Ok(format!(
        "templated removed {t_pct:.1}%, distinct removed {d_pct:.1}%, distinct max {distinct_max:.4} <= cutoff {cutoff:.4} < templated min {templated_min:.4}, {:.1}s",
        run.elapsed.as_secs_f64()
    ))
}

fn clean_stub(id: u64) -> CleanArticle {
    CleanArticle {
        page_id: id,
        title: format!("A{id}"),
        url: format!("https://sr.wikipedia.org/wiki/A{id}"),
        text: "reč reč".into(),
        categories: vec![],
        word_count: 2,
        cyrillic_ratio: 0.0,
    }
}

fn knee_detection() -> Outcome {
    let mut two_regime: Vec<f64> = (0..900).map(|i| 0.1 * i as f64 / 899.0).collect();
    two_regime.extend((0..100).map(|i| 0.7 + 0.3 * i as f64 / 99.0));
    let knee = find_knee(&two_regime, 1.0);
    check(knee.found && (0.1..=0.7).contains(&knee.cutoff), format!("two-regime knee {knee:?}"))?;

    let ramp: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
    let flat = find_knee(&ramp, 1.0);
    check(!flat.found, format!("linear ramp gave a knee: {flat:?}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let clean = dir.path().join("clean.jsonl");
    let stubs: Vec<CleanArticle> = (0..1000).map(clean_stub).collect();
    write_all(&clean, &stubs).map_err(|e| e.to_string())?;
    let records: BTreeMap<u64, SimilarityRecord> = ramp
        .iter()
        .enumerate()
        .map(|(i, &s)| (i as u64, SimilarityRecord { page_id: i as u64, top_scores: vec![s; 3], aggregate: s }))
        .collect();
    let pooled = find_knee(&knee_pool(&records), 1.0);
    let counts = prune_corpus(&clean, &dir.path().join("kept.jsonl"), &dir.path().join("removed.jsonl"), &records, &pooled)
        .map_err(|e| e.to_string())?;
    check(counts.removed == 0 && counts.after.articles == 1000, format!("fail-open pruning removed {}", counts.removed))?;
    Ok(format!("two-regime cutoff {:.4} (index {}), ramp found=false, prune removed 0 of 1000", knee.cutoff, knee.index))
}

fn mini_dump_ingest() -> Outcome {
    let fixtures = fixture_dir().join("fixtures");
    let expected: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fixtures.join("mini_dump.expected.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let want_ids: Vec<u64> = expected["retained_ids"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let xml = fs::read(fixtures.join("mini_dump.xml")).map_err(|e| e.to_string())?;
    let bz2 = dir.path().join("mini.xml.bz2");
    write_bz2(&bz2, &xml);
    for archive in [fixtures.join("mini_dump.xml"), bz2] {
        let mut pages = parse_dump(&archive).map_err(|e| e.to_string())?;
        let out = dir.path().join("raw.jsonl");
        let stats = serialize_pages(&mut pages, &out).map_err(|e| e.to_string())?;
        let raw: Vec<RawPage> = read_all(&out).map_err(|e| e.to_string())?;
        let ids: Vec<u64> = raw.iter().map(|p| p.page_id).collect();
        check(ids == want_ids, format!("{}: emitted {ids:?}", archive.display()))?;
        let counters = [
            (stats.pages_read, "pages_read"),
            (stats.skipped_namespace, "skipped_namespace"),
            (stats.skipped_redirect, "skipped_redirect"),
            (stats.skipped_short, "skipped_short"),
        ];
        for (got, key) in counters {
            check(Some(got) == expected[key].as_u64(), format!("{key}: got {got}, expected {}", expected[key]))?;
        }
    }
    Ok(format!("plain and bz2: {} articles emitted, skips ns=5 redirect=3 short=2", want_ids.len()))
}

fn determinism(run: &SyntheticRun) -> Outcome {
    let a = fs::read(run.workdir_1.join(files::CORPUS)).map_err(|e| e.to_string())?;
    let b = fs::read(run.workdir_8.join(files::CORPUS)).map_err(|e| e.to_string())?;
    check(a == b, "corpus.jsonl differs between workers=1 and workers=8")?;
    Ok(format!("corpus.jsonl identical ({} bytes) for workers=1 and workers=8", a.len()))
}

fn stats_properties(run: &SyntheticRun) -> Outcome {
    let counts: HashMap<String, u64> = [("i", 500), ("je", 420), ("u", 390), ("na", 200), ("grad", 45), ("reka", 30), ("most", 12)]
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    let other: HashMap<String, u64> = [("i", 300), ("je", 500), ("u", 100), ("na", 250), ("grad", 5), ("reka", 80), ("selo", 40)]
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    let scaled: HashMap<String, u64> = counts.iter().map(|(t, c)| (t.clone(), c * 10)).collect();
    let p = FreqProfile::from_counts(&counts, 100).map_err(|e| e.to_string())?;
    let p10 = FreqProfile::from_counts(&scaled, 100).map_err(|e| e.to_string())?;
    let q = FreqProfile::from_counts(&other, 100).map_err(|e| e.to_string())?;
    let self_delta = cosine_delta(&p, &p, &reference_axis(&p, &p, Axis::First)).map_err(|e| e.to_string())?;
    check(self_delta.abs() <= 1e-12, format!("cosine_delta(p, p) = {self_delta:e}"))?;
    let d = cosine_delta(&p, &q, &reference_axis(&p, &q, Axis::First)).map_err(|e| e.to_string())?;
    let d10 = cosine_delta(&p10, &q, &reference_axis(&p10, &q, Axis::First)).map_err(|e| e.to_string())?;
    check((d - d10).abs() <= 1e-12, format!("scaling changed delta: {d} vs {d10}"))?;

    let before = ids_in(&run.workdir_1.join(files::CLEAN))?.len();
    let after = ids_in(&run.workdir_1.join(files::CORPUS))?.len();
    let removed = ids_in(&run.workdir_1.join(files::REMOVED))?.len();
    check(after + removed == before, format!("{after} + {removed} != {before}"))?;
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(run.workdir_1.join(files::REPORT)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    check(report["conserved"] == true, "report does not record conservation")?;
    Ok(format!("self delta {self_delta:e}, delta {d:.6} unchanged by x10, {after} + {removed} = {before}"))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: u32, name: &str, outcome: Outcome| {
        match outcome {
            Ok(detail) => println!("criterion {n} {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} {name}: FAIL ({why})");
            }
        }
    };
    report(1, "golden cleaning", golden_cleaning());
    report(2, "no-residue fuzz", residue_fuzz());
    report(3, "minhash accuracy", minhash_accuracy());
    report(4, "aggregation rules", aggregation_rules());
    let run = synthetic_run();
    let with_run = |f: fn(&SyntheticRun) -> Outcome| match &run {
        Ok(r) => f(r),
        Err(e) => Err(format!("synthetic pipeline failed: {e}")),
    };
    report(5, "synthetic dedup", with_run(synthetic_dedup));
    report(6, "knee detection", knee_detection());
    report(7, "mini-dump ingestion", mini_dump_ingest());
    report(8, "determinism", with_run(determinism));
    report(9, "stats", with_run(stats_properties));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
