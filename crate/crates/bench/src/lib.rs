//! Synthetic inputs for the benchmarks.

use corpusforge_core::dedup::Trigram;
use corpusforge_core::RawPage;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "град", "река", "општина", "становника", "године", "налази", "село", "округ", "дунав", "планина", "grad", "reka",
    "opština", "stanovnika", "godine", "nalazi", "selo", "okrug", "dunav", "planina",
];

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(6..14);
    let words: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    format!("{}.", words.join(" "))
}

/// A wikitext article with an infobox, references, a table, sections and
/// categories, roughly `paragraphs` paragraphs long.
pub fn wikitext_article(paragraphs: usize, seed: u64) -> RawPage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("{{Infobox naselje\n| ime = Test\n| stanovništvo = 1234\n}}\n");
    for p in 0..paragraphs {
        if p > 0 && p % 4 == 0 {
            text.push_str(&format!("\n== Odeljak {p} ==\n"));
        }
        for _ in 0..4 {
            text.push_str(&sentence(&mut rng));
            text.push(' ');
        }
        text.push_str("[[Beograd|glavni grad]] <ref>{{cite web|url=https://example.org}}</ref>\n\n");
        if p % 5 == 2 {
            text.push_str("{| class=\"wikitable\"\n! A !! B\n|-\n| 1 || 2\n|}\n");
        }
    }
    text.push_str("== Reference ==\n{{reflist}}\n[[Kategorija:Naselja]]\n[[en:Test]]\n");
    RawPage { page_id: seed, title: format!("Test {seed}"), namespace: 0, text, is_redirect: false }
}

/// A random set of `n` trigrams over a vocabulary of `vocab` indices.
pub fn trigram_set(n: usize, vocab: u32, seed: u64) -> Vec<Trigram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.gen_range(0..vocab), rng.gen_range(0..vocab), rng.gen_range(0..vocab)]).collect()
}

/// `n` ascending scores: a mass near zero and a thin high tail.
pub fn score_curve(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> =
        (0..n).map(|i| if i % 10 == 0 { rng.gen_range(0.6..1.0) } else { rng.gen_range(0.0..0.1) }).collect();
    v.sort_by(f64::total_cmp);
    v
}
