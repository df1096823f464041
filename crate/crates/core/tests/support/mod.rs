#![allow(dead_code)]

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use corpusforge_core::clean::CleanConfig;
use corpusforge_core::dedup::DedupParams;
use corpusforge_core::encode::EncodeParams;
use corpusforge_core::ingest::DumpDescriptor;
use corpusforge_core::pipeline::StatsParams;
use corpusforge_core::{PipelineConfig, Project};
use quick_xml::escape::escape;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct DumpPage {
    pub id: u64,
    pub ns: i64,
    pub title: String,
    pub text: String,
    pub redirect: bool,
}

impl DumpPage {
    pub fn article(id: u64, title: &str, text: &str) -> DumpPage {
        DumpPage { id, ns: 0, title: title.into(), text: text.into(), redirect: false }
    }
}

pub fn dump_xml(pages: &[DumpPage]) -> String {
    let mut out = String::from(
        "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" xml:lang=\"sr\">\n\
         <siteinfo><sitename>Википедија</sitename><dbname>srwiki</dbname></siteinfo>\n",
    );
    for p in pages {
        let redirect = if p.redirect { format!("<redirect title=\"{}\" />", escape(&p.title)) } else { String::new() };
        out.push_str(&format!(
            "<page>\n<title>{}</title>\n<ns>{}</ns>\n<id>{}</id>\n{redirect}\n<revision>\n<id>{}</id>\n\
             <model>wikitext</model>\n<text bytes=\"{}\" xml:space=\"preserve\">{}</text>\n</revision>\n</page>\n",
            escape(&p.title),
            p.ns,
            p.id,
            p.id * 10,
            p.text.len(),
            escape(&p.text),
        ));
    }
    out.push_str("</mediawiki>\n");
    out
}

pub fn write_bz2(path: &Path, data: &[u8]) {
    use std::io::Write;
    let file = fs::File::create(path).unwrap();
    let mut enc = bzip2::write::BzEncoder::new(file, bzip2::Compression::fast());
    enc.write_all(data).unwrap();
    enc.finish().unwrap();
}

const TEMPLATES: [&str; 5] = [
    "'''{name}''' je naselje u opštini {place}. Prema popisu iz {year}. godine, u naselju je živelo {n1} stanovnika. \
     Naselje se nalazi na nadmorskoj visini od {n2} metara. Prosečna starost stanovništva iznosi {n3} godina, \
     a u naselju postoji {n4} domaćinstava.",
    "'''{name}''' je reka u {place}. Duga je {n1} kilometara, a površina njenog sliva iznosi {n2} kvadratnih kilometara. \
     Izvire na visini od {n3} metara i uliva se u veću reku kod mesta {place}. Prosečni protok na ušću je {n4} kubnih metara u sekundi.",
    "'''{name}''' je planinski vrh u masivu {place}. Visina vrha je {n1} metara nad morem. Prvi zabeleženi uspon na vrh \
     izveden je {year}. godine. Na padinama se nalazi {n2} izvora, a od najbližeg sela vrh je udaljen {n3} kilometara.",
    "'''{name}''' je fudbalski klub iz mesta {place}. Klub je osnovan {year}. godine i trenutno se takmiči u ligi \
     sa {n1} ekipa. Domaće utakmice igra na stadionu kapaciteta {n2} gledalaca. U sezoni je osvojio {n3} bodova.",
    "'''{name}''' je asteroid glavnog pojasa, otkriven {year}. godine. Prečnik asteroida iznosi {n1} kilometara, \
     a period obilaska oko Sunca je {n2} dana. Ekscentricitet orbite je {n3}, a nagib putanje iznosi {n4} stepeni.",
];

pub const CATEGORY: &str = "Sintetički članci";

fn syllable_word(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    const ONSETS: &[&str] = &["b", "v", "g", "d", "ž", "z", "k", "l", "m", "n", "p", "r", "s", "t", "č", "š", "br", "tr", "kl", "sm"];
    const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];
    (0..syllables).map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), VOWELS.choose(rng).unwrap())).collect()
}

fn fill(template: &str, rng: &mut ChaCha8Rng) -> String {
    let name = {
        let w = syllable_word(rng, 3);
        let mut c = w.chars();
        c.next().unwrap().to_uppercase().chain(c).collect::<String>()
    };
    template
        .replace("{name}", &name)
        .replace("{place}", &syllable_word(rng, 2))
        .replace("{year}", &rng.gen_range(1800..2020).to_string())
        .replace("{n1}", &rng.gen_range(10..5000).to_string())
        .replace("{n2}", &rng.gen_range(10..5000).to_string())
        .replace("{n3}", &rng.gen_range(1..90).to_string())
        .replace("{n4}", &rng.gen_range(1..900).to_string())
}

/// Identifiers of the templated and distinct halves of a synthetic corpus.
pub struct SyntheticCorpus {
    pub pages: Vec<DumpPage>,
    pub templated: HashSet<u64>,
    pub distinct: HashSet<u64>,
}

/// Interleaved templated and mutually distinct articles, all in one category.
pub fn synthetic_corpus(templated: usize, distinct: usize, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    while words.len() < 3000 {
        let n = rng.gen_range(2..5);
        let w = syllable_word(&mut rng, n);
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    let mut corpus = SyntheticCorpus { pages: Vec::new(), templated: HashSet::new(), distinct: HashSet::new() };
    let total = templated + distinct;
    for i in 0..total {
        let id = 1000 + i as u64;
        let is_templated = i % 2 == 0 && corpus.templated.len() < templated || corpus.distinct.len() >= distinct;
        let body = if is_templated {
            corpus.templated.insert(id);
            fill(TEMPLATES[corpus.templated.len() % TEMPLATES.len()], &mut rng)
        } else {
            corpus.distinct.insert(id);
            let mut text = String::new();
            for _ in 0..rng.gen_range(8..12) {
                let len = rng.gen_range(7..13);
                let sentence: Vec<&str> = (0..len).map(|_| words.choose(&mut rng).unwrap().as_str()).collect();
                let s = sentence.join(" ");
                let mut c = s.chars();
                text.extend(c.next().unwrap().to_uppercase().chain(c));
                text.push_str(". ");
            }
            text
        };
        let text = format!("{body}\n\n[[Kategorija:{CATEGORY}]]");
        corpus.pages.push(DumpPage::article(id, &format!("Članak {id}"), &text));
    }
    corpus
}

pub fn pipeline_config(workdir: &Path, archive: &Path, workers: usize, seed: u64) -> PipelineConfig {
    PipelineConfig {
        descriptor: DumpDescriptor::new("sr", Project::Wikipedia, "20240101").unwrap(),
        workdir: workdir.to_path_buf(),
        archive: Some(archive.to_path_buf()),
        clean: CleanConfig::for_language("sr", Project::Wikipedia),
        encode: EncodeParams::default(),
        max_bucket: corpusforge_core::cluster::DEFAULT_MAX_BUCKET,
        dedup: DedupParams::new(seed),
        stats: StatsParams::default(),
        workers,
    }
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}
