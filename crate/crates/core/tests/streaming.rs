//! Peak heap while parsing a 100 MB dump stays under a fixed ceiling.

use std::alloc::{GlobalAlloc, Layout, System};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use corpusforge_core::ingest::parse_dump;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

const DUMP_BYTES: u64 = 100 * 1024 * 1024;
const CEILING: usize = 16 * 1024 * 1024;

#[test]
fn peak_memory_is_independent_of_dump_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.xml");
    let paragraph = "Реченица о граду која се понавља да би страница била довољно дугачка. ".repeat(100);
    let mut out = BufWriter::new(File::create(&path).unwrap());
    writeln!(out, "<mediawiki><siteinfo><sitename>T</sitename></siteinfo>").unwrap();
    let mut written = 0u64;
    let mut pages = 0u64;
    while written < DUMP_BYTES {
        let page = format!(
            "<page><title>Страница {pages}</title><ns>0</ns><id>{pages}</id><revision><id>{pages}</id>\
             <text xml:space=\"preserve\">{paragraph}</text></revision></page>\n"
        );
        out.write_all(page.as_bytes()).unwrap();
        written += page.len() as u64;
        pages += 1;
    }
    writeln!(out, "</mediawiki>").unwrap();
    drop(out);

    let baseline = CURRENT.load(Ordering::Relaxed);
    PEAK.store(baseline, Ordering::Relaxed);
    let mut seen = 0u64;
    for page in parse_dump(&path).unwrap() {
        let page = page.unwrap();
        assert_eq!(page.namespace, 0);
        seen += 1;
    }
    let peak = PEAK.load(Ordering::Relaxed) - baseline;
    assert_eq!(seen, pages);
    assert!(peak < CEILING, "peak heap {peak} bytes while parsing {written} bytes");
}
