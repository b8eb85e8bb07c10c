#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Instant;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data(name: &str) -> PathBuf {
    workspace_root().join("data").join(name)
}

/// Minimal HTTP/1.1 server on 127.0.0.1. Answers each request with the next
/// status in `script` (the last one repeats) and a fixed body, and records
/// when every request arrived.
pub struct MockServer {
    pub url: String,
    pub started: Instant,
    arrivals: Arc<Mutex<Vec<Instant>>>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
    addr: std::net::SocketAddr,
}

impl MockServer {
    pub fn start(script: Vec<u16>, body: &str) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
        let addr = listener.local_addr().unwrap();
        let arrivals = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));
        let body = body.to_string();
        let (arr, st) = (arrivals.clone(), stop.clone());
        let handle = thread::spawn(move || {
            let mut served = 0usize;
            for stream in listener.incoming() {
                if st.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let status = script[served.min(script.len() - 1)];
                served += 1;
                serve(stream, status, &body, &arr);
            }
        });
        Self {
            url: format!("http://{addr}/stream"),
            started: Instant::now(),
            arrivals,
            stop,
            handle: Some(handle),
            addr,
        }
    }

    pub fn arrivals(&self) -> Vec<Instant> {
        self.arrivals.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, status: u16, body: &str, arrivals: &Mutex<Vec<Instant>>) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut line = String::new();
    if reader.read_line(&mut line).is_err() || line.is_empty() {
        return;
    }
    arrivals.lock().unwrap().push(Instant::now());
    loop {
        let mut h = String::new();
        if reader.read_line(&mut h).is_err() || h == "\r\n" || h.is_empty() {
            break;
        }
    }
    let reason = if status == 200 { "OK" } else { "Error" };
    let payload = if status == 200 { body } else { "" };
    let mut out = stream;
    let _ = write!(
        out,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/x-ndjson\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
    let _ = out.flush();
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// One raw tweet line in the source's JSON shape.
pub fn tweet_line(id: &str, location: Option<&str>, lang: Option<&str>, text: &str, retweet: bool) -> String {
    let mut v = serde_json::json!({
        "created_at": "Wed Nov 01 00:00:00 +0000 2017",
        "id_str": id,
        "text": text,
        "user": {"name": format!("User {id}"), "screen_name": format!("user{id}"), "location": location},
    });
    if let Some(l) = lang {
        v["lang"] = serde_json::Value::String(l.to_string());
    }
    if retweet {
        v["retweeted_status"] = serde_json::json!({"id_str": "1"});
    }
    v.to_string()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Bundled gazetteer plus the bundled denylist.
pub fn bundled_gazetteer() -> twlens::geo::Gazetteer {
    let mut g = twlens::geo::Gazetteer::load(&data("gazetteer.csv")).unwrap();
    g.extend_denylist(std::fs::File::open(data("denylist.txt")).unwrap())
        .unwrap();
    g
}

pub fn record_at(id: &str, location: &str) -> twlens::model::TweetRecord {
    twlens::model::TweetRecord {
        created_at: chrono::DateTime::from_timestamp(1_509_494_400, 0).unwrap(),
        tweet_id: id.to_string(),
        language_code: "en".into(),
        detected_country: None,
        detected_city: None,
        country_iso: None,
        raw_location: location.to_string(),
        display_name: String::new(),
        username: format!("u{id}"),
        is_retweet: false,
        text: String::new(),
    }
}

/// The 200 hand-labeled location strings: unresolved records and labels
/// (`None` for strings that name no real place).
pub fn labeled_fixture() -> (
    Vec<twlens::model::TweetRecord>,
    std::collections::HashMap<String, Option<String>>,
) {
    let path = fixture("resolver_labeled.csv");
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.unwrap();
        records.push(record_at(&row[0], &row[1]));
    }
    let labels = twlens::geo::read_labels(
        std::fs::File::open(&path)
            .map(|f| {
                // read_labels wants `tweet_id,country_iso`; drop the location column
                let mut out = Vec::new();
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(["tweet_id", "country_iso"]).unwrap();
                for row in csv::Reader::from_reader(f).records() {
                    let row = row.unwrap();
                    w.write_record([&row[0], &row[2]]).unwrap();
                }
                drop(w);
                out
            })
            .unwrap()
            .as_slice(),
    )
    .unwrap();
    (records, labels)
}

const FUZZ_PIECES: &[&str] = &[
    "a",
    "z",
    "Q",
    " ",
    ",",
    "-",
    "'",
    ".",
    "é",
    "É",
    "ü",
    "ñ",
    "ø",
    "Å",
    "ß",
    "İ",
    "ı",
    "ǅ",
    "\u{0301}",
    "\u{0308}",
    "\u{0327}",
    "\u{0345}",
    "\u{20DD}",
    "e\u{0301}",
    "東京",
    "서울",
    "한",
    "\u{1100}\u{1161}",
    "ا",
    "ي",
    "🌍",
    "💜",
    "ﬁ",
    "Ω",
    "ẞ",
    "ǰ",
    "ΐ",
    "Σ",
    "ς",
    "\u{200D}",
    "\t",
    "paris",
    "são paulo",
    "new york",
    "georgia",
    "indiana",
    "konoha",
    "MÉXICO",
    "côte d'ivoire",
    "uk",
    "u.s.",
    "Zürich",
    "KÖLN",
    "日本",
    "ОМ",
    "россия",
];

/// Seeded strings mixing scripts, combining marks, case-changing letters and
/// gazetteer fragments.
pub fn fuzz_strings(n: usize, seed: u64) -> Vec<String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..12);
            let mut s = String::new();
            for _ in 0..len {
                if rng.gen_bool(0.15) {
                    s.push(char::from_u32(rng.gen_range(0x20..0x3000)).unwrap_or('?'));
                } else {
                    s.push_str(FUZZ_PIECES[rng.gen_range(0..FUZZ_PIECES.len())]);
                }
            }
            s
        })
        .collect()
}

/// `n` records from `iso` in `language`; retweets when `retweet`.
pub fn located(
    iso: &str,
    language: &str,
    n: usize,
    user: &str,
    retweet: bool,
    next_id: &mut u64,
) -> Vec<twlens::model::TweetRecord> {
    (0..n)
        .map(|_| {
            *next_id += 1;
            let mut r = record_at(&next_id.to_string(), iso);
            r.language_code = language.to_string();
            r.country_iso = Some(iso.to_string());
            r.detected_country = Some(iso.to_string());
            r.username = user.to_string();
            r.is_retweet = retweet;
            r
        })
        .collect()
}

/// US: 875 of 1000 in English. Canada: 7433 English and 313 French of 8007.
pub fn table1_fixture() -> Vec<twlens::model::TweetRecord> {
    let mut id = 0;
    let mut v = Vec::new();
    v.extend(located("US", "en", 875, "us", false, &mut id));
    v.extend(located("US", "es", 100, "us", false, &mut id));
    v.extend(located("US", "fr", 25, "us", false, &mut id));
    v.extend(located("CA", "en", 7433, "ca", false, &mut id));
    v.extend(located("CA", "fr", 313, "ca", false, &mut id));
    v.extend(located("CA", "es", 261, "ca", false, &mut id));
    v
}

/// 500 handles with distinct original-tweet counts; 105 of them in the US.
pub fn handles_fixture() -> Vec<twlens::model::TweetRecord> {
    let others = ["JP", "GB", "BR", "ES", "IN", "FR", "MX"];
    let mut id = 0;
    let mut v = Vec::new();
    for h in 0..500usize {
        let iso = if h % 4 == 0 && h / 4 < 105 {
            "US"
        } else {
            others[h % others.len()]
        };
        v.extend(located(iso, "en", 600 - h, &format!("handle{h:03}"), false, &mut id));
    }
    v
}

/// Files checked against `data/golden/` after a run on the bundled corpus.
pub const GOLDEN_FILES: [&str; 12] = [
    "choropleth.csv",
    "fig3_top_users.csv",
    "fig4_top20.csv",
    "fig6_words.csv",
    "fig7_scatter_very_high.csv",
    "fig7_scatter_high.csv",
    "fig7_scatter_medium.csv",
    "fig7_scatter_low.csv",
    "table1.csv",
    "correlations.csv",
    "country_counts.csv",
    "ingest_stats.json",
];

/// Replay of the bundled 10,000-line corpus against the bundled data files.
pub fn bundled_config(out_dir: &std::path::Path) -> twlens::pipeline::PipelineConfig {
    let mut kv = std::collections::BTreeMap::new();
    let p = |name: &str| data(name).display().to_string();
    kv.insert("input".to_string(), p("synthetic_corpus.jsonl"));
    kv.insert("gazetteer".to_string(), p("gazetteer.csv"));
    kv.insert("denylist".to_string(), p("denylist.txt"));
    kv.insert("native_map".to_string(), p("native_map.csv"));
    kv.insert("hdi".to_string(), p("hdi.csv"));
    kv.insert("out_dir".to_string(), out_dir.display().to_string());
    twlens::pipeline::PipelineConfig::from_kv(&kv).unwrap()
}

/// Golden files that differ from the copy in `dir`.
pub fn golden_mismatches(dir: &std::path::Path) -> Vec<String> {
    GOLDEN_FILES
        .iter()
        .filter(|f| {
            let want = std::fs::read(data("golden").join(f)).unwrap();
            std::fs::read(dir.join(f)).map_or(true, |got| got != want)
        })
        .map(|f| f.to_string())
        .collect()
}
