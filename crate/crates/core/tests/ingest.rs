mod common;

use std::collections::HashSet;
use std::io::Write;

use chrono::{DateTime, Utc};
use common::tweet_line;
use proptest::prelude::*;
use twlens::ingest::{dedupe, ingest, replay_source, DedupeConfig, IngestStats};
use twlens::model::TweetRecord;
use twlens::raw::parse_raw;
use twlens::records::{RecordReader, RecordWriter};
use twlens::synth::duplicate_stream;

fn run(lines: &[String], bound: usize) -> (IngestStats, Vec<TweetRecord>) {
    let mut kept = Vec::new();
    let cfg = DedupeConfig {
        memory_bound: bound,
        spill_dir: None,
    };
    let it = lines
        .iter()
        .map(|l| Ok(l.clone().into_bytes()))
        .collect::<Vec<_>>()
        .into_iter();
    let stats = ingest(it, &cfg, |r| {
        kept.push(r);
        Ok(())
    })
    .unwrap();
    (stats, kept)
}

/// Twenty lines with hand-counted outcomes.
fn filter_fixture() -> Vec<String> {
    vec![
        tweet_line("1", Some("Paris"), Some("fr"), "bonjour", false),
        tweet_line("2", Some("Tokyo"), Some("ja"), "こんにちは", false),
        tweet_line("3", None, Some("en"), "no location", false),
        tweet_line("4", Some(""), Some("en"), "empty location", false),
        tweet_line("5", Some("   "), Some("en"), "blank location", false),
        tweet_line("6", Some("Lagos"), None, "no lang", false),
        tweet_line("7", Some("Lagos"), Some("und"), "undetermined", false),
        tweet_line("8", Some("Lagos"), Some(""), "empty lang", false),
        tweet_line("1", Some("Paris"), Some("fr"), "bonjour again", false),
        tweet_line("9", Some("Berlin"), Some("de"), "RT @someone: hallo", false),
        tweet_line("10", Some("Roma"), Some("it"), "ciao", true),
        "{not json".to_string(),
        r#"{"id_str":"11","text":"no timestamp","user":{"location":"Oslo"},"lang":"no"}"#.to_string(),
        r#"{"created_at":"yesterday","id_str":"12","text":"x","user":{"location":"Oslo"},"lang":"no"}"#.to_string(),
        tweet_line("13", Some("Lima"), Some("es"), "hola", false),
        tweet_line("2", Some("Osaka"), Some("ja"), "same id, other text", false),
        tweet_line("14", Some("Konoha"), Some("en"), "fictional still kept here", false),
        tweet_line("15", Some("in your heart"), Some("en"), "free text still kept", false),
        tweet_line("16", None, None, "both missing counts as location", false),
        tweet_line("13", Some("Lima"), Some("es"), "hola", false),
    ]
}

#[test]
fn filter_fixture_counts() {
    let (stats, kept) = run(&filter_fixture(), 1000);
    let expected = IngestStats {
        seen: 20,
        skipped_missing_location: 4,
        skipped_missing_language: 3,
        parse_errors: 3,
        duplicates_removed: 3,
        kept: 7,
    };
    assert_eq!(stats, expected);
    assert!(stats.is_balanced());
    let ids: Vec<&str> = kept.iter().map(|r| r.tweet_id.as_str()).collect();
    assert_eq!(ids, ["1", "2", "9", "10", "13", "14", "15"]);
    assert_eq!(kept[0].text, "bonjour");
    assert_eq!(kept[1].raw_location, "Tokyo");
    assert!(kept[2].is_retweet, "RT @ prefix marks a retweet");
    assert!(kept[3].is_retweet);
    assert!(!kept[0].is_retweet);
}

#[test]
fn spill_path_matches_memory_path() {
    let lines = duplicate_stream(20_000, 3_000, 9);
    let (mem_stats, mem) = run(&lines, 1_000_000);
    let (spill_stats, spilled) = run(&lines, 700);
    assert_eq!(mem_stats, spill_stats);
    assert_eq!(mem_stats.duplicates_removed, 3_000);
    assert_eq!(mem, spilled);
}

#[test]
fn replay_of_a_million_lines() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    let lines = duplicate_stream(1_000_000, 50_000, 77);
    for l in &lines {
        writeln!(file, "{l}").unwrap();
    }
    file.flush().unwrap();
    drop(lines);
    let cfg = DedupeConfig {
        memory_bound: 200_000,
        spill_dir: None,
    };
    let mut kept = 0u64;
    let mut ids = HashSet::new();
    let source = replay_source(file.path()).unwrap();
    let stats = ingest(source, &cfg, |r| {
        kept += 1;
        assert!(ids.insert(r.tweet_id));
        Ok(())
    })
    .unwrap();
    assert_eq!(stats.seen, 1_000_000);
    assert_eq!(stats.duplicates_removed, 50_000);
    assert_eq!(stats.kept, 950_000);
    assert_eq!(kept, 950_000);
    assert!(stats.is_balanced());
}

fn arb_record() -> impl Strategy<Value = TweetRecord> {
    let text = "[ -~éü東京\u{0301}\n\",]{0,30}";
    let opt = |s: &'static str| proptest::option::of(s);
    (
        0i64..2_000_000_000,
        "[0-9]{1,12}",
        "[a-z]{2}",
        proptest::option::of(("[A-Z][a-z ]{0,12}", opt("[A-Za-z ]{1,10}"), "[A-Z]{2}")),
        "[^\u{0}\r]{1,20}".prop_filter("non-blank", |s: &String| !s.is_empty()),
        text,
        "[a-z_0-9]{0,15}",
        any::<bool>(),
        text,
    )
        .prop_map(|(ts, id, lang, place, loc, name, user, rt, body)| {
            let (country, city, iso) = match place {
                Some((c, city, iso)) => (Some(c), city, Some(iso)),
                None => (None, None, None),
            };
            TweetRecord {
                created_at: DateTime::<Utc>::from_timestamp(ts, 0).unwrap(),
                tweet_id: id,
                language_code: lang,
                detected_country: country,
                detected_city: city,
                country_iso: iso,
                raw_location: loc,
                display_name: name,
                username: user,
                is_retweet: rt,
                text: body,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_raw_never_panics(s in "\\PC{0,200}") {
        let _ = parse_raw(&s);
    }

    #[test]
    fn parse_raw_never_panics_on_near_json(
        id in "[0-9a-z\"\\\\]{0,8}",
        loc in "\\PC{0,20}",
        junk in "[{}\\[\\]:,\"]{0,4}",
    ) {
        let line = format!(r#"{{"created_at":"Wed Nov 01 00:00:00 +0000 2017","id_str":"{id}","user":{{"location":"{loc}"}}{junk}"#);
        let _ = parse_raw(&line);
    }

    #[test]
    fn record_csv_round_trip(records in proptest::collection::vec(arb_record(), 0..20)) {
        let mut buf = Vec::new();
        {
            let mut w = RecordWriter::new(&mut buf).unwrap();
            for r in &records {
                w.write(r).unwrap();
            }
            w.finish().unwrap();
        }
        let back: Vec<TweetRecord> = RecordReader::new(buf.as_slice())
            .unwrap()
            .collect::<Result<_, _>>()
            .unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn dedupe_is_idempotent(ids in proptest::collection::vec(0u8..40, 0..200), bound in 1usize..64) {
        let records: Vec<TweetRecord> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| TweetRecord {
                created_at: DateTime::<Utc>::from_timestamp(i as i64, 0).unwrap(),
                tweet_id: id.to_string(),
                language_code: "en".into(),
                detected_country: None,
                detected_city: None,
                country_iso: None,
                raw_location: "x".into(),
                display_name: String::new(),
                username: format!("u{i}"),
                is_retweet: false,
                text: String::new(),
            })
            .collect();
        let cfg = DedupeConfig { memory_bound: bound, spill_dir: None };
        let (once, removed) = dedupe(records.clone(), &cfg).unwrap().collect_records().unwrap();
        let (twice, removed_again) = dedupe(once.clone(), &cfg).unwrap().collect_records().unwrap();
        prop_assert_eq!(&twice, &once);
        prop_assert_eq!(removed_again, 0);
        let distinct: HashSet<u8> = ids.iter().copied().collect();
        prop_assert_eq!(once.len(), distinct.len());
        prop_assert_eq!(removed as usize, ids.len() - distinct.len());
        // first occurrence survives
        let mut seen = HashSet::new();
        let firsts: Vec<&TweetRecord> = records.iter().filter(|r| seen.insert(r.tweet_id.clone())).collect();
        prop_assert_eq!(once.iter().collect::<Vec<_>>(), firsts);
    }
}
