//! Seeded synthetic tweet streams with known ground truth.
//!
//! [`generate_corpus`] writes raw JSON lines that exercise every ingest path
//! (duplicates, missing locations, undetermined languages, malformed lines)
//! and every resolver outcome (real places with diacritics and decoration,
//! fictional places, free text). Word counts are planted exactly: a fixed
//! multiset of tokens with Zipf-shaped multiplicities is dealt across the
//! records that survive ingestion, so the expected frequency table is known
//! without running the tokenizer.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// `ISO weight lang | location | location ...`
const PLACES: &str = "
US 300 en | New York, NY | Los Angeles, California | chicago | Houston, Texas | Atlanta, Georgia | Indianapolis, Indiana | Seattle, WA | USA | Miami, Florida | Brooklyn
JP 120 ja | 東京 | Tokyo, Japan | Osaka | 日本 | Kyoto, JAPAN | Yokohama
GB 80 en | London | London, England | Manchester, UK | Glasgow, Scotland | Cardiff, Wales
BR 60 pt | São Paulo, Brasil | Rio de Janeiro | Brasília - DF | Belo Horizonte, Brazil | Recife
ES 55 es | Madrid, España | Barcelona | Sevilla | Valencia, Spain | Málaga
VE 40 es | Caracas, Venezuela | Maracaibo | Venezuela | Barquisimeto
MX 40 es | Ciudad de México | CDMX | Monterrey, N.L. | Guadalajara, Jalisco | México
AR 35 es | Buenos Aires, Argentina | Mendoza | Argentina
IN 35 en | New Delhi, India | Mumbai | Bengaluru | Chennai, India | Hyderabad
FR 30 fr | Paris, France | Lyon | Marseille | Toulouse, France
CA 30 en | Toronto, Ontario | Montréal, Québec | Vancouver, BC | Canada | Calgary, Alberta
ID 30 in | Jakarta, Indonesia | Bandung | Surabaya | Bali
TR 25 tr | İstanbul | Ankara, Türkiye | Izmir, Turkey
PH 25 tl | Manila, Philippines | Quezon City | Cebu | Makati
SA 25 ar | Riyadh | Jeddah, KSA | الرياض | Saudi Arabia
DE 20 de | Berlin | München | Hamburg, Deutschland | Köln
IT 18 it | Roma | Milano, Italia | Napoli | Torino
CO 18 es | Bogotá, Colombia | Medellín | Barranquilla
AU 15 en | Sydney, Australia | Melbourne | Brisbane
NG 15 en | Lagos, Nigeria | Abuja | Port Harcourt
ZA 12 en | Johannesburg | Cape Town, South Africa | Durban
TH 12 th | Bangkok | Chiang Mai, Thailand
KR 10 ko | Seoul | 서울 | Busan, Korea
NL 10 nl | Amsterdam | Rotterdam, Nederland
CL 10 es | Santiago, Chile | Valparaíso
PE 6 es | Lima, Perú | Arequipa
EG 8 ar | Cairo, Egypt | Alexandria
MY 8 ms | Kuala Lumpur | Penang, Malaysia
PK 8 ur | Karachi | Lahore, Pakistan | Islamabad
AE 6 ar | Dubai | Abu Dhabi, UAE
KE 6 en | Nairobi, Kenya | Mombasa
IE 6 en | Dublin, Ireland | Cork
RU 6 ru | Moscow | Москва | Saint Petersburg, Russia
EC 5 es | Quito | Guayaquil, Ecuador
SE 5 sv | Stockholm | Sweden
BE 5 nl | Brussels | Antwerp, Belgium
PT 5 pt | Lisboa | Porto, Portugal
SG 5 en | Singapore
CH 4 de | Zürich | Genève | Bern, Switzerland
NO 4 no | Oslo | Bergen, Norway
PL 4 pl | Warszawa | Kraków, Polska
KW 4 ar | Kuwait City | Kuwait
DO 4 es | Santo Domingo | Dominican Republic
AT 3 de | Wien | Vienna, Austria
DK 3 da | København | Denmark
FI 3 fi | Helsinki | Finland
NZ 3 en | Auckland | Wellington, New Zealand
HK 3 zh | Hong Kong | Kowloon
GR 3 el | Athens, Greece | Thessaloniki
IL 3 iw | Tel Aviv | Israel
UA 3 uk | Kyiv | Kharkiv, Ukraine
CR 3 es | Costa Rica
PA 3 es | Panamá
UY 3 es | Montevideo | Uruguay
GH 3 en | Accra, Ghana | Kumasi
VN 3 vi | Hanoi | Ho Chi Minh City | Việt Nam
MA 3 ar | Casablanca | Rabat, Morocco
BD 3 bn | Dhaka, Bangladesh
IQ 3 ar | Baghdad | Iraq
QA 2 ar | Doha, Qatar
CN 2 zh | Beijing | 上海
IR 2 fa | Tehran, Iran
LK 2 si | Colombo, Sri Lanka
JM 2 en | Kingston, Jamaica
CU 2 es | La Habana, Cuba
PY 2 es | Asunción, Paraguay
BO 2 es | La Paz, Bolivia
TN 2 ar | Tunis
DZ 2 ar | Algiers | Algeria
LB 2 ar | Beirut, Lebanon
JO 2 ar | Amman, Jordan
RS 2 sr | Belgrade, Serbia
UG 2 en | Kampala, Uganda
TZ 2 sw | Dar es Salaam
NP 2 ne | Kathmandu, Nepal
GT 2 es | Guatemala City
SV 2 es | San Salvador, El Salvador
PS 2 ar | Palestine
ET 2 am | Addis Ababa, Ethiopia
SD 2 ar | Khartoum, Sudan
HT 2 fr | Port-au-Prince, Haiti
YE 2 ar | Sanaa, Yemen
IS 1 is | Reykjavík
LI 1 de | Liechtenstein
TT 1 en | Port of Spain, Trinidad and Tobago
MU 1 en | Mauritius
AL 1 sq | Albania
GE 1 ka | Tbilisi, Georgia
BA 1 bs | Bosnia and Herzegovina
AM 1 hy | Yerevan, Armenia
HN 1 es | Tegucigalpa, Honduras
NI 1 es | Managua, Nicaragua
KG 1 ky | Bishkek
NA 1 en | Windhoek, Namibia
GY 1 en | Guyana
MW 1 en | Lilongwe, Malawi
CD 1 fr | Kinshasa, RDC
LR 1 en | Monrovia, Liberia
GN 1 fr | Conakry, Guinée
MZ 1 pt | Maputo, Moçambique
SL 1 en | Freetown, Sierra Leone
ML 1 fr | Bamako, Mali
GM 1 en | Banjul, The Gambia
";

const FICTIONAL: [&str; 6] = ["Konoha", "Gotham City", "Hueco Mundo", "Asgard", "Hogwarts", "Narnia"];

const FREE_TEXT: [&str; 10] = [
    "my house",
    "Earth",
    "everywhere",
    "somewhere over the rainbow",
    "in your heart",
    "the internet",
    "🌍",
    "worldwide",
    "he/him",
    "planet earth",
];

const VOCABULARY: &str = "a the to de i que of and is in you la for me on no this y that it el en
    with my be are so just not do at all we your have like what was but love can if one get up
    - out now about % when por lo las los un una se del con para me te mi es more how
    know from people they he she her his good new time day will go today see who there would
    only want why need make think back u our rt them been than very come ever an or by
    really always never still had got going as o um uma com nao pra voce muito mas mais
    bien pero todo como esta cuando hoy ya si yo tu nos eso ser hay muy vida mundo gracias
    feliz amor dia bom obrigado tudo ser sempre aqui happy best great life thank thanks first
    last night morning home world free win game music show video watch live right well even
    much many also over after before because here where which then these those some any
    every other another same such own say said tell tells told work works week year years";

const LANG_POOL: [&str; 64] = [
    "en", "es", "ja", "pt", "ar", "in", "fr", "tr", "tl", "ko", "th", "it", "de", "ru", "nl", "hi", "pl", "fa", "sv",
    "ur", "el", "uk", "zh", "ms", "cs", "da", "fi", "no", "ro", "hu", "iw", "vi", "ca", "eu", "bn", "ta", "te", "mr",
    "gu", "kn", "ml", "pa", "ne", "si", "my", "km", "lo", "ka", "hy", "am", "sr", "bg", "lt", "lv", "et", "sl", "is",
    "cy", "ht", "ps", "sw", "sq", "bs", "ky",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    /// Non-blank lines to emit.
    pub lines: usize,
    pub seed: u64,
    /// Make every one of the 64 pooled language codes occur among the kept
    /// records.
    pub all_languages: bool,
}

impl CorpusConfig {
    pub fn new(lines: usize, seed: u64) -> Self {
        Self {
            lines,
            seed,
            all_languages: false,
        }
    }
}

/// What an ingest run over the corpus must report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusTruth {
    pub seen: u64,
    pub kept: u64,
    pub duplicates: u64,
    pub skipped_missing_location: u64,
    pub skipped_missing_language: u64,
    pub parse_errors: u64,
    pub blank_lines: u64,
    /// Kept records whose location names a fictional place.
    pub fictional: u64,
    /// Kept records whose location names no place at all.
    pub free_text: u64,
    /// Kept records per true ISO code.
    pub countries: BTreeMap<String, u64>,
    pub languages: BTreeMap<String, u64>,
    /// Exact token counts over the kept records' texts.
    pub words: BTreeMap<String, u64>,
}

impl CorpusTruth {
    /// The `n` most frequent planted tokens, ties alphabetical.
    pub fn top_words(&self, n: usize) -> Vec<(String, u64)> {
        let mut v: Vec<_> = self.words.iter().map(|(k, c)| (k.clone(), *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v.truncate(n);
        v
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub lines: Vec<String>,
    pub truth: CorpusTruth,
}

struct Place {
    iso: Option<&'static str>,
    lang: &'static str,
    weight: u32,
    names: Vec<&'static str>,
}

fn places() -> Vec<Place> {
    let mut out: Vec<Place> = PLACES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut parts = line.split('|').map(str::trim);
            let head: Vec<&str> = parts.next().unwrap().split_whitespace().collect();
            Place {
                iso: Some(head[0]),
                weight: head[1].parse().unwrap(),
                lang: head[2],
                names: parts.collect(),
            }
        })
        .collect();
    out.push(Place {
        iso: None,
        lang: "en",
        weight: 12,
        names: FICTIONAL.to_vec(),
    });
    out.push(Place {
        iso: None,
        lang: "en",
        weight: 30,
        names: FREE_TEXT.to_vec(),
    });
    out
}

struct User {
    screen_name: String,
    display: String,
    home: usize,
    retweet_bias: f64,
}

#[derive(Clone)]
struct Kept {
    id: u64,
    at: DateTime<Utc>,
    user: usize,
    place: usize,
    location: String,
    lang: String,
    retweet: bool,
    tokens: Vec<String>,
}

fn twitter_time(at: &DateTime<Utc>) -> String {
    at.format("%a %b %d %H:%M:%S %z %Y").to_string()
}

fn weighted_index(rng: &mut ChaCha8Rng, cumulative: &[f64]) -> usize {
    let x = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
    cumulative.partition_point(|&c| c <= x).min(cumulative.len() - 1)
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn decorate(rng: &mut ChaCha8Rng, name: &str) -> String {
    match rng.gen_range(0..10) {
        0 => name.to_uppercase(),
        1 => name.to_lowercase(),
        2 => format!("📍 {name}"),
        3 => format!("{name} ✈️"),
        4 => format!("  {name} "),
        _ => name.to_string(),
    }
}

fn vocabulary() -> Vec<&'static str> {
    let mut seen = std::collections::HashSet::new();
    VOCABULARY
        .split_whitespace()
        .filter(|w| w.chars().all(|c| c.is_ascii_lowercase()) || *w == "-" || *w == "%")
        .filter(|w| seen.insert(*w))
        .collect()
}

fn render_text(rng: &mut ChaCha8Rng, tokens: &[String], handles: &[String]) -> String {
    let mut parts: Vec<String> = Vec::with_capacity(tokens.len() + 3);
    if rng.gen_bool(0.15) && !handles.is_empty() {
        parts.push(format!("@{}", handles[rng.gen_range(0..handles.len())]));
    }
    for t in tokens {
        let alpha = t.chars().all(|c| c.is_alphabetic());
        let mut s = t.clone();
        if alpha {
            match rng.gen_range(0..20) {
                0 => s = format!("#{s}"),
                1 => {
                    let mut cs = s.chars();
                    s = cs
                        .next()
                        .map(|c| c.to_uppercase().chain(cs).collect())
                        .unwrap_or_default();
                }
                2 => s.push(','),
                3 => s.push('!'),
                _ => {}
            }
        }
        parts.push(s);
    }
    if rng.gen_bool(0.2) {
        parts.push(format!("https://t.co/{:08x}", rng.gen::<u32>()));
    }
    if rng.gen_bool(0.05) {
        parts.push("🔥".into());
    }
    parts.join(" ")
}

fn tweet_json(k: &Kept, user: &User, text: &str) -> Value {
    let mut v = json!({
        "created_at": twitter_time(&k.at),
        "id": k.id,
        "id_str": k.id.to_string(),
        "text": text,
        "lang": k.lang,
        "user": {
            "name": user.display,
            "screen_name": user.screen_name,
            "location": k.location,
        },
    });
    if k.retweet {
        v["retweeted_status"] = json!({ "id_str": (k.id / 2).to_string() });
    }
    v
}

/// Generates a corpus of `config.lines` raw JSON lines plus a few blank ones.
pub fn generate_corpus(config: &CorpusConfig) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let places = places();
    let total = config.lines;
    let duplicates = total * 8 / 100;
    let missing_location = total * 8 / 100;
    let missing_language = total * 3 / 100;
    let malformed = total / 100;
    let kept_n = total - duplicates - missing_location - missing_language - malformed;

    let place_cum = cumulative(places.iter().map(|p| p.weight as f64));
    let user_n = (kept_n / 6).max(places.len().min(kept_n)).max(1);
    let mut users: Vec<User> = (0..user_n)
        .map(|i| {
            let name = if i == 0 {
                "ducosome".to_string()
            } else {
                format!("user{i:05}")
            };
            User {
                display: format!("User {i}"),
                screen_name: name,
                home: weighted_index(&mut rng, &place_cum),
                retweet_bias: rng.gen_range(0.0..0.6),
            }
        })
        .collect();
    users[0].home = places.iter().position(|p| p.iso == Some("JP")).unwrap_or(0);
    users[0].retweet_bias = 0.0;
    // The least active users cover every place once so each listed place
    // ends up with at least one record.
    if user_n >= places.len() {
        for (j, p) in (0..places.len()).enumerate() {
            users[user_n - 1 - j].home = p;
        }
    }

    // Per-user record counts: Zipf-shaped, at least one each, summing to kept_n.
    let zipf: Vec<f64> = (0..user_n).map(|i| 1.0 / ((i + 1) as f64).powf(0.9)).collect();
    let zsum: f64 = zipf.iter().sum();
    let mut per_user: Vec<usize> = zipf
        .iter()
        .map(|w| ((kept_n as f64 * w / zsum) as usize).max(1))
        .collect();
    let mut assigned: usize = per_user.iter().sum();
    while assigned > kept_n {
        let i = (0..user_n)
            .max_by_key(|&i| (per_user[i], std::cmp::Reverse(i)))
            .unwrap();
        per_user[i] -= 1;
        assigned -= 1;
    }
    let user_cum = cumulative(zipf.iter().copied());
    while assigned < kept_n {
        per_user[weighted_index(&mut rng, &user_cum)] += 1;
        assigned += 1;
    }

    let lang_cum = cumulative((0..LANG_POOL.len()).map(|i| 1.0 / (i + 1) as f64));
    let mut owners: Vec<usize> = per_user
        .iter()
        .enumerate()
        .flat_map(|(u, &n)| std::iter::repeat_n(u, n))
        .collect();
    owners.shuffle(&mut rng);

    let start: DateTime<Utc> = DateTime::from_timestamp(1_509_494_400, 0).unwrap();
    let mut clock = start;
    let mut next_id: u64 = 930_000_000_000_000_000;
    let mut fresh_id = |rng: &mut ChaCha8Rng| {
        next_id += rng.gen_range(1..5_000);
        next_id
    };

    let mut kept: Vec<Kept> = owners
        .iter()
        .map(|&u| {
            clock += Duration::milliseconds(rng.gen_range(1..120_000));
            let user = &users[u];
            let place = if rng.gen_bool(0.03) {
                weighted_index(&mut rng, &place_cum)
            } else {
                user.home
            };
            let p = &places[place];
            let name = p.names[rng.gen_range(0..p.names.len())];
            let lang = match rng.gen_range(0..10) {
                0..=6 => p.lang.to_string(),
                7 | 8 => "en".to_string(),
                _ => LANG_POOL[weighted_index(&mut rng, &lang_cum)].to_string(),
            };
            Kept {
                id: fresh_id(&mut rng),
                at: clock,
                user: u,
                place,
                location: decorate(&mut rng, name),
                lang,
                retweet: rng.gen_bool(user.retweet_bias),
                tokens: Vec::new(),
            }
        })
        .collect();
    if config.all_languages {
        let mut slots: Vec<usize> = (0..kept.len()).collect();
        slots.shuffle(&mut rng);
        for (code, &slot) in LANG_POOL.iter().zip(&slots) {
            kept[slot].lang = code.to_string();
        }
    }

    // Exact planted token multiset, dealt at random.
    let vocab = vocabulary();
    let harmonic: f64 = (1..=vocab.len()).map(|r| 1.0 / r as f64).sum();
    let scale = (kept_n as f64 * 8.0 / harmonic).max(1.0);
    let mut bag: Vec<&str> = vocab
        .iter()
        .enumerate()
        .flat_map(|(r, w)| std::iter::repeat_n(*w, (scale / (r + 1) as f64) as usize))
        .collect();
    bag.shuffle(&mut rng);
    if !kept.is_empty() {
        for w in bag {
            let i = rng.gen_range(0..kept.len());
            kept[i].tokens.push(w.to_string());
        }
    }

    let mut truth = CorpusTruth::default();
    let handles: Vec<String> = users.iter().take(50).map(|u| u.screen_name.clone()).collect();
    let kept_lines: Vec<String> = kept
        .iter()
        .map(|k| {
            let text = render_text(&mut rng, &k.tokens, &handles);
            tweet_json(k, &users[k.user], &text).to_string()
        })
        .collect();
    for k in &kept {
        for t in &k.tokens {
            *truth.words.entry(t.clone()).or_default() += 1;
        }
        *truth.languages.entry(k.lang.clone()).or_default() += 1;
        match places[k.place].iso {
            Some(iso) => *truth.countries.entry(iso.to_string()).or_default() += 1,
            None if FICTIONAL.contains(&places[k.place].names[0]) => truth.fictional += 1,
            None => truth.free_text += 1,
        }
    }

    // Noise records that ingestion must drop.
    let mut noise: Vec<String> = Vec::new();
    let mut noise_record = |rng: &mut ChaCha8Rng, location: Value, lang: Option<&str>| {
        let u = &users[rng.gen_range(0..users.len())];
        let k = Kept {
            id: fresh_id(rng),
            at: start + Duration::seconds(rng.gen_range(0..2_000_000)),
            user: 0,
            place: 0,
            location: String::new(),
            lang: String::new(),
            retweet: false,
            tokens: Vec::new(),
        };
        let mut v = tweet_json(&k, u, "noise record text");
        v["user"]["location"] = location;
        match lang {
            Some(l) => v["lang"] = json!(l),
            None => {
                v.as_object_mut().unwrap().remove("lang");
            }
        }
        v.to_string()
    };
    for i in 0..missing_location {
        let loc = match i % 4 {
            0 => Value::Null,
            1 => json!(""),
            2 => json!("   "),
            _ => json!("\t"),
        };
        noise.push(noise_record(&mut rng, loc, Some("en")));
    }
    for i in 0..missing_language {
        let lang = match i % 3 {
            0 => Some("und"),
            1 => Some(""),
            _ => None,
        };
        noise.push(noise_record(&mut rng, json!("London"), lang));
    }
    for i in 0..malformed {
        let line = match i % 3 {
            0 => {
                let full = noise_record(&mut rng, json!("Paris"), Some("fr"));
                full[..full.len() / 2].to_string()
            }
            1 => "{not json at all".to_string(),
            _ => "[1, 2, 3]".to_string(),
        };
        noise.push(line);
    }
    truth.skipped_missing_location = missing_location as u64;
    truth.skipped_missing_language = missing_language as u64;
    truth.parse_errors = malformed as u64;

    // Interleave: kept lines in order, noise at random points, duplicates
    // of already-emitted kept lines after their originals.
    let mut dup_after: Vec<usize> = (0..duplicates)
        .map(|_| rng.gen_range(0..kept_lines.len().max(1)))
        .collect();
    dup_after.sort_unstable();
    let mut noise_after: Vec<usize> = (0..noise.len())
        .map(|_| rng.gen_range(0..kept_lines.len().max(1)))
        .collect();
    noise_after.sort_unstable();
    let (mut di, mut ni) = (0, 0);
    let mut lines = Vec::with_capacity(total + 8);
    for (i, line) in kept_lines.iter().enumerate() {
        lines.push(line.clone());
        while di < dup_after.len() && dup_after[di] == i {
            lines.push(kept_lines[rng.gen_range(0..=i)].clone());
            di += 1;
        }
        while ni < noise_after.len() && noise_after[ni] == i {
            lines.push(noise[ni].clone());
            ni += 1;
        }
        if i % 2500 == 1249 {
            lines.push(String::new());
            truth.blank_lines += 1;
        }
    }
    truth.duplicates = di as u64;
    truth.kept = kept_lines.len() as u64;
    truth.seen = truth.kept
        + truth.duplicates
        + truth.skipped_missing_location
        + truth.skipped_missing_language
        + truth.parse_errors;
    SyntheticCorpus { lines, truth }
}

/// `total` well-formed, located lines of which exactly `duplicates` repeat an
/// earlier id.
pub fn duplicate_stream(total: usize, duplicates: usize, seed: u64) -> Vec<String> {
    assert!(duplicates <= total, "more duplicates than lines");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unique = total - duplicates;
    let start: DateTime<Utc> = DateTime::from_timestamp(1_509_494_400, 0).unwrap();
    let mut ids: Vec<u64> = (0..unique as u64).map(|i| 1_000_000 + i * 7).collect();
    ids.shuffle(&mut rng);
    let line = |id: u64, n: usize| {
        json!({
            "created_at": twitter_time(&(start + Duration::seconds(n as i64))),
            "id_str": id.to_string(),
            "text": format!("tweet {n}"),
            "lang": "en",
            "user": { "name": "S", "screen_name": format!("s{}", id % 97), "location": "London" },
        })
        .to_string()
    };
    let mut order: Vec<Option<usize>> = (0..unique).map(Some).collect();
    order.extend(std::iter::repeat_n(None, duplicates));
    // Shuffle, then make sure every duplicate slot follows at least one original.
    order.shuffle(&mut rng);
    if let Some(first_unique) = order.iter().position(Option::is_some) {
        order[..=first_unique].rotate_right(1);
    }
    let mut emitted: Vec<u64> = Vec::with_capacity(unique);
    order
        .into_iter()
        .enumerate()
        .map(|(n, slot)| match slot {
            Some(i) => {
                emitted.push(ids[i]);
                line(ids[i], n)
            }
            None => line(emitted[rng.gen_range(0..emitted.len())], n),
        })
        .collect()
}
