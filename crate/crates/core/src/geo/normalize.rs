use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases, strips combining marks after canonical decomposition, and
/// recomposes what is left (so Hangul syllables survive as syllables).
///
/// The result is a fixed point: applying the function again returns it
/// unchanged.
pub fn normalize_diacritics(text: &str) -> String {
    let mut current = fold_once(text);
    // Lowercasing can surface new decomposable characters (U+0130 lowers to
    // i + U+0307), so iterate until nothing changes. Two passes suffice in
    // practice; the bound only guards against pathological input.
    for _ in 0..4 {
        let next = fold_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn fold_once(text: &str) -> String {
    let lowered = text.to_lowercase();
    let stripped: String = lowered.nfd().filter(|c| !is_combining_mark(*c)).collect();
    stripped.nfc().collect()
}
