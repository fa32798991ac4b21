//! Serbian Cyrillic ⇄ Latin transliteration.

use serde::{Deserialize, Serialize};

/// Serbian Cyrillic alphabet in order, paired with the Latin spelling of
/// the lowercase letter.
pub const ALPHABET: [(char, &str); 30] = [
    ('а', "a"),
    ('б', "b"),
    ('в', "v"),
    ('г', "g"),
    ('д', "d"),
    ('ђ', "đ"),
    ('е', "e"),
    ('ж', "ž"),
    ('з', "z"),
    ('и', "i"),
    ('ј', "j"),
    ('к', "k"),
    ('л', "l"),
    ('љ', "lj"),
    ('м', "m"),
    ('н', "n"),
    ('њ', "nj"),
    ('о', "o"),
    ('п', "p"),
    ('р', "r"),
    ('с', "s"),
    ('т', "t"),
    ('ћ', "ć"),
    ('у', "u"),
    ('ф', "f"),
    ('х', "h"),
    ('ц', "c"),
    ('ч', "č"),
    ('џ', "dž"),
    ('ш', "š"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScriptTag {
    Cyrillic,
    Latin,
    Mixed,
    Neutral,
}

/// Result of [`cyr_to_lat_tallied`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transliteration {
    pub text: String,
    /// Cyrillic letters outside the Serbian alphabet, copied through as-is.
    pub foreign_letters: usize,
}

fn latin_for(lower: char) -> Option<&'static str> {
    ALPHABET.iter().find(|(c, _)| *c == lower).map(|(_, l)| *l)
}

fn cyrillic_for(lower_latin: &str) -> Option<char> {
    ALPHABET
        .iter()
        .find(|(_, l)| *l == lower_latin)
        .map(|(c, _)| *c)
}

fn is_cyrillic_letter(c: char) -> bool {
    matches!(c as u32, 0x0400..=0x052F) && c.is_alphabetic()
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || (matches!(c as u32, 0x00C0..=0x024F) && c.is_alphabetic() && c != '×' && c != '÷')
}

fn lower(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

fn upper_str(s: &str) -> String {
    s.to_uppercase()
}

fn title_str(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Whether the letter run around `at` is written in capitals (at least two
/// letters, all uppercase).
fn in_all_caps_word(chars: &[char], at: usize) -> bool {
    let mut begin = at;
    while begin > 0 && chars[begin - 1].is_alphabetic() {
        begin -= 1;
    }
    let mut end = at + 1;
    while end < chars.len() && chars[end].is_alphabetic() {
        end += 1;
    }
    end - begin >= 2 && chars[begin..end].iter().all(|c| c.is_uppercase())
}

/// Cyrillic → Latin, counting letters that are Cyrillic but not Serbian.
///
/// Uppercase Љ, Њ, Џ become "LJ", "NJ", "DŽ" when the next letter is also
/// uppercase or the word is written in capitals, and "Lj", "Nj", "Dž"
/// otherwise.
pub fn cyr_to_lat_tallied(text: &str) -> Transliteration {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + text.len() / 4);
    let mut foreign_letters = 0;
    for (k, &c) in chars.iter().enumerate() {
        let Some(latin) = latin_for(lower(c)) else {
            if is_cyrillic_letter(c) {
                foreign_letters += 1;
            }
            out.push(c);
            continue;
        };
        if !c.is_uppercase() {
            out.push_str(latin);
        } else if latin.chars().count() == 1 {
            out.push_str(&upper_str(latin));
        } else {
            let next_upper = chars
                .get(k + 1)
                .is_some_and(|n| n.is_alphabetic() && n.is_uppercase());
            if next_upper || in_all_caps_word(&chars, k) {
                out.push_str(&upper_str(latin));
            } else {
                out.push_str(&title_str(latin));
            }
        }
    }
    Transliteration {
        text: out,
        foreign_letters,
    }
}

pub fn cyr_to_lat(text: &str) -> String {
    cyr_to_lat_tallied(text).text
}

/// Best-effort Latin → Cyrillic with greedy `dž`/`lj`/`nj` matching.
///
/// Returns the converted text and the number of digraphs merged; each of
/// them may be a false merge (`nadživeti` → `наџивети`).
pub fn lat_to_cyr(text: &str) -> (String, usize) {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() * 2);
    let mut ambiguity = 0;
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let lc = lower(c);
        if let Some(&next) = chars.get(k + 1) {
            let digraph = match (lc, lower(next)) {
                ('d', 'ž') => Some("dž"),
                ('l', 'j') => Some("lj"),
                ('n', 'j') => Some("nj"),
                _ => None,
            };
            if let Some(d) = digraph {
                let cyr = cyrillic_for(d).expect("digraph in alphabet");
                push_cased(&mut out, cyr, c.is_uppercase());
                ambiguity += 1;
                k += 2;
                continue;
            }
        }
        let mut buf = [0u8; 4];
        match cyrillic_for(lc.encode_utf8(&mut buf)) {
            Some(cyr) => push_cased(&mut out, cyr, c.is_uppercase()),
            None => out.push(c),
        }
        k += 1;
    }
    (out, ambiguity)
}

fn push_cased(out: &mut String, c: char, upper: bool) {
    if upper {
        out.extend(c.to_uppercase());
    } else {
        out.push(c);
    }
}

pub fn detect_script(text: &str) -> ScriptTag {
    let cyrillic = text.chars().any(is_cyrillic_letter);
    let latin = text.chars().any(is_latin_letter);
    match (cyrillic, latin) {
        (true, false) => ScriptTag::Cyrillic,
        (false, true) => ScriptTag::Latin,
        (true, true) => ScriptTag::Mixed,
        (false, false) => ScriptTag::Neutral,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(cyr_to_lat("Његош"), "Njegoš");
        assert_eq!(cyr_to_lat("ЉУБАВ"), "LJUBAV");
        assert_eq!(cyr_to_lat("Београд 1856."), "Beograd 1856.");
        assert_eq!(lat_to_cyr("Njegoš"), ("Његош".to_string(), 1));
        assert_eq!(lat_to_cyr("NATO"), ("НАТО".to_string(), 0));
        assert_eq!(lat_to_cyr("nadživeti"), ("наџивети".to_string(), 1));
        assert_eq!(detect_script("Тесла"), ScriptTag::Cyrillic);
        assert_eq!(detect_script("Tesla (Тесла)"), ScriptTag::Mixed);
        assert_eq!(detect_script("1856."), ScriptTag::Neutral);
        assert_eq!(detect_script("Šta"), ScriptTag::Latin);
    }

    #[test]
    fn digraph_casing() {
        assert_eq!(cyr_to_lat("ЏЕП"), "DŽEP");
        assert_eq!(cyr_to_lat("Џеп"), "Džep");
        assert_eq!(cyr_to_lat("КОЊ"), "KONJ");
        assert_eq!(cyr_to_lat("Њ"), "Nj");
        assert_eq!(cyr_to_lat("ЊЕГОШ и Љ."), "NJEGOŠ i Lj.");
        assert_eq!(lat_to_cyr("LJUBAV").0, "ЉУБАВ");
        assert_eq!(lat_to_cyr("DŽEP").0, "ЏЕП");
    }

    #[test]
    fn foreign_cyrillic_passes_through() {
        let t = cyr_to_lat_tallied("Щука ы");
        assert_eq!(t.text, "Щuka ы");
        assert_eq!(t.foreign_letters, 2);
    }

    proptest! {
        #[test]
        fn idempotent_and_never_shorter(s in "[абвгдђежзијклљмнњопрстћуфхцчџшАБВГДЂЕЖЗИЈКЛЉМНЊОПРСТЋУФХЦЧЏШ a-z0-9.,]{0,40}") {
            let once = cyr_to_lat(&s);
            prop_assert_eq!(cyr_to_lat(&once), once.clone());
            prop_assert!(once.chars().count() >= s.chars().count());
            prop_assert_ne!(detect_script(&once), ScriptTag::Cyrillic);
        }
    }
}
