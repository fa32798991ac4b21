use qaforge::translit::{cyr_to_lat, detect_script, lat_to_cyr, ScriptTag};

fn rows(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

#[test]
fn full_alphabet_both_cases() {
    let table = include_str!("fixtures/translit_table.tsv");
    let mut n = 0;
    for line in rows(table) {
        let (cyr, lat) = line.split_once('\t').unwrap();
        assert_eq!(cyr_to_lat(cyr), lat, "{cyr}");
        assert_eq!(lat_to_cyr(lat).0, cyr, "{lat}");
        n += 1;
    }
    assert_eq!(n, 60);
}

#[test]
fn digraph_casing() {
    assert_eq!(cyr_to_lat("ЉУБАВ"), "LJUBAV");
    assert_eq!(cyr_to_lat("Његош"), "Njegoš");
    assert_eq!(cyr_to_lat("ЏЕП"), "DŽEP");
    assert_eq!(cyr_to_lat("Џеп"), "Džep");
    assert_eq!(cyr_to_lat("ЊУ"), "NJU");
    assert_eq!(cyr_to_lat("Београд 1856."), "Beograd 1856.");
}

#[test]
fn curated_words_round_trip() {
    let words: Vec<&str> = rows(include_str!("fixtures/translit_words.txt")).collect();
    assert!(words.len() >= 200);
    for w in &words {
        let lat = cyr_to_lat(w);
        assert_eq!(detect_script(&lat), ScriptTag::Latin, "{w}");
        assert_eq!(lat_to_cyr(&lat).0, *w, "{w} -> {lat}");
    }
    let sentence = words.join(" ");
    assert_eq!(lat_to_cyr(&cyr_to_lat(&sentence)).0, sentence);
}
