use std::time::Instant;

use qaforge::align::AlignerConfig;
use qaforge::retrieve::{
    synthesize_dataset, AlignerChoice, RetrieveOptions, SynthesisConfig, TranslitMode,
};
use qaforge::squad::{answer_is_embedded, SquadDataset};
use qaforge::textseg::AbbreviationLexicon;
use qaforge::translate::{
    identity_provider, TranslateError, TranslationProvider, TranslationResult, TranslationUnit,
};
use qaforge::translit::cyr_to_lat;

fn fixture() -> SquadDataset {
    SquadDataset::from_reader(include_str!("fixtures/squad_100.json").as_bytes()).unwrap()
}

fn check_conservation(input: &SquadDataset, output: &SquadDataset, drops: usize) {
    assert_eq!(output.len() + drops, input.len());
    for p in output.data.iter().flat_map(|a| &a.paragraphs) {
        for q in &p.qas {
            for a in &q.answers {
                assert!(
                    answer_is_embedded(&p.context, &a.text, a.answer_start),
                    "{}",
                    q.id
                );
            }
        }
    }
}

#[test]
fn identity_round_trip_on_fixture() {
    let input = fixture();
    assert_eq!(input.len(), 100);
    let config = SynthesisConfig {
        aligner: AlignerChoice::Diagonal,
        ..SynthesisConfig::default()
    };
    let started = Instant::now();
    let out = synthesize_dataset(
        &input,
        &AbbreviationLexicon::english(),
        &identity_provider(),
        None,
        &config,
    )
    .unwrap();
    assert!(started.elapsed().as_secs_f64() < 5.0);
    assert!(out.drops.is_empty());
    assert_eq!(out.dataset, input);
}

/// Reverses word order inside each sentence and marks every word, so the
/// aligner has real reordering to learn.
struct Scrambler;

impl TranslationProvider for Scrambler {
    fn id(&self) -> String {
        "scrambler".into()
    }

    fn translate(
        &self,
        units: &[TranslationUnit],
    ) -> Result<Vec<TranslationResult>, TranslateError> {
        Ok(units
            .iter()
            .map(|u| {
                let words: Vec<String> = u
                    .source_text
                    .split_whitespace()
                    .rev()
                    .map(|w| format!("{w}ш"))
                    .collect();
                TranslationResult {
                    id: u.id.clone(),
                    target_text: words.join(" "),
                }
            })
            .collect())
    }
}

fn trained(seed: u64) -> SynthesisConfig {
    SynthesisConfig {
        aligner: AlignerChoice::Trained(AlignerConfig {
            seed,
            ..AlignerConfig::default()
        }),
        translit: TranslitMode::Latin,
        ..SynthesisConfig::default()
    }
}

#[test]
fn trained_aligner_conserves_samples() {
    let input = fixture();
    let out = synthesize_dataset(
        &input,
        &AbbreviationLexicon::english(),
        &Scrambler,
        None,
        &trained(0),
    )
    .unwrap();
    check_conservation(&input, &out.dataset, out.drops.len());
    assert!(
        out.dataset.len() > 50,
        "only {} samples kept",
        out.dataset.len()
    );
    // transliteration reached the questions
    let q = &out.dataset.data[0].paragraphs[0].qas[0].question;
    assert_eq!(q, &cyr_to_lat(q));
    assert!(q.contains('š'));
}

#[test]
fn serial_runs_are_identical() {
    let input = fixture();
    let run = || {
        let out = synthesize_dataset(
            &input,
            &AbbreviationLexicon::english(),
            &Scrambler,
            None,
            &trained(3),
        )
        .unwrap();
        let mut data = Vec::new();
        out.dataset.to_writer(&mut data).unwrap();
        (data, serde_json::to_string(&out.drops).unwrap())
    };
    assert_eq!(run(), run());
}

#[test]
fn parallel_retrieve_and_gibbs_conserve() {
    let input = fixture();
    let mut config = trained(5);
    config.retrieve = RetrieveOptions {
        jobs: 4,
        ..RetrieveOptions::default()
    };
    if let AlignerChoice::Trained(c) = &mut config.aligner {
        c.trainer = qaforge::align::Trainer::Gibbs;
    }
    let out = synthesize_dataset(
        &input,
        &AbbreviationLexicon::english(),
        &Scrambler,
        None,
        &config,
    )
    .unwrap();
    check_conservation(&input, &out.dataset, out.drops.len());
}
