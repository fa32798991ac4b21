use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use qaforge::align::{
    diagonal_alignment, read_pharaoh_file, AlignerConfig, AlignmentLinkSet, BidirectionalAligner,
    ParallelCorpus, SentencePair, Trainer,
};
use qaforge::evalkit::{dataset_stats, evaluate as score, NormalizationOptions};
use qaforge::retrieve::{
    align_document, retrieve_document, split_dataset, translate_document, transliterate_document,
    AlignerChoice, DropRecord, RetrieveOptions, TranslitMode, WorkDocument,
};
use qaforge::squad::SquadDataset;
use qaforge::textseg::AbbreviationLexicon;
use qaforge::translate::{BatchOptions, ProviderSpec, TranslationCache};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{pick, require, FileConfig};
use crate::error::CliError;
use crate::manifest::{write_atomic, StageRun};
use crate::{
    AlignArgs, AlignFormat, AlignerKind, EvalArgs, IoArgs, LangArgs, ProviderArgs, RetrieveArgs,
    RetrieveFlags, SplitArgs, StatsArgs, SynthesizeArgs, TrainingArgs, TranslateArgs, TranslitArgs,
    TransliterateArgs,
};

const DEFAULT_SRC_LANG: &str = "eng_Latn";
const DEFAULT_TGT_LANG: &str = "srp_Cyrl";

struct Io {
    input: PathBuf,
    output: PathBuf,
    jobs: usize,
    force: bool,
}

fn resolve_io(args: &IoArgs, file: &FileConfig) -> Result<Io, CliError> {
    let jobs = pick(args.jobs, file.jobs, 1).max(1);
    // the first call wins; later stages in the same process keep the pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
    Ok(Io {
        input: require(args.input.clone(), file.input.clone(), "input")?,
        output: require(args.output.clone(), file.output.clone(), "output")?,
        jobs,
        force: args.force,
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::new("io", 3, format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::new("parse", 3, format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool) -> Result<(), CliError> {
    let bytes = if pretty {
        serde_json::to_vec_pretty(value)?
    } else {
        serde_json::to_vec(value)?
    };
    Ok(write_atomic(path, &bytes)?)
}

fn skip_notice(stage: &str, output: &Path) {
    eprintln!(
        "{}",
        json!({"status": "up_to_date", "stage": stage, "output": output.display().to_string()})
    );
}

struct Langs {
    src: String,
    tgt: String,
    lexicon: Option<PathBuf>,
}

fn resolve_langs(args: &LangArgs, file: &FileConfig) -> Langs {
    Langs {
        src: pick(
            args.src_lang.clone(),
            file.src_lang.clone(),
            DEFAULT_SRC_LANG.into(),
        ),
        tgt: pick(
            args.tgt_lang.clone(),
            file.tgt_lang.clone(),
            DEFAULT_TGT_LANG.into(),
        ),
        lexicon: args.lexicon.clone().or(file.lexicon.clone()),
    }
}

impl Langs {
    fn lexicon(&self) -> Result<AbbreviationLexicon, CliError> {
        match &self.lexicon {
            Some(path) => Ok(AbbreviationLexicon::load(path)?),
            None => Ok(AbbreviationLexicon::for_language(&self.src)),
        }
    }

    fn config(&self) -> Value {
        json!({"src_lang": self.src, "tgt_lang": self.tgt})
    }

    fn files(&self) -> Vec<PathBuf> {
        self.lexicon.iter().cloned().collect()
    }
}

pub fn split(args: SplitArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let io = resolve_io(&args.io, &file)?;
    let langs = resolve_langs(&args.langs, &file);
    let mut inputs = vec![io.input.clone()];
    inputs.extend(langs.files());
    let mut stage = StageRun::new("split", langs.config(), inputs, vec![io.output.clone()])?;
    if !io.force && stage.up_to_date() {
        skip_notice("split", &io.output);
        return Ok(());
    }
    let dataset: SquadDataset = read_json(&io.input)?;
    let lexicon = langs.lexicon()?;
    let doc = stage.time("split", || {
        split_dataset(&dataset, &lexicon, &langs.src, &langs.tgt)
    });
    write_json(&io.output, &doc, true)?;
    Ok(stage.finish()?)
}

struct Provider {
    spec: ProviderSpec,
    batch_size: usize,
}

fn resolve_provider(args: &ProviderArgs, file: &FileConfig) -> Result<Provider, CliError> {
    let spec = pick(
        args.provider.clone(),
        file.provider.clone(),
        "identity".into(),
    );
    Ok(Provider {
        spec: ProviderSpec::parse(&spec)?,
        batch_size: pick(
            args.batch_size,
            file.batch_size,
            BatchOptions::default().chunk_size,
        )
        .max(1),
    })
}

impl Provider {
    fn config(&self) -> Value {
        json!({"provider": self.spec.to_string(), "batch_size": self.batch_size})
    }

    fn files(&self) -> Vec<PathBuf> {
        match &self.spec {
            ProviderSpec::File(p) => vec![p.clone()],
            _ => Vec::new(),
        }
    }

    fn options(&self, jobs: usize) -> BatchOptions {
        BatchOptions {
            chunk_size: self.batch_size,
            concurrency: jobs,
        }
    }
}

fn open_cache(file: &FileConfig) -> Result<Option<TranslationCache>, CliError> {
    let dir = std::env::var_os("QAFORGE_CACHE_DIR")
        .map(PathBuf::from)
        .or(file.cache_dir.clone());
    Ok(match dir {
        Some(dir) => Some(TranslationCache::open(dir)?),
        None => None,
    })
}

fn http_auth() -> Option<String> {
    std::env::var("QAFORGE_HTTP_AUTH")
        .ok()
        .filter(|s| !s.is_empty())
}

pub fn translate(args: TranslateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let io = resolve_io(&args.io, &file)?;
    let provider = resolve_provider(&args.provider, &file)?;
    let mut inputs = vec![io.input.clone()];
    inputs.extend(provider.files());
    let mut stage = StageRun::new(
        "translate",
        provider.config(),
        inputs,
        vec![io.output.clone()],
    )?;
    if !io.force && stage.up_to_date() {
        skip_notice("translate", &io.output);
        return Ok(());
    }
    let doc: WorkDocument = read_json(&io.input)?;
    let handle = provider.spec.build(http_auth())?;
    let cache = open_cache(&file)?;
    let doc = stage.time("translate", || {
        translate_document(
            &doc,
            handle.as_ref(),
            cache.as_ref(),
            provider.options(io.jobs),
        )
    })?;
    write_json(&io.output, &doc, true)?;
    Ok(stage.finish()?)
}

fn resolve_translit(args: &TranslitArgs, file: &FileConfig) -> Result<TranslitMode, CliError> {
    pick(args.translit.clone(), file.translit.clone(), "off".into())
        .parse()
        .map_err(CliError::usage)
}

fn translit_name(mode: TranslitMode) -> &'static str {
    match mode {
        TranslitMode::Off => "off",
        TranslitMode::Latin => "latin",
        TranslitMode::Cyrillic => "cyrillic",
    }
}

pub fn transliterate(args: TransliterateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let io = resolve_io(&args.io, &file)?;
    let mode = resolve_translit(&args.translit, &file)?;
    let mut stage = StageRun::new(
        "transliterate",
        json!({"translit": translit_name(mode)}),
        vec![io.input.clone()],
        vec![io.output.clone()],
    )?;
    if !io.force && stage.up_to_date() {
        skip_notice("transliterate", &io.output);
        return Ok(());
    }
    let doc: WorkDocument = read_json(&io.input)?;
    let (doc, warnings) = stage.time("transliterate", || transliterate_document(&doc, mode));
    write_json(&io.output, &doc, true)?;
    if warnings > 0 {
        eprintln!(
            "{}",
            json!({"warning": "unconverted_letters", "count": warnings})
        );
    }
    Ok(stage.finish()?)
}

struct Training {
    kind: AlignerKind,
    config: AlignerConfig,
}

fn resolve_training(
    args: &TrainingArgs,
    file: &FileConfig,
    jobs: usize,
    default: AlignerKind,
) -> Result<Training, CliError> {
    let kind = match (args.aligner, &file.aligner) {
        (Some(k), _) => k,
        (None, Some(name)) => match name.as_str() {
            "em" => AlignerKind::Em,
            "gibbs" => AlignerKind::Gibbs,
            "diagonal" => AlignerKind::Diagonal,
            other => {
                return Err(CliError::usage(format!(
                    "unknown aligner {other:?} (em|gibbs|diagonal)"
                )))
            }
        },
        (None, None) => default,
    };
    let defaults = AlignerConfig::default();
    let config = AlignerConfig {
        trainer: if kind == AlignerKind::Gibbs {
            Trainer::Gibbs
        } else {
            Trainer::Em
        },
        iterations: pick(args.iterations, file.iterations, defaults.iterations),
        alpha: pick(args.alpha, file.alpha, defaults.alpha),
        seed: pick(args.seed, file.seed, defaults.seed),
        max_tokens: pick(args.max_tokens, file.max_tokens, defaults.max_tokens),
        threads: jobs,
    };
    if config.iterations == 0 {
        return Err(CliError::usage("--iterations must be at least 1"));
    }
    if !(config.alpha > 0.0 && config.alpha.is_finite()) {
        return Err(CliError::usage("--alpha must be positive"));
    }
    Ok(Training { kind, config })
}

impl Training {
    fn to_json(&self) -> Value {
        let name = match self.kind {
            AlignerKind::Em => "em",
            AlignerKind::Gibbs => "gibbs",
            AlignerKind::Diagonal => "diagonal",
        };
        if self.kind == AlignerKind::Diagonal {
            return json!({"aligner": name});
        }
        json!({
            "aligner": name,
            "iterations": self.config.iterations,
            "alpha": self.config.alpha,
            "seed": self.config.seed,
            "max_tokens": self.config.max_tokens,
            "threads": self.config.threads,
        })
    }

    fn choice(&self) -> AlignerChoice {
        match self.kind {
            AlignerKind::Diagonal => AlignerChoice::Diagonal,
            _ => AlignerChoice::Trained(self.config.clone()),
        }
    }

    fn align_corpus(&self, corpus: &ParallelCorpus) -> Result<Vec<AlignmentLinkSet>, CliError> {
        if self.kind == AlignerKind::Diagonal {
            return Ok(corpus
                .pairs()
                .iter()
                .map(|p| diagonal_alignment(p.source.len(), p.target.len()))
                .collect());
        }
        let aligner = BidirectionalAligner::train(corpus, &self.config)?;
        let align = |p: &SentencePair| aligner.align(&p.source, &p.target);
        Ok(if self.config.threads > 1 {
            use rayon::prelude::*;
            corpus.pairs().par_iter().map(align).collect()
        } else {
            corpus.pairs().iter().map(align).collect()
        })
    }
}

fn pharaoh_bytes(alignments: &[AlignmentLinkSet]) -> Vec<u8> {
    let mut out = Vec::new();
    qaforge::align::write_pharaoh(&mut out, alignments).expect("writing to memory");
    out
}

pub fn align(args: AlignArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let io = resolve_io(&args.io, &file)?;
    let training = resolve_training(&args.training, &file, io.jobs, AlignerKind::Em)?;
    let mut inputs = vec![io.input.clone()];
    if args.format == AlignFormat::Text {
        inputs.push(
            args.target
                .clone()
                .ok_or_else(|| CliError::usage("--format text needs --target"))?,
        );
    }
    let format = match args.format {
        AlignFormat::Work => "work",
        AlignFormat::Jsonl => "jsonl",
        AlignFormat::Text => "text",
        AlignFormat::Pharaoh => "pharaoh",
    };
    let mut config = training.to_json();
    config["format"] = json!(format);
    let mut stage = StageRun::new("align", config, inputs.clone(), vec![io.output.clone()])?;
    if !io.force && stage.up_to_date() {
        skip_notice("align", &io.output);
        return Ok(());
    }
    let open = |p: &Path| -> Result<BufReader<File>, CliError> {
        File::open(p)
            .map(BufReader::new)
            .map_err(|e| CliError::new("io", 3, format!("{}: {e}", p.display())))
    };
    let alignments = match args.format {
        AlignFormat::Pharaoh => read_pharaoh_file(&io.input)?,
        AlignFormat::Work => {
            let doc: WorkDocument = read_json(&io.input)?;
            stage.time("align", || align_document(&doc, &training.choice()))?
        }
        AlignFormat::Jsonl => {
            let corpus = ParallelCorpus::from_jsonl(open(&io.input)?)?;
            stage.time("align", || training.align_corpus(&corpus))?
        }
        AlignFormat::Text => {
            let corpus = ParallelCorpus::from_parallel_text(open(&inputs[0])?, open(&inputs[1])?)?;
            stage.time("align", || training.align_corpus(&corpus))?
        }
    };
    write_atomic(&io.output, &pharaoh_bytes(&alignments))?;
    Ok(stage.finish()?)
}

fn drop_report_path(flags: &RetrieveFlags, file: &FileConfig, output: &Path) -> PathBuf {
    flags
        .drop_report
        .clone()
        .or(file.drop_report.clone())
        .unwrap_or_else(|| {
            let mut name = output.file_name().unwrap_or_default().to_os_string();
            name.push(".drops.jsonl");
            output.with_file_name(name)
        })
}

fn drop_report_bytes(drops: &[DropRecord]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    for d in drops {
        serde_json::to_writer(&mut out, d)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn retrieve_options(flags: &RetrieveFlags, file: &FileConfig, jobs: usize) -> RetrieveOptions {
    RetrieveOptions {
        drop_punctuation_only: flags.drop_punctuation_only
            || file.drop_punctuation_only.unwrap_or(false),
        jobs,
    }
}

fn write_outputs(
    output: &Path,
    drop_report: &Path,
    inputs: usize,
    dataset: &SquadDataset,
    drops: &[DropRecord],
) -> Result<(), CliError> {
    let mut bytes = Vec::new();
    dataset.to_writer(&mut bytes)?;
    write_atomic(output, &bytes)?;
    write_atomic(drop_report, &drop_report_bytes(drops)?)?;
    let mut by_reason: BTreeMap<String, usize> = BTreeMap::new();
    for d in drops {
        *by_reason.entry(format!("{:?}", d.reason)).or_default() += 1;
    }
    let summary = json!({
        "inputs": inputs,
        "outputs": dataset.len(),
        "drops": drops.len(),
        "drops_by_reason": by_reason,
    });
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{summary}")?;
    Ok(())
}

pub fn retrieve(args: RetrieveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let io = resolve_io(&args.io, &file)?;
    let alignments_path = require(
        args.alignments.clone(),
        file.alignments.clone(),
        "alignments",
    )?;
    let drop_report = drop_report_path(&args.flags, &file, &io.output);
    let options = retrieve_options(&args.flags, &file, io.jobs);
    let mut stage = StageRun::new(
        "retrieve",
        json!({"drop_punctuation_only": options.drop_punctuation_only}),
        vec![io.input.clone(), alignments_path.clone()],
        vec![io.output.clone(), drop_report.clone()],
    )?;
    if !io.force && stage.up_to_date() {
        skip_notice("retrieve", &io.output);
        return Ok(());
    }
    let doc: WorkDocument = read_json(&io.input)?;
    let alignments = read_pharaoh_file(&alignments_path)?;
    let (dataset, drops) =
        stage.time("retrieve", || retrieve_document(&doc, &alignments, options))?;
    write_outputs(
        &io.output,
        &drop_report,
        doc.question_count(),
        &dataset,
        &drops,
    )?;
    Ok(stage.finish()?)
}

pub fn synthesize(args: SynthesizeArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let io = resolve_io(&args.io, &file)?;
    let langs = resolve_langs(&args.langs, &file);
    let provider = resolve_provider(&args.provider, &file)?;
    let mode = resolve_translit(&args.translit, &file)?;
    // an untranslated text aligns with itself word for word
    let default_aligner = match provider.spec {
        ProviderSpec::Identity => AlignerKind::Diagonal,
        _ => AlignerKind::Em,
    };
    let training = resolve_training(&args.training, &file, io.jobs, default_aligner)?;
    let external = args.alignments.clone().or(file.alignments.clone());
    let drop_report = drop_report_path(&args.flags, &file, &io.output);
    let options = retrieve_options(&args.flags, &file, io.jobs);

    let mut config = langs.config();
    for (k, v) in [
        ("provider", provider.config()),
        (
            "aligner",
            if external.is_some() {
                json!("external")
            } else {
                training.to_json()
            },
        ),
    ] {
        config[k] = v;
    }
    config["translit"] = json!(translit_name(mode));
    config["drop_punctuation_only"] = json!(options.drop_punctuation_only);
    let mut inputs = vec![io.input.clone()];
    inputs.extend(langs.files());
    inputs.extend(provider.files());
    inputs.extend(external.iter().cloned());
    let mut stage = StageRun::new(
        "synthesize",
        config,
        inputs,
        vec![io.output.clone(), drop_report.clone()],
    )?;
    if !io.force && stage.up_to_date() {
        skip_notice("synthesize", &io.output);
        return Ok(());
    }

    let dataset: SquadDataset = read_json(&io.input)?;
    let lexicon = langs.lexicon()?;
    let handle = provider.spec.build(http_auth())?;
    let cache = open_cache(&file)?;
    let doc = stage.time("split", || {
        split_dataset(&dataset, &lexicon, &langs.src, &langs.tgt)
    });
    let doc = stage.time("translate", || {
        translate_document(
            &doc,
            handle.as_ref(),
            cache.as_ref(),
            provider.options(io.jobs),
        )
    })?;
    let (doc, warnings) = stage.time("transliterate", || transliterate_document(&doc, mode));
    let choice = match &external {
        Some(path) => AlignerChoice::External(read_pharaoh_file(path)?),
        None => training.choice(),
    };
    let alignments = stage.time("align", || align_document(&doc, &choice))?;
    let (out, drops) = stage.time("retrieve", || retrieve_document(&doc, &alignments, options))?;
    if warnings > 0 {
        eprintln!(
            "{}",
            json!({"warning": "unconverted_letters", "count": warnings})
        );
    }
    write_outputs(&io.output, &drop_report, dataset.len(), &out, &drops)?;
    Ok(stage.finish()?)
}

fn print_and_save<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), CliError> {
    if let Some(path) = output {
        write_json(path, value, true)?;
    }
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let input = require(args.io.input.clone(), file.input.clone(), "input")?;
    let output = args.io.output.clone().or(file.output.clone());
    let dataset: SquadDataset = read_json(&input)?;
    print_and_save(&dataset_stats(&dataset), output.as_deref())
}

pub fn evaluate(args: EvalArgs, table: bool) -> Result<(), CliError> {
    let file = FileConfig::load(args.io.config.as_deref())?;
    let input = require(args.io.input.clone(), file.input.clone(), "input")?;
    let predictions_path = require(
        args.predictions.clone(),
        file.predictions.clone(),
        "predictions",
    )?;
    let output = args.io.output.clone().or(file.output.clone());
    let dataset: SquadDataset = read_json(&input)?;
    let predictions: HashMap<String, String> = read_json(&predictions_path)?;
    let opts = if args.english || file.english.unwrap_or(false) {
        NormalizationOptions::english_compat()
    } else {
        NormalizationOptions::default()
    };
    let report = score(&predictions, &dataset, &opts)?;
    if let Some(path) = &output {
        write_json(path, &report, true)?;
    }
    let mut stdout = std::io::stdout().lock();
    if table {
        write!(stdout, "{}", report.to_table())?;
    } else {
        let summary =
            json!({"exact_match": report.exact_match, "f1": report.f1, "count": report.count});
        writeln!(stdout, "{summary}")?;
    }
    Ok(())
}
