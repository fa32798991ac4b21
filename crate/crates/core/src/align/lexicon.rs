use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlignError, AlignmentLinkSet, Direction, ParallelCorpus};

/// Name of the empty source word that absorbs unaligned target words.
pub const NULL_WORD: &str = "<NULL>";

// id 0 of every source vocabulary
const NULL_ID: u32 = 0;

#[derive(Debug, Clone, Default)]
struct Vocabulary {
    index: HashMap<String, u32>,
    words: Vec<String>,
}

impl Vocabulary {
    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.index.insert(word.to_string(), id);
        self.words.push(word.to_string());
        id
    }

    fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// t(target | source) for one source word: explicit probabilities for the
/// target words it co-occurred with, and a smoothing floor for the rest.
#[derive(Debug, Clone, Default)]
struct Row {
    targets: Vec<u32>,
    probs: Vec<f64>,
    floor: f64,
}

impl Row {
    fn position(&self, f: u32) -> Option<usize> {
        self.targets.binary_search(&f).ok()
    }

    fn prob(&self, f: Option<u32>) -> f64 {
        match f.and_then(|f| self.position(f)) {
            Some(k) => self.probs[k],
            None => self.floor,
        }
    }
}

/// Lexical translation probabilities t(target word | source word),
/// including the reserved [`NULL_WORD`] source.
#[derive(Debug, Clone)]
pub struct LexiconTable {
    source: Vocabulary,
    target: Vocabulary,
    rows: Vec<Row>,
    alpha: f64,
}

impl LexiconTable {
    /// t(target | source); `None` as source is the NULL word. Unknown
    /// target words get the source row's smoothing floor; unknown source
    /// words have probability zero.
    pub fn prob(&self, source: Option<&str>, target: &str) -> f64 {
        let e = match source {
            None => NULL_ID,
            Some(w) => match self.source.get(w) {
                Some(e) => e,
                None => return 0.0,
            },
        };
        self.rows[e as usize].prob(self.target.get(target))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Real source words (without NULL).
    pub fn source_words(&self) -> impl Iterator<Item = &str> {
        self.source.words.iter().skip(1).map(String::as_str)
    }

    pub fn target_words(&self) -> impl Iterator<Item = &str> {
        self.target.words.iter().map(String::as_str)
    }

    /// Σ over the whole target vocabulary of t(· | source).
    pub fn row_sum(&self, source: Option<&str>) -> Option<f64> {
        let e = match source {
            None => NULL_ID,
            Some(w) => self.source.get(w)?,
        };
        Some(row_sum(&self.rows[e as usize], self.target.len()))
    }

    /// Largest |Σ t(·|e) − 1| over all source words including NULL.
    pub fn max_row_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (row_sum(r, self.target.len()) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest probability in the table, floors included.
    pub fn min_prob(&self) -> f64 {
        let v = self.target.len();
        self.rows
            .iter()
            .flat_map(|r| {
                let floor = if r.targets.len() < v {
                    Some(r.floor)
                } else {
                    None
                };
                r.probs.iter().copied().chain(floor)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn row_sum(row: &Row, vocab: usize) -> f64 {
    let explicit: f64 = row.probs.iter().sum();
    explicit + row.floor * (vocab - row.targets.len()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub iterations: usize,
    pub alpha: f64,
    pub max_tokens: usize,
    /// 1 = serial. With more threads the E-step splits the corpus into that
    /// many contiguous shards whose counts are summed in shard order, so a
    /// given thread count is reproducible, but results can differ from the
    /// serial run in the last bits because the additions are grouped
    /// differently.
    pub threads: usize,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            iterations: 5,
            alpha: 0.001,
            max_tokens: 200,
            threads: 1,
        }
    }
}

/// State of the table after `iteration` EM updates (0 = initial table).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    /// Corpus log-likelihood under Model 1 with a uniform alignment prior.
    pub log_likelihood: f64,
    pub max_row_error: f64,
}

struct Encoded {
    pairs: Vec<(Vec<u32>, Vec<u32>)>,
}

fn encode(corpus: &ParallelCorpus, max_tokens: usize) -> (Vocabulary, Vocabulary, Encoded) {
    let mut source = Vocabulary::default();
    source.intern(NULL_WORD);
    let mut target = Vocabulary::default();
    let mut pairs = Vec::new();
    for p in corpus.pairs() {
        if p.source.len() > max_tokens || p.target.len() > max_tokens {
            continue;
        }
        let src = p.source.iter().map(|w| source.intern(w)).collect();
        let tgt = p.target.iter().map(|w| target.intern(w)).collect();
        pairs.push((src, tgt));
    }
    (source, target, Encoded { pairs })
}

/// Rows initialized uniformly over each source word's co-occurring targets.
fn uniform_rows(n_source: usize, data: &Encoded) -> Vec<Row> {
    let mut cooc: Vec<Vec<u32>> = vec![Vec::new(); n_source];
    for (src, tgt) in &data.pairs {
        for &e in std::iter::once(&NULL_ID).chain(src) {
            cooc[e as usize].extend_from_slice(tgt);
        }
    }
    cooc.into_iter()
        .map(|mut targets| {
            targets.sort_unstable();
            targets.dedup();
            let p = 1.0 / targets.len().max(1) as f64;
            let probs = vec![p; targets.len()];
            Row {
                targets,
                probs,
                floor: 0.0,
            }
        })
        .collect()
}

fn zero_counts(rows: &[Row]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| vec![0.0; r.targets.len()]).collect()
}

/// Expected link counts and log-likelihood over a shard of sentence pairs.
fn expectation(rows: &[Row], pairs: &[(Vec<u32>, Vec<u32>)]) -> (Vec<Vec<f64>>, f64) {
    let mut counts = zero_counts(rows);
    let mut ll = 0.0;
    let mut slots: Vec<(u32, usize, f64)> = Vec::new();
    for (src, tgt) in pairs {
        for &f in tgt {
            slots.clear();
            let mut z = 0.0;
            for &e in std::iter::once(&NULL_ID).chain(src) {
                let row = &rows[e as usize];
                let k = row.position(f).expect("co-occurring target is in the row");
                let p = row.probs[k];
                z += p;
                slots.push((e, k, p));
            }
            ll += z.ln();
            for &(e, k, p) in &slots {
                counts[e as usize][k] += p / z;
            }
        }
        ll -= tgt.len() as f64 * ((src.len() + 1) as f64).ln();
    }
    (counts, ll)
}

fn expectation_sharded(rows: &[Row], data: &Encoded, threads: usize) -> (Vec<Vec<f64>>, f64) {
    if threads <= 1 || data.pairs.len() < 2 {
        return expectation(rows, &data.pairs);
    }
    let shard = data.pairs.len().div_ceil(threads);
    let partials: Vec<(Vec<Vec<f64>>, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = data
            .pairs
            .chunks(shard)
            .map(|chunk| s.spawn(move || expectation(rows, chunk)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("E-step worker"))
            .collect()
    });
    let mut parts = partials.into_iter();
    let (mut counts, mut ll) = parts.next().expect("at least one shard");
    for (c, l) in parts {
        ll += l;
        for (acc, row) in counts.iter_mut().zip(c) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
    }
    (counts, ll)
}

/// Normalized expected counts with add-α smoothing over the target
/// vocabulary.
fn maximize(rows: &mut [Row], counts: &[Vec<f64>], alpha: f64, vocab: usize) {
    for (row, c) in rows.iter_mut().zip(counts) {
        let total: f64 = c.iter().sum();
        let denom = total + alpha * vocab as f64;
        for (p, &n) in row.probs.iter_mut().zip(c) {
            *p = (n + alpha) / denom;
        }
        row.floor = alpha / denom;
    }
}

fn corpus_log_likelihood(rows: &[Row], data: &Encoded) -> f64 {
    let mut ll = 0.0;
    for (src, tgt) in &data.pairs {
        for &f in tgt {
            let z: f64 = std::iter::once(&NULL_ID)
                .chain(src)
                .map(|&e| rows[e as usize].prob(Some(f)))
                .sum();
            ll += z.ln();
        }
        ll -= tgt.len() as f64 * ((src.len() + 1) as f64).ln();
    }
    ll
}

fn check_config(iterations: usize, alpha: f64) -> Result<(), AlignError> {
    if iterations == 0 {
        return Err(AlignError::InvalidConfig(
            "iterations must be at least 1".into(),
        ));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(AlignError::InvalidConfig(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(())
}

pub fn train_ibm1(corpus: &ParallelCorpus, config: &EmConfig) -> Result<LexiconTable, AlignError> {
    train_ibm1_traced(corpus, config).map(|(table, _)| table)
}

/// IBM Model 1 EM. Also returns the log-likelihood and normalization error
/// of the table after every iteration, starting with the initial table.
pub fn train_ibm1_traced(
    corpus: &ParallelCorpus,
    config: &EmConfig,
) -> Result<(LexiconTable, Vec<IterationStats>), AlignError> {
    check_config(config.iterations, config.alpha)?;
    let (source, target, data) = encode(corpus, config.max_tokens);
    if data.pairs.is_empty() {
        return Err(AlignError::EmptyCorpus);
    }
    let mut rows = uniform_rows(source.len(), &data);
    let mut trace = Vec::with_capacity(config.iterations + 1);
    let mut row_error = rows
        .iter()
        .map(|r| (r.probs.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    for iteration in 0..config.iterations {
        let (counts, ll) = expectation_sharded(&rows, &data, config.threads);
        trace.push(IterationStats {
            iteration,
            log_likelihood: ll,
            max_row_error: row_error,
        });
        maximize(&mut rows, &counts, config.alpha, target.len());
        row_error = rows
            .iter()
            .map(|r| (row_sum(r, target.len()) - 1.0).abs())
            .fold(0.0, f64::max);
    }
    trace.push(IterationStats {
        iteration: config.iterations,
        log_likelihood: corpus_log_likelihood(&rows, &data),
        max_row_error: row_error,
    });
    Ok((
        LexiconTable {
            source,
            target,
            rows,
            alpha: config.alpha,
        },
        trace,
    ))
}

/// Log-likelihood of `corpus` under `table` (uniform alignment prior).
/// Pairs containing words the table has never seen on the source side
/// only contribute through the other source words and NULL.
pub fn log_likelihood(table: &LexiconTable, corpus: &ParallelCorpus) -> f64 {
    let mut ll = 0.0;
    for p in corpus.pairs() {
        for f in &p.target {
            let z: f64 = std::iter::once(None)
                .chain(p.source.iter().map(|w| Some(w.as_str())))
                .map(|e| table.prob(e, f))
                .sum();
            ll += z.ln();
        }
        ll -= p.target.len() as f64 * ((p.source.len() + 1) as f64).ln();
    }
    ll
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsConfig {
    /// Total sweeps over the corpus, burn-in included.
    pub sweeps: usize,
    pub burn_in: usize,
    /// Dirichlet concentration used while sampling and for the final
    /// smoothing.
    pub alpha: f64,
    pub seed: u64,
    pub max_tokens: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            sweeps: 10,
            burn_in: 5,
            alpha: 0.001,
            seed: 0,
            max_tokens: 200,
        }
    }
}

/// Collapsed Gibbs sampling of Model 1 alignments with a symmetric
/// Dirichlet prior on every t(·|e). The table is estimated from link
/// counts averaged over the sweeps after burn-in. Fully determined by
/// `seed`.
pub fn train_gibbs(
    corpus: &ParallelCorpus,
    config: &GibbsConfig,
) -> Result<LexiconTable, AlignError> {
    check_config(config.sweeps, config.alpha)?;
    if config.burn_in >= config.sweeps {
        return Err(AlignError::InvalidConfig(
            "burn_in must be smaller than sweeps".into(),
        ));
    }
    let (source, target, data) = encode(corpus, config.max_tokens);
    if data.pairs.is_empty() {
        return Err(AlignError::EmptyCorpus);
    }
    let mut rows = uniform_rows(source.len(), &data);
    let vocab = target.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // row position of every (source position, target position) cell
    let cells: Vec<Vec<Vec<usize>>> = data
        .pairs
        .iter()
        .map(|(src, tgt)| {
            tgt.iter()
                .map(|&f| {
                    std::iter::once(&NULL_ID)
                        .chain(src)
                        .map(|&e| rows[e as usize].position(f).expect("co-occurring"))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut counts: Vec<Vec<u32>> = rows.iter().map(|r| vec![0; r.targets.len()]).collect();
    let mut totals = vec![0u32; rows.len()];
    let mut links: Vec<Vec<usize>> = Vec::with_capacity(data.pairs.len());
    for ((src, tgt), pair_cells) in data.pairs.iter().zip(&cells) {
        let a: Vec<usize> = (0..tgt.len())
            .map(|_| rng.random_range(0..=src.len()))
            .collect();
        for (j, &i) in a.iter().enumerate() {
            let e = if i == 0 { NULL_ID } else { src[i - 1] } as usize;
            counts[e][pair_cells[j][i]] += 1;
            totals[e] += 1;
        }
        links.push(a);
    }

    let mut averaged: Vec<Vec<f64>> = zero_counts(&rows);
    let mut weights = Vec::new();
    for sweep in 0..config.sweeps {
        for (((src, tgt), pair_cells), a) in data.pairs.iter().zip(&cells).zip(links.iter_mut()) {
            let source_id = |i: usize| if i == 0 { NULL_ID } else { src[i - 1] } as usize;
            for j in 0..tgt.len() {
                let old = source_id(a[j]);
                counts[old][pair_cells[j][a[j]]] -= 1;
                totals[old] -= 1;
                weights.clear();
                let mut z = 0.0;
                for (i, &k) in pair_cells[j].iter().enumerate() {
                    let e = source_id(i);
                    let w = (counts[e][k] as f64 + config.alpha)
                        / (totals[e] as f64 + config.alpha * vocab);
                    z += w;
                    weights.push(z);
                }
                let u = rng.random::<f64>() * z;
                let i = weights
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(weights.len() - 1);
                a[j] = i;
                let e = source_id(i);
                counts[e][pair_cells[j][i]] += 1;
                totals[e] += 1;
            }
        }
        if sweep >= config.burn_in {
            for (acc, c) in averaged.iter_mut().zip(&counts) {
                for (x, &n) in acc.iter_mut().zip(c) {
                    *x += n as f64;
                }
            }
        }
    }
    let samples = (config.sweeps - config.burn_in) as f64;
    for row in averaged.iter_mut() {
        for x in row.iter_mut() {
            *x /= samples;
        }
    }
    maximize(&mut rows, &averaged, config.alpha, target.len());
    Ok(LexiconTable {
        source,
        target,
        rows,
        alpha: config.alpha,
    })
}

/// Per-target-word argmax alignment.
///
/// Each target position links to the source word with the highest
/// t(target | source); ties go to the smallest source index. No link is
/// made when NULL is strictly more probable than every source word.
///
/// With [`Direction::Reverse`], `lexicon` must be a target→source model;
/// decoding then runs over the swapped pair and the links are returned
/// transposed, so the result is always in (source, target) orientation.
pub fn viterbi_align<S: AsRef<str>>(
    lexicon: &LexiconTable,
    source: &[S],
    target: &[S],
    direction: Direction,
) -> AlignmentLinkSet {
    match direction {
        Direction::Reverse => {
            let links = decode(lexicon, target, source);
            AlignmentLinkSet::from_links(direction, links.into_iter().map(|(i, j)| (j, i)))
        }
        _ => AlignmentLinkSet::from_links(direction, decode(lexicon, source, target)),
    }
}

fn decode<S: AsRef<str>>(
    lexicon: &LexiconTable,
    source: &[S],
    target: &[S],
) -> Vec<(usize, usize)> {
    let src_ids: Vec<Option<u32>> = source
        .iter()
        .map(|w| lexicon.source.get(w.as_ref()))
        .collect();
    let mut links = Vec::new();
    for (j, f) in target.iter().enumerate() {
        let f = lexicon.target.get(f.as_ref());
        let null = lexicon.rows[NULL_ID as usize].prob(f);
        let mut best: Option<(usize, f64)> = None;
        for (i, e) in src_ids.iter().enumerate() {
            let Some(e) = e else { continue };
            let p = lexicon.rows[*e as usize].prob(f);
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((i, p));
            }
        }
        if let Some((i, p)) = best {
            if p > 0.0 && p >= null {
                links.push((i, j));
            }
        }
    }
    links
}

#[cfg(test)]
mod tests {
    use super::super::SentencePair;
    use super::*;

    fn tiny() -> ParallelCorpus {
        ParallelCorpus::new(vec![
            SentencePair::from_spaced("a b", "x y"),
            SentencePair::from_spaced("a", "x"),
        ])
        .unwrap()
    }

    fn config(iterations: usize) -> EmConfig {
        EmConfig {
            iterations,
            ..EmConfig::default()
        }
    }

    // Frozen from tests/fixtures/oracles/ibm1_em.py (5 iterations, alpha 0.001).
    const ORACLE_T: [(&str, &str, f64); 6] = [
        ("a", "x", 0.87602709604611),
        ("a", "y", 0.12397290395389002),
        ("b", "x", 0.11035150795279695),
        ("b", "y", 0.8896484920472031),
        (NULL_WORD, "x", 0.87602709604611),
        (NULL_WORD, "y", 0.12397290395389002),
    ];
    const ORACLE_LL: [f64; 6] = [
        -2.079441541679836,
        -1.8081340096834526,
        -1.7234074460315143,
        -1.6589450614785828,
        -1.6120535290080307,
        -1.5787980256931786,
    ];

    #[test]
    fn tiny_corpus_matches_oracle() {
        let (table, trace) = train_ibm1_traced(&tiny(), &config(5)).unwrap();
        for (e, f, expected) in ORACLE_T {
            let e = if e == NULL_WORD { None } else { Some(e) };
            let got = table.prob(e, f);
            assert!(
                (got - expected).abs() < 1e-12,
                "t({f}|{e:?}) = {got}, oracle {expected}"
            );
        }
        for (stats, expected) in trace.iter().zip(ORACLE_LL) {
            assert!((stats.log_likelihood - expected).abs() < 1e-12);
        }
        assert!(table.prob(Some("a"), "x") > table.prob(Some("a"), "y"));
        assert!(table.prob(Some("b"), "y") > table.prob(Some("b"), "x"));
    }

    #[test]
    fn tiny_corpus_viterbi() {
        let table = train_ibm1(&tiny(), &config(5)).unwrap();
        let links = viterbi_align(&table, &["a", "b"], &["x", "y"], Direction::Forward);
        assert_eq!(links.iter().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
    }

    #[test]
    fn single_pair_converges() {
        let c = ParallelCorpus::new(vec![SentencePair::from_spaced("a", "x")]).unwrap();
        let table = train_ibm1(&c, &config(20)).unwrap();
        assert!((table.prob(Some("a"), "x") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(
            train_ibm1(&tiny(), &config(0)),
            Err(AlignError::InvalidConfig(_))
        ));
        let bad_alpha = EmConfig {
            alpha: 0.0,
            ..config(3)
        };
        assert!(matches!(
            train_ibm1(&tiny(), &bad_alpha),
            Err(AlignError::InvalidConfig(_))
        ));
        assert!(matches!(
            train_ibm1(&ParallelCorpus::default(), &config(1)),
            Err(AlignError::EmptyCorpus)
        ));
    }

    #[test]
    fn long_pairs_skipped_in_training() {
        let long = "w ".repeat(5);
        let c = ParallelCorpus::new(vec![
            SentencePair::from_spaced("a", "x"),
            SentencePair::from_spaced(&long, &long),
        ])
        .unwrap();
        let table = train_ibm1(
            &c,
            &EmConfig {
                max_tokens: 4,
                ..config(2)
            },
        )
        .unwrap();
        assert_eq!(table.source_words().collect::<Vec<_>>(), ["a"]);
        let only_long = ParallelCorpus::new(vec![SentencePair::from_spaced(&long, &long)]).unwrap();
        assert!(matches!(
            train_ibm1(
                &only_long,
                &EmConfig {
                    max_tokens: 4,
                    ..config(2)
                }
            ),
            Err(AlignError::EmptyCorpus)
        ));
    }

    #[test]
    fn rows_normalized_and_positive() {
        let (table, trace) = train_ibm1_traced(&tiny(), &config(5)).unwrap();
        assert!(trace.iter().all(|s| s.max_row_error < 1e-9));
        assert!(table.min_prob() > 0.0);
        assert!((table.row_sum(None).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(table.row_sum(Some("zzz")), None);
    }

    #[test]
    fn null_and_oov_handling() {
        let table = train_ibm1(&tiny(), &config(5)).unwrap();
        // unknown source words never link
        let links = viterbi_align(&table, &["q"], &["x"], Direction::Forward);
        assert!(links.is_empty());
        assert!(viterbi_align(&table, &["a"], &[] as &[&str], Direction::Forward).is_empty());
        assert_eq!(
            table.prob(Some("a"), "unseen"),
            table.prob(Some("a"), "also-unseen")
        );
    }

    #[test]
    fn null_wins_only_when_strictly_better() {
        // x only ever appears with NULL-heavy contexts: "c" never co-occurs with it
        let c = ParallelCorpus::new(vec![
            SentencePair::from_spaced("c", "x z"),
            SentencePair::from_spaced("d", "x w"),
            SentencePair::from_spaced("e", "x v"),
            SentencePair::from_spaced("c", "z"),
        ])
        .unwrap();
        let table = train_ibm1(&c, &config(10)).unwrap();
        assert!(table.prob(None, "x") > table.prob(Some("c"), "x"));
        let links = viterbi_align(&table, &["c"], &["x", "z"], Direction::Forward);
        assert_eq!(links.iter().collect::<Vec<_>>(), [(0, 1)]);
    }

    #[test]
    fn reverse_direction_is_transposed() {
        let table = train_ibm1(&tiny().reversed(), &config(5)).unwrap();
        let links = viterbi_align(&table, &["a", "b"], &["x", "y"], Direction::Reverse);
        assert_eq!(links.direction, Direction::Reverse);
        assert_eq!(links.iter().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
    }

    #[test]
    fn parallel_estep_close_to_serial() {
        let (corpus, _) =
            crate::align::synthetic::bijective_corpus(&crate::align::synthetic::SyntheticSpec {
                pairs: 200,
                ..Default::default()
            });
        let (serial, s_trace) = train_ibm1_traced(&corpus, &config(4)).unwrap();
        let (parallel, p_trace) = train_ibm1_traced(
            &corpus,
            &EmConfig {
                threads: 4,
                ..config(4)
            },
        )
        .unwrap();
        for (a, b) in s_trace.iter().zip(&p_trace) {
            assert!((a.log_likelihood - b.log_likelihood).abs() < 1e-6);
        }
        for e in serial.source_words().take(20) {
            for f in serial.target_words().take(20) {
                assert!((serial.prob(Some(e), f) - parallel.prob(Some(e), f)).abs() < 1e-9);
            }
        }
        let (again, _) = train_ibm1_traced(
            &corpus,
            &EmConfig {
                threads: 4,
                ..config(4)
            },
        )
        .unwrap();
        assert_eq!(
            again.prob(Some("s1"), "t1").to_bits(),
            parallel.prob(Some("s1"), "t1").to_bits()
        );
    }

    #[test]
    fn gibbs_is_seeded() {
        let cfg = GibbsConfig::default();
        let a = train_gibbs(&tiny(), &cfg).unwrap();
        let b = train_gibbs(&tiny(), &cfg).unwrap();
        assert_eq!(
            a.prob(Some("a"), "x").to_bits(),
            b.prob(Some("a"), "x").to_bits()
        );
        assert!(a.max_row_error() < 1e-9);
        assert!(matches!(
            train_gibbs(&tiny(), &GibbsConfig { burn_in: 10, ..cfg }),
            Err(AlignError::InvalidConfig(_))
        ));
    }
}
