//! SQuAD v1.1 JSON structure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::textseg::char_len;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquadDataset {
    pub version: String,
    pub data: Vec<Article>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub context: String,
    pub qas: Vec<Qa>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qa {
    pub id: String,
    pub question: String,
    pub answers: Vec<Answer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub text: String,
    /// Character (Unicode scalar) offset into the paragraph context.
    pub answer_start: usize,
}

/// One flattened question with its first answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaSample {
    pub id: String,
    pub title: String,
    pub context: String,
    pub question: String,
    pub answer_text: String,
    pub answer_start: usize,
}

impl QaSample {
    /// Whether the answer text sits in the context at `answer_start`.
    pub fn answer_is_embedded(&self) -> bool {
        answer_is_embedded(&self.context, &self.answer_text, self.answer_start)
    }
}

pub fn answer_is_embedded(context: &str, text: &str, start: usize) -> bool {
    let n = char_len(text);
    context.chars().skip(start).take(n).eq(text.chars()) && start + n <= char_len(context)
}

impl SquadDataset {
    pub fn from_reader<R: Read>(reader: R) -> serde_json::Result<Self> {
        serde_json::from_reader(reader)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let file = File::open(path)?;
        Ok(Self::from_reader(BufReader::new(file))?)
    }

    pub fn to_writer<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        serde_json::to_writer(&mut writer, self)?;
        writer.flush()
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        self.to_writer(BufWriter::new(File::create(path)?))
    }

    /// Number of questions.
    pub fn len(&self) -> usize {
        self.data
            .iter()
            .flat_map(|a| &a.paragraphs)
            .map(|p| p.qas.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Questions in document order; questions without answers are skipped.
    pub fn samples(&self) -> impl Iterator<Item = QaSample> + '_ {
        self.data.iter().flat_map(|a| {
            a.paragraphs.iter().flat_map(move |p| {
                p.qas.iter().filter_map(move |q| {
                    let first = q.answers.first()?;
                    Some(QaSample {
                        id: q.id.clone(),
                        title: a.title.clone(),
                        context: p.context.clone(),
                        question: q.question.clone(),
                        answer_text: first.text.clone(),
                        answer_start: first.answer_start,
                    })
                })
            })
        })
    }
}
