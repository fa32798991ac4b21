//! Pharaoh alignment format: one line per sentence pair, links written as
//! space-separated `i-j` (0-based source and target index).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{AlignError, AlignmentLinkSet, Direction};

/// Parses one line; `line` is the 1-based line number used in errors.
pub fn parse_pharaoh_line(text: &str, line: usize) -> Result<AlignmentLinkSet, AlignError> {
    let err = |message: String| AlignError::Parse { line, message };
    let mut links = AlignmentLinkSet::new(Direction::Symmetrized);
    for item in text.split_whitespace() {
        let (i, j) = item
            .split_once('-')
            .ok_or_else(|| err(format!("expected i-j, got {item:?}")))?;
        let i: usize = i
            .parse()
            .map_err(|_| err(format!("bad source index in {item:?}")))?;
        let j: usize = j
            .parse()
            .map_err(|_| err(format!("bad target index in {item:?}")))?;
        links.insert(i, j);
    }
    Ok(links)
}

pub fn read_pharaoh<R: BufRead>(reader: R) -> Result<Vec<AlignmentLinkSet>, AlignError> {
    reader
        .lines()
        .enumerate()
        .map(|(n, l)| parse_pharaoh_line(&l?, n + 1))
        .collect()
}

pub fn read_pharaoh_file(path: &Path) -> Result<Vec<AlignmentLinkSet>, AlignError> {
    read_pharaoh(BufReader::new(File::open(path)?))
}

/// Writes links in row-major order, one sentence per line.
pub fn write_pharaoh<W: Write>(
    mut writer: W,
    alignments: &[AlignmentLinkSet],
) -> std::io::Result<()> {
    for a in alignments {
        let line: Vec<String> = a.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        writeln!(writer, "{}", line.join(" "))?;
    }
    writer.flush()
}

pub fn write_pharaoh_file(path: &Path, alignments: &[AlignmentLinkSet]) -> std::io::Result<()> {
    write_pharaoh(BufWriter::new(File::create(path)?), alignments)
}
