//! Pre-trained word embedding loading (GloVe text layout) and random
//! initialization for out-of-file tokens.

use super::{IngestError, Vocabulary};
use rand::Rng;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// Half-width of the uniform init interval for rows not found in the file.
pub const INIT_RANGE: f64 = 0.05;

/// Dense `|V| × dimension` embedding matrix, row per vocabulary index.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dimension: usize,
    /// Row-major, `vocab_len * dimension` values.
    pub matrix: Vec<f64>,
    pub trainable: bool,
}

impl EmbeddingTable {
    /// All rows sampled uniformly from `[-INIT_RANGE, INIT_RANGE]`. Used when
    /// pre-trained embeddings are disabled.
    pub fn random(vocab_len: usize, dimension: usize, rng: &mut impl Rng) -> Self {
        let matrix =
            (0..vocab_len * dimension).map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE)).collect();
        EmbeddingTable { dimension, matrix, trainable: true }
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.matrix[index * self.dimension..(index + 1) * self.dimension]
    }

    pub fn vocab_len(&self) -> usize {
        if self.dimension == 0 {
            0
        } else {
            self.matrix.len() / self.dimension
        }
    }
}

/// How many vocabulary tokens were found in the embedding file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageReport {
    pub found: usize,
    pub missing: usize,
}

impl CoverageReport {
    pub fn total(&self) -> usize {
        self.found + self.missing
    }
}

/// Reads a whitespace-separated embedding file (token then D reals per line)
/// and builds the table for `vocab`. In-file rows are copied verbatim;
/// missing tokens are sampled uniformly from `[-INIT_RANGE, INIT_RANGE]`.
///
/// Tokens in the file but not in the vocabulary are skipped. Every line must
/// have the same dimension as the first; numeric parse failures report the
/// line number.
pub fn load_embeddings(
    path: &Path,
    vocab: &Vocabulary,
    rng: &mut impl Rng,
) -> Result<(EmbeddingTable, CoverageReport), IngestError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let reader = BufReader::new(file);

    let mut dimension: Option<usize> = None;
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; vocab.len()];
    let mut found = 0usize;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line =
            line.map_err(|source| IngestError::Io { path: display.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let Some(token) = parts.next() else { continue };
        let values: Vec<f64> = parts
            .map(|v| {
                v.parse::<f64>().map_err(|_| IngestError::Parse {
                    path: display.clone(),
                    line: line_no,
                    detail: format!("unparseable number `{v}`"),
                })
            })
            .collect::<Result<_, _>>()?;
        match dimension {
            None => dimension = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(IngestError::EmbeddingDim {
                    path: display,
                    line: line_no,
                    expected: d,
                    got: values.len(),
                })
            }
            _ => {}
        }
        let idx = vocab.lookup(token);
        // lookup maps unknown tokens to UNK; only a literal UNK line may fill
        // that row
        if vocab.token(idx) == Some(token) && rows[idx].is_none() {
            rows[idx] = Some(values);
            found += 1;
        }
    }

    let dimension = dimension.ok_or_else(|| IngestError::Parse {
        path: display.clone(),
        line: 0,
        detail: "embedding file has no data lines".to_string(),
    })?;

    let mut matrix = Vec::with_capacity(vocab.len() * dimension);
    let mut missing = 0usize;
    for row in rows {
        match row {
            Some(values) => matrix.extend(values),
            None => {
                missing += 1;
                matrix.extend((0..dimension).map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE)));
            }
        }
    }

    Ok((
        EmbeddingTable { dimension, matrix, trainable: true },
        CoverageReport { found, missing },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Sentence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;

    fn vocab_for(text: &str) -> Vocabulary {
        Vocabulary::build(&[Sentence::new("s", text)], 1).unwrap()
    }

    fn write_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn in_file_rows_copied_verbatim() {
        let vocab = vocab_for("the cat");
        let f = write_file("the 0.1 0.2\ncat -1.5 2.25\n");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (table, report) = load_embeddings(f.path(), &vocab, &mut rng).unwrap();
        assert_eq!(table.dimension, 2);
        assert_eq!(table.row(vocab.lookup("the")), &[0.1, 0.2]);
        assert_eq!(table.row(vocab.lookup("cat")), &[-1.5, 2.25]);
        assert_eq!(report.found, 2);
        // UNK and PAD are not in the file
        assert_eq!(report.missing, 2);
    }

    #[test]
    fn missing_rows_sampled_in_range() {
        let vocab = vocab_for("aা b");
        let f = write_file("zzz 1.0\n");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (table, report) = load_embeddings(f.path(), &vocab, &mut rng).unwrap();
        assert_eq!(report.found, 0);
        assert_eq!(report.missing, vocab.len());
        for &v in &table.matrix {
            assert!((-INIT_RANGE..=INIT_RANGE).contains(&v));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let vocab = vocab_for("a b c");
        let f = write_file("a 0.5 0.5\n");
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let (t1, _) = load_embeddings(f.path(), &vocab, &mut r1).unwrap();
        let (t2, _) = load_embeddings(f.path(), &vocab, &mut r2).unwrap();
        assert_eq!(t1.matrix, t2.matrix);
    }

    #[test]
    fn inconsistent_dimension_reports_line() {
        let vocab = vocab_for("a b");
        let f = write_file("a 0.1 0.2\nb 0.3\n");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match load_embeddings(f.path(), &vocab, &mut rng) {
            Err(IngestError::EmbeddingDim { line, expected, got, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(expected, 2);
                assert_eq!(got, 1);
            }
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn unparseable_number_reports_line() {
        let vocab = vocab_for("a");
        let f = write_file("a 0.1 x\n");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match load_embeddings(f.path(), &vocab, &mut rng) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_vocab_file_token_does_not_fill_unk_row() {
        let vocab = vocab_for("a");
        let f = write_file("unknown-word 9.0\n");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (table, report) = load_embeddings(f.path(), &vocab, &mut rng).unwrap();
        assert_eq!(report.found, 0);
        assert!(table.row(vocab.unk_index())[0].abs() <= INIT_RANGE);
    }

    #[test]
    fn random_table_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = EmbeddingTable::random(5, 3, &mut rng);
        assert_eq!(t.vocab_len(), 5);
        assert_eq!(t.matrix.len(), 15);
    }
}
