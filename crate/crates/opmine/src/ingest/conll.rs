//! CoNLL-style column format: one `TOKEN TAG` line per token, blank line
//! between sentences, optional `# id:` and `# sentiment:` headers.

use super::{IngestError, Sentence};
use crate::labels::{SentimentClass, TagSequence};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Reads a CoNLL file. Sentences without an `# id:` header get `s<ordinal>`
/// (1-based position in the file).
pub fn read_conll(path: &Path) -> Result<Vec<Sentence>, IngestError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let reader = BufReader::new(file);

    let mut sentences = Vec::new();
    let mut surfaces: Vec<String> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut id: Option<String> = None;
    let mut sentiment: Option<SentimentClass> = None;

    let flush = |surfaces: &mut Vec<String>,
                     labels: &mut Vec<String>,
                     id: &mut Option<String>,
                     sentiment: &mut Option<SentimentClass>,
                     sentences: &mut Vec<Sentence>|
     -> Result<(), IngestError> {
        if surfaces.is_empty() {
            *id = None;
            *sentiment = None;
            return Ok(());
        }
        let sid = id.take().unwrap_or_else(|| format!("s{}", sentences.len() + 1));
        let mut sentence = Sentence::from_tokens(sid.clone(), surfaces);
        let tags = TagSequence::from_label_strings(labels)
            .map_err(|source| IngestError::Label { id: sid, source })?;
        sentence.gold = Some(tags);
        sentence.sentence_sentiment = sentiment.take();
        sentences.push(sentence);
        surfaces.clear();
        labels.clear();
        Ok(())
    };

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(|source| IngestError::Io { path: display.clone(), source })?;
        if line.trim().is_empty() {
            flush(&mut surfaces, &mut labels, &mut id, &mut sentiment, &mut sentences)?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("# id:") {
            id = Some(rest.trim().to_string());
            continue;
        }
        if let Some(rest) = line.strip_prefix("# sentiment:") {
            let name = rest.trim();
            sentiment = Some(SentimentClass::from_name(name).ok_or_else(|| IngestError::Parse {
                path: display.clone(),
                line: line_no,
                detail: format!("unknown sentiment class `{name}`"),
            })?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some((token, tag)) = line.split_once(' ') else {
            return Err(IngestError::Parse {
                path: display.clone(),
                line: line_no,
                detail: format!("expected `TOKEN TAG`, got `{line}`"),
            });
        };
        if token.is_empty() || tag.is_empty() || tag.contains(' ') {
            return Err(IngestError::Parse {
                path: display.clone(),
                line: line_no,
                detail: format!("expected exactly two space-separated columns, got `{line}`"),
            });
        }
        surfaces.push(token.to_string());
        labels.push(tag.to_string());
    }
    flush(&mut surfaces, &mut labels, &mut id, &mut sentiment, &mut sentences)?;
    Ok(sentences)
}

/// Writes sentences in the same layout `read_conll` accepts. Sentences
/// without gold tags are written with `O` for every token.
pub fn write_conll(path: &Path, sentences: &[Sentence]) -> Result<(), IngestError> {
    let display = path.display().to_string();
    let file =
        File::create(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| IngestError::Io { path: display.clone(), source };

    for s in sentences {
        writeln!(w, "# id:{}", s.id).map_err(io_err)?;
        if let Some(sent) = s.sentence_sentiment {
            writeln!(w, "# sentiment:{}", sent.name()).map_err(io_err)?;
        }
        let labels = s
            .gold
            .as_ref()
            .map(|g| g.label_strings())
            .unwrap_or_else(|| vec!["O".to_string(); s.tokens.len()]);
        for (t, l) in s.tokens.iter().zip(labels.iter()) {
            writeln!(w, "{} {}", t.surface, l).map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(|source| IngestError::Io { path: display, source })
}

/// Writes `TOKEN GOLD PRED` triples, one sentence per blank-line-separated
/// block. Exactly the layout external CoNLL scorers expect: token lines and
/// blank lines only, no comments.
pub fn write_predictions(
    path: &Path,
    rows: &[(Sentence, TagSequence)],
) -> Result<(), IngestError> {
    let display = path.display().to_string();
    let file =
        File::create(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| IngestError::Io { path: display.clone(), source };

    for (s, pred) in rows {
        let gold = s.gold.as_ref().ok_or_else(|| IngestError::Validation {
            id: s.id.clone(),
            detail: "cannot write predictions without gold tags".to_string(),
        })?;
        if pred.len() != s.tokens.len() {
            return Err(IngestError::Validation {
                id: s.id.clone(),
                detail: format!("{} tokens but {} predicted tags", s.tokens.len(), pred.len()),
            });
        }
        let gold_labels = gold.label_strings();
        let pred_labels = pred.label_strings();
        for i in 0..s.tokens.len() {
            writeln!(w, "{} {} {}", s.tokens[i].surface, gold_labels[i], pred_labels[i])
                .map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(|source| IngestError::Io { path: display, source })
}

/// Reads a `TOKEN GOLD PRED` predictions file back into (gold, pred) label
/// sequences per sentence.
pub fn read_predictions(
    path: &Path,
) -> Result<Vec<(Vec<String>, TagSequence, TagSequence)>, IngestError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Io { path: display.clone(), source })?;
    let reader = BufReader::new(file);

    let mut out = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut gold: Vec<String> = Vec::new();
    let mut pred: Vec<String> = Vec::new();

    let flush = |tokens: &mut Vec<String>,
                     gold: &mut Vec<String>,
                     pred: &mut Vec<String>,
                     out: &mut Vec<(Vec<String>, TagSequence, TagSequence)>|
     -> Result<(), IngestError> {
        if tokens.is_empty() {
            return Ok(());
        }
        let g = TagSequence::from_label_strings(gold)
            .map_err(|source| IngestError::Label { id: format!("block {}", out.len() + 1), source })?;
        let p = TagSequence::from_label_strings(pred)
            .map_err(|source| IngestError::Label { id: format!("block {}", out.len() + 1), source })?;
        out.push((std::mem::take(tokens), g, p));
        gold.clear();
        pred.clear();
        Ok(())
    };

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(|source| IngestError::Io { path: display.clone(), source })?;
        if line.trim().is_empty() {
            flush(&mut tokens, &mut gold, &mut pred, &mut out)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(' ').collect();
        if cols.len() != 3 {
            return Err(IngestError::Parse {
                path: display.clone(),
                line: line_no,
                detail: format!("expected `TOKEN GOLD PRED`, got `{line}`"),
            });
        }
        tokens.push(cols[0].to_string());
        gold.push(cols[1].to_string());
        pred.push(cols[2].to_string());
    }
    flush(&mut tokens, &mut gold, &mut pred, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{AeTag, CollapsedTag};

    fn write_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_two_sentences_with_headers() {
        let f = write_file(
            "# id:rev1\n# sentiment:positive\nnice O\nscreen B\n\n# id:rev2\nbad O\n\n",
        );
        let got = read_conll(f.path()).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].id, "rev1");
        assert_eq!(got[0].sentence_sentiment, Some(SentimentClass::Positive));
        assert_eq!(got[0].surfaces(), vec!["nice", "screen"]);
        assert_eq!(
            got[0].gold,
            Some(TagSequence::Ae(vec![AeTag::Outside, AeTag::Begin]))
        );
        assert_eq!(got[1].id, "rev2");
        assert_eq!(got[1].sentence_sentiment, None);
    }

    #[test]
    fn generates_ordinal_ids() {
        let f = write_file("a O\n\nb O\n\n");
        let got = read_conll(f.path()).unwrap();
        assert_eq!(got[0].id, "s1");
        assert_eq!(got[1].id, "s2");
    }

    #[test]
    fn collapsed_tags_parse() {
        let f = write_file("great B-POS\ncolors I-POS\n\n");
        let got = read_conll(f.path()).unwrap();
        assert_eq!(
            got[0].gold,
            Some(TagSequence::Collapsed(vec![
                CollapsedTag::Begin(SentimentClass::Positive),
                CollapsedTag::Inside(SentimentClass::Positive),
            ]))
        );
    }

    #[test]
    fn missing_tag_column_reports_line() {
        let f = write_file("good O\nbad\n\n");
        match read_conll(f.path()) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn too_many_columns_rejected() {
        let f = write_file("good O extra\n\n");
        assert!(matches!(read_conll(f.path()), Err(IngestError::Parse { .. })));
    }

    #[test]
    fn unknown_sentiment_header_rejected() {
        let f = write_file("# sentiment:sideways\na O\n\n");
        assert!(matches!(read_conll(f.path()), Err(IngestError::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_trailing_blank_line_ok() {
        let f = write_file("a O\nb I-NEG");
        // single sentence, flushed at EOF; I-NEG makes the scheme collapsed
        let got = read_conll(f.path()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].tokens.len(), 2);
    }

    #[test]
    fn write_read_roundtrip() {
        let mut s = Sentence::from_tokens("rev9", &["good".into(), "screen".into()]);
        s.gold = Some(TagSequence::Collapsed(vec![
            CollapsedTag::Outside,
            CollapsedTag::Begin(SentimentClass::Positive),
        ]));
        s.sentence_sentiment = Some(SentimentClass::Positive);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_conll(f.path(), &[s.clone()]).unwrap();
        let got = read_conll(f.path()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].id, s.id);
        assert_eq!(got[0].gold, s.gold);
        assert_eq!(got[0].sentence_sentiment, s.sentence_sentiment);
        assert_eq!(got[0].surfaces(), s.surfaces());
    }

    #[test]
    fn predictions_roundtrip() {
        let mut s = Sentence::from_tokens("p1", &["a".into(), "b".into()]);
        s.gold = Some(TagSequence::Ae(vec![AeTag::Begin, AeTag::Inside]));
        let pred = TagSequence::Ae(vec![AeTag::Begin, AeTag::Outside]);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_predictions(f.path(), &[(s.clone(), pred.clone())]).unwrap();
        // plain scorer layout: token lines and a blank separator, nothing else
        let raw = std::fs::read_to_string(f.path()).unwrap();
        assert_eq!(raw, "a B B\nb I O\n\n");
        let got = read_predictions(f.path()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, vec!["a", "b"]);
        assert_eq!(got[0].1, s.gold.unwrap());
        assert_eq!(got[0].2, pred);
    }

    #[test]
    fn predictions_length_mismatch_rejected() {
        let mut s = Sentence::from_tokens("p1", &["a".into(), "b".into()]);
        s.gold = Some(TagSequence::Ae(vec![AeTag::Outside, AeTag::Outside]));
        let pred = TagSequence::Ae(vec![AeTag::Outside]);
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(write_predictions(f.path(), &[(s, pred)]).is_err());
    }
}
