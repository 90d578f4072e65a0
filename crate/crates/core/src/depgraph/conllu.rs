use std::fmt::Write as _;

use thiserror::Error;

use super::{DependencyGraph, GraphError, Token, TokenId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sentence {sent_id}, line {line}: {kind}")]
pub struct ConllError {
    pub sent_id: String,
    pub line: usize,
    pub kind: ConllErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConllErrorKind {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("expected 10 tab-separated columns, found {0}")]
    ColumnCount(usize),
    #[error("non-numeric {column} `{value}`")]
    NotNumeric { column: &'static str, value: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct Block {
    sent_id: Option<String>,
    text: String,
    start_line: usize,
    tokens: Vec<Token>,
    token_lines: Vec<usize>,
}

impl Block {
    fn new(start_line: usize) -> Self {
        Block {
            sent_id: None,
            text: String::new(),
            start_line,
            tokens: Vec::new(),
            token_lines: Vec::new(),
        }
    }
}

/// Reads CoNLL-U text into validated graphs, one per sentence block.
///
/// Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped. A block
/// without a `# sent_id` comment is numbered by its position in the file.
pub fn parse_conllu(bytes: &[u8]) -> Result<Vec<DependencyGraph>, ConllError> {
    let input = std::str::from_utf8(bytes).map_err(|_| ConllError {
        sent_id: String::new(),
        line: 0,
        kind: ConllErrorKind::Encoding,
    })?;
    let mut graphs = Vec::new();
    let mut block: Option<Block> = None;

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(b) = block.take() {
                finish(b, &mut graphs)?;
            }
            continue;
        }
        let b = block.get_or_insert_with(|| Block::new(line_no));
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "sent_id" => b.sent_id = Some(value.trim().to_string()),
                    "text" => b.text = value.trim().to_string(),
                    _ => {}
                }
            }
            continue;
        }
        let sent_id = || b.sent_id.clone().unwrap_or_else(|| (graphs.len() + 1).to_string());
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConllError {
                sent_id: sent_id(),
                line: line_no,
                kind: ConllErrorKind::ColumnCount(cols.len()),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: TokenId = cols[0].parse().map_err(|_| ConllError {
            sent_id: sent_id(),
            line: line_no,
            kind: ConllErrorKind::NotNumeric { column: "ID", value: cols[0].to_string() },
        })?;
        let head: TokenId = cols[6].parse().map_err(|_| ConllError {
            sent_id: sent_id(),
            line: line_no,
            kind: ConllErrorKind::NotNumeric { column: "HEAD", value: cols[6].to_string() },
        })?;
        b.tokens.push(Token {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        });
        b.token_lines.push(line_no);
    }
    if let Some(b) = block.take() {
        finish(b, &mut graphs)?;
    }
    Ok(graphs)
}

fn finish(b: Block, graphs: &mut Vec<DependencyGraph>) -> Result<(), ConllError> {
    if b.tokens.is_empty() {
        // comment-only block
        return Ok(());
    }
    let sent_id = b.sent_id.unwrap_or_else(|| (graphs.len() + 1).to_string());
    let token_lines = b.token_lines;
    let start_line = b.start_line;
    match DependencyGraph::new(sent_id.clone(), b.text, b.tokens) {
        Ok(g) => {
            graphs.push(g);
            Ok(())
        }
        Err(e) => {
            let line = e
                .token()
                .and_then(|id| token_lines.get(id.wrapping_sub(1)).copied())
                .unwrap_or(start_line);
            Err(ConllError { sent_id, line, kind: e.into() })
        }
    }
}

/// Writes graphs back out as CoNLL-U.
pub fn to_conllu(graphs: &[DependencyGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        let _ = writeln!(out, "# sent_id = {}", g.sent_id());
        if !g.raw_text().is_empty() {
            let _ = writeln!(out, "# text = {}", g.raw_text());
        }
        for t in g.tokens() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id,
                blank(&t.form),
                blank(&t.lemma),
                blank(&t.upos),
                blank(&t.xpos),
                blank(&t.feats),
                t.head,
                blank(&t.deprel),
                blank(&t.deps),
                blank(&t.misc)
            );
        }
        out.push('\n');
    }
    out
}

fn blank(s: &str) -> &str {
    if s.is_empty() {
        "_"
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "# sent_id = m1\n1\tYou\tyou\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n2\tcomply\tcomply\tVERB\tVB\t_\t0\troot\t_\t_\n";

    #[test]
    fn parses_minimal_block() {
        let gs = parse_conllu(MINIMAL.as_bytes()).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].sent_id(), "m1");
        assert_eq!(gs[0].root(), 2);
        assert_eq!(gs[0].children(2), &[1]);
    }

    #[test]
    fn empty_input_yields_no_sentences() {
        assert!(parse_conllu(b"").unwrap().is_empty());
        assert!(parse_conllu(b"\n\n# just a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn skips_ranges_and_empty_nodes() {
        let src = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n2\tn't\tnot\tPART\t_\t_\t3\tneg\t_\t_\n3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n3.1\tgo\tgo\tVERB\t_\t_\t_\t_\t_\t_\n";
        let gs = parse_conllu(src.as_bytes()).unwrap();
        assert_eq!(gs[0].len(), 3);
    }

    #[test]
    fn multiple_roots_error_names_sentence_and_line() {
        let src = "# sent_id = bad\n1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n";
        let err = parse_conllu(src.as_bytes()).unwrap_err();
        assert_eq!(err.sent_id, "bad");
        assert_eq!(err.line, 3);
        assert!(matches!(err.kind, ConllErrorKind::Graph(GraphError::MultipleRoots(_))));
    }

    #[test]
    fn malformed_rows_are_reported() {
        let err = parse_conllu(b"1\ta\ta\n").unwrap_err();
        assert_eq!(err.kind, ConllErrorKind::ColumnCount(3));
        assert_eq!(err.line, 1);
        let err = parse_conllu(b"1\ta\ta\tX\t_\t_\tzero\troot\t_\t_\n").unwrap_err();
        assert!(matches!(err.kind, ConllErrorKind::NotNumeric { column: "HEAD", .. }));
        let src = "# sent_id = c\n1\ta\ta\tX\t_\t_\t2\tdep\t_\t_\n2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n3\tc\tc\tX\t_\t_\t0\troot\t_\t_\n";
        let err = parse_conllu(src.as_bytes()).unwrap_err();
        assert!(matches!(err.kind, ConllErrorKind::Graph(GraphError::Cycle(_))));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn unnamed_blocks_are_numbered() {
        let src = format!("{0}\n{0}", "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n");
        let gs = parse_conllu(src.as_bytes()).unwrap();
        assert_eq!(gs[0].sent_id(), "1");
        assert_eq!(gs[1].sent_id(), "2");
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let gs = parse_conllu(MINIMAL.as_bytes()).unwrap();
        let again = parse_conllu(to_conllu(&gs).as_bytes()).unwrap();
        assert_eq!(gs, again);
    }
}
