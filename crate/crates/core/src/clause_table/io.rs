use thiserror::Error;

use super::{Anchor, AnnotatedPhrase, ClauseRow, ClauseTable, TableError};

pub const CSV_HEADER: [&str; 10] = [
    "sent_id",
    "refinement",
    "modality",
    "subject",
    "verb",
    "object",
    "time",
    "adverbials",
    "conditions",
    "notes",
];

const DOC_ID_PREFIX: &str = "# doc_id = ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Picks JSON for `.json` paths, CSV otherwise.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown table format `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: unknown {field} code `{code}`")]
    UnknownCode { row: usize, field: &'static str, code: String },
    #[error("row {row}: malformed {field} item `{item}` (expected `S|V|O: text`)")]
    BadPhrase { row: usize, field: &'static str, item: String },
    #[error("row {row}: expected {expected} columns, found {found}")]
    ColumnCount { row: usize, expected: usize, found: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] TableError),
}

pub fn serialize(table: &ClauseTable, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => to_csv(table),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(table).expect("clause tables always serialize");
            out.push(b'\n');
            out
        }
    }
}

pub fn deserialize(bytes: &[u8], format: Format) -> Result<ClauseTable, ReadError> {
    let table = match format {
        Format::Csv => from_csv(bytes)?,
        Format::Json => from_json(bytes)?,
    };
    table.validate()?;
    Ok(table)
}

fn to_csv(table: &ClauseTable) -> Vec<u8> {
    let mut out = Vec::new();
    if !table.doc_id.is_empty() {
        out.extend_from_slice(DOC_ID_PREFIX.as_bytes());
        out.extend_from_slice(table.doc_id.as_bytes());
        out.push(b'\n');
    }
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &table.rows {
            w.write_record([
                r.sent_id.as_str(),
                r.refinement.code(),
                r.modality.code(),
                r.subject.as_str(),
                r.verb.as_str(),
                r.object.as_str(),
                &join_phrases(&r.time),
                &join_phrases(&r.adverbials),
                &join_phrases(&r.conditions),
                &join_phrases(&r.notes),
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    out
}

fn join_phrases(list: &[AnnotatedPhrase]) -> String {
    list.iter()
        .map(|p| format!("{}: {}", p.anchor.code(), escape(&p.text)))
        .collect::<Vec<_>>()
        .join("|")
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('|', "\\|")
}

fn split_phrases(field: &str) -> Vec<String> {
    let mut items = Vec::new();
    let mut cur = String::new();
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if let Some(next) = chars.next() {
                    cur.push(next);
                }
            }
            '|' => items.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    items.push(cur);
    items
}

fn parse_phrases(row: usize, field: &'static str, value: &str) -> Result<Vec<AnnotatedPhrase>, ReadError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    split_phrases(value)
        .into_iter()
        .map(|item| {
            let bad = || ReadError::BadPhrase { row, field, item: item.clone() };
            let (anchor, text) = item.split_once(':').ok_or_else(bad)?;
            let anchor: Anchor = anchor.parse().map_err(|_| bad())?;
            let text = text.strip_prefix(' ').unwrap_or(text);
            Ok(AnnotatedPhrase::new(anchor, text))
        })
        .collect()
}

fn from_csv(bytes: &[u8]) -> Result<ClauseTable, ReadError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ReadError::Encoding)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (doc_id, body) = match text.strip_prefix(DOC_ID_PREFIX) {
        Some(rest) => {
            let (first, body) = rest.split_once('\n').unwrap_or((rest, ""));
            (first.trim_end_matches('\r').to_string(), body)
        }
        None => (String::new(), text),
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(body.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(ReadError::Header {
            expected: CSV_HEADER.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != CSV_HEADER.len() {
            return Err(ReadError::ColumnCount { row, expected: CSV_HEADER.len(), found: rec.len() });
        }
        rows.push(ClauseRow {
            sent_id: rec[0].to_string(),
            refinement: rec[1]
                .parse()
                .map_err(|code| ReadError::UnknownCode { row, field: "refinement", code })?,
            modality: rec[2]
                .parse()
                .map_err(|code| ReadError::UnknownCode { row, field: "modality", code })?,
            subject: rec[3].to_string(),
            verb: rec[4].to_string(),
            object: rec[5].to_string(),
            time: parse_phrases(row, "time", &rec[6])?,
            adverbials: parse_phrases(row, "adverbials", &rec[7])?,
            conditions: parse_phrases(row, "conditions", &rec[8])?,
            notes: parse_phrases(row, "notes", &rec[9])?,
        });
    }
    Ok(ClauseTable { doc_id, rows })
}

fn from_json(bytes: &[u8]) -> Result<ClauseTable, ReadError> {
    let value: serde_json::Value = serde_json::from_slice(bytes)?;
    let (doc_id, rows) = match value {
        serde_json::Value::Array(rows) => (String::new(), rows),
        serde_json::Value::Object(mut obj) => {
            let doc_id = obj
                .remove("doc_id")
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            let rows = match obj.remove("rows") {
                Some(serde_json::Value::Array(rows)) => rows,
                _ => Vec::new(),
            };
            (doc_id, rows)
        }
        _ => {
            return Err(ReadError::Json(serde::de::Error::custom(
                "expected a table object or an array of rows",
            )))
        }
    };
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, v)| json_row(i + 1, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClauseTable { doc_id, rows })
}

fn json_row(row: usize, mut v: serde_json::Value) -> Result<ClauseRow, ReadError> {
    // Check the closed code sets first so the error names the row.
    for (field, valid) in [("modality", &["D", "P", "O", "F"][..]), ("refinement", &["", "AND", "OR", "SEQ"][..])] {
        if let Some(code) = v.get(field).and_then(|c| c.as_str()) {
            if !valid.contains(&code) {
                return Err(ReadError::UnknownCode { row, field, code: code.to_string() });
            }
        }
    }
    if let Some(obj) = v.as_object_mut() {
        if obj.get("refinement").and_then(|r| r.as_str()) == Some("NONE") {
            obj.insert("refinement".into(), serde_json::Value::String(String::new()));
        }
    }
    Ok(serde_json::from_value(v)?)
}
