//! CSV formats for classifications and bouts.
//!
//! Two tiny, fixed-schema formats written and parsed by hand so their bytes
//! are fully under this crate's control (a requirement for reproducibility
//! checks — serialising the same rows twice must give identical files):
//!
//! ```text
//! source_file,segment_index,start_time_s,label
//! pen4.wav,0,0.000,unid
//! ```
//!
//! ```text
//! source_file,class,start_time_s,end_time_s
//! pen4.wav,grumble,282.000,285.000
//! ```
//!
//! Times carry three decimals. Because fields never need escaping, any
//! value containing a comma, quote or line break is rejected up front
//! instead of being quoted.

use hopcall_core::{Bout, BoutRules, SegmentClassification};
use thiserror::Error;

/// Header of the per-segment classification format.
pub const CLASSIFICATION_HEADER: &str = "source_file,segment_index,start_time_s,label";

/// Header of the bout format.
pub const BOUT_HEADER: &str = "source_file,class,start_time_s,end_time_s";

/// Serialises classification rows (LF line endings, times with three
/// decimals).
pub fn classifications_to_csv(rows: &[SegmentClassification]) -> Result<String, CsvError> {
    let mut out = String::from(CLASSIFICATION_HEADER);
    out.push('\n');
    for row in rows {
        check_field("source_file", &row.source_id, None)?;
        check_field("label", &row.label, None)?;
        out.push_str(&format!(
            "{},{},{:.3},{}\n",
            row.source_id, row.segment_index, row.start_time_s, row.label
        ));
    }
    Ok(out)
}

/// Parses a classification CSV. Network details are not part of the format,
/// so every row comes back with `detail: None`.
pub fn classifications_from_csv(text: &str) -> Result<Vec<SegmentClassification>, CsvError> {
    let mut lines = text.lines().enumerate();
    expect_header(&mut lines, CLASSIFICATION_HEADER)?;
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields = split_fields(line, 4, line_no)?;
        check_field("source_file", fields[0], Some(line_no))?;
        check_field("label", fields[3], Some(line_no))?;
        rows.push(SegmentClassification {
            source_id: fields[0].to_string(),
            segment_index: parse(fields[1], "segment_index", line_no)?,
            start_time_s: parse_time(fields[2], "start_time_s", line_no)?,
            label: fields[3].to_string(),
            detail: None,
        });
    }
    Ok(rows)
}

/// Serialises bouts (LF line endings, times with three decimals).
pub fn bouts_to_csv(bouts: &[Bout]) -> Result<String, CsvError> {
    let mut out = String::from(BOUT_HEADER);
    out.push('\n');
    for bout in bouts {
        check_field("source_file", &bout.source_id, None)?;
        check_field("class", &bout.class, None)?;
        out.push_str(&format!(
            "{},{},{:.3},{:.3}\n",
            bout.source_id, bout.class, bout.start_s, bout.end_s
        ));
    }
    Ok(out)
}

/// Parses a bout CSV, validating every bout's duration against `rules`
/// (call classes must meet their persistence minimum, non-call bouts their
/// 1–60 s window, and every bout must end after it starts).
pub fn bouts_from_csv(text: &str, rules: &BoutRules) -> Result<Vec<Bout>, CsvError> {
    let mut lines = text.lines().enumerate();
    expect_header(&mut lines, BOUT_HEADER)?;
    let mut bouts = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields = split_fields(line, 4, line_no)?;
        check_field("source_file", fields[0], Some(line_no))?;
        check_field("class", fields[1], Some(line_no))?;
        let bout = Bout {
            source_id: fields[0].to_string(),
            class: fields[1].to_string(),
            start_s: parse_time(fields[2], "start_time_s", line_no)?,
            end_s: parse_time(fields[3], "end_time_s", line_no)?,
        };
        rules
            .validate_bout(&bout)
            .map_err(|e| CsvError::InvalidBout {
                line: line_no,
                detail: e.to_string(),
            })?;
        bouts.push(bout);
    }
    Ok(bouts)
}

fn expect_header<'a, I: Iterator<Item = (usize, &'a str)>>(
    lines: &mut I,
    expected: &'static str,
) -> Result<(), CsvError> {
    match lines.next() {
        Some((_, found)) if found == expected => Ok(()),
        Some((_, found)) => Err(CsvError::Header {
            expected,
            found: found.to_string(),
        }),
        None => Err(CsvError::Header {
            expected,
            found: String::new(),
        }),
    }
}

fn split_fields(line: &str, want: usize, line_no: usize) -> Result<Vec<&str>, CsvError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != want {
        return Err(CsvError::Parse {
            line: line_no,
            detail: format!("expected {want} comma-separated fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

fn check_field(name: &'static str, value: &str, line: Option<usize>) -> Result<(), CsvError> {
    if value.is_empty() || value.contains([',', '"', '\n', '\r']) {
        return Err(CsvError::InvalidField {
            field: name,
            value: value.to_string(),
            line,
        });
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(
    value: &str,
    field: &'static str,
    line: usize,
) -> Result<T, CsvError> {
    value.parse().map_err(|_| CsvError::Parse {
        line,
        detail: format!("cannot parse {field} from '{value}'"),
    })
}

fn parse_time(value: &str, field: &'static str, line: usize) -> Result<f64, CsvError> {
    let t: f64 = parse(value, field, line)?;
    if !t.is_finite() {
        return Err(CsvError::Parse {
            line,
            detail: format!("{field} must be finite, got '{value}'"),
        });
    }
    Ok(t)
}

/// Failures while reading or writing the CSV formats.
#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    /// The first line is not the expected schema header.
    #[error("bad CSV header: expected '{expected}', found '{found}'")]
    Header {
        /// The header this format requires.
        expected: &'static str,
        /// What the file started with.
        found: String,
    },
    /// A row that does not parse.
    #[error("line {line}: {detail}")]
    Parse {
        /// 1-based line number.
        line: usize,
        /// What was wrong.
        detail: String,
    },
    /// A value that cannot be represented unescaped.
    #[error("{field} value '{value}' is empty or contains a comma, quote or line break{}",
        line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    InvalidField {
        /// Schema field name.
        field: &'static str,
        /// The offending value.
        value: String,
        /// 1-based line number when parsing (absent when writing).
        line: Option<usize>,
    },
    /// A parsed bout that violates the duration rules.
    #[error("line {line}: {detail}")]
    InvalidBout {
        /// 1-based line number.
        line: usize,
        /// What was violated.
        detail: String,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use hopcall_core::CLASS_NON_CALL;

    fn row(index: usize, label: &str) -> SegmentClassification {
        SegmentClassification {
            source_id: "pen4.wav".to_string(),
            segment_index: index,
            start_time_s: index as f64,
            label: label.to_string(),
            detail: None,
        }
    }

    #[test]
    fn classification_round_trip_is_exact() {
        let rows = vec![row(0, "unid"), row(1, "grumble"), row(2, "grumble")];
        let text = classifications_to_csv(&rows).unwrap();
        assert_eq!(
            text,
            "source_file,segment_index,start_time_s,label\n\
             pen4.wav,0,0.000,unid\n\
             pen4.wav,1,1.000,grumble\n\
             pen4.wav,2,2.000,grumble\n"
        );
        let parsed = classifications_from_csv(&text).unwrap();
        assert_eq!(parsed, rows);
        // Serialising the parse reproduces the bytes.
        assert_eq!(classifications_to_csv(&parsed).unwrap(), text);
    }

    #[test]
    fn bout_round_trip_is_exact() {
        let rules = BoutRules::default();
        let bouts = vec![
            Bout {
                source_id: "pen4.wav".to_string(),
                class: "grumble".to_string(),
                start_s: 282.0,
                end_s: 285.0,
            },
            Bout {
                source_id: "pen4.wav".to_string(),
                class: CLASS_NON_CALL.to_string(),
                start_s: 285.0,
                end_s: 287.0,
            },
        ];
        let text = bouts_to_csv(&bouts).unwrap();
        assert_eq!(
            text,
            "source_file,class,start_time_s,end_time_s\n\
             pen4.wav,grumble,282.000,285.000\n\
             pen4.wav,non-call,285.000,287.000\n"
        );
        assert_eq!(bouts_from_csv(&text, &rules).unwrap(), bouts);
    }

    #[test]
    fn bout_durations_are_validated_on_load() {
        let rules = BoutRules::default();
        // A one-second grumble cannot exist under the two-record minimum.
        let text = "source_file,class,start_time_s,end_time_s\np.wav,grumble,5.000,6.000\n";
        assert!(matches!(
            bouts_from_csv(text, &rules),
            Err(CsvError::InvalidBout { line: 2, .. })
        ));
        // Non-call bouts may not exceed a minute.
        let text = "source_file,class,start_time_s,end_time_s\np.wav,non-call,0.000,61.000\n";
        assert!(bouts_from_csv(text, &rules).is_err());
        // Unknown classes only need end > start.
        let text = "source_file,class,start_time_s,end_time_s\np.wav,hoot,3.000,3.500\n";
        assert_eq!(bouts_from_csv(text, &rules).unwrap().len(), 1);
        let text = "source_file,class,start_time_s,end_time_s\np.wav,hoot,3.000,3.000\n";
        assert!(bouts_from_csv(text, &rules).is_err());
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let text = "source_file,segment_index,start_time_s,label\nok.wav,0,0.000,unid\nbad line\n";
        match classifications_from_csv(text).unwrap_err() {
            CsvError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("wrong error: {other}"),
        }
        let text = "source_file,segment_index,start_time_s,label\nok.wav,zero,0.000,unid\n";
        assert!(matches!(
            classifications_from_csv(text),
            Err(CsvError::Parse { line: 2, .. })
        ));
        let text = "wrong,header\n";
        assert!(matches!(
            classifications_from_csv(text),
            Err(CsvError::Header { .. })
        ));
    }

    #[test]
    fn unescapable_fields_are_refused() {
        let mut bad = row(0, "unid");
        bad.source_id = "pen,4.wav".to_string();
        assert!(matches!(
            classifications_to_csv(&[bad]),
            Err(CsvError::InvalidField { field: "source_file", .. })
        ));
        let mut bad = row(0, "unid");
        bad.label = "gru\nmble".to_string();
        assert!(classifications_to_csv(&[bad]).is_err());
    }
}
