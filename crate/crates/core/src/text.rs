//! Line-oriented configuration text format.
//!
//! ```text
//! N1L v1
//! rows=2 cols=5
//! parts=1,1,0,0
//! row 0 : 0 1 2
//! row 1 : 2 3 4
//! ```

use std::fmt::Write as _;

use crate::config::{bits, Configuration, RowPartition, CLASSES, MAX_COLS};
use crate::error::{ParseError, ParseErrorKind};

const MAGIC: &str = "N1L v1";

pub fn serialize_text(cfg: &Configuration) -> String {
    let mut out = String::new();
    let p = cfg.partition().sizes();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "rows={} cols={}", cfg.row_count(), cfg.cols()).unwrap();
    writeln!(out, "parts={},{},{},{}", p[0], p[1], p[2], p[3]).unwrap();
    for (k, row) in cfg.classed_rows() {
        write!(out, "row {k} :").unwrap();
        for j in bits(row) {
            write!(out, " {j}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn header(line: usize, msg: &str) -> ParseError {
    err(line, ParseErrorKind::MalformedHeader(msg.to_string()))
}

fn field<'a>(line_no: usize, token: Option<&'a str>, name: &str) -> Result<&'a str, ParseError> {
    token
        .and_then(|t| t.strip_prefix(name))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| header(line_no, &format!("expected `{name}=`")))
}

fn number(line_no: usize, s: &str) -> Result<usize, ParseError> {
    s.trim().parse().map_err(|_| header(line_no, &format!("`{s}` is not a number")))
}

/// Parses the text format. Rows must have exactly three strictly ascending
/// column indices and appear grouped by class, class 0 first, matching the
/// declared partition.
pub fn parse_text(text: &str) -> Result<Configuration, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (n, first) = lines.next().ok_or_else(|| header(1, "empty input"))?;
    if first != MAGIC {
        return Err(header(n, "expected `N1L v1`"));
    }

    let (n, dims) = lines.next().ok_or_else(|| header(n + 1, "missing dimensions line"))?;
    let mut tokens = dims.split_whitespace();
    let rows = number(n, field(n, tokens.next(), "rows")?)?;
    let cols = number(n, field(n, tokens.next(), "cols")?)?;
    if tokens.next().is_some() {
        return Err(header(n, "trailing tokens after dimensions"));
    }
    if cols > MAX_COLS {
        return Err(header(n, &format!("at most {MAX_COLS} columns are supported")));
    }

    let (n, parts_line) = lines.next().ok_or_else(|| header(n + 1, "missing parts line"))?;
    let parts_str = parts_line
        .strip_prefix("parts=")
        .ok_or_else(|| header(n, "expected `parts=`"))?;
    let parts: Vec<usize> = parts_str
        .split(',')
        .map(|s| number(n, s))
        .collect::<Result<_, _>>()?;
    if parts.len() != CLASSES {
        return Err(header(n, "expected four part sizes"));
    }
    let partition = RowPartition([parts[0], parts[1], parts[2], parts[3]]);
    if partition.total() != rows {
        return Err(header(n, "part sizes do not sum to the row count"));
    }

    let mut masks = Vec::with_capacity(rows);
    let mut last_line = n;
    for (n, line) in lines {
        last_line = n;
        let rest = line
            .strip_prefix("row")
            .ok_or_else(|| err(n, ParseErrorKind::MalformedRow("expected `row`".into())))?;
        let (class_str, cols_str) = rest
            .split_once(':')
            .ok_or_else(|| err(n, ParseErrorKind::MalformedRow("expected `:`".into())))?;
        let class: usize = class_str.trim().parse().map_err(|_| {
            err(n, ParseErrorKind::MalformedRow(format!("bad class `{}`", class_str.trim())))
        })?;
        if class >= CLASSES {
            return Err(err(n, ParseErrorKind::ClassOutOfRange { class }));
        }
        let columns: Vec<usize> = cols_str
            .split_whitespace()
            .map(|s| {
                s.parse().map_err(|_| {
                    err(n, ParseErrorKind::MalformedRow(format!("bad column `{s}`")))
                })
            })
            .collect::<Result<_, _>>()?;
        if columns.len() != 3 {
            return Err(err(n, ParseErrorKind::RowWeight { found: columns.len() }));
        }
        if let Some(&column) = columns.iter().find(|&&j| j >= cols) {
            return Err(err(n, ParseErrorKind::ColumnOutOfRange { column, cols }));
        }
        if columns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err(n, ParseErrorKind::UnsortedColumns));
        }
        let index = masks.len();
        if index >= rows || partition.class_of(index) != class {
            if index >= rows {
                return Err(err(n, ParseErrorKind::RowCount { expected: rows, found: index + 1 }));
            }
            return Err(err(n, ParseErrorKind::PartitionMismatch));
        }
        masks.push(columns.iter().fold(0u64, |m, &j| m | 1 << j));
    }
    if masks.len() != rows {
        return Err(err(last_line, ParseErrorKind::RowCount { expected: rows, found: masks.len() }));
    }
    Ok(Configuration::new(cols, partition, masks).expect("parser checked all invariants"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "N1L v1\nrows=2 cols=5\nparts=1,1,0,0\nrow 0 : 0 1 2\nrow 1 : 2 3 4\n";

    #[test]
    fn round_trip() {
        let cfg = parse_text(EXAMPLE).unwrap();
        assert_eq!(cfg.rows(), &[0b00111, 0b11100]);
        assert_eq!(serialize_text(&cfg), EXAMPLE);
        assert_eq!(parse_text(&serialize_text(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn four_column_row() {
        let text = "N1L v1\nrows=1 cols=5\nparts=1,0,0,0\nrow 0 : 0 1 2 3\n";
        let e = parse_text(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert_eq!(e.kind, ParseErrorKind::RowWeight { found: 4 });
    }

    #[test]
    fn class_outside_partition() {
        let text = "N1L v1\nrows=2 cols=6\nparts=1,1,0,0\nrow 0 : 0 1 2\nrow 2 : 3 4 5\n";
        assert_eq!(parse_text(text).unwrap_err().kind, ParseErrorKind::PartitionMismatch);
    }

    #[test]
    fn distinct_errors() {
        let bad_header = "N1L v2\nrows=1 cols=3\nparts=1,0,0,0\nrow 0 : 0 1 2\n";
        assert!(matches!(
            parse_text(bad_header).unwrap_err().kind,
            ParseErrorKind::MalformedHeader(_)
        ));
        let out_of_range = "N1L v1\nrows=1 cols=3\nparts=1,0,0,0\nrow 0 : 0 1 3\n";
        assert_eq!(
            parse_text(out_of_range).unwrap_err().kind,
            ParseErrorKind::ColumnOutOfRange { column: 3, cols: 3 }
        );
        let bad_class = "N1L v1\nrows=1 cols=3\nparts=1,0,0,0\nrow 4 : 0 1 2\n";
        assert_eq!(
            parse_text(bad_class).unwrap_err().kind,
            ParseErrorKind::ClassOutOfRange { class: 4 }
        );
        let short = "N1L v1\nrows=2 cols=3\nparts=2,0,0,0\nrow 0 : 0 1 2\n";
        assert_eq!(
            parse_text(short).unwrap_err().kind,
            ParseErrorKind::RowCount { expected: 2, found: 1 }
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# example\nN1L v1\n\nrows=1 cols=3\nparts=0,1,0,0\nrow 1 : 0 1 2\n";
        let cfg = parse_text(text).unwrap();
        assert_eq!(cfg.partition().sizes(), [0, 1, 0, 0]);
    }
}
