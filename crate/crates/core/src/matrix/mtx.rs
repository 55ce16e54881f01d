//! Matrix Market coordinate format reader and writer.

use std::io::{BufRead, Write};

use super::{CscMatrix, MatrixError};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<(Field, Symmetry), MatrixError> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" {
        return Err(MatrixError::MalformedHeader(format!("expected '%%MatrixMarket matrix coordinate <field> <symmetry>', got '{}'", line.trim())));
    }
    if words[1] != "matrix" {
        return Err(MatrixError::MalformedHeader(format!("unsupported object '{}'", words[1])));
    }
    if words[2] != "coordinate" {
        return Err(MatrixError::MalformedHeader(format!("unsupported format '{}', only 'coordinate' is read", words[2])));
    }
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        "complex" => return Err(MatrixError::ComplexFieldUnsupported),
        other => return Err(MatrixError::MalformedHeader(format!("unknown field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(MatrixError::MalformedHeader(format!("unsupported symmetry '{other}'"))),
    };
    Ok((field, symmetry))
}

fn parse_index(tok: Option<&str>, line: usize) -> Result<usize, MatrixError> {
    tok.ok_or_else(|| MatrixError::MalformedEntry { line, reason: "missing index".into() })?
        .parse::<usize>()
        .map_err(|e| MatrixError::MalformedEntry { line, reason: format!("bad index: {e}") })
}

/// Reads a `matrix coordinate` Matrix Market stream into CSC form.
///
/// All entries are kept (no triangular filtering). Duplicates are summed,
/// symmetric storage is mirrored and pattern entries become `1.0`.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CscMatrix, MatrixError> {
    let mut lines = reader.lines().enumerate();

    let (field, symmetry) = match lines.next() {
        Some((_, line)) => parse_header(&line?)?,
        None => return Err(MatrixError::MalformedHeader("empty input".into())),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = 0usize;

    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let Some((_, cols, _)) = size else {
            let rows = parse_index(toks.next(), lineno)?;
            let cols = parse_index(toks.next(), lineno)?;
            let nnz = parse_index(toks.next(), lineno)?;
            if rows != cols {
                return Err(MatrixError::NonSquare { rows, cols });
            }
            size = Some((rows, cols, nnz));
            triplets.reserve(if symmetry == Symmetry::Symmetric { 2 * nnz } else { nnz });
            continue;
        };
        let n = cols;
        let r = parse_index(toks.next(), lineno)?;
        let c = parse_index(toks.next(), lineno)?;
        if r == 0 || c == 0 || r > n || c > n {
            return Err(MatrixError::IndexOutOfRange { row: r, col: c, n });
        }
        let v = match field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => toks
                .next()
                .ok_or_else(|| MatrixError::MalformedEntry { line: lineno, reason: "missing value".into() })?
                .parse::<f64>()
                .map_err(|e| MatrixError::MalformedEntry { line: lineno, reason: format!("bad value: {e}") })?,
        };
        triplets.push((r - 1, c - 1, v));
        if symmetry == Symmetry::Symmetric && r != c {
            triplets.push((c - 1, r - 1, v));
        }
        seen += 1;
    }

    let (n, _, nnz) = size.ok_or_else(|| MatrixError::MalformedHeader("missing size line".into()))?;
    if seen != nnz {
        return Err(MatrixError::MalformedHeader(format!("size line declares {nnz} entries but {seen} were read")));
    }
    CscMatrix::from_triplets(n, triplets)
}

/// Writes `m` as `%%MatrixMarket matrix coordinate real general`, entries in
/// column-major storage order. Values use the shortest round-trip form.
pub fn write_matrix_market<W: Write>(m: &CscMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.n(), m.n(), m.nnz())?;
    for (r, c, v) in m.triplets() {
        writeln!(out, "{} {} {:e}", r + 1, c + 1, v)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<CscMatrix, MatrixError> {
        parse_matrix_market(s.as_bytes())
    }

    #[test]
    fn single_entry() {
        let m = parse("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 5.0\n").unwrap();
        assert_eq!((m.n(), m.nnz()), (1, 1));
        assert_eq!(m.values(), &[5.0]);
    }

    #[test]
    fn duplicates_are_summed() {
        let m = parse("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1.0\n1 1 2.0\n").unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.values(), &[3.0]);
    }

    #[test]
    fn symmetric_is_expanded_and_comments_skipped() {
        let src = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n\n3 3 3\n1 1 4\n3 1 -1\n\n3 3 2\n";
        let m = parse(src).unwrap();
        assert_eq!(m.nnz(), 4);
        let t: Vec<_> = m.triplets().collect();
        assert_eq!(t, vec![(0, 0, 4.0), (2, 0, -1.0), (0, 2, -1.0), (2, 2, 2.0)]);
    }

    #[test]
    fn pattern_and_integer_fields() {
        let m = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n2 1\n").unwrap();
        assert_eq!(m.values(), &[1.0, 1.0]);
        let m = parse("%%MatrixMarket matrix coordinate integer general\n2 2 1\n2 2 7\n").unwrap();
        assert_eq!(m.values(), &[7.0]);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse("hello\n"), Err(MatrixError::MalformedHeader(_))));
        assert!(matches!(parse(""), Err(MatrixError::MalformedHeader(_))));
        assert!(matches!(
            parse("%%MatrixMarket matrix array real general\n1 1\n1\n"),
            Err(MatrixError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
            Err(MatrixError::ComplexFieldUnsupported)
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 3 0\n"),
            Err(MatrixError::NonSquare { rows: 2, cols: 3 })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
            Err(MatrixError::IndexOutOfRange { row: 3, col: 1, n: 2 })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n"),
            Err(MatrixError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"),
            Err(MatrixError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n"),
            Err(MatrixError::MalformedEntry { line: 3, .. })
        ));
    }

    #[test]
    fn writer_emits_column_major() {
        let m = CscMatrix::from_triplets(2, [(1, 0, 0.5), (0, 0, 2.0), (1, 1, -3.0)]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2e0\n2 1 5e-1\n2 2 -3e0\n"
        );
        assert_eq!(parse(&text).unwrap(), m);
    }
}
