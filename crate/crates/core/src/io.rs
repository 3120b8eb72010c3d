//! Point-set files (`apx-points 1 dim=<D> count=<K>`) and provenance sidecars.
//!
//! After the header come `K` lines of `D` whitespace-separated rationals
//! (`<int>` or `<int>/<posint>`). Lines starting with `#` and blank lines are
//! skipped. A sidecar lists one source lattice point per line as
//! comma-separated integers, in the same order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational, RatVector};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header_field(token: Option<&str>, key: &str, line: usize) -> Result<usize> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(line, format!("header must contain `{key}=<n>`")))
}

pub fn parse_points(text: &str) -> Result<Vec<RatVector>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("apx-points") || tok.next() != Some("1") {
        return Err(parse_err(hline, "header must start with `apx-points 1`"));
    }
    let dim = header_field(tok.next(), "dim", hline)?;
    let count = header_field(tok.next(), "count", hline)?;
    if tok.next().is_some() {
        return Err(parse_err(hline, "unexpected trailing header fields"));
    }
    let mut points = Vec::with_capacity(count);
    let mut last = hline;
    for (n, line) in lines {
        last = n;
        if points.len() == count {
            return Err(parse_err(n, format!("more than {count} points")));
        }
        let entries = line
            .split_whitespace()
            .map(|t| parse_rational(t).map_err(|e| parse_err(n, e)))
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != dim {
            return Err(parse_err(n, format!("expected {dim} coordinates, found {}", entries.len())));
        }
        points.push(RatVector::new(entries));
    }
    if points.len() != count {
        return Err(parse_err(last, format!("expected {count} points, found {}", points.len())));
    }
    Ok(points)
}

/// `comments` are written as `# ` lines after the header.
pub fn format_points(points: &[RatVector], comments: &[String]) -> String {
    let dim = points.first().map_or(0, RatVector::dim);
    let mut out = format!("apx-points 1 dim={dim} count={}\n", points.len());
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for p in points {
        let row: Vec<String> = p.entries().iter().map(format_rational).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_provenance(text: &str) -> Result<Vec<Vec<i64>>> {
    content_lines(text)
        .map(|(n, line)| {
            line.split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|e| parse_err(n, format!("`{}`: {e}", t.trim()))))
                .collect()
        })
        .collect()
}

pub fn format_provenance(source: &[Vec<i64>]) -> String {
    source
        .iter()
        .map(|p| p.iter().map(ToString::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    #[test]
    fn roundtrip() {
        let pts = vec![
            RatVector::new(vec![ratio(1, 2), ratio(-3, 1)]),
            RatVector::from_ints(&[0, 7]),
        ];
        let text = format_points(&pts, &["demo".into()]);
        assert_eq!(text, "apx-points 1 dim=2 count=2\n# demo\n1/2 -3\n0 7\n");
        assert_eq!(parse_points(&text).unwrap(), pts);

        let prov = vec![vec![1, 2, 3], vec![-1, 0, 4]];
        assert_eq!(format_provenance(&prov), "1,2,3\n-1,0,4\n");
        assert_eq!(parse_provenance(&format_provenance(&prov)).unwrap(), prov);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line_of = |text: &str| match parse_points(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("apx-points 2 dim=1 count=1\n0\n"), 1);
        assert_eq!(line_of("apx-points 1 dim=2 count=2\n# c\n1 2\n3 x\n"), 4);
        assert_eq!(line_of("apx-points 1 dim=2 count=2\n1 2\n3\n"), 3);
        assert_eq!(line_of("apx-points 1 dim=1 count=2\n1\n"), 2);
        assert_eq!(line_of("apx-points 1 dim=1 count=1\n1\n2\n"), 3);
        assert_eq!(line_of("apx-points 1 dim=1 count=1\n1/0\n"), 2);
        assert_eq!(line_of(""), 1);
        assert!(matches!(parse_provenance("1,2\n3,a\n"), Err(Error::Parse { line: 2, .. })));
    }
}
