//! CSV emission tuned for bit-exact diffing.
//!
//! Dialect: comma separators, one header row, UTF-8, LF endings, doubles in
//! Rust's shortest round-trip form. Line 1 is a completion sentinel comment;
//! files are staged to a temp name and renamed into place, so a file that
//! exists under its final name is complete by construction and the sentinel
//! lets a reader double-check.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const SENTINEL: &str = "# rpslab-csv complete";

pub struct CsvBuilder {
    text: String,
    columns: usize,
}

impl CsvBuilder {
    pub fn new(columns: &[&str]) -> Self {
        let mut text = String::new();
        text.push_str(SENTINEL);
        text.push('\n');
        text.push_str(&columns.join(","));
        text.push('\n');
        Self {
            text,
            columns: columns.len(),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut n = 0;
        for (i, cell) in cells.into_iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            debug_assert!(
                !cell.as_ref().contains([',', '\n', '"']),
                "cell {:?} needs quoting, which this dialect forbids",
                cell.as_ref()
            );
            self.text.push_str(cell.as_ref());
            n += 1;
        }
        debug_assert_eq!(n, self.columns, "row width mismatch");
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Shortest round-trip decimal form (`Display` for `f64`); non-finite values
/// print as `NaN` / `inf` / `-inf`.
pub fn fmt_f64(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x}").expect("formatting f64 cannot fail");
    s
}

/// Writes via a dot-prefixed temp file in the same directory followed by an
/// atomic rename, so the final path never holds a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Splits finished CSV text into data rows (drops sentinel and header),
/// verifying the sentinel. Used by tests and the sweep reader.
pub fn parse_rows(text: &str) -> io::Result<Vec<Vec<String>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l == SENTINEL => {}
        other => {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("missing completion sentinel, found {other:?}"),
            ))
        }
    }
    let _header = lines.next();
    Ok(lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect())
}
