//! Loading single- and multi-series inputs, moving-average smoothing and
//! trend labels for mined patterns.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Pattern, TimeSeries};

/// Column of a CSV file holding the series: a header name or a 1-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl FromStr for ColumnSelector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty column selector".into());
        }
        match s.parse::<usize>() {
            Ok(0) => Err("column indices are 1-based".into()),
            Ok(i) => Ok(ColumnSelector::Index(i)),
            Err(_) => Ok(ColumnSelector::Name(s.to_string())),
        }
    }
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Name(n) => f.write_str(n),
            ColumnSelector::Index(i) => write!(f, "{i}"),
        }
    }
}

/// A collection of series with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub series: Vec<TimeSeries>,
    pub labels: Option<Vec<String>>,
    pub source: PathBuf,
}

impl Dataset {
    pub fn new(series: Vec<TimeSeries>, labels: Option<Vec<String>>, source: impl Into<PathBuf>) -> Result<Self> {
        if let Some(labels) = &labels {
            if labels.len() != series.len() {
                return Err(Error::LengthMismatch(labels.len(), series.len()));
            }
        }
        Ok(Dataset { series, labels, source: source.into() })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Writes the labeled form read by [`load_labeled_dataset`]: one series
    /// per line, label first, comma separated. Unlabeled series get label `0`.
    pub fn write_labeled<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, s) in self.series.iter().enumerate() {
            let label = self.labels.as_ref().map_or("0", |l| l[i].as_str());
            write!(out, "{label}")?;
            for v in s.values() {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn map_series(&self, f: impl Fn(&TimeSeries) -> Result<TimeSeries>) -> Result<Dataset> {
        Ok(Dataset {
            series: self.series.iter().map(f).collect::<Result<_>>()?,
            labels: self.labels.clone(),
            source: self.source.clone(),
        })
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let token = token.trim();
    let value: f64 = token.parse().map_err(|_| Error::Parse { line, message: format!("'{token}' is not a number") })?;
    if !value.is_finite() {
        return Err(Error::Parse { line, message: format!("'{token}' is not a finite number") });
    }
    Ok(value)
}

fn series_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "series".into())
}

/// Reads one series from a file: one value per line, or the selected column
/// of a comma-separated file.
pub fn load_single_series(path: impl AsRef<Path>, column: Option<&ColumnSelector>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let values = match column {
        None => read_values(BufReader::new(file))?,
        Some(col) => read_column(file, col)?,
    };
    TimeSeries::new(series_name(path), values)
}

/// One value per line; blank lines are skipped.
pub fn read_values<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        values.push(parse_value(&line, i + 1)?);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values)
}

/// The selected column of a comma-separated file. A name selector requires a
/// header row; with an index selector the first row is treated as a header
/// only if its selected field is not numeric.
pub fn read_column<R: Read>(reader: R, column: &ColumnSelector) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut records = rdr.records();
    let mut values = Vec::new();

    let first = match records.next() {
        Some(r) => r?,
        None => return Err(Error::EmptyInput),
    };
    let first_line = first.position().map_or(1, |p| p.line() as usize);
    let index = match column {
        ColumnSelector::Name(name) => first
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse { line: first_line, message: format!("no column named '{name}' in header") })?,
        ColumnSelector::Index(i) => {
            let idx = i - 1;
            match first.get(idx) {
                Some(tok) if tok.parse::<f64>().is_ok() => values.push(parse_value(tok, first_line)?),
                Some(_) => {}
                None => {
                    return Err(Error::Parse { line: first_line, message: format!("row has no column {i}") });
                }
            }
            idx
        }
    };

    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let token = record
            .get(index)
            .ok_or_else(|| Error::Parse { line, message: format!("row has no column {}", index + 1) })?;
        values.push(parse_value(token, line)?);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values)
}

/// Reads a labeled dataset: one series per line, first field the class
/// label. The delimiter (comma, tab or runs of spaces) is detected from the
/// first non-blank line.
pub fn load_labeled_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let (series, labels) = read_labeled(BufReader::new(File::open(path)?))?;
    Dataset::new(series, Some(labels), path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Comma,
    Tab,
    Whitespace,
}

impl Delimiter {
    fn detect(line: &str) -> Self {
        if line.contains(',') {
            Delimiter::Comma
        } else if line.contains('\t') {
            Delimiter::Tab
        } else {
            Delimiter::Whitespace
        }
    }

    fn split(self, line: &str) -> Vec<&str> {
        match self {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

/// Series are named `row<k>` after their 1-based position among data rows.
pub fn read_labeled<R: BufRead>(reader: R) -> Result<(Vec<TimeSeries>, Vec<String>)> {
    let mut delimiter = None;
    let mut series = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let delim = *delimiter.get_or_insert_with(|| Delimiter::detect(&line));
        let fields = delim.split(line.trim());
        if fields.len() < 2 || fields[0].is_empty() {
            return Err(Error::RaggedInput(lineno));
        }
        let values = fields[1..].iter().map(|tok| parse_value(tok, lineno)).collect::<Result<Vec<_>>>()?;
        series.push(TimeSeries::new(format!("row{}", series.len() + 1), values)?);
        labels.push(fields[0].to_string());
    }
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok((series, labels))
}

/// Centered moving average over an odd `window`. Near the ends the window
/// shrinks to the values that exist, so the output keeps the input length.
pub fn moving_average(s: &TimeSeries, window: usize) -> Result<TimeSeries> {
    let n = s.len();
    if window == 0 || window.is_multiple_of(2) || window > n {
        return Err(Error::BadWindow { window, n });
    }
    let half = (window - 1) / 2;
    let v = s.values();
    let values = (0..n)
        .map(|i| {
            let w = &v[i.saturating_sub(half)..=(i + half).min(n - 1)];
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            // rounding can push the mean of equal values just past them
            let (min, max) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            mean.clamp(min, max)
        })
        .collect();
    TimeSeries::new(s.name(), values)
}

/// Coarse direction of a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trend {
    Upward,
    Downward,
    Mixed,
}

impl Trend {
    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Upward => "upward",
            Trend::Downward => "downward",
            Trend::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upward when the pattern ends above its start and rises on more steps than
/// it falls; downward for the mirror image; mixed otherwise.
pub fn classify_trend(p: &Pattern) -> Trend {
    let r = p.ranks();
    let ups = r.windows(2).filter(|w| w[0] < w[1]).count();
    let downs = r.len() - 1 - ups;
    let (first, last) = (r[0], r[r.len() - 1]);
    if last > first && ups > downs {
        Trend::Upward
    } else if last < first && downs > ups {
        Trend::Downward
    } else {
        Trend::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new("t", v.to_vec()).unwrap()
    }

    #[test]
    fn single_column_values() {
        let text = "11\n10\n21\n25\n12\n14\n18\n19\n26\n13\n16\n20\n24\n30\n15\n17\n";
        assert_eq!(read_values(Cursor::new(text)).unwrap().len(), 16);
        assert_eq!(read_values(Cursor::new("1\n\n 2.5 \n\n")).unwrap(), vec![1.0, 2.5]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = read_values(Cursor::new("1\n2\nabc\n4\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = read_values(Cursor::new("1\nNaN\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(matches!(read_values(Cursor::new("\n\n")), Err(Error::EmptyInput)));
    }

    #[test]
    fn csv_column_by_name_and_index() {
        let text = "date,open,close\nd1,1,10.5\nd2,2,11\nd3,3,9.25\nd4,4,12\nd5,5,13\n";
        let by_name = read_column(Cursor::new(text), &"close".parse().unwrap()).unwrap();
        assert_eq!(by_name, vec![10.5, 11.0, 9.25, 12.0, 13.0]);
        let by_index = read_column(Cursor::new(text), &ColumnSelector::Index(3)).unwrap();
        assert_eq!(by_index, by_name);
        let no_header = read_column(Cursor::new("1,2\n3,4\n"), &ColumnSelector::Index(2)).unwrap();
        assert_eq!(no_header, vec![2.0, 4.0]);

        let err = read_column(Cursor::new(text), &"volume".parse().unwrap()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read_column(Cursor::new("a,b\n1,2\n3,x\n"), &"b".parse().unwrap()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!("0".parse::<ColumnSelector>().is_err());
    }

    #[test]
    fn labeled_dataset_parsing() {
        let (series, labels) = read_labeled(Cursor::new("1,5,4,3\n2,1,2,3\n1,2,1,2\n")).unwrap();
        assert_eq!(series.len(), 3);
        assert_eq!(labels, vec!["1", "2", "1"]);
        assert_eq!(series[0].values(), &[5.0, 4.0, 3.0]);

        let tabbed = read_labeled(Cursor::new("1\t5\t4\t3\n2\t1\t2\t3\n1\t2\t1\t2\n")).unwrap();
        assert_eq!(tabbed, (series.clone(), labels.clone()));
        let spaced = read_labeled(Cursor::new("  1  5 4   3\n2 1 2 3\n1 2 1 2\n")).unwrap();
        assert_eq!(spaced, (series, labels));

        assert!(matches!(read_labeled(Cursor::new("")), Err(Error::EmptyInput)));
        assert!(matches!(read_labeled(Cursor::new("1,2\n3\n")), Err(Error::RaggedInput(2))));
        assert!(matches!(read_labeled(Cursor::new("1,2\n3,q\n")), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn labeled_dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "a\t0.1\t2\t-3.5\nb\t1e-3\t7\t8\n").unwrap();
        let ds = load_labeled_dataset(&path).unwrap();
        let out = dir.path().join("d2.csv");
        ds.write_labeled(File::create(&out).unwrap()).unwrap();
        let again = load_labeled_dataset(&out).unwrap();
        assert_eq!(again.series, ds.series);
        assert_eq!(again.labels, ds.labels);
    }

    #[test]
    fn dataset_label_count_checked() {
        let err = Dataset::new(vec![ts(&[1., 2.])], Some(vec![]), "x").unwrap_err();
        assert!(matches!(err, Error::LengthMismatch(0, 1)));
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&ts(&[3.; 5]), 5).unwrap().values(), &[3.; 5]);
        assert_eq!(moving_average(&ts(&[1., 2., 3., 4., 5.]), 5).unwrap().values(), &[2., 2.5, 3., 3.5, 4.]);
        let s = ts(&[4., -1., 9., 2.]);
        assert_eq!(moving_average(&s, 1).unwrap(), s);
        assert!(matches!(moving_average(&s, 2), Err(Error::BadWindow { .. })));
        assert!(matches!(moving_average(&s, 0), Err(Error::BadWindow { .. })));
        assert!(matches!(moving_average(&s, 5), Err(Error::BadWindow { .. })));
    }

    #[test]
    fn moving_average_long_window_stays_in_bounds() {
        let values: Vec<f64> = (0..500).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let s = ts(&values);
        let out = moving_average(&s, 129).unwrap();
        assert_eq!(out.len(), s.len());
        let (lo, hi) = (0.0, 10.0);
        assert!(out.values().iter().all(|v| (lo..=hi).contains(v)));
    }

    #[test]
    fn trend_labels() {
        let t = |s: &str| classify_trend(&s.parse().unwrap());
        assert_eq!(t("1-2-3-4"), Trend::Upward);
        assert_eq!(t("4-3-2-1"), Trend::Downward);
        // up, down, up and ends higher
        assert_eq!(t("2-4-1-3"), Trend::Upward);
        // down, up, down and ends lower
        assert_eq!(t("3-1-4-2"), Trend::Downward);
        // down, up, down but ends higher
        assert_eq!(t("2-1-4-3"), Trend::Mixed);
        assert_eq!(t("1-3-2"), Trend::Mixed);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn moving_average_keeps_length_and_bounds(
                values in prop::collection::vec(-1e6f64..1e6, 1..120),
                half in 0usize..10,
            ) {
                let s = ts(&values);
                let window = (2 * half + 1).min(if s.len() % 2 == 1 { s.len() } else { s.len() - 1 });
                let out = moving_average(&s, window).unwrap();
                prop_assert_eq!(out.len(), s.len());
                let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(out.values().iter().all(|&v| v >= min && v <= max));
                if window == 1 {
                    prop_assert_eq!(out.values(), s.values());
                }
            }
        }
    }
}
