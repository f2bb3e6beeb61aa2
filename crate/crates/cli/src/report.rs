//! Report rendering. CSV and JSON lines carry the same columns; pretty output
//! is for reading in a terminal.

use std::collections::BTreeMap;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use oppminer::{classify_trend, Dataset, FeatureMatrix, Pattern, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    JsonLines,
    Pretty,
}

#[derive(Debug, Serialize)]
pub struct PatternRow {
    pattern: String,
    length: usize,
    support: usize,
    trend: &'static str,
}

#[derive(Debug, Serialize)]
pub struct MatchRow {
    pattern: String,
    support: usize,
    starts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct FeatureRow {
    series: String,
    label: Option<String>,
    supports: BTreeMap<String, usize>,
}

#[derive(Debug, Serialize)]
pub struct ClusterRow {
    pub representation: &'static str,
    pub dimensionality: usize,
    pub nmi: f64,
    pub homogeneity: f64,
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    #[serde(serialize_with = "as_display")]
    pub variant: Variant,
    pub length: usize,
    pub minsup: usize,
    pub frequent: usize,
    pub candidates: usize,
    pub longest: usize,
    pub elapsed_ms: f64,
}

fn as_display<S: serde::Serializer>(v: &Variant, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.as_str())
}

#[derive(Debug)]
pub struct PatternSummary {
    minsup: usize,
    candidates: usize,
    elapsed_ms: f64,
    compression: Option<(usize, usize)>,
}

#[derive(Debug)]
pub enum Report {
    Patterns(Vec<PatternRow>, PatternSummary),
    Match(MatchRow),
    Features(Vec<FeatureRow>, FeatureMatrix),
    Cluster(Vec<ClusterRow>),
    Bench(Vec<BenchRow>),
}

impl Report {
    pub fn patterns(found: &BTreeMap<Pattern, usize>, minsup: usize, candidates: usize, elapsed_ms: f64) -> Report {
        let rows = found
            .iter()
            .map(|(p, &support)| PatternRow {
                pattern: p.to_string(),
                length: p.len(),
                support,
                trend: classify_trend(p).as_str(),
            })
            .collect();
        Report::Patterns(rows, PatternSummary { minsup, candidates, elapsed_ms, compression: None })
    }

    pub fn with_compression(mut self, removed: usize, total: usize) -> Report {
        if let Report::Patterns(_, summary) = &mut self {
            summary.compression = Some((removed, total));
        }
        self
    }

    pub fn matches(p: &Pattern, starts: &[usize]) -> Report {
        Report::Match(MatchRow { pattern: p.to_string(), support: starts.len(), starts: starts.to_vec() })
    }

    pub fn features(ds: &Dataset, fm: FeatureMatrix) -> Report {
        let rows = ds
            .series
            .iter()
            .zip(&fm.rows)
            .enumerate()
            .map(|(i, (s, row))| FeatureRow {
                series: s.name().to_string(),
                label: fm.labels.as_ref().map(|l| l[i].clone()),
                supports: fm.vocabulary.iter().map(Pattern::to_string).zip(row.iter().copied()).collect(),
            })
            .collect();
        Report::Features(rows, fm)
    }

    pub fn write<W: Write>(&self, format: Format, out: &mut W) -> anyhow::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::JsonLines => self.write_json_lines(out),
            Format::Pretty => self.write_pretty(out),
        }
    }

    fn write_csv<W: Write>(&self, out: &mut W) -> anyhow::Result<()> {
        match self {
            Report::Patterns(rows, _) => {
                writeln!(out, "pattern,length,support,trend")?;
                for r in rows {
                    writeln!(out, "{},{},{},{}", r.pattern, r.length, r.support, r.trend)?;
                }
            }
            Report::Match(r) => {
                writeln!(out, "pattern,support,starts")?;
                let starts: Vec<String> = r.starts.iter().map(usize::to_string).collect();
                writeln!(out, "{},{},{}", r.pattern, r.support, starts.join(" "))?;
            }
            Report::Features(_, fm) => fm.write_csv(out)?,
            Report::Cluster(rows) => {
                writeln!(out, "representation,dimensionality,nmi,homogeneity")?;
                for r in rows {
                    writeln!(out, "{},{},{},{}", r.representation, r.dimensionality, r.nmi, r.homogeneity)?;
                }
            }
            Report::Bench(rows) => {
                writeln!(out, "variant,length,minsup,frequent,candidates,longest,elapsed_ms")?;
                for r in rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{:.3}",
                        r.variant, r.length, r.minsup, r.frequent, r.candidates, r.longest, r.elapsed_ms
                    )?;
                }
            }
        }
        Ok(())
    }

    fn write_json_lines<W: Write>(&self, out: &mut W) -> anyhow::Result<()> {
        fn lines<W: Write, T: Serialize>(out: &mut W, rows: &[T]) -> anyhow::Result<()> {
            for r in rows {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
            Ok(())
        }
        match self {
            Report::Patterns(rows, _) => lines(out, rows),
            Report::Match(r) => lines(out, std::slice::from_ref(r)),
            Report::Features(rows, _) => lines(out, rows),
            Report::Cluster(rows) => lines(out, rows),
            Report::Bench(rows) => lines(out, rows),
        }
    }

    fn write_pretty<W: Write>(&self, out: &mut W) -> anyhow::Result<()> {
        match self {
            Report::Patterns(rows, s) => {
                let width = rows.iter().map(|r| r.pattern.len()).max().unwrap_or(7).max(7);
                writeln!(out, "{:<width$}  {:>7}  trend", "pattern", "support")?;
                for r in rows {
                    writeln!(out, "{:<width$}  {:>7}  {}", r.pattern, r.support, r.trend)?;
                }
                writeln!(out)?;
                writeln!(out, "patterns:   {}", rows.len())?;
                writeln!(out, "minsup:     {}", s.minsup)?;
                writeln!(out, "candidates: {}", s.candidates)?;
                if let Some((removed, total)) = s.compression {
                    let pct = if total == 0 { 0.0 } else { 100.0 * removed as f64 / total as f64 };
                    writeln!(out, "frequent:   {total}")?;
                    writeln!(out, "compression: {removed}/{total} ({pct:.1}%)")?;
                }
                writeln!(out, "elapsed:    {:.3} ms", s.elapsed_ms)?;
            }
            Report::Match(r) => {
                writeln!(out, "pattern {}: support {}", r.pattern, r.support)?;
                let starts: Vec<String> = r.starts.iter().map(usize::to_string).collect();
                writeln!(out, "starts: {}", starts.join(", "))?;
            }
            Report::Features(rows, fm) => {
                writeln!(
                    out,
                    "vocabulary ({}): {}",
                    fm.dimensionality(),
                    fm.vocabulary.iter().map(Pattern::to_string).collect::<Vec<_>>().join(" ")
                )?;
                for (r, row) in rows.iter().zip(&fm.rows) {
                    let values: Vec<String> = row.iter().map(usize::to_string).collect();
                    writeln!(out, "{} [{}] {}", r.series, r.label.as_deref().unwrap_or("-"), values.join(" "))?;
                }
            }
            Report::Cluster(rows) => {
                for r in rows {
                    writeln!(
                        out,
                        "{:<6} dim={:<6} nmi={:.4} homogeneity={:.4}",
                        r.representation, r.dimensionality, r.nmi, r.homogeneity
                    )?;
                }
            }
            Report::Bench(rows) => {
                writeln!(
                    out,
                    "{:<16} {:>8} {:>7} {:>9} {:>11} {:>8} {:>12}",
                    "variant", "length", "minsup", "frequent", "candidates", "longest", "elapsed_ms"
                )?;
                for r in rows {
                    writeln!(
                        out,
                        "{:<16} {:>8} {:>7} {:>9} {:>11} {:>8} {:>12.3}",
                        r.variant.as_str(),
                        r.length,
                        r.minsup,
                        r.frequent,
                        r.candidates,
                        r.longest,
                        r.elapsed_ms
                    )?;
                }
            }
        }
        Ok(())
    }
}
