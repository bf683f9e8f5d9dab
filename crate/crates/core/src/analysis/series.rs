use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::AnalysisError;
use crate::lexicon::{Group, SensitiveAttribute};
use crate::scoring::{group_key, SosResult};

const MAGIC: &str = "# sosbias series table v1";
const MISSING: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSource {
    Computed,
    Ingested,
    Bundled,
}

impl SeriesSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesSource::Computed => "computed",
            SeriesSource::Ingested => "ingested",
            SeriesSource::Bundled => "bundled",
        }
    }
}

impl fmt::Display for SeriesSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "computed" => Ok(SeriesSource::Computed),
            "ingested" => Ok(SeriesSource::Ingested),
            "bundled" => Ok(SeriesSource::Bundled),
            other => Err(format!("unknown series source {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    /// Analyses select series by group, e.g. `sos_m` or `online_hate`.
    pub group: String,
    pub source: SeriesSource,
    /// One slot per table label; `None` is missing.
    pub values: Vec<Option<f64>>,
}

/// Named series sharing one label axis (attributes, models, datasets...).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesTable {
    pub labels: Vec<String>,
    pub series: Vec<Series>,
}

/// Which SOS counts become series values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SosSlice {
    All,
    Group(Group),
}

impl SosSlice {
    pub fn group_name(self) -> &'static str {
        match self {
            SosSlice::All => "sos",
            SosSlice::Group(Group::Marginalized) => "sos_m",
            SosSlice::Group(Group::NonMarginalized) => "sos_n",
        }
    }
}

impl FromStr for SosSlice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(SosSlice::All),
            "m" | "marginalized" => Ok(SosSlice::Group(Group::Marginalized)),
            "n" | "non_marginalized" => Ok(SosSlice::Group(Group::NonMarginalized)),
            other => Err(format!(
                "unknown SOS slice {other:?} (all, marginalized, non_marginalized)"
            )),
        }
    }
}

fn format_value(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |x| format!("{x:?}"))
}

impl SeriesTable {
    pub fn new(labels: Vec<String>) -> Self {
        Self {
            labels,
            series: Vec::new(),
        }
    }

    pub fn push(&mut self, series: Series) -> Result<(), AnalysisError> {
        if series.values.len() != self.labels.len() {
            return Err(AnalysisError::Invariant(format!(
                "series {} has {} values for {} labels",
                series.name,
                series.values.len(),
                self.labels.len()
            )));
        }
        if series.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFinite);
        }
        if self
            .series
            .iter()
            .any(|s| s.name == series.name && s.group == series.group)
        {
            return Err(AnalysisError::Invariant(format!(
                "duplicate series {}/{}",
                series.group, series.name
            )));
        }
        self.series.push(series);
        Ok(())
    }

    pub fn group(&self, group: &str) -> Vec<&Series> {
        self.series.iter().filter(|s| s.group == group).collect()
    }

    /// Combines two tables over the union of their labels; labels a table
    /// lacks become missing values.
    pub fn merge(&self, other: &SeriesTable) -> Result<SeriesTable, AnalysisError> {
        let mut labels = self.labels.clone();
        for l in &other.labels {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
        let mut out = SeriesTable::new(labels.clone());
        for (table, series) in [(self, &self.series), (other, &other.series)] {
            for s in series {
                let values = labels
                    .iter()
                    .map(|l| table.labels.iter().position(|x| x == l).and_then(|i| s.values[i]))
                    .collect();
                out.push(Series { values, ..s.clone() })?;
            }
        }
        Ok(out)
    }

    /// One series per result over the six attributes, valued by the SOS
    /// fraction of the chosen slice.
    pub fn from_sos_results(results: &[SosResult], slice: SosSlice) -> Result<SeriesTable, AnalysisError> {
        let labels: Vec<String> = SensitiveAttribute::ALL.iter().map(|a| a.as_str().to_string()).collect();
        let mut table = SeriesTable::new(labels);
        for r in results {
            let values = SensitiveAttribute::ALL
                .iter()
                .map(|a| {
                    let counts = match slice {
                        SosSlice::All => r.per_attribute.get(a.as_str()),
                        SosSlice::Group(g) => r.per_group.get(&group_key(a.as_str(), g.as_str())),
                    };
                    counts.filter(|c| c.n() > 0).map(|c| c.fraction())
                })
                .collect();
            table.push(Series {
                name: r.backend.clone(),
                group: slice.group_name().to_string(),
                source: SeriesSource::Computed,
                values,
            })?;
        }
        Ok(table)
    }

    /// Header line `name, group, source, labels...`, then one row per
    /// series. `NA` marks a missing value; `#` starts a comment line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\nname\tgroup\tsource");
        for l in &self.labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for s in &self.series {
            let _ = write!(out, "{}\t{}\t{}", s.name, s.group, s.source);
            for v in &s.values {
                out.push('\t');
                out.push_str(&format_value(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<SeriesTable, AnalysisError> {
        let mut table: Option<SeriesTable> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.starts_with('#') || raw.trim().is_empty() {
                continue;
            }
            let fail = |message: String| AnalysisError::Format { line, message };
            let fields: Vec<&str> = raw.split('\t').collect();
            let Some(t) = table.as_mut() else {
                if fields.len() < 4 || fields[..3] != ["name", "group", "source"] {
                    return Err(fail("header must be name, group, source, then labels".into()));
                }
                let labels: Vec<String> = fields[3..].iter().map(|s| s.to_string()).collect();
                if labels
                    .iter()
                    .enumerate()
                    .any(|(k, l)| l.is_empty() || labels[..k].contains(l))
                {
                    return Err(fail("labels must be non-empty and distinct".into()));
                }
                table = Some(SeriesTable::new(labels));
                continue;
            };
            if fields.len() != t.labels.len() + 3 {
                return Err(fail(format!(
                    "expected {} fields, found {}",
                    t.labels.len() + 3,
                    fields.len()
                )));
            }
            let values = fields[3..]
                .iter()
                .map(|f| match *f {
                    MISSING | "" => Ok(None),
                    v => v
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .map(Some)
                        .ok_or_else(|| fail(format!("bad value {v:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            t.push(Series {
                name: fields[0].to_string(),
                group: fields[1].to_string(),
                source: fields[2].parse().map_err(fail)?,
                values,
            })
            .map_err(|e| fail(e.to_string()))?;
        }
        table.ok_or(AnalysisError::Format {
            line: text.lines().count(),
            message: "missing header line".into(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SeriesTable, AnalysisError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AnalysisError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SeriesTable::parse(&text)
    }
}

/// Values of `x` and `y` at labels where both are present.
pub fn aligned(x: &Series, y: &Series) -> (Vec<f64>, Vec<f64>) {
    x.values
        .iter()
        .zip(&y.values)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
# social bias scores
name\tgroup\tsource\trace\tgender\treligion
bert\tcrows\tingested\t0.58\t0.55\t0.71
roberta\tcrows\tingested\t0.62\tNA\t0.69
";

    #[test]
    fn parse_and_round_trip() {
        let t = SeriesTable::parse(FIXTURE).unwrap();
        assert_eq!(t.labels, vec!["race", "gender", "religion"]);
        assert_eq!(t.series[1].values, vec![Some(0.62), None, Some(0.69)]);
        assert_eq!(SeriesTable::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn parse_errors() {
        assert!(SeriesTable::parse("").is_err());
        assert!(SeriesTable::parse("name\tgroup\tsource\ta\na\tb\tcomputed\n").is_err());
        assert!(SeriesTable::parse("name\tgroup\tsource\ta\tb\nx\tg\tother\t1\t2\n").is_err());
        assert!(SeriesTable::parse("name\tgroup\tsource\ta\ta\n").is_err());
        assert!(SeriesTable::parse("name\tgroup\tsource\ta\tb\nx\tg\tcomputed\t1\tinf\n").is_err());
        let dup = "name\tgroup\tsource\ta\tb\nx\tg\tcomputed\t1\t2\nx\tg\tcomputed\t1\t2\n";
        assert!(SeriesTable::parse(dup).is_err());
    }

    #[test]
    fn merge_aligns_by_label() {
        let a = SeriesTable::parse(FIXTURE).unwrap();
        let b = SeriesTable::parse("name\tgroup\tsource\tgender\tdisability\nx\th\tbundled\t0.3\t0.4\n").unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.labels, vec!["race", "gender", "religion", "disability"]);
        assert_eq!(m.series[2].values, vec![None, Some(0.3), None, Some(0.4)]);
        assert_eq!(m.series[0].values[3], None);
        let (x, y) = aligned(&m.series[0], &m.series[1]);
        assert_eq!(x, vec![0.58, 0.71]);
        assert_eq!(y, vec![0.62, 0.69]);
    }
}
