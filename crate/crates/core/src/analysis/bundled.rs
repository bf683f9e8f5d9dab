use super::series::{Series, SeriesSource, SeriesTable};
use super::AnalysisError;

const STATS: &str = include_str!("../../data/online_hate_stats.tsv");
const ALIGNMENT: &str = include_str!("../../data/online_hate_alignment.tsv");

/// Group columns of the bundled survey table, in file order.
pub const SURVEY_GROUPS: [&str; 3] = ["ethnicity", "lgbtq", "women"];

#[derive(Debug, Clone, PartialEq)]
pub struct CountryStats {
    pub country: String,
    pub sample_size: u32,
    /// Share per survey group, in [`SURVEY_GROUPS`] order.
    pub shares: [f64; 3],
}

/// Survey shares of marginalized people reporting exposure to online hate,
/// plus the mapping from survey groups to sensitive attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct BundledStats {
    pub countries: Vec<CountryStats>,
    /// `(survey group, attribute)`.
    pub alignment: Vec<(String, String)>,
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split('\t').collect()))
}

impl BundledStats {
    pub fn reference() -> BundledStats {
        let stats = BundledStats::parse(STATS, ALIGNMENT).expect("shipped online-hate tables are valid");
        assert_eq!(stats.countries.len(), 4);
        stats
    }

    pub fn parse(stats: &str, alignment: &str) -> Result<BundledStats, AnalysisError> {
        let mut countries = Vec::new();
        let mut header_seen = false;
        for (line, f) in rows(stats) {
            let fail = |message: String| AnalysisError::Format { line, message };
            if !header_seen {
                let mut expected = vec!["country", "sample_size"];
                expected.extend(SURVEY_GROUPS);
                if f != expected {
                    return Err(fail(format!("header must be {}", expected.join(", "))));
                }
                header_seen = true;
                continue;
            }
            if f.len() != 5 {
                return Err(fail(format!("expected 5 fields, found {}", f.len())));
            }
            let sample_size = f[1].parse().map_err(|_| fail(format!("bad sample size {:?}", f[1])))?;
            let mut shares = [0.0; 3];
            for (s, v) in shares.iter_mut().zip(&f[2..]) {
                *s = v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| (0.0..=1.0).contains(x))
                    .ok_or_else(|| fail(format!("share {v:?} is not in [0, 1]")))?;
            }
            if countries.iter().any(|c: &CountryStats| c.country == f[0]) {
                return Err(fail(format!("duplicate country {:?}", f[0])));
            }
            countries.push(CountryStats {
                country: f[0].to_string(),
                sample_size,
                shares,
            });
        }
        if countries.is_empty() {
            return Err(AnalysisError::Format {
                line: 0,
                message: "no countries".into(),
            });
        }
        let mut mapping = Vec::new();
        for (line, f) in rows(alignment) {
            if f.len() != 2 || !SURVEY_GROUPS.contains(&f[0]) {
                return Err(AnalysisError::Format {
                    line,
                    message: "alignment rows are survey_group<TAB>attribute".into(),
                });
            }
            mapping.push((f[0].to_string(), f[1].to_string()));
        }
        Ok(BundledStats {
            countries,
            alignment: mapping,
        })
    }

    /// One series per country over the aligned attributes, group
    /// `online_hate`.
    pub fn to_series(&self) -> SeriesTable {
        let labels = self.alignment.iter().map(|(_, a)| a.clone()).collect();
        let mut table = SeriesTable::new(labels);
        for c in &self.countries {
            let values = self
                .alignment
                .iter()
                .map(|(g, _)| {
                    let k = SURVEY_GROUPS
                        .iter()
                        .position(|s| s == g)
                        .expect("validated survey group");
                    Some(c.shares[k])
                })
                .collect();
            table
                .push(Series {
                    name: c.country.clone(),
                    group: "online_hate".into(),
                    source: SeriesSource::Bundled,
                    values,
                })
                .expect("countries are distinct");
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_table_shape() {
        let s = BundledStats::reference();
        let names: Vec<&str> = s.countries.iter().map(|c| c.country.as_str()).collect();
        assert_eq!(names, vec!["finland", "us", "germany", "uk"]);
        assert_eq!(s.countries[0].shares, [0.67, 0.63, 0.25]);
        assert_eq!(s.countries[1].sample_size, 1033);
        assert_eq!(s.alignment.len(), 3);
    }

    #[test]
    fn series_follow_alignment() {
        let t = BundledStats::reference().to_series();
        assert_eq!(t.labels, vec!["race", "sexual_orientation", "gender"]);
        assert_eq!(t.series[3].name, "uk");
        assert_eq!(t.series[3].values, vec![Some(0.57), Some(0.55), Some(0.44)]);
    }

    #[test]
    fn rejects_out_of_range_share() {
        let stats = "country\tsample_size\tethnicity\tlgbtq\twomen\nx\t10\t1.2\t0.1\t0.1\n";
        assert!(BundledStats::parse(stats, ALIGNMENT).is_err());
        assert!(BundledStats::parse("country\tn\n", ALIGNMENT).is_err());
        let ok = "country\tsample_size\tethnicity\tlgbtq\twomen\nx\t10\t0.2\t0.1\t0.1\n";
        assert!(BundledStats::parse(ok, "race\tethnicity\n").is_err());
    }
}
