use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use num_rational::Ratio;

use super::FairnessError;

/// Exact rates, AUCs and gaps.
pub type Rational = Ratio<i128>;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

const PAIRINGS: &str = include_str!("../../data/fairness_pairings.tsv");

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub id: String,
    /// Offensive is the positive class.
    pub true_label: bool,
    pub score: f64,
    /// `(attribute, group)` memberships such as `("religion", "muslim")`.
    pub subgroups: Vec<(String, String)>,
}

impl PredictionRecord {
    pub fn predicted(&self, threshold: f64) -> bool {
        self.score >= threshold
    }

    pub fn in_group(&self, attribute: &str, group: &str) -> bool {
        self.subgroups.iter().any(|(a, g)| a == attribute && g == group)
    }
}

/// Reads `id, true_label, score, subgroups` rows, tab separated, with a
/// header line. Subgroups are `attribute:group` tokens joined by `;`, or empty.
pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRecord>, FairnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .quoting(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FairnessError::Format {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected = ["id", "true_label", "score", "subgroups"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(FairnessError::Format {
            line: 1,
            message: format!("header must be {}", expected.join("\\t")),
        });
    }
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| FairnessError::Format {
            line: 0,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fail = |message: String| FairnessError::Format { line, message };
        if record.len() != 3 && record.len() != 4 {
            return Err(fail(format!("expected 4 fields, found {}", record.len())));
        }
        let id = record[0].to_string();
        if id.is_empty() || !ids.insert(id.clone()) {
            return Err(fail(format!("empty or duplicate id {id:?}")));
        }
        let true_label = match &record[1] {
            "1" => true,
            "0" => false,
            other => return Err(fail(format!("true_label must be 0 or 1, found {other:?}"))),
        };
        let score: f64 = record[2]
            .parse()
            .map_err(|_| fail(format!("bad score {:?}", &record[2])))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(fail(format!("score {score} outside [0, 1]")));
        }
        let mut subgroups = Vec::new();
        for token in record.get(3).unwrap_or("").split(';').filter(|t| !t.is_empty()) {
            let (a, g) = token
                .split_once(':')
                .filter(|(a, g)| !a.is_empty() && !g.is_empty())
                .ok_or_else(|| fail(format!("subgroup {token:?} is not attribute:group")))?;
            subgroups.push((a.to_string(), g.to_string()));
        }
        out.push(PredictionRecord {
            id,
            true_label,
            score,
            subgroups,
        });
    }
    if out.is_empty() {
        return Err(FairnessError::Empty("prediction file has no records".into()));
    }
    Ok(out)
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, FairnessError> {
    parse_predictions(&read(path.as_ref())?)
}

pub fn predictions_to_text(records: &[PredictionRecord]) -> String {
    let mut out = String::from("id\ttrue_label\tscore\tsubgroups\n");
    for r in records {
        let groups: Vec<String> = r.subgroups.iter().map(|(a, g)| format!("{a}:{g}")).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{:?}\t{}",
            r.id,
            u8::from(r.true_label),
            r.score,
            groups.join(";")
        );
    }
    out
}

fn read(path: &Path) -> Result<String, FairnessError> {
    std::fs::read_to_string(path).map_err(|source| FairnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a PredictionRecord>, threshold: f64) -> Self {
        let mut c = Self::default();
        for r in records {
            match (r.true_label, r.predicted(threshold)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    /// `FP / (FP + TN)`; `None` without negatives.
    pub fn fpr(&self) -> Option<Rational> {
        let d = self.fp + self.tn;
        (d > 0).then(|| Rational::new(self.fp as i128, d as i128))
    }

    /// `TP / (TP + FN)`; `None` without positives.
    pub fn tpr(&self) -> Option<Rational> {
        let d = self.tp + self.fn_;
        (d > 0).then(|| Rational::new(self.tp as i128, d as i128))
    }
}

/// `(FPR, TPR)` at `threshold`.
pub fn rates<'a>(
    records: impl IntoIterator<Item = &'a PredictionRecord>,
    threshold: f64,
) -> Result<(Rational, Rational), FairnessError> {
    let c = ConfusionCounts::from_records(records, threshold);
    let fpr = c
        .fpr()
        .ok_or_else(|| FairnessError::Undefined("FPR: subgroup has no negatives".into()))?;
    let tpr = c
        .tpr()
        .ok_or_else(|| FairnessError::Undefined("TPR: subgroup has no positives".into()))?;
    Ok((fpr, tpr))
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn auc<'a>(records: impl IntoIterator<Item = &'a PredictionRecord>) -> Result<Rational, FairnessError> {
    let mut scored: Vec<(f64, bool)> = records.into_iter().map(|r| (r.score, r.true_label)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let positives = scored.iter().filter(|(_, y)| *y).count() as i128;
    let negatives = scored.len() as i128 - positives;
    if positives == 0 || negatives == 0 {
        return Err(FairnessError::Undefined("AUC: subgroup has a single class".into()));
    }
    // Twice the number of (positive, negative) wins plus ties.
    let mut doubled: i128 = 0;
    let mut negatives_below: i128 = 0;
    let mut i = 0;
    while i < scored.len() {
        let mut j = i;
        while j < scored.len() && scored[j].0 == scored[i].0 {
            j += 1;
        }
        let pos = scored[i..j].iter().filter(|(_, y)| *y).count() as i128;
        let neg = (j - i) as i128 - pos;
        doubled += pos * (2 * negatives_below + neg);
        negatives_below += neg;
        i = j;
    }
    Ok(Rational::new(doubled, 2 * positives * negatives))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub attribute: String,
    pub marginalized: Vec<String>,
    pub non_marginalized: Vec<String>,
}

/// Which marginalized identities are compared against which
/// non-marginalized ones, per attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingTable {
    pub pairings: Vec<Pairing>,
}

impl Default for PairingTable {
    fn default() -> Self {
        PairingTable::parse(PAIRINGS).expect("shipped pairing table is valid")
    }
}

impl PairingTable {
    /// `attribute<TAB>g1,g2<TAB>h1,h2` rows; `#` starts a comment.
    pub fn parse(text: &str) -> Result<PairingTable, FairnessError> {
        let mut pairings = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.starts_with('#') || raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            let fail = |message: String| FairnessError::Format { line, message };
            if fields.len() != 3 {
                return Err(fail(format!("expected 3 fields, found {}", fields.len())));
            }
            let names = |s: &str| -> Vec<String> {
                s.split(',')
                    .map(str::trim)
                    .filter(|g| !g.is_empty())
                    .map(str::to_string)
                    .collect()
            };
            let (m, n) = (names(fields[1]), names(fields[2]));
            if m.is_empty() || n.is_empty() {
                return Err(fail("both group lists must be non-empty".into()));
            }
            if m.iter().any(|g| n.contains(g)) {
                return Err(fail("a group cannot be on both sides".into()));
            }
            let attribute = fields[0].trim().to_string();
            if !seen.insert(attribute.clone()) {
                return Err(fail(format!("attribute {attribute:?} listed twice")));
            }
            pairings.push(Pairing {
                attribute,
                marginalized: m,
                non_marginalized: n,
            });
        }
        if pairings.is_empty() {
            return Err(FairnessError::Empty("pairing table has no rows".into()));
        }
        Ok(PairingTable { pairings })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PairingTable, FairnessError> {
        PairingTable::parse(&read(path.as_ref())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRow {
    pub attribute: String,
    /// Pooled group names joined by `+`.
    pub marginalized: String,
    pub non_marginalized: String,
    pub fpr_gap: Rational,
    pub tpr_gap: Rational,
    pub auc_gap: Rational,
    pub n_marginalized: usize,
    pub n_non_marginalized: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub model: String,
    pub threshold: f64,
    pub rows: Vec<GapRow>,
    /// Pairings left out of `rows`, with the reason.
    pub diagnostics: Vec<String>,
    pub provenance: BTreeMap<String, String>,
}

struct GroupStats {
    n: usize,
    fpr: Rational,
    tpr: Rational,
    auc: Rational,
}

fn group_stats(
    records: &[PredictionRecord],
    attribute: &str,
    groups: &[String],
    threshold: f64,
) -> Result<GroupStats, String> {
    let members: Vec<&PredictionRecord> = records
        .iter()
        .filter(|r| groups.iter().any(|g| r.in_group(attribute, g)))
        .collect();
    let name = groups.join("+");
    if members.is_empty() {
        return Err(format!("{attribute}/{name}: no records"));
    }
    let (fpr, tpr) = rates(members.iter().copied(), threshold).map_err(|e| format!("{attribute}/{name}: {e}"))?;
    let auc = auc(members.iter().copied()).map_err(|e| format!("{attribute}/{name}: {e}"))?;
    Ok(GroupStats {
        n: members.len(),
        fpr,
        tpr,
        auc,
    })
}

fn abs_diff(a: Rational, b: Rational) -> Rational {
    if a > b {
        a - b
    } else {
        b - a
    }
}

/// Absolute FPR, TPR and AUC differences for each pairing. Marginalized
/// identities are pooled into one group unless `per_identity` is set, which
/// instead compares each marginalized identity on its own. Pairings with an
/// empty or single-class side are skipped and reported in `diagnostics`.
pub fn gap_report(
    records: &[PredictionRecord],
    pairings: &PairingTable,
    threshold: f64,
    per_identity: bool,
    model: &str,
) -> Result<GapReport, FairnessError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(FairnessError::InvalidThreshold(threshold));
    }
    if records.is_empty() {
        return Err(FairnessError::Empty("no prediction records".into()));
    }
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for p in &pairings.pairings {
        let sides: Vec<Vec<String>> = if per_identity {
            p.marginalized.iter().map(|g| vec![g.clone()]).collect()
        } else {
            vec![p.marginalized.clone()]
        };
        let reference = group_stats(records, &p.attribute, &p.non_marginalized, threshold);
        for side in sides {
            let marginal = group_stats(records, &p.attribute, &side, threshold);
            match (marginal, &reference) {
                (Ok(g), Ok(h)) => rows.push(GapRow {
                    attribute: p.attribute.clone(),
                    marginalized: side.join("+"),
                    non_marginalized: p.non_marginalized.join("+"),
                    fpr_gap: abs_diff(g.fpr, h.fpr),
                    tpr_gap: abs_diff(g.tpr, h.tpr),
                    auc_gap: abs_diff(g.auc, h.auc),
                    n_marginalized: g.n,
                    n_non_marginalized: h.n,
                }),
                (g, h) => {
                    for e in [g.err(), h.as_ref().err().cloned()].into_iter().flatten() {
                        diagnostics.push(format!("excluded {}: {e}", p.attribute));
                    }
                }
            }
        }
    }
    Ok(GapReport {
        model: model.to_string(),
        threshold,
        rows,
        diagnostics,
        provenance: BTreeMap::new(),
    })
}

pub const GAP_COLUMNS: [&str; 10] = [
    "attribute",
    "model",
    "marginalized",
    "non_marginalized",
    "fpr_gap",
    "tpr_gap",
    "auc_gap",
    "n_marginalized",
    "n_non_marginalized",
    "exact",
];

impl GapReport {
    pub fn row(&self, attribute: &str) -> Option<&GapRow> {
        self.rows.iter().find(|r| r.attribute == attribute)
    }

    /// Tab-separated rows, one per attribute and model, with the exact
    /// rational gaps in the last column as `fpr;tpr;auc`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# sosbias gap report v1\n");
        let _ = writeln!(out, "# threshold\t{:?}", self.threshold);
        let _ = writeln!(out, "# model\t{}", self.model);
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}\t{v}");
        }
        for d in &self.diagnostics {
            let _ = writeln!(out, "# diagnostic\t{d}");
        }
        out.push_str(&GAP_COLUMNS.join("\t"));
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{};{};{}",
                r.attribute,
                self.model,
                r.marginalized,
                r.non_marginalized,
                rational_to_f64(&r.fpr_gap),
                rational_to_f64(&r.tpr_gap),
                rational_to_f64(&r.auc_gap),
                r.n_marginalized,
                r.n_non_marginalized,
                r.fpr_gap,
                r.tpr_gap,
                r.auc_gap
            );
        }
        out
    }

    /// Reads the output of [`GapReport::to_text`]; gaps come from the exact
    /// column.
    pub fn parse(text: &str) -> Result<GapReport, FairnessError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        if lines.next().map(|(_, l)| l) != Some("# sosbias gap report v1") {
            return Err(FairnessError::Format {
                line: 1,
                message: "missing gap report header".into(),
            });
        }
        let mut report = GapReport {
            model: String::new(),
            threshold: f64::NAN,
            rows: Vec::new(),
            diagnostics: Vec::new(),
            provenance: BTreeMap::new(),
        };
        let mut header_seen = false;
        for (line, raw) in lines {
            let fail = |message: String| FairnessError::Format { line, message };
            if let Some(meta) = raw.strip_prefix("# ") {
                let (k, v) = meta.split_once('\t').ok_or_else(|| fail("bad comment line".into()))?;
                match k {
                    "threshold" => report.threshold = v.parse().map_err(|_| fail(format!("bad threshold {v:?}")))?,
                    "model" => report.model = v.to_string(),
                    "diagnostic" => report.diagnostics.push(v.to_string()),
                    _ => {
                        report.provenance.insert(k.to_string(), v.to_string());
                    }
                }
                continue;
            }
            let f: Vec<&str> = raw.split('\t').collect();
            if !header_seen {
                if f != GAP_COLUMNS {
                    return Err(fail("unexpected column header".into()));
                }
                header_seen = true;
                continue;
            }
            if f.len() != GAP_COLUMNS.len() {
                return Err(fail(format!(
                    "expected {} fields, found {}",
                    GAP_COLUMNS.len(),
                    f.len()
                )));
            }
            let exact: Vec<Rational> = f[9]
                .split(';')
                .map(|x| x.parse::<Rational>().map_err(|_| fail(format!("bad rational {x:?}"))))
                .collect::<Result<_, _>>()?;
            if exact.len() != 3 {
                return Err(fail("exact column must hold three gaps".into()));
            }
            let count = |x: &str| x.parse::<usize>().map_err(|_| fail(format!("bad count {x:?}")));
            report.rows.push(GapRow {
                attribute: f[0].to_string(),
                marginalized: f[2].to_string(),
                non_marginalized: f[3].to_string(),
                fpr_gap: exact[0],
                tpr_gap: exact[1],
                auc_gap: exact[2],
                n_marginalized: count(f[7])?,
                n_non_marginalized: count(f[8])?,
            });
        }
        if !header_seen || !(0.0..=1.0).contains(&report.threshold) {
            return Err(FairnessError::Format {
                line: text.lines().count(),
                message: "gap report lacks its column header or threshold".into(),
            });
        }
        Ok(report)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GapReport, FairnessError> {
        GapReport::parse(&read(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FairnessError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| FairnessError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: usize, label: bool, score: f64, groups: &[(&str, &str)]) -> PredictionRecord {
        PredictionRecord {
            id: id.to_string(),
            true_label: label,
            score,
            subgroups: groups.iter().map(|(a, g)| (a.to_string(), g.to_string())).collect(),
        }
    }

    /// Builds records with the given confusion counts at threshold 0.5.
    fn with_counts(
        tp: usize,
        fp: usize,
        tn: usize,
        fn_: usize,
        group: (&str, &str),
        start: usize,
    ) -> Vec<PredictionRecord> {
        let mut out = Vec::new();
        let mut push = |label, score| out.push(rec(start + out.len(), label, score, &[group]));
        (0..tp).for_each(|_| push(true, 0.9));
        (0..fp).for_each(|_| push(false, 0.7));
        (0..tn).for_each(|_| push(false, 0.2));
        (0..fn_).for_each(|_| push(true, 0.3));
        out
    }

    #[test]
    fn rates_from_hand_counts() {
        let r = with_counts(3, 2, 8, 1, ("x", "y"), 0);
        let (fpr, tpr) = rates(&r, 0.5).unwrap();
        assert_eq!(fpr, Rational::new(1, 5));
        assert_eq!(tpr, Rational::new(3, 4));
        let perfect = with_counts(4, 0, 4, 0, ("x", "y"), 0);
        assert_eq!(
            rates(&perfect, 0.5).unwrap(),
            (Rational::from_integer(0), Rational::from_integer(1))
        );
        let no_neg = with_counts(4, 0, 0, 1, ("x", "y"), 0);
        assert!(matches!(rates(&no_neg, 0.5), Err(FairnessError::Undefined(_))));
    }

    #[test]
    fn threshold_is_inclusive() {
        let r = [rec(0, false, 0.5, &[]), rec(1, true, 0.5, &[])];
        let c = ConfusionCounts::from_records(&r, 0.5);
        assert_eq!((c.fp, c.tp), (1, 1));
    }

    #[test]
    fn auc_examples() {
        let r = [
            rec(0, true, 0.9, &[]),
            rec(1, true, 0.4, &[]),
            rec(2, false, 0.5, &[]),
            rec(3, false, 0.1, &[]),
        ];
        assert_eq!(auc(&r).unwrap(), Rational::new(3, 4));
        let ties: Vec<_> = (0..6).map(|i| rec(i, i % 2 == 0, 0.3, &[])).collect();
        assert_eq!(auc(&ties).unwrap(), Rational::new(1, 2));
        let sep = [rec(0, true, 0.8, &[]), rec(1, false, 0.2, &[]), rec(2, true, 0.6, &[])];
        assert_eq!(auc(&sep).unwrap(), Rational::from_integer(1));
        assert!(auc(&sep[..1]).is_err());
    }

    #[test]
    fn pooled_gap_from_rates_example() {
        // g = black + asian pooled: FPR 2/10, ĝ = white: FPR 1/10.
        let mut r = with_counts(3, 1, 4, 1, ("race", "black"), 0);
        r.extend(with_counts(0, 1, 4, 0, ("race", "asian"), 100));
        r.extend(with_counts(4, 1, 9, 0, ("race", "white"), 200));
        let table = PairingTable::default();
        let rep = gap_report(&r, &table, 0.5, false, "toy").unwrap();
        let row = rep.row("race").unwrap();
        assert_eq!(row.marginalized, "black+asian");
        assert_eq!(row.fpr_gap, Rational::new(1, 10));
        assert_eq!(row.tpr_gap, Rational::new(1, 4));
        assert_eq!((row.n_marginalized, row.n_non_marginalized), (14, 14));
        // Gender and religion have no records.
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.diagnostics.len(), 4);
        assert!(rep
            .to_text()
            .contains("race\ttoy\tblack+asian\twhite\t0.100000\t0.250000"));
        let back = GapReport::parse(&rep.to_text()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn identical_distributions_have_zero_gaps() {
        let mut r = with_counts(3, 2, 5, 1, ("gender", "female"), 0);
        r.extend(with_counts(3, 2, 5, 1, ("gender", "male"), 100));
        let rep = gap_report(&r, &PairingTable::default(), 0.5, false, "m").unwrap();
        let row = rep.row("gender").unwrap();
        assert_eq!(row.fpr_gap, Rational::from_integer(0));
        assert_eq!(row.tpr_gap, Rational::from_integer(0));
        assert_eq!(row.auc_gap, Rational::from_integer(0));
    }

    #[test]
    fn per_identity_mode_splits_marginalized_groups() {
        let mut r = with_counts(2, 1, 3, 1, ("race", "black"), 0);
        r.extend(with_counts(1, 1, 1, 1, ("race", "asian"), 100));
        r.extend(with_counts(1, 0, 2, 1, ("race", "white"), 200));
        let rep = gap_report(&r, &PairingTable::default(), 0.5, true, "m").unwrap();
        let names: Vec<&str> = rep.rows.iter().map(|r| r.marginalized.as_str()).collect();
        assert_eq!(names, vec!["black", "asian"]);
    }

    #[test]
    fn single_class_side_is_excluded_with_diagnostic() {
        let mut r = with_counts(2, 0, 0, 1, ("gender", "female"), 0);
        r.extend(with_counts(2, 1, 3, 1, ("gender", "male"), 100));
        let rep = gap_report(&r, &PairingTable::default(), 0.5, false, "m").unwrap();
        assert!(rep.row("gender").is_none());
        assert!(rep
            .diagnostics
            .iter()
            .any(|d| d.contains("gender/female") && d.contains("negatives")));
    }

    #[test]
    fn prediction_file_round_trip() {
        let r = vec![
            rec(0, true, 0.75, &[("race", "black"), ("gender", "female")]),
            rec(1, false, 0.1, &[]),
        ];
        let text = predictions_to_text(&r);
        assert_eq!(parse_predictions(&text).unwrap(), r);
    }

    #[test]
    fn prediction_file_errors() {
        let head = "id\ttrue_label\tscore\tsubgroups\n";
        assert!(parse_predictions(head).is_err());
        assert!(parse_predictions(&format!("{head}a\t2\t0.5\t\n")).is_err());
        assert!(parse_predictions(&format!("{head}a\t1\t1.5\t\n")).is_err());
        assert!(parse_predictions(&format!("{head}a\t1\t0.5\trace\n")).is_err());
        assert!(parse_predictions(&format!("{head}a\t1\t0.5\t\na\t0\t0.5\t\n")).is_err());
        assert!(parse_predictions("x\ty\n1\t2\n").is_err());
    }

    #[test]
    fn pairing_table_defaults_and_errors() {
        let t = PairingTable::default();
        assert_eq!(t.pairings.len(), 3);
        assert_eq!(t.pairings[1].marginalized, vec!["black", "asian"]);
        assert!(PairingTable::parse("race\tblack\n").is_err());
        assert!(PairingTable::parse("race\twhite\twhite\n").is_err());
        assert!(PairingTable::parse("# only comments\n").is_err());
    }
}
