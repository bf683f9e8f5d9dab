use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::stats::{ttest_independent, TTestVariant};
use crate::fairness::{rational_to_f64, GapReport};
use crate::lexicon::{Group, SensitiveAttribute};
use crate::scoring::SosResult;

const MAGIC: &str = "# sosbias report v1";

/// Everything a report summarizes. All slices may be empty.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReportInputs<'a> {
    pub results: &'a [SosResult],
    /// `(before, after)` debiasing pairs.
    pub debiased: &'a [(SosResult, SosResult)],
    pub gaps: &'a [GapReport],
    pub provenance: Option<&'a BTreeMap<String, String>>,
}

fn fraction(r: &SosResult, a: SensitiveAttribute, g: Option<Group>) -> Option<f64> {
    let c = match g {
        Some(g) => r.group_counts(a, g),
        None => r.attribute_counts(a),
    };
    c.filter(|c| c.n() > 0).map(|c| c.fraction())
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn ttest_rows(out: &mut String, label: &str, a: &[f64], b: &[f64]) {
    for variant in [TTestVariant::Pooled, TTestVariant::Welch] {
        match ttest_independent(a, b, variant) {
            Ok(t) => {
                let _ = writeln!(
                    out,
                    "{label}\t{variant}\t{:.6}\t{:.3}\t{:.6}\t{}\t{}\t{}",
                    t.t,
                    t.df,
                    t.p,
                    if t.significant() { "yes" } else { "no" },
                    a.len(),
                    b.len()
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "{label}\t{variant}\tundefined: {e}\t\t\t\t{}\t{}",
                    a.len(),
                    b.len()
                );
            }
        }
    }
}

const TTEST_HEADER: &str = "backend\tvariant\tt\tdf\tp\tsignificant_at_0.05\tn_a\tn_b\n";

/// Plain-text report with tab-separated sections: SOS by group, a
/// marginalized vs non-marginalized t-test, before/after debiasing with
/// t-tests, and fairness gaps.
pub fn render_report(inputs: &ReportInputs<'_>) -> String {
    let mut out = format!("{MAGIC}\n");
    if let Some(p) = inputs.provenance {
        for (k, v) in p {
            let _ = writeln!(out, "# {k}\t{v}");
        }
    }

    out.push_str("\n[sos_by_group]\nbackend\tattribute\tmarginalized\tnon_marginalized\tall\tn\tbiased\n");
    for r in inputs.results {
        for a in SensitiveAttribute::ALL {
            let Some(all) = r.attribute_counts(a).filter(|c| c.n() > 0) else {
                continue;
            };
            let _ = writeln!(
                out,
                "{}\t{a}\t{}\t{}\t{}\t{}\t{}",
                r.backend,
                cell(fraction(r, a, Some(Group::Marginalized))),
                cell(fraction(r, a, Some(Group::NonMarginalized))),
                cell(Some(all.fraction())),
                all.n(),
                if all.is_biased() { "yes" } else { "no" }
            );
        }
    }

    out.push_str("\n[marginalized_vs_non_marginalized]\n");
    out.push_str(TTEST_HEADER);
    for r in inputs.results {
        let (m, n): (Vec<f64>, Vec<f64>) = SensitiveAttribute::ALL
            .iter()
            .filter_map(|a| {
                Some((
                    fraction(r, *a, Some(Group::Marginalized))?,
                    fraction(r, *a, Some(Group::NonMarginalized))?,
                ))
            })
            .unzip();
        ttest_rows(&mut out, &r.backend, &m, &n);
    }

    out.push_str("\n[debias_before_after]\nbackend\tattribute\tbefore\tafter\tdelta\n");
    let mut samples = Vec::new();
    for (before, after) in inputs.debiased {
        let (mut b, mut a) = (Vec::new(), Vec::new());
        for attr in SensitiveAttribute::ALL {
            let (Some(x), Some(y)) = (fraction(before, attr, None), fraction(after, attr, None)) else {
                continue;
            };
            let _ = writeln!(out, "{}\t{attr}\t{x:.4}\t{y:.4}\t{:+.4}", before.backend, y - x);
            b.push(x);
            a.push(y);
        }
        samples.push((before.backend.clone(), b, a));
    }
    out.push_str(&format!("\n[debias_ttest]\n{TTEST_HEADER}"));
    for (name, b, a) in &samples {
        ttest_rows(&mut out, name, b, a);
    }

    out.push_str(
        "\n[fairness_gaps]\nattribute\tmodel\tmarginalized\tnon_marginalized\tfpr_gap\ttpr_gap\tauc_gap\tthreshold\n",
    );
    for g in inputs.gaps {
        for r in &g.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{}",
                r.attribute,
                g.model,
                r.marginalized,
                r.non_marginalized,
                rational_to_f64(&r.fpr_gap),
                rational_to_f64(&r.tpr_gap),
                rational_to_f64(&r.auc_gap),
                g.threshold
            );
        }
    }
    out
}
