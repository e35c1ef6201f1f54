//! The `analyze` report: every stage of the pipeline for one resolution
//! document, in a text and a JSON rendering.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sftmd::discrepancy::{
    check_uniqueness_certificate, compute_discrepancies, minimal_discrepancy, ExtendedRational,
};
use sftmd::orbits::{enumerate_families, mi_closed_form, mi_descent, theorem_verdict, Relation};
use sftmd::rational::{format_rational, Rational};
use sftmd::resolution::{load_resolution, ResolutionData};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub d_max: u64,
    pub pi: Rational,
    pub check_theorem: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub input: InputEcho,
    pub settings: SettingsEcho,
    pub discrepancies: Vec<DiscrepancyRow>,
    pub certificate: Certificate,
    pub minimal_discrepancy: MdEntry,
    pub families: Vec<FamilyRow>,
    pub mi: MiEntry,
    pub verdict: Option<VerdictEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputEcho {
    pub name: String,
    pub sha256: String,
    pub complex_dimension: u32,
    pub divisors: Vec<String>,
    pub curves: usize,
    /// Nerve simplices by divisor id.
    pub nerve: Vec<Vec<u32>>,
    pub wrapping_numbers: Vec<String>,
    pub epsilon: String,
    pub epsilon_m: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsEcho {
    pub d_max: u64,
    pub pi_rational: String,
    pub check_theorem: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscrepancyRow {
    pub id: u32,
    pub label: String,
    pub a: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub rank: usize,
    pub divisors: usize,
    pub curves: usize,
    pub unique: bool,
    pub leading_minors: Option<Vec<String>>,
    pub negative_definite: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdEntry {
    pub value: String,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRow {
    /// Divisor ids in the support of `V`.
    pub support: Vec<u32>,
    pub degrees: Vec<u64>,
    pub cz: String,
    pub size: i64,
    pub lsft: String,
    pub period_center: String,
    pub period_radius: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiEntry {
    pub closed_form: String,
    pub bruteforce: String,
    /// Brute-force minimum at budgets `1..=d_max`.
    pub descent: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictEntry {
    pub relation: String,
    pub md: String,
    pub mi_closed_form: String,
    pub mi_bruteforce_at_budget: String,
    pub budget: u64,
}

impl Report {
    /// The relation found by the theorem check, if it ran.
    pub fn relation(&self) -> Option<&str> {
        self.verdict.as_ref().map(|v| v.relation.as_str())
    }

    pub fn is_mismatch(&self) -> bool {
        self.relation() == Some(&Relation::Mismatch.to_string())
    }
}

fn warnings(res: &ResolutionData) -> Vec<String> {
    let mut out = Vec::new();
    let name = |i: usize| res.divisors()[i].label.clone();
    match res.surface_geometry() {
        Some(g) => {
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    if g.cross[i][j] > 1 {
                        out.push(format!(
                            "{} and {} meet in {} points; their intersection is assumed connected",
                            name(i),
                            name(j),
                            g.cross[i][j]
                        ));
                    }
                }
            }
        }
        None => {
            out.push("every intersection E_I over the nerve is assumed connected; this is not checked".into());
            out.push("uniqueness is certified by rank only; negative definiteness is not checked".into());
        }
    }
    out
}

pub fn analyze(name: &str, document: &[u8], settings: &Settings) -> Result<Report> {
    let res = load_resolution(document).with_context(|| name.to_string())?;
    let a = compute_discrepancies(&res).with_context(|| name.to_string())?;
    let certificate = check_uniqueness_certificate(&res);
    let md = minimal_discrepancy(&a);
    let ids: Vec<u32> = res.divisors().iter().map(|d| d.id).collect();
    let families = enumerate_families(&res, &a, settings.d_max, &settings.pi)?;
    let descent = mi_descent(&res, &a, settings.d_max)?;
    let closed = mi_closed_form(&a);
    let verdict = settings.check_theorem.then(|| {
        let v = theorem_verdict(&md, &closed, &descent);
        VerdictEntry {
            relation: v.relation.to_string(),
            md: v.md.value.to_string(),
            mi_closed_form: v.mi_closed_form.to_string(),
            mi_bruteforce_at_budget: format_rational(&v.mi_bruteforce_at_budget),
            budget: v.budget,
        }
    });

    Ok(Report {
        input: InputEcho {
            name: name.to_string(),
            sha256: format!("{:x}", Sha256::digest(document)),
            complex_dimension: res.complex_dimension(),
            divisors: res.divisors().iter().map(|d| d.label.clone()).collect(),
            curves: res.curves().len(),
            nerve: {
                let mut simplices: Vec<Vec<u32>> = res
                    .nerve()
                    .iter()
                    .map(|s| s.iter().map(|&i| ids[i]).collect())
                    .collect();
                simplices.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
                simplices
            },
            wrapping_numbers: res.wrapping_numbers().iter().map(format_rational).collect(),
            epsilon: format_rational(res.epsilon()),
            epsilon_m: format_rational(res.epsilon_m()),
        },
        settings: SettingsEcho {
            d_max: settings.d_max,
            pi_rational: format_rational(&settings.pi),
            check_theorem: settings.check_theorem,
        },
        discrepancies: res
            .divisors()
            .iter()
            .zip(a.values())
            .map(|(d, v)| DiscrepancyRow {
                id: d.id,
                label: d.label.clone(),
                a: format_rational(v),
            })
            .collect(),
        certificate: Certificate {
            rank: certificate.rank,
            divisors: certificate.divisors,
            curves: certificate.curves,
            unique: certificate.unique,
            leading_minors: certificate
                .surface_minors
                .map(|m| m.iter().map(format_rational).collect()),
            negative_definite: certificate.negative_definite,
        },
        minimal_discrepancy: MdEntry {
            value: md.value.to_string(),
            classification: md.classification.to_string(),
        },
        families: families
            .iter()
            .map(|f| FamilyRow {
                support: f.multiplicity.support().iter().map(|&i| ids[i]).collect(),
                degrees: f.multiplicity.degrees().to_vec(),
                cz: format_rational(&f.cz),
                size: f.size,
                lsft: format_rational(&f.lsft),
                period_center: format_rational(&f.period_center),
                period_radius: format_rational(&f.period_radius),
            })
            .collect(),
        mi: MiEntry {
            closed_form: match &closed {
                ExtendedRational::NegInfinity => "-inf".into(),
                ExtendedRational::Finite(v) => format_rational(v),
            },
            bruteforce: format_rational(descent.last().expect("budget is positive")),
            descent: descent.iter().map(format_rational).collect(),
        },
        verdict,
        warnings: warnings(&res),
    })
}

pub fn to_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
    text.push('\n');
    text
}

fn table(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::from(" ");
        for (cell, w) in row.iter().zip(&widths) {
            let _ = write!(line, " {cell:<w$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn family_label(row: &FamilyRow) -> String {
    row.support
        .iter()
        .zip(&row.degrees)
        .map(|(id, d)| format!("{d}*S{id}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    let input = &report.input;
    let nerve: Vec<String> = input
        .nerve
        .iter()
        .map(|s| format!("{{{}}}", s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    let _ = writeln!(out, "input     {}", input.name);
    let _ = writeln!(out, "sha256    {}", input.sha256);
    let _ = writeln!(out, "dimension {}", input.complex_dimension);
    let _ = writeln!(out, "divisors  {}", input.divisors.join(", "));
    let _ = writeln!(out, "curves    {}", input.curves);
    let _ = writeln!(out, "nerve     {}", nerve.join(" "));
    let _ = writeln!(out, "lambda    {}", input.wrapping_numbers.join(", "));
    let _ = writeln!(out, "epsilon   {} (epsilon_M {})", input.epsilon, input.epsilon_m);
    let _ = writeln!(out, "budget    {}", report.settings.d_max);
    let _ = writeln!(out, "pi        {}", report.settings.pi_rational);

    out.push_str("\ndiscrepancies\n");
    let rows: Vec<Vec<String>> = report
        .discrepancies
        .iter()
        .map(|d| vec![d.label.clone(), d.a.clone()])
        .collect();
    out.push_str(&table(&rows));

    let c = &report.certificate;
    out.push_str("\nuniqueness\n");
    let _ = writeln!(
        out,
        "  rank {} of {} from {} curve{}: {}",
        c.rank,
        c.divisors,
        c.curves,
        if c.curves == 1 { "" } else { "s" },
        if c.unique { "unique" } else { "not unique" }
    );
    if let (Some(minors), Some(nd)) = (&c.leading_minors, c.negative_definite) {
        let _ = writeln!(
            out,
            "  leading minors {}: {}",
            minors.join(", "),
            if nd { "negative definite" } else { "not negative definite" }
        );
    }

    let md = &report.minimal_discrepancy;
    let _ = writeln!(out, "\nminimal discrepancy {} ({})", md.value, md.classification);

    let _ = writeln!(out, "\nfamilies with total degree at most {}", report.settings.d_max);
    let mut rows = vec![vec![
        "V".to_string(),
        "cz".into(),
        "size".into(),
        "lsft".into(),
        "period".into(),
    ]];
    rows.extend(report.families.iter().map(|f| {
        vec![
            family_label(f),
            f.cz.clone(),
            f.size.to_string(),
            f.lsft.clone(),
            format!("{} +- {}", f.period_center, f.period_radius),
        ]
    }));
    out.push_str(&table(&rows));

    out.push_str("\nminimal SFT index\n");
    let _ = writeln!(out, "  closed form {}", report.mi.closed_form);
    let _ = writeln!(out, "  brute force {}", report.mi.bruteforce);
    let _ = writeln!(out, "  descent     {}", report.mi.descent.join(" "));

    match &report.verdict {
        Some(v) => {
            let _ = writeln!(out, "\nverdict {}", v.relation);
        }
        None => out.push_str("\nverdict not checked\n"),
    }

    out.push_str("\nwarnings\n");
    if report.warnings.is_empty() {
        out.push_str("  none\n");
    }
    for w in &report.warnings {
        let _ = writeln!(out, "  {w}");
    }
    out
}
