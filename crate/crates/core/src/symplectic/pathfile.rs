//! JSON path files: a list of segments, each tagged by `kind`, with exact
//! rational parameters written as strings. Matrices are arrays of rows.

use serde::{Deserialize, Serialize};

use super::path::{PathSegment, RotationBlock, Sample, SegmentKind, ShearBlock, SymplecticPath};
use super::{CrossingTolerances, CzError, RationalMatrix};
use crate::rational::{int, Exact, Rational};

#[derive(Debug, thiserror::Error)]
pub enum PathFileError {
    #[error("malformed path file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid path: {0}")]
    Invalid(#[from] CzError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub start: Exact,
    pub rate: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleEntry {
    pub time: Exact,
    pub matrix: Vec<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindEntry {
    Constant {
        matrix: Vec<Vec<Exact>>,
    },
    Rotation {
        blocks: Vec<BlockEntry>,
    },
    Shear {
        blocks: Vec<BlockEntry>,
    },
    ExpQuadratic {
        generator: Vec<Vec<Exact>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Vec<Vec<Exact>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<Exact>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<Exact>,
    },
    Sampled {
        samples: Vec<SampleEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<Exact>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<Exact>,
    },
    BlockSum {
        parts: Vec<KindEntry>,
    },
    Conjugated {
        by: Vec<Vec<Exact>>,
        inner: Box<KindEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEntry {
    #[serde(default = "unit_duration")]
    pub duration: Exact,
    #[serde(flatten)]
    pub kind: KindEntry,
}

fn unit_duration() -> Exact {
    Exact(int(1))
}

fn matrix_in(m: Vec<Vec<Exact>>) -> RationalMatrix {
    m.into_iter()
        .map(|row| row.into_iter().map(|e| e.0).collect())
        .collect()
}

fn matrix_out(m: &RationalMatrix) -> Vec<Vec<Exact>> {
    m.iter()
        .map(|row| row.iter().cloned().map(Exact).collect())
        .collect()
}

impl From<KindEntry> for SegmentKind {
    fn from(entry: KindEntry) -> Self {
        match entry {
            KindEntry::Constant { matrix } => SegmentKind::Constant {
                matrix: matrix_in(matrix),
            },
            KindEntry::Rotation { blocks } => SegmentKind::Rotation {
                blocks: blocks
                    .into_iter()
                    .map(|b| RotationBlock {
                        start: b.start.0,
                        rate: b.rate.0,
                    })
                    .collect(),
            },
            KindEntry::Shear { blocks } => SegmentKind::Shear {
                blocks: blocks
                    .into_iter()
                    .map(|b| ShearBlock {
                        start: b.start.0,
                        rate: b.rate.0,
                    })
                    .collect(),
            },
            KindEntry::ExpQuadratic {
                generator,
                base,
                from,
                to,
            } => {
                let generator = matrix_in(generator);
                let base = base
                    .map(matrix_in)
                    .unwrap_or_else(|| super::identity_exact(generator.len()));
                SegmentKind::ExpQuadratic {
                    base,
                    generator,
                    from: from.map_or_else(|| int(0), |e| e.0),
                    to: to.map_or_else(|| int(1), |e| e.0),
                }
            }
            KindEntry::Sampled { samples, from, to } => {
                let samples: Vec<Sample> = samples
                    .into_iter()
                    .map(|s| Sample {
                        time: s.time.0,
                        matrix: matrix_in(s.matrix),
                    })
                    .collect();
                let first = samples.first().map_or_else(|| int(0), |s| s.time.clone());
                let last = samples.last().map_or_else(|| int(0), |s| s.time.clone());
                SegmentKind::Sampled {
                    samples,
                    from: from.map_or(first, |e| e.0),
                    to: to.map_or(last, |e| e.0),
                }
            }
            KindEntry::BlockSum { parts } => SegmentKind::BlockSum {
                parts: parts.into_iter().map(SegmentKind::from).collect(),
            },
            KindEntry::Conjugated { by, inner } => SegmentKind::Conjugated {
                by: matrix_in(by),
                inner: Box::new(SegmentKind::from(*inner)),
            },
        }
    }
}

impl From<&SegmentKind> for KindEntry {
    fn from(kind: &SegmentKind) -> Self {
        let blocks = |pairs: Vec<(&Rational, &Rational)>| -> Vec<BlockEntry> {
            pairs
                .into_iter()
                .map(|(s, r)| BlockEntry {
                    start: Exact(s.clone()),
                    rate: Exact(r.clone()),
                })
                .collect()
        };
        match kind {
            SegmentKind::Constant { matrix } => KindEntry::Constant {
                matrix: matrix_out(matrix),
            },
            SegmentKind::Rotation { blocks: b } => KindEntry::Rotation {
                blocks: blocks(b.iter().map(|x| (&x.start, &x.rate)).collect()),
            },
            SegmentKind::Shear { blocks: b } => KindEntry::Shear {
                blocks: blocks(b.iter().map(|x| (&x.start, &x.rate)).collect()),
            },
            SegmentKind::ExpQuadratic {
                base,
                generator,
                from,
                to,
            } => KindEntry::ExpQuadratic {
                generator: matrix_out(generator),
                base: Some(matrix_out(base)),
                from: Some(Exact(from.clone())),
                to: Some(Exact(to.clone())),
            },
            SegmentKind::Sampled { samples, from, to } => KindEntry::Sampled {
                samples: samples
                    .iter()
                    .map(|s| SampleEntry {
                        time: Exact(s.time.clone()),
                        matrix: matrix_out(&s.matrix),
                    })
                    .collect(),
                from: Some(Exact(from.clone())),
                to: Some(Exact(to.clone())),
            },
            SegmentKind::BlockSum { parts } => KindEntry::BlockSum {
                parts: parts.iter().map(KindEntry::from).collect(),
            },
            SegmentKind::Conjugated { by, inner } => KindEntry::Conjugated {
                by: matrix_out(by),
                inner: Box::new(KindEntry::from(inner.as_ref())),
            },
        }
    }
}

pub fn load_path(document: &[u8], tol: &CrossingTolerances) -> Result<SymplecticPath, PathFileError> {
    let entries: Vec<SegmentEntry> = serde_json::from_slice(document)?;
    let segments = entries
        .into_iter()
        .map(|e| PathSegment {
            duration: e.duration.0,
            kind: SegmentKind::from(e.kind),
        })
        .collect();
    Ok(SymplecticPath::new(segments, tol)?)
}

pub fn serialize_path(path: &SymplecticPath) -> String {
    let entries: Vec<SegmentEntry> = path
        .segments()
        .iter()
        .map(|s| SegmentEntry {
            duration: Exact(s.duration.clone()),
            kind: KindEntry::from(&s.kind),
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("path entries always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn parses_every_kind() {
        let doc = r#"[
            {"kind": "rotation", "blocks": [{"start": "0", "rate": "1"}]},
            {"kind": "constant", "duration": "1/2", "matrix": [["1", "0"], ["0", "1"]]},
            {"kind": "shear", "blocks": [{"start": "0", "rate": "1"}]},
            {"kind": "shear", "blocks": [{"start": "1", "rate": "-1"}]},
            {"kind": "exp_quadratic", "generator": [["1", "0"], ["0", "1"]], "to": "1/2"},
            {"kind": "exp_quadratic", "generator": [["1", "0"], ["0", "1"]], "from": "1/2", "to": "0"},
            {"kind": "sampled", "samples": [
                {"time": "0", "matrix": [["1", "0"], ["0", "1"]]},
                {"time": "1", "matrix": [["1", "0"], ["0", "1"]]}
            ]},
            {"kind": "block_sum", "parts": [{"kind": "rotation", "blocks": [{"start": "0", "rate": "0"}]}]},
            {"kind": "conjugated", "by": [["1", "1"], ["0", "1"]],
             "inner": {"kind": "constant", "matrix": [["1", "0"], ["0", "1"]]}}
        ]"#;
        let path = load_path(doc.as_bytes(), &CrossingTolerances::default()).unwrap();
        assert_eq!(path.segments().len(), 9);
        assert_eq!(path.segments()[1].duration, ratio(1, 2));
        assert_eq!(path.dimension(), 2);
    }

    #[test]
    fn unknown_kind_is_a_parse_error() {
        let doc = r#"[{"kind": "spiral", "blocks": []}]"#;
        assert!(matches!(
            load_path(doc.as_bytes(), &CrossingTolerances::default()),
            Err(PathFileError::Parse(_))
        ));
    }

    #[test]
    fn discontinuity_is_reported() {
        let doc = r#"[
            {"kind": "shear", "blocks": [{"start": "0", "rate": "1"}]},
            {"kind": "shear", "blocks": [{"start": "0", "rate": "1"}]}
        ]"#;
        let err = load_path(doc.as_bytes(), &CrossingTolerances::default()).unwrap_err();
        assert!(matches!(err, PathFileError::Invalid(CzError::Discontinuous { segment: 1, .. })));
    }

    #[test]
    fn serialized_paths_reload() {
        let tol = CrossingTolerances::default();
        let path = SymplecticPath::unitary_loop(&[1, -2]).direct_sum(&SymplecticPath::shear(int(3)));
        let text = serialize_path(&path);
        let again = load_path(text.as_bytes(), &tol).unwrap();
        assert_eq!(again, path);
    }
}
