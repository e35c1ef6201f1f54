//! Resolution data for an isolated singularity: exceptional divisors, their
//! nerve, a generating set of curve classes with their pairings, and the
//! wrapping numbers of the divisors.

use std::collections::BTreeSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::rational::{int, Exact, Rational};

#[derive(Debug, thiserror::Error)]
pub enum ResolutionError {
    #[error("malformed resolution document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ResolutionError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ResolutionError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    pub id: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    /// `C . E_j` for every divisor, in divisor order.
    pub pair_with_divisors: Vec<Rational>,
    /// `C . K` for the canonical class of the resolution.
    pub pair_with_k: Rational,
    pub label: String,
}

/// Intersection data of the exceptional curves of a resolved surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceCurveGeometry {
    pub genus: Vec<u32>,
    pub self_intersection: Vec<i64>,
    /// Symmetric matrix of `E_i . E_j`; the diagonal is either zero or
    /// repeats `self_intersection`.
    pub cross: Vec<Vec<i64>>,
}

impl SurfaceCurveGeometry {
    pub fn len(&self) -> usize {
        self.genus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genus.is_empty()
    }

    pub fn validate(&self) -> Result<(), ResolutionError> {
        let l = self.genus.len();
        if l == 0 {
            return Err(ResolutionError::invalid(
                "surface_geometry.genus",
                "at least one divisor is required",
            ));
        }
        if self.self_intersection.len() != l {
            return Err(ResolutionError::invalid(
                "surface_geometry.self_intersection",
                format!("expected {l} entries, found {}", self.self_intersection.len()),
            ));
        }
        if self.cross.len() != l || self.cross.iter().any(|row| row.len() != l) {
            return Err(ResolutionError::invalid(
                "surface_geometry.cross",
                format!("expected a {l}x{l} matrix"),
            ));
        }
        for i in 0..l {
            let diag = self.cross[i][i];
            if diag != 0 && diag != self.self_intersection[i] {
                return Err(ResolutionError::invalid(
                    format!("surface_geometry.cross[{i}][{i}]"),
                    "diagonal disagrees with self_intersection",
                ));
            }
            for j in 0..l {
                if i == j {
                    continue;
                }
                if self.cross[i][j] != self.cross[j][i] {
                    return Err(ResolutionError::invalid(
                        format!("surface_geometry.cross[{i}][{j}]"),
                        "intersection matrix must be symmetric",
                    ));
                }
                if self.cross[i][j] < 0 {
                    return Err(ResolutionError::invalid(
                        format!("surface_geometry.cross[{i}][{j}]"),
                        "distinct curves must intersect nonnegatively",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Full intersection matrix with the self-intersections on the diagonal.
    pub fn intersection_matrix(&self) -> Vec<Vec<Rational>> {
        let l = self.len();
        (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| {
                        if i == j {
                            int(self.self_intersection[i])
                        } else {
                            int(self.cross[i][j])
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Adjunction on a smooth surface: `K . E = 2g - 2 - E . E`.
    pub fn canonical_pairing(&self, i: usize) -> Rational {
        int(2 * self.genus[i] as i64 - 2 - self.self_intersection[i])
    }
}

/// Validated resolution data. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionData {
    complex_dimension: u32,
    divisors: Vec<Divisor>,
    nerve: BTreeSet<Vec<usize>>,
    curves: Vec<CurveClass>,
    wrapping_numbers: Vec<Rational>,
    epsilon: Rational,
    epsilon_m: Option<Rational>,
    surface_geometry: Option<SurfaceCurveGeometry>,
}

impl ResolutionData {
    /// Builds and validates resolution data. Nerve members are zero-based
    /// divisor indices.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        complex_dimension: u32,
        divisors: Vec<Divisor>,
        nerve: impl IntoIterator<Item = Vec<usize>>,
        curves: Vec<CurveClass>,
        wrapping_numbers: Vec<Rational>,
        epsilon: Rational,
        epsilon_m: Option<Rational>,
        surface_geometry: Option<SurfaceCurveGeometry>,
    ) -> Result<Self, ResolutionError> {
        let nerve = nerve
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let data = ResolutionData {
            complex_dimension,
            divisors,
            nerve,
            curves,
            wrapping_numbers,
            epsilon,
            epsilon_m,
            surface_geometry,
        };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<(), ResolutionError> {
        if self.complex_dimension < 2 {
            return Err(ResolutionError::invalid(
                "complex_dimension",
                "complex dimension must be at least 2",
            ));
        }
        let l = self.divisors.len();
        if l == 0 {
            return Err(ResolutionError::invalid(
                "divisors",
                "at least one divisor is required",
            ));
        }
        let ids: BTreeSet<u32> = self.divisors.iter().map(|d| d.id).collect();
        if ids.len() != l {
            return Err(ResolutionError::invalid("divisors", "divisor ids must be unique"));
        }
        if self.wrapping_numbers.len() != l {
            return Err(ResolutionError::invalid(
                "wrapping_numbers",
                format!("expected {l} wrapping numbers, found {}", self.wrapping_numbers.len()),
            ));
        }
        for (i, lambda) in self.wrapping_numbers.iter().enumerate() {
            if !lambda.is_positive() {
                return Err(ResolutionError::invalid(
                    format!("wrapping_numbers[{i}]"),
                    "wrapping number must be positive",
                ));
            }
        }
        if !self.epsilon.is_positive() {
            return Err(ResolutionError::invalid("epsilon", "epsilon must be positive"));
        }
        if let Some(eps_m) = &self.epsilon_m {
            if !eps_m.is_positive() {
                return Err(ResolutionError::invalid("epsilon_m", "epsilon_m must be positive"));
            }
        }
        for (k, curve) in self.curves.iter().enumerate() {
            if curve.pair_with_divisors.len() != l {
                return Err(ResolutionError::invalid(
                    format!("curves[{k}].pair_with_divisors"),
                    format!(
                        "expected {l} pairings, found {}",
                        curve.pair_with_divisors.len()
                    ),
                ));
            }
        }
        for subset in &self.nerve {
            if subset.is_empty() {
                return Err(ResolutionError::invalid("nerve", "nerve members must be nonempty"));
            }
            if let Some(&bad) = subset.iter().find(|&&i| i >= l) {
                return Err(ResolutionError::invalid(
                    "nerve",
                    format!("nerve refers to unknown divisor index {bad}"),
                ));
            }
            if subset.len() > self.complex_dimension as usize {
                return Err(ResolutionError::invalid(
                    "nerve",
                    "more normal crossing divisors meet than the complex dimension allows",
                ));
            }
        }
        for i in 0..l {
            if !self.nerve.contains(&vec![i]) {
                return Err(ResolutionError::invalid(
                    "nerve",
                    format!("nerve not downward closed: missing singleton {{{}}}", self.divisors[i].id),
                ));
            }
        }
        for subset in &self.nerve {
            for drop in 0..subset.len() {
                if subset.len() == 1 {
                    break;
                }
                let mut face = subset.clone();
                face.remove(drop);
                if !self.nerve.contains(&face) {
                    return Err(ResolutionError::invalid(
                        "nerve",
                        "nerve not downward closed",
                    ));
                }
            }
        }
        if let Some(geom) = &self.surface_geometry {
            geom.validate()?;
            if self.complex_dimension != 2 {
                return Err(ResolutionError::invalid(
                    "surface_geometry",
                    "surface geometry requires complex dimension 2",
                ));
            }
            if geom.len() != l {
                return Err(ResolutionError::invalid(
                    "surface_geometry",
                    format!("expected data for {l} divisors"),
                ));
            }
            if self.curves != derived_curves(geom, &self.divisors) {
                return Err(ResolutionError::invalid(
                    "curves",
                    "curve classes disagree with surface_geometry",
                ));
            }
            if self.nerve != derived_nerve(geom) {
                return Err(ResolutionError::invalid(
                    "nerve",
                    "nerve disagrees with surface_geometry",
                ));
            }
        }
        Ok(())
    }

    pub fn complex_dimension(&self) -> u32 {
        self.complex_dimension
    }

    pub fn divisor_count(&self) -> usize {
        self.divisors.len()
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    /// Nerve members as sorted zero-based index sets, in lexicographic order.
    pub fn nerve(&self) -> &BTreeSet<Vec<usize>> {
        &self.nerve
    }

    pub fn curves(&self) -> &[CurveClass] {
        &self.curves
    }

    pub fn wrapping_numbers(&self) -> &[Rational] {
        &self.wrapping_numbers
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    /// Radius of the extremal ball product; defaults to `epsilon`.
    pub fn epsilon_m(&self) -> &Rational {
        self.epsilon_m.as_ref().unwrap_or(&self.epsilon)
    }

    pub fn surface_geometry(&self) -> Option<&SurfaceCurveGeometry> {
        self.surface_geometry.as_ref()
    }

    /// Pairing matrix with one row per curve class.
    pub fn pairing_matrix(&self) -> Vec<Vec<Rational>> {
        self.curves
            .iter()
            .map(|c| c.pair_with_divisors.clone())
            .collect()
    }

    pub fn canonical_pairings(&self) -> Vec<Rational> {
        self.curves.iter().map(|c| c.pair_with_k.clone()).collect()
    }

    /// Same data with the divisors reordered: new divisor `i` is old divisor
    /// `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, ResolutionError> {
        let l = self.divisor_count();
        assert_eq!(order.len(), l, "permutation length");
        let mut inverse = vec![0; l];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let surface_geometry = self.surface_geometry.as_ref().map(|g| SurfaceCurveGeometry {
            genus: order.iter().map(|&o| g.genus[o]).collect(),
            self_intersection: order.iter().map(|&o| g.self_intersection[o]).collect(),
            cross: order
                .iter()
                .map(|&r| order.iter().map(|&c| g.cross[r][c]).collect())
                .collect(),
        });
        let curves: Vec<CurveClass> = match &surface_geometry {
            Some(g) => derived_curves(g, &order.iter().map(|&o| self.divisors[o].clone()).collect::<Vec<_>>()),
            None => self
                .curves
                .iter()
                .map(|c| CurveClass {
                    pair_with_divisors: order.iter().map(|&o| c.pair_with_divisors[o].clone()).collect(),
                    pair_with_k: c.pair_with_k.clone(),
                    label: c.label.clone(),
                })
                .collect(),
        };
        ResolutionData::new(
            self.complex_dimension,
            order.iter().map(|&o| self.divisors[o].clone()).collect(),
            self.nerve
                .iter()
                .map(|s| s.iter().map(|&i| inverse[i]).collect()),
            curves,
            order.iter().map(|&o| self.wrapping_numbers[o].clone()).collect(),
            self.epsilon.clone(),
            self.epsilon_m.clone(),
            surface_geometry,
        )
    }

    /// Same data with an additional curve class.
    pub fn with_extra_curve(&self, curve: CurveClass) -> Result<Self, ResolutionError> {
        let mut curves = self.curves.clone();
        curves.push(curve);
        ResolutionData::new(
            self.complex_dimension,
            self.divisors.clone(),
            self.nerve.iter().cloned(),
            curves,
            self.wrapping_numbers.clone(),
            self.epsilon.clone(),
            self.epsilon_m.clone(),
            None,
        )
    }
}

fn derived_curves(geom: &SurfaceCurveGeometry, divisors: &[Divisor]) -> Vec<CurveClass> {
    let matrix = geom.intersection_matrix();
    matrix
        .into_iter()
        .enumerate()
        .map(|(i, row)| CurveClass {
            pair_with_divisors: row,
            pair_with_k: geom.canonical_pairing(i),
            label: divisors
                .get(i)
                .map_or_else(|| format!("E{}", i + 1), |d| d.label.clone()),
        })
        .collect()
}

fn derived_nerve(geom: &SurfaceCurveGeometry) -> BTreeSet<Vec<usize>> {
    let l = geom.len();
    let mut nerve: BTreeSet<Vec<usize>> = (0..l).map(|i| vec![i]).collect();
    for i in 0..l {
        for j in i + 1..l {
            if geom.cross[i][j] > 0 {
                nerve.insert(vec![i, j]);
            }
        }
    }
    nerve
}

/// Resolution data of a resolved surface, with curve pairings from
/// adjunction and the nerve read off the intersection matrix.
pub fn from_surface_geometry(
    geom: SurfaceCurveGeometry,
    wrapping_numbers: Vec<Rational>,
    epsilon: Rational,
) -> Result<ResolutionData, ResolutionError> {
    geom.validate()?;
    let divisors: Vec<Divisor> = (0..geom.len())
        .map(|i| Divisor {
            id: i as u32 + 1,
            label: format!("E{}", i + 1),
        })
        .collect();
    surface_with_divisors(geom, divisors, wrapping_numbers, epsilon, None)
}

fn surface_with_divisors(
    geom: SurfaceCurveGeometry,
    divisors: Vec<Divisor>,
    wrapping_numbers: Vec<Rational>,
    epsilon: Rational,
    epsilon_m: Option<Rational>,
) -> Result<ResolutionData, ResolutionError> {
    if divisors.len() != geom.len() {
        return Err(ResolutionError::invalid(
            "surface_geometry",
            format!("expected data for {} divisors", divisors.len()),
        ));
    }
    let curves = derived_curves(&geom, &divisors);
    let nerve = derived_nerve(&geom);
    ResolutionData::new(
        2,
        divisors,
        nerve,
        curves,
        wrapping_numbers,
        epsilon,
        epsilon_m,
        Some(geom),
    )
}

// ---------------------------------------------------------------------------
// Document format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorEntry {
    pub id: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub pair_with_divisors: Vec<Exact>,
    #[serde(rename = "pair_with_K")]
    pub pair_with_k: Exact,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionDocument {
    pub complex_dimension: u32,
    pub divisors: Vec<DivisorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nerve: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<CurveEntry>>,
    pub wrapping_numbers: Vec<Exact>,
    pub epsilon: Exact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_m: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_geometry: Option<SurfaceCurveGeometry>,
}

impl ResolutionDocument {
    pub fn into_data(self) -> Result<ResolutionData, ResolutionError> {
        let divisors: Vec<Divisor> = self
            .divisors
            .into_iter()
            .map(|d| Divisor {
                id: d.id,
                label: d.label,
            })
            .collect();
        let wrapping: Vec<Rational> = self.wrapping_numbers.into_iter().map(|e| e.0).collect();
        let epsilon = self.epsilon.0;
        let epsilon_m = self.epsilon_m.map(|e| e.0);
        let index_of = |id: u32, field: &str| -> Result<usize, ResolutionError> {
            divisors.iter().position(|d| d.id == id).ok_or_else(|| {
                ResolutionError::invalid(field, format!("unknown divisor id {id}"))
            })
        };
        let nerve = match self.nerve {
            Some(sets) => Some(
                sets.iter()
                    .map(|set| set.iter().map(|&id| index_of(id, "nerve")).collect())
                    .collect::<Result<Vec<Vec<usize>>, _>>()?,
            ),
            None => None,
        };
        let curves = self.curves.map(|cs| {
            cs.into_iter()
                .map(|c| CurveClass {
                    pair_with_divisors: c.pair_with_divisors.into_iter().map(|e| e.0).collect(),
                    pair_with_k: c.pair_with_k.0,
                    label: c.label,
                })
                .collect::<Vec<_>>()
        });

        match self.surface_geometry {
            Some(geom) => {
                if self.complex_dimension != 2 {
                    return Err(ResolutionError::invalid(
                        "surface_geometry",
                        "surface geometry requires complex dimension 2",
                    ));
                }
                geom.validate()?;
                let derived = surface_with_divisors(geom, divisors, wrapping, epsilon, epsilon_m)?;
                if let Some(curves) = curves {
                    if curves.iter().map(|c| (&c.pair_with_divisors, &c.pair_with_k)).ne(derived
                        .curves
                        .iter()
                        .map(|c| (&c.pair_with_divisors, &c.pair_with_k)))
                    {
                        return Err(ResolutionError::invalid(
                            "curves",
                            "curve classes disagree with surface_geometry",
                        ));
                    }
                }
                if let Some(nerve) = nerve {
                    let given: BTreeSet<Vec<usize>> = nerve
                        .into_iter()
                        .map(|mut s| {
                            s.sort_unstable();
                            s
                        })
                        .collect();
                    if given != derived.nerve {
                        return Err(ResolutionError::invalid(
                            "nerve",
                            "nerve disagrees with surface_geometry",
                        ));
                    }
                }
                Ok(derived)
            }
            None => {
                let nerve = nerve.ok_or_else(|| {
                    ResolutionError::invalid("nerve", "required when surface_geometry is absent")
                })?;
                let curves = curves.ok_or_else(|| {
                    ResolutionError::invalid("curves", "required when surface_geometry is absent")
                })?;
                ResolutionData::new(
                    self.complex_dimension,
                    divisors,
                    nerve,
                    curves,
                    wrapping,
                    epsilon,
                    epsilon_m,
                    None,
                )
            }
        }
    }
}

impl From<&ResolutionData> for ResolutionDocument {
    fn from(data: &ResolutionData) -> Self {
        ResolutionDocument {
            complex_dimension: data.complex_dimension,
            divisors: data
                .divisors
                .iter()
                .map(|d| DivisorEntry {
                    id: d.id,
                    label: d.label.clone(),
                })
                .collect(),
            nerve: Some(
                data.nerve
                    .iter()
                    .map(|s| s.iter().map(|&i| data.divisors[i].id).collect())
                    .collect(),
            ),
            curves: Some(
                data.curves
                    .iter()
                    .map(|c| CurveEntry {
                        pair_with_divisors: c.pair_with_divisors.iter().cloned().map(Exact).collect(),
                        pair_with_k: Exact(c.pair_with_k.clone()),
                        label: c.label.clone(),
                    })
                    .collect(),
            ),
            wrapping_numbers: data.wrapping_numbers.iter().cloned().map(Exact).collect(),
            epsilon: Exact(data.epsilon.clone()),
            epsilon_m: data.epsilon_m.clone().map(Exact),
            surface_geometry: data.surface_geometry.clone(),
        }
    }
}

pub fn load_resolution(document: &[u8]) -> Result<ResolutionData, ResolutionError> {
    let doc: ResolutionDocument = serde_json::from_slice(document)?;
    doc.into_data()
}

pub fn serialize_resolution(data: &ResolutionData) -> String {
    let doc = ResolutionDocument::from(data);
    serde_json::to_string_pretty(&doc).expect("resolution documents always serialize")
}

/// Sum of `C . E_j * a_j` minus `C . K` for a single curve; zero exactly when
/// the discrepancy vector satisfies that curve's equation.
pub fn curve_residual(curve: &CurveClass, a: &[Rational]) -> Rational {
    let lhs: Rational = curve
        .pair_with_divisors
        .iter()
        .zip(a)
        .map(|(p, x)| p * x)
        .sum();
    lhs - &curve.pair_with_k
}
