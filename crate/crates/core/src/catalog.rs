//! Bundled example resolutions with known minimal discrepancies.

use crate::resolution::{load_resolution, ResolutionData};

pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub document: &'static str,
    /// Expected minimal discrepancy, `None` when it is negative infinity.
    pub minimal_discrepancy: Option<(i64, i64)>,
}

impl Fixture {
    pub fn load(&self) -> ResolutionData {
        load_resolution(self.document.as_bytes()).expect("bundled fixtures are valid")
    }
}

macro_rules! fixture {
    ($name:literal, $desc:literal, $md:expr) => {
        Fixture {
            name: $name,
            description: $desc,
            document: include_str!(concat!("../fixtures/", $name, ".json")),
            minimal_discrepancy: $md,
        }
    };
}

pub static FIXTURES: &[Fixture] = &[
    fixture!("a1", "A1 surface singularity", Some((0, 1))),
    fixture!("a2", "A2 surface singularity", Some((0, 1))),
    fixture!("a3", "A3 surface singularity", Some((0, 1))),
    fixture!("a4", "A4 surface singularity", Some((0, 1))),
    fixture!("d4", "D4 surface singularity", Some((0, 1))),
    fixture!("elliptic_cone_1", "cone over an elliptic curve, E^2 = -1", Some((-1, 1))),
    fixture!("elliptic_cone_2", "cone over an elliptic curve, E^2 = -2", Some((-1, 1))),
    fixture!("elliptic_cone_3", "cone over an elliptic curve, E^2 = -3", Some((-1, 1))),
    fixture!("minus_three_curve", "cyclic quotient with a rational (-3)-curve", Some((-1, 3))),
    fixture!("genus_two_minus_one", "genus 2 curve with E^2 = -1", None),
    fixture!("smooth_c2", "blow-up of the origin in C^2", Some((1, 1))),
    fixture!("smooth_c3", "blow-up of the origin in C^3", Some((2, 1))),
    fixture!("smooth_c4", "blow-up of the origin in C^4", Some((3, 1))),
    fixture!("double_blowup_c2", "C^2 blown up at the origin and then at a point of the exceptional curve", Some((1, 1))),
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{compute_discrepancies, minimal_discrepancy, ExtendedRational};
    use crate::rational::ratio;

    #[test]
    fn every_fixture_has_its_expected_md() {
        for f in FIXTURES {
            let a = compute_discrepancies(&f.load()).unwrap();
            let md = minimal_discrepancy(&a).value;
            let expected = match f.minimal_discrepancy {
                Some((p, q)) => ExtendedRational::Finite(ratio(p, q)),
                None => ExtendedRational::NegInfinity,
            };
            assert_eq!(md, expected, "{}", f.name);
        }
    }

    #[test]
    fn lookup() {
        assert!(find("d4").is_some());
        assert!(find("e8").is_none());
    }
}
