//! Example models bundled with the library.

use crate::dsl::parse_text;
use crate::model::Model;

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        /// `(name, .csm source)` for every bundled model.
        pub const ALL: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../fixtures/", $name, ".csm")))),*
        ];
    };
}

fixtures!(
    "airline_alliance",
    "bad_c1",
    "bad_c2",
    "bad_c3",
    "bad_c4",
    "bad_c5",
    "bad_orphan",
    "gp_hospital",
    "gp_lab",
    "healthcare",
    "hospital_cleaning",
    "hotel_agency",
);

/// Fixtures that pass validation.
pub const VALID: [&str; 6] = [
    "airline_alliance",
    "gp_hospital",
    "gp_lab",
    "healthcare",
    "hospital_cleaning",
    "hotel_agency",
];

pub fn source(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a bundled fixture. All of them parse; the `bad_*` ones fail validation.
pub fn model(name: &str) -> Option<Model> {
    let text = source(name)?;
    let parsed = parse_text(text, &format!("{name}.csm"));
    Some(parsed.model.expect("bundled fixtures parse"))
}
