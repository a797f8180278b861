//! Environments shipped with the library.

use crate::geometry::Environment;

/// `(name, JSON text)` for every shipped environment.
pub const ENVIRONMENTS: &[(&str, &str)] = &[
    ("convex", include_str!("../../../environments/convex.json")),
    ("l_shaped", include_str!("../../../environments/l_shaped.json")),
    ("corridors", include_str!("../../../environments/corridors.json")),
    ("web_hall", include_str!("../../../environments/web_hall.json")),
    ("two_holes", include_str!("../../../environments/two_holes.json")),
];

/// Multiply-connected environments used for benchmarking.
pub const BENCHMARK: &[&str] = &["corridors", "web_hall", "two_holes"];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENVIRONMENTS.iter().map(|(n, _)| *n)
}

/// Loads a shipped environment by name.
pub fn load(name: &str) -> Option<Environment> {
    ENVIRONMENTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Environment::from_json(text).expect("shipped environment is valid"))
}
