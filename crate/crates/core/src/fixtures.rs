//! Reference presentations shipped with the crate.
//!
//! * `interval`: the open interval (0, 1), sampled away from its ends.
//! * `halfline`: `[0, ∞)` truncated to the window `[0, 20]`.
//! * `circle`: the unit circle with two stereographic-angle charts.
//! * `cross`: the coordinate cross `{x1·x2 = 0}`. Its structural dimension is 2:
//!   removing the origin leaves four components, which no subset of `R` allows
//!   near a point.
//! * `mobius`: the Möbius line bundle over the circle, trivialised over two arcs.
//! * `mobius_sub`: the Möbius line as a subbundle of the trivial plane bundle.
//! * `trivial`: the trivial line bundle over the circle.
//! * `sussmann`: the field `e^(−1/x)·∂x` on the line, whose rank jumps at 0.
//! * `sussmann_line`: the same rank jump as a subbundle of the trivial line bundle.
//! * `circle_tangent`: the tangent distribution of the circle, given on two arcs.

use crate::document::SpaceDocument;
use crate::space::SpacePresentation;

pub const SOURCES: &[(&str, &str, &str)] = &[
    ("interval", "interval.space", include_str!("../fixtures/interval.space")),
    ("halfline", "halfline.space", include_str!("../fixtures/halfline.space")),
    ("circle", "circle.space", include_str!("../fixtures/circle.space")),
    ("cross", "cross.space", include_str!("../fixtures/cross.space")),
    ("mobius", "mobius.bundle", include_str!("../fixtures/mobius.bundle")),
    ("mobius_sub", "mobius_sub.bundle", include_str!("../fixtures/mobius_sub.bundle")),
    ("trivial", "trivial.bundle", include_str!("../fixtures/trivial.bundle")),
    ("sussmann", "sussmann.dist", include_str!("../fixtures/sussmann.dist")),
    ("sussmann_line", "sussmann_line.bundle", include_str!("../fixtures/sussmann_line.bundle")),
    ("circle_tangent", "circle_tangent.dist", include_str!("../fixtures/circle_tangent.dist")),
];

/// Raw JSON of a named fixture.
pub fn source(name: &str) -> &'static str {
    SOURCES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, s)| *s)
        .unwrap_or_else(|| panic!("no fixture named {name}"))
}

pub fn document(name: &str) -> SpaceDocument {
    SpaceDocument::from_json(source(name)).expect("fixture parses")
}

pub fn space(name: &str) -> SpacePresentation {
    crate::space::load_presentation(&document(name)).expect("fixture loads")
}

pub fn interval() -> SpacePresentation {
    space("interval")
}

pub fn half_line() -> SpacePresentation {
    space("halfline")
}

pub fn circle() -> SpacePresentation {
    space("circle")
}

pub fn cross() -> SpacePresentation {
    space("cross")
}
