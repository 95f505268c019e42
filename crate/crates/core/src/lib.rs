//! Nontrivial solutions of the Fermat cubic `x^3 + y^3 = k z^3` over real and
//! imaginary quadratic fields, studied through the Mordell curves
//! `y^2 = x^3 - 432 k^2` over `Q(sqrt(d))` and `y^2 = x^3 - 432 d^3 k^2` over `Q`.

pub mod arith;
pub mod correspondence;
pub mod curve;
pub mod pipeline;
pub mod quad;
pub mod reference;
pub mod root_number;
pub mod search;

pub use arith::{Integer, Rational};
pub use correspondence::{FermatSolution, QPointImage, TrivialityClass};
pub use curve::{CurvePoint, MordellCurve, TorsionGroup};
pub use pipeline::{full_pipeline, PipelineReport, Verdict};
pub use quad::{QuadElem, QuadField};
pub use search::SearchBounds;
