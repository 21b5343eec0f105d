//! Re-engineering of flat artwork depiction data into leveled
//! iconographic/iconological linked data.
//!
//! The crate is organised as a batch pipeline:
//!
//! - [`harvester`] reads depiction statements from dumps or a SPARQL endpoint.
//! - [`wd_reengineer`] aligns depicted entity types with interpretation classes
//!   and builds [`model::Recognition`]s.
//! - [`arco_parser`] turns catalogue free-text readings into leveled elements
//!   and iconological meanings.
//! - [`symbolkb`] indexes a symbol/meaning/context knowledge base and
//!   [`enricher`] joins recognitions against it.
//! - [`emitter`] writes canonical N-Triples / Turtle in a shortcut or full
//!   vocabulary profile, plus a DCAT-shaped catalogue.
//! - [`analytics`] and [`evalsuite`] compute the research analytics and the
//!   six-criterion quality assessment.
//! - [`cli`] chains everything behind a flat config file.
//!
//! Runnable walkthroughs for each capability live under `examples/`.

pub mod analytics;
pub mod arco_parser;
pub mod cli;
pub mod emitter;
pub mod enricher;
pub mod evalsuite;
pub mod harvester;
pub mod model;
pub mod rdf;
pub mod symbolkb;
pub mod tsv;
pub mod wd_reengineer;

pub use model::{
    Artwork, DepictedElement, IconClass, InterpretationLevel, Iri, Level, Provenance,
    QualifierRelation, QualifierTarget, Recognition, RelationKind,
};
