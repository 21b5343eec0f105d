//! Emits the same recognitions in the shortcut and the full shape and
//! prints both, plus the full shape as Turtle.

use std::collections::BTreeSet;

use iiconforge::emitter::{emit_full, emit_shortcut, read_full, to_turtle, VocabularyProfile};
use iiconforge::model::{IconClass, InterpretationLevel, Iri, Provenance, QualifierTarget, Recognition, RelationKind};
use iiconforge::rdf::to_canonical_ntriples;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = VocabularyProfile::default();
    let painting = Iri::new("http://www.wikidata.org/entity/Q9100001")?;
    let mut mary = Recognition::new(
        painting.clone(),
        Iri::new("http://www.wikidata.org/entity/Q345")?,
        InterpretationLevel::of_class(IconClass::Character),
        Provenance::SourceKG,
    );
    mary.add_qualifier(RelationKind::Wears, QualifierTarget::Element(Iri::new("http://www.wikidata.org/entity/Q1065579")?));
    let lily = Recognition::new(
        painting,
        Iri::new("http://www.wikidata.org/entity/Q5715")?,
        InterpretationLevel::of_class(IconClass::NaturalElement),
        Provenance::SourceKG,
    );
    let recs: BTreeSet<Recognition> = [mary, lily].into();

    let short = emit_shortcut(&recs, [], &profile)?;
    let full = emit_full(&recs, [], &profile)?;
    println!("# shortcut: {} triples\n{}", short.len(), to_canonical_ntriples(&short));
    println!("# full: {} triples\n{}", full.len(), to_canonical_ntriples(&full));
    println!("{}", to_turtle(&full, &profile));

    let back = read_full(&full, &profile)?;
    println!("read back {} recognitions", back.recognitions.len());
    Ok(())
}
