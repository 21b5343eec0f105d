//! A painting depicting a cat, a one-row symbol KB, and the resulting
//! interpretation.

use std::collections::BTreeSet;

use iiconforge::enricher::{enrich, IdAlignment};
use iiconforge::model::{DepictedElement, ElementTable, IconClass, InterpretationLevel, Iri, Provenance, Recognition};
use iiconforge::symbolkb::{KbBuilder, Simulation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cat_symbol = Iri::new("https://w3id.org/hyperreal/symbol/cat")?;
    let mut kb = KbBuilder::new();
    kb.add_simulation(Simulation {
        symbol: cat_symbol.clone(),
        meaning: Iri::new("https://w3id.org/hyperreal/meaning/divinity")?,
        context: "Egyptian".into(),
    });
    kb.add_label("cat", cat_symbol);
    let (kb, _) = kb.finish()?;

    let cat = Iri::new("http://www.wikidata.org/entity/Q146")?;
    let mut elements = ElementTable::new();
    elements.insert(cat.clone(), DepictedElement { id: cat.clone(), label: "Cat".into(), type_ids: BTreeSet::new() });
    let recs: BTreeSet<Recognition> = [Recognition::new(
        Iri::new("http://www.wikidata.org/entity/Q9100000")?,
        cat,
        InterpretationLevel::of_class(IconClass::NaturalElement),
        Provenance::SourceKG,
    )]
    .into();

    let out = enrich(&recs, &elements, &kb, &IdAlignment::new());
    for i in &out.interpretations {
        println!("{}", serde_json::to_string_pretty(i)?);
    }
    println!("{:?}", out.summary(&recs));
    Ok(())
}
