//! The document layer behind the command line: build objects by name, write
//! them as JSON, read them back and re-check them.

use std::collections::BTreeMap;

use braidforge::cli::{build, check_document, render};
use braidforge::document::{Document, NLeibnizDoc};
use braidforge::samples::nilpotent_ternary;

fn main() -> braidforge::Result<()> {
    let t3 = Document::Nleibniz(NLeibnizDoc::from_algebra(&nilpotent_ternary()));
    println!("{}", t3.to_json()?);

    let none = BTreeMap::new();
    let bar = build("adjoin-unit", &t3, &none)?;
    let s = build("nyb-central", &bar, &none)?;
    let tilde = build("stilde-from-s", &s, &none)?;
    println!("provenance: {:?}", tilde.meta().map(|m| &m.provenance));

    let reparsed = Document::parse(&tilde.to_json()?)?;
    let outcome = check_document(&reparsed)?;
    println!("re-check after round trip passes: {}", outcome.passed);
    println!("{}", render(&outcome.json));
    Ok(())
}
