//! Parses an AMSBIB reference and prints it in every output format.
//!
//!     cargo run -p sciarchive --example parse_reference -- '\by ... \paper ...'

use sciarchive::amsbib::{parse_str, render, Format};

const SAMPLE: &str = r"\by A.~N.~Kolmogorov
\paper The local structure of turbulence
\jour Dokl. Akad. Nauk SSSR
\yr 1941
\vol 30
\issue 4
\pages 301--305
\mathnet{dan4467}";

fn main() {
    let source = std::env::args().nth(1).unwrap_or_else(|| SAMPLE.to_string());
    let outcome = match parse_str(&source) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("not an AMSBIB reference: {e}");
            std::process::exit(1);
        }
    };
    for w in &outcome.warnings {
        println!("warning: {w:?}");
    }
    let r = &outcome.reference;
    println!("{} author(s), year {:?}, pages {:?}", r.authors.len(), r.year, r.pages);
    for format in [Format::Amsbib, Format::Plain, Format::Html, Format::Xml] {
        println!("\n[{format:?}]\n{}", render(r, format));
    }
}
