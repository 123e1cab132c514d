use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sciarchive::amsbib::{parse_bytes, parse_str, render, Format, ParsedReference};

use super::Check;

pub fn corpus() -> Vec<String> {
    include_str!("../data/amsbib_corpus.txt")
        .split("\n\n")
        .map(str::trim)
        .filter(|b| !b.is_empty())
        .map(str::to_string)
        .collect()
}

fn canonical(r: &ParsedReference) -> String {
    render(r, Format::Amsbib)
}

/// parse∘render is a fixpoint and the canonical form is idempotent.
fn roundtrip(src: &str) -> Result<(), String> {
    let r = parse_str(src).map_err(|e| format!("{e}: {src}"))?.reference;
    let once = canonical(&r);
    let again = parse_str(&once).map_err(|e| format!("canonical form failed to parse: {e}\n{once}\nfrom {src:?}"))?.reference;
    if again != r {
        return Err(format!("round-trip changed\n{src}"));
    }
    if canonical(&again) != once {
        return Err(format!("canonical form not idempotent\n{src}"));
    }
    Ok(())
}

pub fn check_corpus() -> Check {
    let refs = corpus();
    if refs.len() < 50 {
        return Err(format!("corpus has only {} references", refs.len()));
    }
    for src in &refs {
        roundtrip(src)?;
    }
    Ok(format!("{} corpus references round-trip", refs.len()))
}

const FRAGMENTS: [&str; 34] = [
    "\\by ", "\\paper ", "\\book ", "\\jour ", "\\yr ", "\\vol ", "\\issue ", "\\pages ", "\\extra ", "\\crossref", "\\mathnet",
    "\\mathscinet ", "\\zmath ", "\\adsnasa ", "\\isi ", "\\elink", "\\RBibitem", "\\thesis ", "{", "}", "{", "}", "$", "%", "\n",
    "~", "--", ", ", "\\'", "\\", "2001", "A.~B.~Name", "Ω", " ",
];

fn soup(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let n = rng.gen_range(0..30);
    let mut s = String::new();
    for _ in 0..n {
        if rng.gen_bool(0.7) {
            s.push_str(FRAGMENTS.choose(rng).expect("fragments"));
        } else {
            let len = rng.gen_range(1..8);
            s.extend((0..len).map(|_| rng.gen_range(b'a'..=b'z') as char));
        }
    }
    s.into_bytes()
}

fn mutate(rng: &mut ChaCha8Rng, base: &[u8]) -> Vec<u8> {
    let mut b = base.to_vec();
    for _ in 0..rng.gen_range(1..4) {
        let at = rng.gen_range(0..=b.len());
        match rng.gen_range(0..3) {
            0 if at < b.len() => {
                let end = rng.gen_range(at..=b.len().min(at + 8));
                b.drain(at..end);
            }
            1 => b.insert(at, rng.gen()),
            _ => {
                let f = FRAGMENTS.choose(rng).expect("fragments").as_bytes();
                b.splice(at..at, f.iter().copied());
            }
        }
    }
    b
}

/// `inputs` random byte strings, token soups and corpus mutations. None
/// may panic; those that parse must also render and round-trip.
pub fn fuzz(inputs: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus: Vec<Vec<u8>> = corpus().into_iter().map(String::into_bytes).collect();
    let mut parsed = 0;
    for k in 0..inputs {
        let input = match k % 3 {
            0 => (0..rng.gen_range(0..200)).map(|_| rng.gen()).collect(),
            1 => soup(&mut rng),
            _ => {
                let base = corpus.choose(&mut rng).expect("corpus");
                mutate(&mut rng, base)
            }
        };
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            let out = parse_bytes(&input).ok()?;
            for f in [Format::Amsbib, Format::Plain, Format::Html, Format::Xml] {
                render(&out.reference, f);
            }
            Some(roundtrip(std::str::from_utf8(&input).expect("parsed input is UTF-8")))
        }));
        match outcome {
            Err(_) => return Err(format!("panic on input {:?}", String::from_utf8_lossy(&input))),
            Ok(Some(Err(e))) => return Err(e),
            Ok(Some(Ok(()))) => parsed += 1,
            Ok(None) => {}
        }
    }
    Ok(format!("{inputs} fuzz inputs without a crash, {parsed} parsed and round-tripped"))
}
