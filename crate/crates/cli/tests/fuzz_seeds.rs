//! Replays the fuzz corpus, plus seeded byte mutations of it, through the
//! properties the fuzz targets assert. Runs on stable without libFuzzer.

use std::path::Path;

use jetcalc_cli::{parse_equation_file, parse_expr, parse_series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MUTATIONS: usize = 300;
const ALPHABET: &[u8] = b"u_x5t()^*/+-'{}0123456789 xi fOlnrhatbg.,\"[]:";

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> =
        std::fs::read_dir(dir).unwrap().map(|e| std::fs::read(e.unwrap().path()).unwrap()).collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn mutate(rng: &mut ChaCha8Rng, seed: &[u8]) -> Vec<u8> {
    let mut v = seed.to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let at = rng.gen_range(0..=v.len());
        match rng.gen_range(0..3) {
            0 => v.insert(at, ALPHABET[rng.gen_range(0..ALPHABET.len())]),
            1 if at < v.len() => {
                v.remove(at);
            }
            _ if at < v.len() => v[at] = ALPHABET[rng.gen_range(0..ALPHABET.len())],
            _ => {}
        }
    }
    v
}

fn inputs(target: &str, salt: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ salt);
    let seeds = seeds(target);
    let mut out: Vec<Vec<u8>> = seeds.clone();
    for i in 0..MUTATIONS {
        out.push(mutate(&mut rng, &seeds[i % seeds.len()]));
    }
    out.into_iter().filter_map(|b| String::from_utf8(b).ok()).collect()
}

#[test]
fn expr_seeds() {
    for src in inputs("expr", 1) {
        if let Ok(e) = parse_expr(&src) {
            assert_eq!(parse_expr(&e.to_string()).as_ref(), Ok(&e), "{src:?}");
        }
    }
}

#[test]
fn series_seeds() {
    for src in inputs("series", 2) {
        if let Ok(s) = parse_series(&src, 6) {
            assert_eq!(parse_series(&s.to_string(), 6).as_ref(), Ok(&s), "{src:?}");
        }
    }
}

#[test]
fn equation_file_seeds() {
    let accepted = inputs("equation_file", 3).iter().filter(|t| parse_equation_file(t).is_ok()).count();
    assert!(accepted >= 6);
}

#[test]
fn hostile_nesting_is_an_error() {
    let deep = "(".repeat(100_000) + "u";
    assert!(parse_expr(&deep).is_err());
    let minus = "-".repeat(100_000) + "u";
    assert!(parse_series(&minus, 6).is_err());
    assert!(parse_expr("(u + b)^100000").is_err());
}
