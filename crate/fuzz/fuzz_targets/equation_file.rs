#![no_main]

use jetcalc_cli::parse_equation_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_equation_file(text);
    }
});
