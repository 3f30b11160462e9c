#![no_main]

use jetcalc_cli::parse_series;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_series(src, 6) {
        let again = parse_series(&s.to_string(), 6).expect("printed series parses");
        assert_eq!(again, s);
    }
});
