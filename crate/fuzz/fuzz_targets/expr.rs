#![no_main]

use jetcalc_cli::parse_expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(e) = parse_expr(src) {
        // whatever parses must print to something that parses back to it
        let again = parse_expr(&e.to_string()).expect("printed expression parses");
        assert_eq!(again, e);
    }
});
