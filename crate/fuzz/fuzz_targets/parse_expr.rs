#![no_main]

use killing_graph::parse_expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    match parse_expr(src) {
        Ok(e) => {
            // Printing must reparse to the same tree.
            let printed = e.to_string();
            let again = parse_expr(&printed).expect("printed expression reparses");
            assert_eq!(again, e, "{src:?} printed as {printed:?}");
        }
        Err(err) => assert!(err.offset() <= src.len()),
    }
});
