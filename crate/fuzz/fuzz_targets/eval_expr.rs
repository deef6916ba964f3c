#![no_main]

use killing_graph::{eval_field, grad_field, parse_expr, Point};
use libfuzzer_sys::fuzz_target;

// The first 16 bytes pick the evaluation point, the rest is the expression.
fuzz_target!(|data: &[u8]| {
    if data.len() < 16 {
        return;
    }
    let (head, tail) = data.split_at(16);
    let x = f64::from_le_bytes(head[..8].try_into().unwrap());
    let y = f64::from_le_bytes(head[8..].try_into().unwrap());
    if !x.is_finite() || !y.is_finite() {
        return;
    }
    let Ok(src) = std::str::from_utf8(tail) else {
        return;
    };
    let Ok(e) = parse_expr(src) else {
        return;
    };
    let p = Point::new(x, y);
    if let Ok(v) = eval_field(&e, p) {
        assert!(v.is_finite());
    }
    if let Ok((gx, gy)) = grad_field(&e, p, None) {
        assert!(gx.is_finite() && gy.is_finite());
    }
});
