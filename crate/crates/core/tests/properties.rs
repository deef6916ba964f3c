use killing_graph::operator::{angle_function, area_element};
use killing_graph::*;
use proptest::prelude::*;

fn expr_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("r".to_string()),
        Just("pi".to_string()),
        (-50i32..50).prop_map(|k| format!("{}", k as f64 / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                inner.clone(),
                prop::sample::select(vec!["+", "-", "*", "/", "^"])
            )
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (
                inner.clone(),
                prop::sample::select(vec!["sin", "cos", "atan", "tanh", "abs"])
            )
                .prop_map(|(a, f)| format!("{f}({a})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("max({a}, {b})")),
            Just("-x".to_string()),
        ]
    })
}

proptest! {
    // Arbitrary token soup: parsing never panics, errors point inside the
    // input, and whatever parses also survives printing.
    #[test]
    fn token_soup_parses_or_fails_cleanly(src in "[-+*/^(), .0-9xyrepisqtnlogmabc]{0,40}", x in -3.0f64..3.0, y in -3.0f64..3.0) {
        match parse_expr(&src) {
            Ok(e) => {
                prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e.clone());
                if let Ok(v) = eval_field(&e, Point::new(x, y)) {
                    prop_assert!(v.is_finite());
                }
            }
            Err(err) => prop_assert!(err.offset() <= src.len()),
        }
    }

    #[test]
    fn display_round_trips(src in expr_strategy()) {
        let e = parse_expr(&src).unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        prop_assert_eq!(&e, &again);
    }

    #[test]
    fn cubic_gradients_are_accurate(c in prop::array::uniform8(-3.0f64..3.0), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let src = format!(
            "{} + {}*x + {}*y + {}*x*y + {}*x^2 + {}*y^3 + {}*x^2*y + {}*x^3",
            c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]
        );
        let e = parse_expr(&src).unwrap();
        let (gx, gy) = grad_field(&e, Point::new(x, y), None).unwrap();
        let wx = c[1] + c[3] * y + 2.0 * c[4] * x + 2.0 * c[6] * x * y + 3.0 * c[7] * x * x;
        let wy = c[2] + c[3] * x + 3.0 * c[5] * y * y + c[6] * x * x;
        prop_assert!((gx - wx).abs() <= 1e-8 * (1.0 + wx.abs()));
        prop_assert!((gy - wy).abs() <= 1e-8 * (1.0 + wy.abs()));
    }

    #[test]
    fn area_element_and_angle_bounds(vals in prop::collection::vec(-5.0f64..5.0, 49), tau in -1.0f64..1.0) {
        let m = builtin_model(&Preset::Nil3 { tau }).unwrap();
        let d = GridDomain::rectangle((-1.0, 1.0, -1.0, 1.0), 6, 6, &BoundarySpec::uniform(ScalarField::zero())).unwrap();
        let u = ScalarGrid { values: vals };
        for idx in d.interior_nodes() {
            let w = area_element(&m, &d, &u, idx).unwrap();
            let nu = angle_function(&m, &d, &u, idx).unwrap();
            prop_assert!(w >= 1.0);
            prop_assert!(nu > 0.0 && nu <= 1.0);
        }
    }
}
