use std::path::Path;

use killing_graph_cli::config::Config;

fn root() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

#[test]
fn shipped_configs_parse_and_build() {
    let mut n = 0;
    for entry in std::fs::read_dir(root().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = Config::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if cfg.model.is_some() {
            cfg.model().unwrap();
        }
        if cfg.domain.is_some() {
            cfg.domain().unwrap();
        }
        cfg.h().unwrap();
        cfg.solver().unwrap();
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn schema_lists_every_top_level_key() {
    let text = std::fs::read_to_string(root().join("docs/config.schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    let props = schema["properties"].as_object().unwrap();
    let example = |key: &str| match key {
        "h" | "out" => "\"1\"",
        "experiment" => "{}",
        "solver" => "{\"tolerance\": 1e-9}",
        _ => "null",
    };
    for key in props.keys() {
        let cfg = format!("{{\"{key}\": {}}}", example(key));
        assert!(Config::from_json(&cfg).is_ok(), "{key}");
    }
    assert!(Config::from_json("{\"unknown\": 1}").is_err());
    let mut keys: Vec<_> = props.keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "boundary",
            "domain",
            "experiment",
            "growth",
            "h",
            "model",
            "out",
            "radial",
            "solver"
        ]
    );
}
