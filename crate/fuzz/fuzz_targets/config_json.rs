#![no_main]

use killing_graph_cli::config::Config;
use libfuzzer_sys::fuzz_target;

// Grids are not built here: a valid config may legitimately ask for a
// very large one.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = Config::from_json(text) else {
        return;
    };
    let _ = cfg.model();
    let _ = cfg.h();
    let _ = cfg.boundary();
    let _ = cfg.solver();
    let _ = cfg.growth();
});
