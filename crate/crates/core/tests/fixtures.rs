use std::path::Path;

#[test]
fn bundled_fixtures_match_the_generator() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (name, bytes) in streetlex::synth::fixture_files() {
        let on_disk = std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(
            on_disk == bytes,
            "{name} is stale; regenerate with `cargo run -p streetlex-core --example make_fixtures`"
        );
    }
}
