//! Regenerates the bundled G2 generator files.

fn main() {
    let dir = std::path::Path::new("data/generators");
    std::fs::create_dir_all(dir).expect("create data/generators");
    for p in [3u64, 5, 7] {
        let text = liepow_core::g2_generator_file(p).expect("derivation");
        let path = dir.join(format!("g2_p{p}.txt"));
        std::fs::write(&path, text).expect("write generator file");
        println!("wrote {}", path.display());
    }
}
