//! Loads a scenario file and prints the SimResult, as `polgate simulate` does.

use std::path::PathBuf;

use polgate::cli::load_scenario;
use polgate::report::to_json_string;
use polgate::simengine::run;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/data/configs/honest.toml"
            ))
        });
    let scenario = load_scenario(&path).unwrap();
    let result = run(&scenario).unwrap();
    println!("{}", to_json_string(&result).unwrap());
}
