//! Prints the JSON schema of `report.json`; `docs/report.schema.json` is its output.

fn main() {
    let s = serde_json::to_string_pretty(&flatfront::validation::report_schema()).unwrap();
    println!("{s}");
}
