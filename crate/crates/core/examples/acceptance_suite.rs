//! Runs the end-to-end acceptance criteria and prints one line each.

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let results = opdop::acceptance::run_all(seed);
    for r in &results {
        println!("{}", r.line());
    }
    println!("{}/{} passed", results.iter().filter(|r| r.pass).count(), results.len());
}
