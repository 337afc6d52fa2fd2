//! The command-line front end driven in-process on the bundled scenarios.

use std::error::Error;
use std::path::PathBuf;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let out = std::env::temp_dir().join(format!("gindex-scan-{}.csv", std::process::id()));
    let scenario = dir.join("hand_fixture.json");
    let code = gindex::cli::run([
        "gindex".as_ref(),
        "scan".as_ref(),
        "--scenario".as_ref(),
        scenario.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    let csv = std::fs::read_to_string(&out)?;
    std::fs::remove_file(&out)?;
    let nonzero: Vec<&str> = csv.lines().filter(|l| l.ends_with(",ok") && !l.contains(",0,")).collect();
    println!("scan exit {code}, probes with nonzero index:");
    for l in &nonzero {
        println!("  {l}");
    }
    assert_eq!(code, 0);
    assert_eq!(nonzero.len(), 2);

    let mutation = dir.join("mutation.json");
    let report = std::env::temp_dir().join(format!("gindex-verify-{}.txt", std::process::id()));
    let code = gindex::cli::run([
        "gindex".as_ref(),
        "verify".as_ref(),
        "--scenario".as_ref(),
        mutation.as_os_str(),
        "--out".as_ref(),
        report.as_os_str(),
    ]);
    let text = std::fs::read_to_string(&report)?;
    std::fs::remove_file(&report)?;
    println!("mutation fixture exit {code}");
    for l in text.lines().filter(|l| l.starts_with("FAIL") || l.starts_with("SUMMARY")) {
        println!("  {l}");
    }
    assert_eq!(code, gindex::cli::EXIT_DISAGREEMENT);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
