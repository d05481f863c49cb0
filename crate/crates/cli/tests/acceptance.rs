//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines always reach the output.

use std::process::{exit, Command as Proc};
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use avsym_cli::goldens::CASES;
use avsym_core::acceptance::{self, CriterionResult};

const BIN: &str = env!("CARGO_BIN_EXE_avsym");

fn run_bin(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let o = Proc::new(BIN).args(args).output().map_err(|e| e.to_string())?;
    Ok((o.status.code().unwrap_or(-1), o.stdout))
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli_check(cmd: &str, file: &str, want_code: i32, key: &str, want: Value) -> Result<(), String> {
    let (code, out) = run_bin(&[cmd, "--input", &fixture(file), "--format", "json"])?;
    let v: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    if code != want_code || v[key] != want {
        return Err(format!("{cmd} {file}: exit {code}, {key} = {}", v[key]));
    }
    Ok(())
}

fn finish(id: &'static str, budget: u64, start: Instant, r: Result<String, String>) -> CriterionResult {
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let (passed, detail) = match r {
        Ok(d) if elapsed <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over time budget")),
        Err(d) => (false, d),
    };
    CriterionResult { id, passed, detail, elapsed, budget }
}

/// Library decisions plus the same verdicts and exit codes through the binary.
fn square_type_with_cli() -> CriterionResult {
    let start = Instant::now();
    let lib = acceptance::square_type_decisions();
    let r = if !lib.passed {
        Err(lib.detail)
    } else {
        cli_check("group-shape", "group_shape_2_2_6_6.json", 0, "m_list", json!([2, 6]))
            .and_then(|_| cli_check("group-shape", "group_shape_2_4.json", 1, "square_type", json!(false)))
            .and_then(|_| cli_check("kernel-test", "kernel_2_2_6_6.json", 0, "m_list", json!([2, 6])))
            .and_then(|_| cli_check("kernel-test", "kernel_1_1_2_4.json", 1, "kernel", json!([2, 4])))
            .and_then(|_| cli_check("kernel-test", "kernel_mult_2.json", 0, "m_list", json!([2])))
            .map(|_| format!("{}; CLI exit codes 0/1 agree", lib.detail))
    };
    finish("square-type-decision", 5, start, r)
}

/// Every golden case in process, then each one again through the binary.
fn cli_goldens() -> CriterionResult {
    let start = Instant::now();
    let r = (|| {
        for case in CASES {
            if !case.check() {
                return Err(format!("{} differs in process", case.name));
            }
            let format = if case.format == avsym_cli::Format::Json { "json" } else { "text" };
            let seed = case.seed.to_string();
            let file = tempfile_path(case.name, case.input)?;
            let (code, out) = run_bin(&[case.command.name(), "--input", &file, "--format", format, "--seed", &seed])?;
            let _ = std::fs::remove_file(&file);
            if code != case.exit_code || out != case.expected.as_bytes() {
                return Err(format!("{} differs through the binary", case.name));
            }
        }
        Ok(format!("{} reports byte-identical", CASES.len()))
    })();
    finish("cli-goldens", 30, start, r)
}

fn tempfile_path(name: &str, text: &str) -> Result<String, String> {
    let path = std::env::temp_dir().join(format!("avsym-acceptance-{}-{name}.json", std::process::id()));
    std::fs::write(&path, text).map_err(|e| e.to_string())?;
    Ok(path.to_string_lossy().into_owned())
}

fn main() {
    let results = vec![
        acceptance::normal_forms(),
        acceptance::pairing_roundtrip(),
        acceptance::lagrangian_isogenies(),
        acceptance::twisted_models(),
        acceptance::preimages_and_intersections(),
        acceptance::multiplier_search(),
        acceptance::witness_pipeline(),
        square_type_with_cli(),
        cli_goldens(),
    ];
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        exit(1);
    }
}
