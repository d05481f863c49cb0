use std::path::Path;

use serde_json::Value;

use avsym_cli::goldens::CASES;
use avsym_cli::Format;

/// Set `AVSYM_BLESS=1` to rewrite the expected reports after an intended
/// output change; the next build embeds the new files.
#[test]
fn reports_match_the_shipped_goldens() {
    let bless = std::env::var_os("AVSYM_BLESS").is_some();
    let mut failures = Vec::new();
    for case in CASES {
        let (code, out) = case.run();
        if bless {
            let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(case.expected_path);
            std::fs::write(path, &out).unwrap();
            continue;
        }
        if code != case.exit_code {
            failures.push(format!("{}: exit {code}, expected {}", case.name, case.exit_code));
        }
        if out != case.expected {
            failures.push(format!("{}: report differs\n{out}", case.name));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn goldens_are_reproducible_run_to_run() {
    for case in CASES {
        assert_eq!(case.run(), case.run(), "{}", case.name);
    }
}

fn contains_float(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_f64(),
        Value::Array(a) => a.iter().any(contains_float),
        Value::Object(m) => m.values().any(contains_float),
        Value::String(s) => s.contains('.') && s.parse::<f64>().is_ok(),
        _ => false,
    }
}

#[test]
fn json_goldens_have_no_floating_point_values() {
    for case in CASES.iter().filter(|c| c.format == Format::Json) {
        let v: Value = serde_json::from_str(case.expected).unwrap();
        assert!(!contains_float(&v), "{}", case.name);
    }
}

#[test]
fn text_goldens_have_no_decimal_points() {
    for case in CASES.iter().filter(|c| c.format == Format::Text) {
        let has_decimal = case
            .expected
            .as_bytes()
            .windows(3)
            .any(|w| w[0].is_ascii_digit() && w[1] == b'.' && w[2].is_ascii_digit());
        assert!(!has_decimal, "{}", case.name);
    }
}
