//! Instance documents shipped with the crate and the exact reports they
//! must produce. Used by `selftest` and by the integration tests.

use crate::{emit_report, run_text, Command, Format, Options};

#[derive(Debug, Clone, Copy)]
pub struct GoldenCase {
    pub name: &'static str,
    pub command: Command,
    pub input: &'static str,
    pub seed: u64,
    pub format: Format,
    pub exit_code: i32,
    /// Path of the expected report, relative to the crate root.
    pub expected_path: &'static str,
    pub expected: &'static str,
}

macro_rules! case {
    ($name:literal, $cmd:expr, $input:literal, $seed:expr, $fmt:expr, $code:expr, $exp:literal) => {
        GoldenCase {
            name: $name,
            command: $cmd,
            input: include_str!(concat!("../fixtures/", $input)),
            seed: $seed,
            format: $fmt,
            exit_code: $code,
            expected_path: concat!("fixtures/expected/", $exp),
            expected: include_str!(concat!("../fixtures/expected/", $exp)),
        }
    };
}

pub const CASES: &[GoldenCase] = &[
    case!("snf", Command::Snf, "snf.json", 0, Format::Json, 0, "snf.json"),
    case!("snf-text", Command::Snf, "snf.json", 0, Format::Text, 0, "snf.txt"),
    case!("group-shape-2-4", Command::GroupShape, "group_shape_2_4.json", 0, Format::Json, 1, "group_shape_2_4.json"),
    case!("group-shape-2-2-6-6", Command::GroupShape, "group_shape_2_2_6_6.json", 0, Format::Json, 0, "group_shape_2_2_6_6.json"),
    case!("heisenberg", Command::Heisenberg, "heisenberg.json", 0, Format::Json, 0, "heisenberg.json"),
    case!("build-a-fixture", Command::BuildA, "fixture.json", 0, Format::Json, 0, "build_a_fixture.json"),
    case!("lagrangian-check", Command::LagrangianCheck, "lagrangian_check.json", 0, Format::Json, 0, "lagrangian_check.json"),
    case!("not-lagrangian", Command::LagrangianCheck, "not_lagrangian.json", 0, Format::Json, 1, "not_lagrangian.json"),
    case!("pair-lagrangians", Command::PairLagrangians, "pair_lagrangians.json", 0, Format::Json, 0, "pair_lagrangians.json"),
    case!("find-m", Command::FindM, "find_m.json", 0, Format::Json, 0, "find_m.json"),
    case!("find-m-exhausted", Command::FindM, "find_m_exhausted.json", 0, Format::Json, 3, "find_m_exhausted.json"),
    case!("kernel-mult-2", Command::KernelTest, "kernel_mult_2.json", 0, Format::Json, 0, "kernel_mult_2.json"),
    case!("kernel-2-2-6-6", Command::KernelTest, "kernel_2_2_6_6.json", 0, Format::Json, 0, "kernel_2_2_6_6.json"),
    case!("kernel-1-1-2-4", Command::KernelTest, "kernel_1_1_2_4.json", 0, Format::Json, 1, "kernel_1_1_2_4.json"),
    case!("pipeline-swap", Command::Pipeline, "swap.json", 0, Format::Json, 0, "pipeline_swap.json"),
    case!("pipeline-fixture", Command::Pipeline, "fixture.json", 0, Format::Json, 0, "pipeline_fixture.json"),
    case!("pipeline-fixture-text", Command::Pipeline, "fixture.json", 0, Format::Text, 0, "pipeline_fixture.txt"),
    case!("random-seed-7", Command::Random, "random_params.json", 7, Format::Json, 0, "random_seed_7.json"),
    case!("bad-j", Command::KernelTest, "bad_j.json", 0, Format::Json, 2, "bad_j.json"),
];

impl GoldenCase {
    /// Exit code and rendered report.
    pub fn run(&self) -> (i32, String) {
        let opts = Options {
            seed: self.seed,
            ..Options::default()
        };
        let report = run_text(self.command, Some(self.input), &opts);
        (report.exit_code, emit_report(&report, self.format))
    }

    pub fn check(&self) -> bool {
        let (code, out) = self.run();
        code == self.exit_code && out == self.expected
    }
}

pub fn check_all() -> Vec<(&'static str, bool)> {
    CASES.iter().map(|c| (c.name, c.check())).collect()
}
