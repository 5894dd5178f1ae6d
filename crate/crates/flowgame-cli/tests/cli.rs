//! End-to-end checks of the command-line binary: documented example
//! reports, exit codes, determinism, and generator output quality.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flowgame"))
}

fn run_bin<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../instances")
        .join(name)
}

fn instance_arg(name: &str) -> String {
    instance(name).to_string_lossy().into_owned()
}

#[test]
fn parallel_instance_nucleon_matches_the_documented_example() {
    let out = run_bin(["nucleon", &instance_arg("b.fg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("rounds: 1"), "report:\n{text}");
    assert!(text.contains("round 1: epsilon 0"), "report:\n{text}");
    assert!(text.contains("outcome: point"), "report:\n{text}");
    assert!(text.contains("allocation: 1, 1"), "report:\n{text}");
}

#[test]
fn bottleneck_approx_core_matches_the_documented_example() {
    let out = run_bin(["approx-core", &instance_arg("a.fg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("epsilon-star: -1/2"), "report:\n{text}");
    assert!(text.contains("factor: 1/2"), "report:\n{text}");
    assert!(text.contains("vertex-count: 1"), "report:\n{text}");
    assert!(text.contains("vertex: 1/2, 1/2"), "report:\n{text}");
}

#[test]
fn diamond_gamma_of_players_one_and_four_is_one() {
    let out = run_bin(["gamma", &instance_arg("d.fg"), "--coalition", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("coalition: {1,4}"), "report:\n{text}");
    assert!(text.contains("value: 1"), "report:\n{text}");
}

#[test]
fn single_arc_instance_keeps_the_whole_core() {
    let out = run_bin(["nucleon", &instance_arg("c.fg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("whole-core: true"), "report:\n{text}");
    assert!(text.contains("rounds: 0"), "report:\n{text}");
    assert!(text.contains("allocation: 1"), "report:\n{text}");
}

#[test]
fn oracle_and_engine_nucleon_agree_on_the_diamond() {
    let engine = run_bin(["nucleon", &instance_arg("d.fg")]);
    let oracle = run_bin(["nucleon", &instance_arg("d.fg"), "--oracle"]);
    assert_eq!(engine.status.code(), Some(0));
    assert_eq!(oracle.status.code(), Some(0));
    let engine_text = stdout_of(&engine);
    let oracle_text = stdout_of(&oracle);
    for line in [
        "round 1: epsilon 0",
        "round 2: epsilon 1/3",
        "outcome: point",
        "auxiliary: 2/3, 1/3, 1/3, 2/3",
        "allocation: 2/3, 1/3, 1/3, 2/3",
    ] {
        assert!(engine_text.contains(line), "engine report:\n{engine_text}");
        assert!(oracle_text.contains(line), "oracle report:\n{oracle_text}");
    }
}

#[test]
fn validation_failures_print_the_violation_and_exit_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bad.fg");
    std::fs::write(
        &path,
        "vertices 3\nsource s\nsink t\narc s t public\narc s t private 1\narc s u private 2\n",
    )
    .expect("write instance");
    let out = run_bin(["validate".as_ref(), path.as_os_str()]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout_of(&out);
    assert!(text.contains("status: invalid"), "report:\n{text}");
    assert!(text.contains("violation: public-path 0"), "report:\n{text}");
    assert!(text.contains("violation: off-path-arc 2"), "report:\n{text}");

    let solve = run_bin(["nucleon".as_ref(), path.as_os_str()]);
    assert_eq!(solve.status.code(), Some(2));
    assert!(stderr_of(&solve).contains("structural assumptions"));
}

#[test]
fn usage_problems_exit_one() {
    let missing = run_bin(["validate", "no-such-file.fg"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr_of(&missing).contains("cannot read"));

    let unknown = run_bin(["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));

    let bad_player = run_bin(["gamma", &instance_arg("d.fg"), "--coalition", "1,9"]);
    assert_eq!(bad_player.status.code(), Some(1));
    assert!(stderr_of(&bad_player).contains("player 9"));

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("mangled.fg");
    std::fs::write(&path, "vertices two\n").expect("write instance");
    let mangled = run_bin(["validate".as_ref(), path.as_os_str()]);
    assert_eq!(mangled.status.code(), Some(1));
}

#[test]
fn size_guards_exit_three() {
    let gen = run_bin(["gen", "--seed", "1", "--private", "13"]);
    assert_eq!(gen.status.code(), Some(3));

    // Thirteen parallel private arcs exceed the exhaustive path-family
    // guard used by the oracle suite.
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("wide.fg");
    let mut text = String::from("vertices 2\nsource s\nsink t\n");
    for player in 1..=13 {
        text.push_str(&format!("arc s t private {player}\n"));
    }
    std::fs::write(&path, text).expect("write instance");
    let out = run_bin(["oracle".as_ref(), path.as_os_str()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generated_instances_are_deterministic_and_valid() {
    let first = run_bin(["gen", "--seed", "1", "--private", "4"]);
    let second = run_bin(["gen", "--seed", "1", "--private", "4"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(stderr_of(&first).starts_with("attempts: "));

    let other = run_bin(["gen", "--seed", "2", "--private", "4"]);
    assert_ne!(first.stdout, other.stdout);

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("gen.fg");
    std::fs::write(&path, &first.stdout).expect("write instance");
    let check = run_bin(["validate".as_ref(), path.as_os_str()]);
    assert_eq!(check.status.code(), Some(0));
    assert!(stdout_of(&check).contains("status: clean"));
}

#[test]
fn seed_sweep_instances_pass_the_exhaustive_sigma_checks() {
    use flowgame::flowcore::max_partially_disjoint;
    use flowgame::netmodel::ArcId;
    use flowgame::reforacle::brute_sigma;

    for seed in 1..=100 {
        let generated = flowgame_cli::instancegen::generate_instance(seed, 5, 6, 2)
            .expect("every sweep seed generates");
        let net = generated.network;
        assert_eq!(net.player_count(), 6, "seed {seed}");
        let private = net.private_arc_ids();
        let all: BTreeSet<ArcId> = net.arc_ids().collect();
        for family in [&private, &all] {
            let brute = brute_sigma(&net, family).expect("within oracle limits");
            let fast = max_partially_disjoint(&net, family).expect("no all-public path");
            assert_eq!(brute.value, fast.value, "seed {seed}");
            assert!(
                brute.min_cuts.contains(&fast.min_cut),
                "seed {seed}: solver cut missing from exhaustive cut list"
            );
        }
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let names = ["a.fg", "b.fg", "c.fg", "d.fg"];
    for name in names {
        let arg = instance_arg(name);
        for subcommand in [
            vec!["validate", arg.as_str()],
            vec!["approx-core", arg.as_str()],
            vec!["nucleon", arg.as_str()],
            vec!["nucleon", arg.as_str(), "--oracle"],
            vec!["oracle", arg.as_str()],
        ] {
            let first = run_bin(subcommand.iter());
            let second = run_bin(subcommand.iter());
            assert_eq!(
                first.stdout, second.stdout,
                "{subcommand:?} differed between runs"
            );
            assert_eq!(first.status.code(), second.status.code());
        }
    }
}

#[test]
fn core_check_accepts_a_reported_vertex_and_rejects_a_skewed_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    let good = dir.path().join("good.alloc");
    std::fs::write(&good, "# optimal approximate core vertex\n1 1/2\n2 1/2\n")
        .expect("write allocation");
    let out = run_bin([
        "core-check".as_ref(),
        instance(&"a.fg".to_string()).as_os_str(),
        "--alloc".as_ref(),
        good.as_os_str(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("verdict: member"));

    let bad = dir.path().join("bad.alloc");
    std::fs::write(&bad, "1 1/2\n2 0\n").expect("write allocation");
    let out = run_bin([
        "core-check".as_ref(),
        instance(&"a.fg".to_string()).as_os_str(),
        "--alloc".as_ref(),
        bad.as_os_str(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("verdict: not-efficient"), "report:\n{text}");

    let broken = dir.path().join("broken.alloc");
    std::fs::write(&broken, "1 1/2\n1 1/2\n").expect("write allocation");
    let out = run_bin([
        "core-check".as_ref(),
        instance(&"a.fg".to_string()).as_os_str(),
        "--alloc".as_ref(),
        broken.as_os_str(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("listed twice"));
}

#[test]
fn auxiliary_scale_checks_against_the_unscaled_core() {
    let dir = tempfile::tempdir().expect("tempdir");
    let alloc = dir.path().join("aux.alloc");
    // (1, 1) totals sigma-private on the bottleneck instance, so it is an
    // auxiliary-core point even though the original-scale core is smaller.
    std::fs::write(&alloc, "1 1\n2 1\n").expect("write allocation");
    let out = run_bin([
        "core-check".as_ref(),
        instance(&"a.fg".to_string()).as_os_str(),
        "--alloc".as_ref(),
        alloc.as_os_str(),
        "--scale".as_ref(),
        "auxiliary".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("scale: auxiliary"), "report:\n{text}");
    assert!(text.contains("factor: 1"), "report:\n{text}");
    assert!(text.contains("verdict: member"), "report:\n{text}");
}
