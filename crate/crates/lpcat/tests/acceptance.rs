//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lpcat::format::to_json_bytes;
use lpcat::suite::{bits_suite, e0_suite, norm_suite, rotation_suite, roundtrip_suite, unit_suite};
use lpcat::CliResult;

const SEED: u64 = 20_240_531;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> CliResult<T>) -> (CliResult<T>, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

/// The six reports, serialized, with the wall time of each.
fn reports() -> Vec<(CliResult<Vec<u8>>, Duration)> {
    fn bytes<T: serde::Serialize>(r: (CliResult<T>, Duration)) -> (CliResult<Vec<u8>>, Duration) {
        (r.0.map(|v| to_json_bytes(&v)), r.1)
    }
    Vec::from([
        bytes(timed(|| norm_suite(SEED, 500))),
        bytes(timed(|| unit_suite(40))),
        bytes(timed(|| e0_suite(12))),
        bytes(timed(|| bits_suite(20))),
        bytes(timed(|| roundtrip_suite(SEED, 20))),
        bytes(timed(|| rotation_suite(SEED, 100))),
    ])
}

fn judge(run: &(CliResult<Vec<u8>>, Duration), budget: Option<Duration>, check: impl Fn(&serde_json::Value) -> Outcome) -> Outcome {
    let (r, t) = run;
    let v: serde_json::Value = match r {
        Ok(b) => serde_json::from_slice(b).expect("reports are JSON"),
        Err(e) => return Outcome { pass: false, detail: format!("error: {e}") },
    };
    let mut o = check(&v);
    o.detail = format!("{} ({:.1} s)", o.detail, t.as_secs_f64());
    if let Some(b) = budget {
        if *t >= b {
            o.pass = false;
            o.detail = format!("{}, over the {} s budget", o.detail, b.as_secs());
        }
    }
    o
}

fn flag(v: &serde_json::Value) -> bool {
    v["passed"].as_bool() == Some(true)
}

fn main() -> ExitCode {
    let first = reports();
    let mut lines = Vec::new();

    lines.push((
        "norm algorithm agrees with the coordinate expansion",
        judge(&first[0], Some(Duration::from_secs(60)), |v| Outcome {
            pass: flag(v),
            detail: format!("{}/{} within 2*2^-k", v["within"], v["cases"].as_array().map_or(0, Vec::len)),
        }),
    ));
    lines.push((
        "||f_0|| = 1",
        judge(&first[1], None, |v| {
            let misses: usize = v["rows"].as_array().into_iter().flatten().map(|r| r["misses"].as_array().map_or(0, Vec::len)).sum();
            let strict = v["sandwiches"].as_array().into_iter().flatten().filter(|s| s["strict"] == true).count();
            Outcome { pass: flag(v), detail: format!("{misses} misses for k <= 40, {strict} strict p = 1 sandwiches") }
        }),
    ));
    lines.push((
        "e_0 approximation certificates",
        judge(&first[2], None, |v| {
            let rows = v["rows"].as_array().map_or(0, Vec::len);
            let ok = v["rows"].as_array().into_iter().flatten().filter(|r| r["ok"] == true).count();
            Outcome {
                pass: flag(v),
                detail: format!("{ok}/{rows} below 2^-k, reference instance {}", v["reference_instance"]),
            }
        }),
    ));
    lines.push((
        "bit extraction and fault detection",
        judge(&first[3], Some(Duration::from_secs(120)), |v| {
            let runs: Vec<String> = v["runs"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|r| {
                    let tag = if r["fault"].is_string() { "fault" } else { "clean" };
                    format!("{}@{} {tag} {}", r["set"].as_str().unwrap_or("?"), r["p"].as_str().unwrap_or("?"), r["agreement_from_one"].as_str().unwrap_or("?"))
                })
                .collect();
            Outcome { pass: flag(v), detail: runs.join(", ") }
        }),
    ));
    lines.push((
        "descriptor ball maps round trip",
        judge(&first[4], None, |v| {
            let ok = v["runs"].as_array().into_iter().flatten().filter(|r| r["ok"] == true).count();
            Outcome { pass: flag(v), detail: format!("{ok}/{} descriptors pass the checker and conform", v["runs"].as_array().map_or(0, Vec::len)) }
        }),
    ));
    lines.push((
        "rotation at p = 2 and p = 1",
        judge(&first[5], None, |v| Outcome {
            pass: flag(v),
            detail: format!(
                "p=2 preserved {}/{}, classifier {}; p=1 counterexample {}",
                v["at_two"]["preserved"],
                v["at_two"]["samples"],
                v["at_two"]["classifier"]["verdict"].as_str().unwrap_or("?"),
                !v["at_one"]["counterexample"].is_null()
            ),
        }),
    ));
    lines.push((
        "oracle discipline",
        judge(&first[0], None, |v| {
            let log = &v["discipline_log"];
            let pass = v["discipline_violations"] == 0 && log[1] == 0 && log[2] == 0 && log[0].as_u64().unwrap_or(0) > 0;
            Outcome {
                pass,
                detail: format!("{} violations in {} logged queries, {} decide calls", v["discipline_violations"], log[0], log[2]),
            }
        }),
    ));

    let second = reports();
    let identical = first.iter().zip(&second).filter(|(a, b)| matches!((&a.0, &b.0), (Ok(x), Ok(y)) if x == y)).count();
    lines.push((
        "reports are byte-identical across runs",
        Outcome { pass: identical == first.len(), detail: format!("{identical}/{} reports identical", first.len()) },
    ));

    let mut failed = 0;
    for (i, (name, o)) in lines.iter().enumerate() {
        println!("criterion {} [{}] {}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
