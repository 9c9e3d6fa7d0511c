#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn spatent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spatent")).args(args).output().expect("spawn spatent")
}

pub fn schema() -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/result.schema.json");
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&raw).expect("schema compiles")
}

/// Validation messages, empty when `doc` conforms.
pub fn violations(schema: &JSONSchema, doc: &Value) -> Vec<String> {
    match schema.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    }
}

/// One invocation per subcommand over the shipped fixtures.
pub fn subcommand_cases(tmp: &Path) -> Vec<(&'static str, Vec<String>)> {
    let f = |n: &str| fixture(n).display().to_string();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("shannon", s(&["shannon", "--grid", &f("bologna.txt")])),
        ("shannon", s(&["shannon", "--points", &f("rainforest.csv")])),
        ("shannon-z", s(&["shannon-z", "--grid", &f("checker.txt")])),
        ("batty", s(&["batty", "--grid", &f("bologna.txt"), "--category", "1", "--centroids", &f("centroids.csv")])),
        (
            "batty",
            s(&["batty", "--points", &f("rainforest.csv"), "--category", "rinosy", "--areas", "4", "--seed", "11"]),
        ),
        (
            "karlstrom",
            s(&[
                "karlstrom",
                "--grid",
                &f("bologna.txt"),
                "--category",
                "1",
                "--centroids",
                &f("centroids.csv"),
                "--neigh-dist",
                "15",
            ]),
        ),
        ("oneill", s(&["oneill", "--grid", &f("bologna.txt")])),
        ("contagion", s(&["contagion", "--grid", &f("bologna.txt")])),
        ("contagion", s(&["contagion", "--entropy", "1.070045", "--n-cat", "2"])),
        ("parresol", s(&["parresol", "--grid", &f("checker.txt")])),
        ("leibovici", s(&["leibovici", "--points", &f("rainforest.csv"), "--d1", "10"])),
        ("leibovici", s(&["leibovici", "--grid", &f("checker.txt"), "--d0", "1", "--d1", "1.5", "--ordered", "false"])),
        ("decompose", s(&["decompose", "--grid", &f("checker.txt"), "--breaks", "0,1,2"])),
        ("decompose", s(&["decompose", "--points", &f("rainforest.csv")])),
        (
            "synth",
            s(&["synth", "--kind", "bernoulli", "--rows", "10", "--cols", "10", "--p", "0.5", "--seed", "7", "--out"])
                .into_iter()
                .chain([tmp.join("synth.txt").display().to_string()])
                .collect(),
        ),
        (
            "synth",
            s(&["synth", "--kind", "clustered-points", "--parents", "4", "--offspring", "5", "--out"])
                .into_iter()
                .chain([tmp.join("synth.csv").display().to_string()])
                .collect(),
        ),
    ]
}
