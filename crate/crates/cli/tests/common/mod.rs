#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn udm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udm"))
        .args(args)
        .env("UDM_LOG", "error")
        .output()
        .expect("spawn udm")
}

pub fn ok(args: &[&str]) -> String {
    let out = udm(args);
    assert!(
        out.status.success(),
        "udm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn code(args: &[&str]) -> i32 {
    udm(args).status.code().expect("exit code")
}

pub struct SynthFiles {
    pub dir: PathBuf,
    pub features: String,
    pub descriptions: String,
    pub categories: String,
    pub concept_categories: String,
}

/// A small synthetic set written by the `synth` subcommand.
pub fn synth(dir: &Path, objects: usize, dim: usize, seed: u64) -> SynthFiles {
    let s = |p: &str| dir.join(p).display().to_string();
    ok(&[
        "synth",
        "--objects",
        &objects.to_string(),
        "--dim",
        &dim.to_string(),
        "--categories",
        "2",
        "--seed",
        &seed.to_string(),
        "--out",
        &s(""),
    ]);
    SynthFiles {
        dir: dir.to_path_buf(),
        features: s("features.csv"),
        descriptions: s("descriptions.tsv"),
        categories: s("categories.json"),
        concept_categories: s("concept_categories.tsv"),
    }
}

/// Relative path -> bytes of every file under `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}
