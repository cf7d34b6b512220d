#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const CUBIC: &str = r#"
[problem]
dimension = 1
components = 1
masses = [1.0]
cells = 4096
r_max = 20.0

[nonlinearity]
family = "power"
exponent = 2.0
beta = 0.0
"#;

pub const FAMILY_R: &str = r#"
[problem]
dimension = 2
components = 2
masses = [1.0, 2.0]
cells = 512
r_max = 30.0

[nonlinearity]
family = "family_r"
terms = [[0.5, 0.5]]
a = { breakpoints = [3.0], levels = [2.0, 1.0] }
b = 0.2

[nonlinearity.lower_bound]
r1 = 1.0
s1 = 1.0
a = [0.2, 0.2]
t = [0.0, 0.0]
sigma = [0.0, 0.0]
"#;

pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    pub fn json(&self, name: &str) -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(self.path(name)).unwrap()).unwrap()
    }

    /// Runs `nls-ground <cmd> <config> --out-dir <out> --quiet <extra…>`.
    pub fn run(&self, cmd: &str, config: &Path, out: &str, extra: &[&str]) -> Output {
        let out_dir = self.path(out);
        Command::new(env!("CARGO_BIN_EXE_nls-ground"))
            .arg(cmd)
            .arg(config)
            .arg("--out-dir")
            .arg(&out_dir)
            .arg("--quiet")
            .args(extra)
            .output()
            .unwrap()
    }
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}
