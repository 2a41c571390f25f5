//! Drives the command layer in-process from a TOML string, the same way the
//! `fif` binary does.

use fif::cli::{run, Command, CommonArgs};

const CONFIG: &str = r#"
depth = 8

[x]
kind = "geometric"
offset = 1.0
scale = -1.0
base = 2.0

[y]
kind = "geometric"
offset = 1.0
scale = -1.0
base = 3.0

[y_interval]
lo = 0.0
hi = 1.0

[family]
kind = "A"

[run]
grid = 1024
range_policy = "report"
"#;

pub fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("fif-config-run");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("run.toml");
    std::fs::write(&path, CONFIG)?;

    let args = CommonArgs::new(&path, dir.join("out"));
    for cmd in [Command::Build(args.clone()), Command::Interpolate(args)] {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cmd, &mut out, &mut err);
        print!("{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
        println!("exit code {code}");
    }
    let csv = std::fs::read_to_string(dir.join("out").join("interpolant.csv"))?;
    println!("{} rows, first: {}", csv.lines().count() - 1, csv.lines().nth(1).unwrap_or(""));
    Ok(())
}
