//! Driving the command-line front end from code: a TOML config plus flag
//! overrides, outputs collected in memory.

use clap::Parser;
use espr::cli::{execute, Cli};

const CONFIG: &str = "\
[model]
p = 0.7
m = 2
delete = \"uniform\"
n_cap = 40

[solver]
tol = 1e-10
";

fn main() {
    let dir = std::env::temp_dir().join("espr-config-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("run.toml");
    std::fs::write(&path, CONFIG).expect("write config");

    let cli = Cli::parse_from([
        "espr",
        "solve",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--p",
        "0.6",
    ]);
    match execute(&cli) {
        Ok(out) => {
            for f in &out.files {
                println!("== {} ({} bytes)", f.name, f.contents.len());
            }
            println!(
                "{}",
                out.files[0].contents.lines().take(12).collect::<Vec<_>>().join("\n")
            );
            println!("exit status {:?}", out.status);
        }
        Err(f) => eprintln!("error: {}", f.message),
    }
}
