//! Drives the command-line front end from a config written on the fly:
//! `compute`, `verify` and `report` into a scratch directory.
//!
//! `cargo run --release --example cli_verify`

use pinlab::cli;

const CONFIG: &str = r#"
[model]
kind = "power_law"
alpha = 1.0
ell = { kind = "constant", c = 1.0 }
n_max = 4096

[disorder]
family = "gaussian"
sigma = 1.0

[grids]
h_values = [1.0, 3.0]
n_values = [64, 128, 256]

[run]
master_seed = 2024
samples = 32

[checks]
select = ["C9", "C10", "C13"]
oracle_instances = 40
bound_n = 64
fraction_n = [16, 32, 48]
"#;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join(format!("pinlab-cli-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("run.toml");
    std::fs::write(&config, CONFIG)?;
    let (c, o) = (config.to_string_lossy().into_owned(), dir.join("out").to_string_lossy().into_owned());

    for cmd in ["compute", "verify"] {
        let code = cli::run(["pinlab", cmd, "--config", &c, "--out", &o]);
        println!("{cmd}: exit {code}\n");
    }
    let code = cli::run(["pinlab", "report", "--out", &o]);
    println!("report: exit {code}");

    let csv = std::fs::read_to_string(dir.join("out").join(cli::SERIES_FILE))?;
    println!("\nfirst rows of {}:", cli::SERIES_FILE);
    for line in csv.lines().take(6) {
        println!("  {line}");
    }
    std::fs::remove_dir_all(&dir)
}
