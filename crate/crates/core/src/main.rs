use clap::Parser;

use ultrachain::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    print!("{}", out.stdout);
    if out.code == 2 {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(&out.stdout) {
            if let Some(m) = v.get("message").and_then(|m| m.as_str()) {
                eprintln!("error: {m}");
            }
        }
    }
    std::process::exit(out.code);
}
