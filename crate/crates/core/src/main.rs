use clap::Parser;
use hypext::cli::{run, Cli};

fn main() {
    if let Some(n) = std::env::var("THREADS").ok().and_then(|t| t.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if let Some(err) = out.failed_checks() {
                eprintln!("error: {err}");
                std::process::exit(err.exit_code());
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
