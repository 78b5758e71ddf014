use clap::Parser;
use dzeros::cli::{configure_threads, run, Args};

fn main() {
    let args = Args::parse();
    let result = configure_threads().and_then(|()| run(&args));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("dzeros: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
