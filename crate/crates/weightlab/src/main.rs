//! Binary entry point; all behavior lives in the `cli` module.

mod cli;

fn main() -> std::process::ExitCode {
    cli::main()
}
