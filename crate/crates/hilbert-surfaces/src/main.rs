//! Entry point of the `hilbert-surfaces` command line tool.

fn main() -> std::process::ExitCode {
    hilbert_surfaces::cli::main()
}
