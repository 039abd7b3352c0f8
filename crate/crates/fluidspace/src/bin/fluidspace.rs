use std::process::ExitCode;

fn main() -> ExitCode {
    fluidspace::cli::main()
}
