use std::process::ExitCode;

fn main() -> ExitCode {
    conecap_cli::run()
}
