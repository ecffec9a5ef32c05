use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let (code, stdout, stderr) = dynprop_cli::main_with(&argv);
    print!("{stdout}");
    eprint!("{stderr}");
    std::io::stdout().flush().ok();
    ExitCode::from(code)
}
