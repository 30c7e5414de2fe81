use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let code = convexity::cli::run(&args, &mut stdout.lock());
    ExitCode::from(code)
}
