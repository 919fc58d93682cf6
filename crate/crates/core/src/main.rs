use std::io::IsTerminal;
use std::process::ExitCode;

fn main() -> ExitCode {
    let color = match std::env::var("CAFCOAL_COLOR").as_deref() {
        Err(_) | Ok("auto") => std::io::stderr().is_terminal(),
        Ok("never") => false,
        Ok(other) => {
            eprintln!("error: CAFCOAL_COLOR must be `auto` or `never`, not `{other}`");
            return ExitCode::from(2);
        }
    };
    let code = cafcoal::cli::run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
        color,
    );
    ExitCode::from(code)
}
