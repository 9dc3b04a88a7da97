use std::io::Write;

fn main() {
    let env = std::env::var(heightlab_cli::commands::PRECISION_ENV).ok();
    let (code, out, err) = heightlab_cli::run_args(std::env::args_os(), env.as_deref());
    print!("{out}");
    let _ = std::io::stdout().flush();
    eprint!("{err}");
    std::process::exit(code);
}
