use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = polydl::cli::dispatch(
        std::env::args_os(),
        &mut std::io::stdin(),
        &mut out,
        &mut std::io::stderr(),
    );
    let _ = out.flush();
    std::process::exit(code);
}
