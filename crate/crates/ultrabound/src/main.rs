use std::io::Write;

fn main() {
    let mut out = std::io::stdout().lock();
    let code = ultrabound::cli::run(std::env::args().collect(), &mut out);
    let _ = out.flush();
    std::process::exit(code);
}
