use std::io::Write;

fn main() {
    let (code, out) = fine_hierarchy::cli::run(std::env::args_os());
    let _ = if code == 0 {
        std::io::stdout().write_all(out.as_bytes())
    } else {
        std::io::stderr().write_all(out.as_bytes())
    };
    std::process::exit(code);
}
