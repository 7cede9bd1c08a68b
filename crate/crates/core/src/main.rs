use std::io;

fn main() {
    qdyn_core::cli::init_logging();
    let code = qdyn_core::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
