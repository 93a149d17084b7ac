fn main() {
    if let Err(e) = fusenews::cli::run(std::env::args_os()) {
        eprintln!("error: {e}");
        std::process::exit(e.code as i32);
    }
}
