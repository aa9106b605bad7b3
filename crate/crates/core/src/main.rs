fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = clex::cli::run(std::env::args_os().collect()) {
        eprintln!("{}", clex::cli::error_json(&e));
        std::process::exit(if e.kind() == "usage" { 2 } else { 1 });
    }
}
