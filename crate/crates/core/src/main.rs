fn main() {
    let code = rwcuckoo::harness::run_cli(std::env::args_os());
    std::process::exit(code);
}
