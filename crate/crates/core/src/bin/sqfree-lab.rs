fn main() {
    std::process::exit(sqfree_lab::cli_harness::main_from(std::env::args_os()));
}
