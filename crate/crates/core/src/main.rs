fn main() {
    std::process::exit(hds::harness::cli_main(std::env::args_os()));
}
