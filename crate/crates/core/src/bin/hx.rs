fn main() {
    std::process::exit(hx_core::cli_main());
}
