fn main() {
    std::process::exit(radar_lte::cli::main(std::env::args_os()));
}
