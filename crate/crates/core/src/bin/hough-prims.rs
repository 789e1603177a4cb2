fn main() {
    std::process::exit(hough_prims::cli::cli_main(std::env::args_os()));
}
