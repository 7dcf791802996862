fn main() {
    std::process::exit(htp_lz::cli::dispatch(std::env::args_os()));
}
