fn main() {
    std::process::exit(oblique_frames::cli::run(std::env::args_os()));
}
