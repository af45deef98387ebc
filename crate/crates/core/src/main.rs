fn main() {
    std::process::exit(dicke_ppt::cli::run(std::env::args_os()));
}
