fn main() {
    std::process::exit(kernelscope::cli::run(std::env::args_os()));
}
