fn main() {
    std::process::exit(hopcall::cli::run());
}
