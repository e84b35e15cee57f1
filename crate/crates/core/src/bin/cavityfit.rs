fn main() {
    std::process::exit(cavityfit::pipeline::run(std::env::args()));
}
