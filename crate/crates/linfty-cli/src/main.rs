fn main() {
    eprintln!("not yet wired");
    std::process::exit(2);
}
