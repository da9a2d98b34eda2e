fn main() {
    kbrecon::cli::main()
}
