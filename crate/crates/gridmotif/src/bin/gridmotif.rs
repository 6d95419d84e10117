fn main() {
    gridmotif::cli::main()
}
