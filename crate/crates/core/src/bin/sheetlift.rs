fn main() {
    std::process::exit(sheetlift::cli::main_with(std::env::args_os()));
}
