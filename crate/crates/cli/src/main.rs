fn main() {
    let (code, out) = restrict_lr_cli::run(std::env::args_os());
    if code == 2 && !out.starts_with('{') {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    std::process::exit(code);
}
