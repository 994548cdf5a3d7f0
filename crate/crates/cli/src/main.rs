use clap::Parser;

fn main() {
    let cli = fdnf::Cli::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = fdnf::run(cli, &mut out, &mut err);
    std::process::exit(code);
}
