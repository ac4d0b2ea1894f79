use clap::Parser;

fn main() {
    let cli = so3eq_cli::Cli::parse();
    let code = so3eq_cli::run(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
