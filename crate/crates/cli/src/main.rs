use clap::Parser;

fn main() {
    let cli = abcalc::Cli::parse();
    match abcalc::run(&cli) {
        Ok(out) => println!("{out}"),
        Err(e) => {
            println!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
