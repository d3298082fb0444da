use clap::Parser;

fn main() {
    let config = cgslice::cli::RunConfig::parse();
    std::process::exit(cgslice::cli::run(config));
}
