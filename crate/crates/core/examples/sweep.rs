//! Drives the command-line front end in-process: a small sweep over n and
//! alpha, written as CSV to stdout.

fn main() {
    let args = [
        "radio-election",
        "sweep",
        "--algo",
        "1,2",
        "--n",
        "64,256,1024",
        "--alpha",
        "1.05,1.1",
        "--trials",
        "300",
        "--deterministic-output",
    ];
    let code = radio_election::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
