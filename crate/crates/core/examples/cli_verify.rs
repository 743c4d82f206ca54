//! Drive the command-line entry point in-process.

fn main() {
    let code = gaudin::cli::main_with([
        "gaudin",
        "verify",
        "--suite",
        "psi",
        "--lie",
        "A2",
        "--n",
        "2",
        "--samples",
        "4",
        "--format",
        "csv",
    ]);
    println!("exit {code}");
}
