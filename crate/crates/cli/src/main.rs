use clap::Parser;

fn main() {
    let args = match loewner_qc::Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { loewner_qc::exit::CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(loewner_qc::run(&args));
}
