use std::io::{self, BufWriter};

fn main() {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let code = ncf::run(std::env::args_os(), &mut out, &mut err);
    drop(out);
    std::process::exit(code);
}
