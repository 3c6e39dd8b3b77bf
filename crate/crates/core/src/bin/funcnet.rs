use std::io;
use std::process::ExitCode;

use funcnet::cli;
use funcnet::report::Style;

fn main() -> ExitCode {
    let style = Style {
        color: cli::color_wanted(),
    };
    let code = cli::main_with(std::env::args_os(), &mut io::stdout(), &mut io::stderr(), style);
    ExitCode::from(code as u8)
}
