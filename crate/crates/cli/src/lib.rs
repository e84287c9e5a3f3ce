//! Command-line front end for `lgbeam`.

pub mod commands;
pub mod error;
pub mod fieldfile;
pub mod render;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

/// Runs the CLI on `args` (program name first), writing normal output to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match commands::parse(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match commands::run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Some(hint) = e.hint() {
                let _ = writeln!(err, "{hint}");
            }
            e.exit_code()
        }
    }
}
