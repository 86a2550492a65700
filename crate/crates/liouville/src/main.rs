use std::process::ExitCode;

fn main() -> ExitCode {
    // Die silently on a closed pipe (e.g. `liouville invariants k.cx | head`)
    // instead of panicking mid-print. Only the binary wants this; library
    // callers keep Rust's default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    liouville::cli::main_entry()
}
