use std::process::ExitCode;

fn main() -> ExitCode {
    // Die quietly when the reader closes the pipe (`hessbar ... | head`),
    // like other Unix tools, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    hessbar_cli::run()
}
