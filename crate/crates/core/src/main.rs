fn main() {
    // Die quietly when the consumer closes the pipe (e.g. `choikit ... | head`)
    // instead of panicking on the failed print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(choikit::cli::run());
}
