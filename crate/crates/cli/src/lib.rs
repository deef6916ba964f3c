//! Configuration loading, run drivers and output staging for the
//! `killing-graph` command-line tool.

pub mod config;
pub mod output;
pub mod run;

#[derive(Debug)]
pub enum CliError {
    /// Bad config, arguments or expressions (exit 1).
    Config(String),
    /// A solve or quadrature failed to converge (exit 2).
    NonConvergence(String),
    /// Reading the config or writing outputs failed (exit 1).
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::NonConvergence(m) => write!(f, "did not converge: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}
