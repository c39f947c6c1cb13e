use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: skyq::Error,
    },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn module(module: &'static str) -> impl Fn(skyq::Error) -> CliError {
        move |source| CliError::Module { module, source }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Module { source, .. } if source.is_io() => "io",
            CliError::Module { .. } => "numeric",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "numeric" => 3,
            _ => 4,
        }
    }
}
