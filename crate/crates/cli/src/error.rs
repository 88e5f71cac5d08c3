use cvtradeoff_core::Error;

/// Process exit code for a failed run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Contract(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

/// Out-of-domain parameters came from the user; anything else is a failed computation.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Contract(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let domain = Error::Domain {
            name: "T",
            value: 2.0,
            domain: "(0, 1)",
        };
        assert_eq!(CliError::from(domain).exit_code(), 2);
        assert_eq!(
            CliError::from(Error::Inadmissible { min_eigenvalue: -0.5 }).exit_code(),
            1
        );
        assert_eq!(CliError::from(Error::Contract("gain".into())).exit_code(), 1);
    }
}
