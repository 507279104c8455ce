use std::fmt;
use std::process::ExitCode;

use vnpos::corpus::CorpusError;
use vnpos::eval::EvalError;
use vnpos::features::FeatureError;
use vnpos::linear::ModelError;
use vnpos::scrdr::ScrdrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Bad flags or configuration.
    Usage,
    /// Unreadable or malformed input.
    Data,
    /// Anything else, including failed writes.
    Internal,
}

impl Kind {
    pub fn exit_code(self) -> ExitCode {
        ExitCode::from(match self {
            Kind::Usage => 1,
            Kind::Data => 2,
            Kind::Internal => 3,
        })
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure {
            kind: Kind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Failure {
        Failure {
            kind: Kind::Data,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Failure {
        Failure {
            kind: Kind::Internal,
            message: message.into(),
        }
    }

    /// Prefix the message with a file name.
    pub fn in_file(mut self, path: &str) -> Failure {
        self.message = format!("{path}: {}", self.message);
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type Result<T> = std::result::Result<T, Failure>;

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Failure {
        match e {
            CorpusError::TooFewSentences { .. } | CorpusError::InvalidFoldCount(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}

impl From<FeatureError> for Failure {
    fn from(e: FeatureError) -> Failure {
        match e {
            FeatureError::ClusterFormat { .. } | FeatureError::Io { .. } => Failure::data(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        match e {
            ModelError::Features(f) => f.into(),
            ModelError::Corpus(c) => c.into(),
            ModelError::InvalidConfig(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}

impl From<ScrdrError> for Failure {
    fn from(e: ScrdrError) -> Failure {
        match e {
            ScrdrError::Corpus(c) => c.into(),
            ScrdrError::InvalidParams(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        let message = e.to_string();
        let mut root = &e;
        while let EvalError::Fold { source, .. } = root {
            root = source;
        }
        let kind = match root {
            EvalError::Corpus(c) => Failure::from(c.clone()).kind,
            EvalError::Linear(ModelError::Features(f)) => Failure::from(f.clone()).kind,
            EvalError::Linear(ModelError::InvalidConfig(_)) | EvalError::Scrdr(ScrdrError::InvalidParams(_)) => {
                Kind::Usage
            }
            EvalError::TooFewRepetitions(_) => Kind::Usage,
            _ => Kind::Data,
        };
        Failure { kind, message }
    }
}
