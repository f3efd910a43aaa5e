use cochain_net::attack::AttackError;
use cochain_net::cochain::CochainError;
use cochain_net::gerbe_tower::GerbeError;
use cochain_net::groups::GroupError;
use cochain_net::kdc::KdcError;
use cochain_net::linkcrypt::LinkError;
use cochain_net::network::NetworkError;
use cochain_net::pubkey::PubKeyError;
use cochain_net::secrecy::SecrecyError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message} (line {line}, column {column})")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{inner} (line {line}, column {column})")]
    Located {
        line: usize,
        column: usize,
        inner: Box<CliError>,
    },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("scenario has no [{0}] section")]
    MissingSection(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Kdc(#[from] KdcError),
    #[error(transparent)]
    PubKey(#[from] PubKeyError),
    #[error(transparent)]
    Gerbe(#[from] GerbeError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Secrecy(#[from] SecrecyError),
}

fn module_of(wrapper: &str) -> Option<&'static str> {
    Some(match wrapper {
        "Group" => "groups",
        "Network" => "network",
        "Cochain" => "cochain",
        "Link" => "linkcrypt",
        "Kdc" => "kdc",
        "PubKey" => "pubkey",
        "Gerbe" => "gerbe_tower",
        "Attack" => "attack",
        "Secrecy" => "secrecy",
        _ => return None,
    })
}

fn snake(ident: &str) -> String {
    let mut out = String::new();
    for (k, ch) in ident.chars().enumerate() {
        if ch.is_ascii_uppercase() {
            if k > 0 {
                out.push('_');
            }
            out.push(ch.to_ascii_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

/// `module.variant` of the innermost error, read off the derived `Debug` form.
fn core_code(debug: &str) -> String {
    let mut module = "cli";
    let mut rest = debug;
    loop {
        let end = rest
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(rest.len());
        let ident = &rest[..end];
        let nested = rest[end..].starts_with('(');
        match module_of(ident) {
            Some(m) if nested => {
                module = m;
                rest = &rest[end + 1..];
            }
            _ => return format!("{module}.{}", snake(ident)),
        }
    }
}

impl CliError {
    pub fn code(&self) -> String {
        match self {
            CliError::Parse { .. } => "scenario.parse".into(),
            CliError::Located { inner, .. } => inner.code(),
            CliError::Io(_) => "scenario.io".into(),
            CliError::Invalid(_) => "scenario.invalid".into(),
            CliError::MissingSection(_) => "scenario.missing_section".into(),
            CliError::UnknownVertex(_) => "scenario.unknown_vertex".into(),
            other => core_code(&format!("{other:?}")),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let CliError::Parse { line, column, .. } | CliError::Located { line, column, .. } = self
        {
            body["line"] = json!(line);
            body["column"] = json!(column);
        }
        json!({ "error": body })
    }
}
