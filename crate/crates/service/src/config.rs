use std::net::SocketAddr;
use std::path::PathBuf;

use crate::error::ServiceError;

pub const DEFAULT_UPLOAD_CAP: usize = 100 * 1024 * 1024;
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub data_dir: PathBuf,
    pub upload_cap: usize,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: DEFAULT_BIND.parse().expect("default bind address"),
            data_dir: PathBuf::from("mlogs-data"),
            upload_cap: DEFAULT_UPLOAD_CAP,
            static_dir: None,
        }
    }
}

impl ServiceConfig {
    /// Reads `MLOGS_BIND`, `MLOGS_DATA_DIR`, `MLOGS_UPLOAD_CAP` and
    /// `MLOGS_STATIC_DIR`, falling back to defaults for unset variables.
    pub fn from_env() -> Result<Self, ServiceError> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ServiceError> {
        let mut config = ServiceConfig::default();
        if let Some(bind) = get("MLOGS_BIND") {
            config.bind = parse_bind(&bind)?;
        }
        if let Some(dir) = get("MLOGS_DATA_DIR") {
            config.data_dir = PathBuf::from(dir);
        }
        if let Some(cap) = get("MLOGS_UPLOAD_CAP") {
            config.upload_cap = parse_size(&cap)?;
        }
        if let Some(dir) = get("MLOGS_STATIC_DIR") {
            config.static_dir = Some(PathBuf::from(dir));
        }
        Ok(config)
    }
}

/// Accepts `host:port` or a bare port (bound on 127.0.0.1).
pub fn parse_bind(text: &str) -> Result<SocketAddr, ServiceError> {
    let text = text.trim();
    if let Ok(port) = text.parse::<u16>() {
        return Ok(SocketAddr::from(([127, 0, 0, 1], port)));
    }
    text.parse()
        .map_err(|_| ServiceError::Config(format!("bad bind address {text:?}")))
}

/// Byte count with an optional K/M/G suffix (binary multiples), e.g. `100M`.
pub fn parse_size(text: &str) -> Result<usize, ServiceError> {
    let t = text.trim().to_ascii_uppercase();
    let t = t.strip_suffix('B').unwrap_or(&t);
    let (digits, scale) = match t.chars().last() {
        Some('K') => (&t[..t.len() - 1], 1usize << 10),
        Some('M') => (&t[..t.len() - 1], 1 << 20),
        Some('G') => (&t[..t.len() - 1], 1 << 30),
        _ => (t, 1),
    };
    digits
        .trim()
        .parse::<usize>()
        .ok()
        .and_then(|n| n.checked_mul(scale))
        .filter(|n| *n > 0)
        .ok_or_else(|| ServiceError::Config(format!("bad size {text:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_size("1024").unwrap(), 1024);
        assert_eq!(parse_size("100M").unwrap(), 100 << 20);
        assert_eq!(parse_size("2kb").unwrap(), 2048);
        assert!(parse_size("0").is_err());
        assert!(parse_size("lots").is_err());
    }

    #[test]
    fn bind_forms() {
        assert_eq!(parse_bind("9000").unwrap().port(), 9000);
        assert_eq!(parse_bind("0.0.0.0:81").unwrap().to_string(), "0.0.0.0:81");
        assert!(parse_bind("nowhere").is_err());
    }

    #[test]
    fn env_lookup() {
        let config = ServiceConfig::from_lookup(|k| match k {
            "MLOGS_DATA_DIR" => Some("/tmp/x".into()),
            "MLOGS_UPLOAD_CAP" => Some("5M".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(config.data_dir, PathBuf::from("/tmp/x"));
        assert_eq!(config.upload_cap, 5 << 20);
        assert_eq!(config.bind, DEFAULT_BIND.parse().unwrap());
        assert!(config.static_dir.is_none());
    }
}
