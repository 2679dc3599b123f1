use std::io::ErrorKind;
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchLimits {
    pub max_bytes: u64,
    pub timeout: Duration,
}

impl Default for FetchLimits {
    fn default() -> Self {
        FetchLimits {
            max_bytes: 10 * 1024 * 1024,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("{url}: only http and https links can be opened")]
    BadScheme { url: String },
    #[error("{url}: not found (404)")]
    NotFound { url: String },
    #[error("{url}: server answered with status {status}")]
    Status { url: String, status: u16 },
    #[error("{url}: timed out")]
    Timeout { url: String },
    #[error("{url}: body is larger than {limit} bytes")]
    TooLarge { url: String, limit: u64 },
    #[error("{url}: {message}")]
    Transport { url: String, message: String },
}

impl FetchError {
    pub fn url(&self) -> &str {
        match self {
            FetchError::BadScheme { url }
            | FetchError::NotFound { url }
            | FetchError::Status { url, .. }
            | FetchError::Timeout { url }
            | FetchError::TooLarge { url, .. }
            | FetchError::Transport { url, .. } => url,
        }
    }
}

pub(crate) fn is_http_url(url: &str) -> bool {
    url::Url::parse(url).is_ok_and(|u| matches!(u.scheme(), "http" | "https"))
}

/// Blocking GET returning the body of a 200 response.
pub fn fetch_csv_url(url: &str, limits: FetchLimits) -> Result<Vec<u8>, FetchError> {
    if !is_http_url(url) {
        return Err(FetchError::BadScheme {
            url: url.to_string(),
        });
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(limits.timeout))
        .http_status_as_error(false)
        .build()
        .into();
    let classify = |err: ureq::Error| match err {
        ureq::Error::Timeout(_) => FetchError::Timeout {
            url: url.to_string(),
        },
        ureq::Error::BodyExceedsLimit(_) => FetchError::TooLarge {
            url: url.to_string(),
            limit: limits.max_bytes,
        },
        ureq::Error::Io(e) if e.kind() == ErrorKind::TimedOut => FetchError::Timeout {
            url: url.to_string(),
        },
        other => FetchError::Transport {
            url: url.to_string(),
            message: other.to_string(),
        },
    };

    let mut response = agent.get(url).call().map_err(classify)?;
    match response.status().as_u16() {
        200 => {}
        404 => {
            return Err(FetchError::NotFound {
                url: url.to_string(),
            })
        }
        status => {
            return Err(FetchError::Status {
                url: url.to_string(),
                status,
            })
        }
    }
    if let Some(len) = response.body().content_length() {
        if len > limits.max_bytes {
            return Err(FetchError::TooLarge {
                url: url.to_string(),
                limit: limits.max_bytes,
            });
        }
    }
    response
        .body_mut()
        .with_config()
        .limit(limits.max_bytes)
        .read_to_vec()
        .map_err(classify)
}
