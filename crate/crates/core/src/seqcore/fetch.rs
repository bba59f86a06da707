use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use crate::error::{Error, Result};

/// Environment variable holding the default archive endpoint.
pub const RFAM_URL_ENV: &str = "DOTSTITCH_RFAM_URL";

const MAX_PAYLOAD: u64 = 1 << 30;

/// Bounded exponential backoff: waits `base_delay * 2^k` before retry `k+1`.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
    pub timeout: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            base_delay: Duration::from_millis(500),
            timeout: Duration::from_secs(60),
        }
    }
}

fn valid_accession(acc: &str) -> bool {
    !acc.is_empty()
        && acc
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

/// Downloads `<endpoint>/<accession>.fasta` into `dest/<accession>.fasta`.
///
/// An existing nonempty file is returned untouched unless `force` is set.
pub fn fetch_family(
    accession: &str,
    endpoint: &str,
    dest: &Path,
    force: bool,
    retry: &RetryPolicy,
) -> Result<PathBuf> {
    if !valid_accession(accession) {
        return Err(Error::InvalidAccession(accession.to_owned()));
    }
    let target = dest.join(format!("{accession}.fasta"));
    if !force && fs::metadata(&target).is_ok_and(|m| m.len() > 0) {
        return Ok(target);
    }

    let url = format!("{}/{accession}.fasta", endpoint.trim_end_matches('/'));
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(retry.timeout))
        .build()
        .into();

    let mut last_err = String::new();
    for attempt in 0..retry.attempts.max(1) {
        if attempt > 0 {
            thread::sleep(retry.base_delay * 2u32.pow(attempt - 1));
        }
        match agent.get(&url).call() {
            Ok(mut resp) => {
                let body = resp
                    .body_mut()
                    .with_config()
                    .limit(MAX_PAYLOAD)
                    .read_to_vec()
                    .map_err(|e| Error::Http {
                        url: url.clone(),
                        message: e.to_string(),
                    })?;
                if body.iter().all(u8::is_ascii_whitespace) {
                    return Err(Error::EmptyPayload(url));
                }
                fs::create_dir_all(dest).map_err(|e| Error::io(dest, e))?;
                let tmp = dest.join(format!(".{accession}.fasta.part"));
                fs::write(&tmp, &body).map_err(|e| Error::io(&tmp, e))?;
                fs::rename(&tmp, &target).map_err(|e| Error::io(&target, e))?;
                return Ok(target);
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(Error::Http {
        url,
        message: format!("{last_err} (after {} attempts)", retry.attempts.max(1)),
    })
}
