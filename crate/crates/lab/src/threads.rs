//! Worker pool sized by `GTN_LAB_THREADS`.
//!
//! Parallel work (manifold distances, null simulations, labeling the
//! training and validation sets side by side) always reduces in a fixed
//! order, so results do not depend on the thread count.

use rayon::ThreadPool;

use crate::error::{LabError, Result};

pub const THREADS_ENV: &str = "GTN_LAB_THREADS";

/// Parses the variable's value; `None` means "use every core".
pub fn parse_threads(value: Option<&str>) -> Result<Option<usize>> {
    let Some(raw) = value else { return Ok(None) };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => Err(LabError::config(THREADS_ENV, format!("expected a positive integer, got `{raw}`"))),
    }
}

pub fn build_pool(threads: Option<usize>) -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| LabError::config(THREADS_ENV, e.to_string()))
}

pub fn pool_from_env() -> Result<ThreadPool> {
    let value = std::env::var(THREADS_ENV).ok();
    build_pool(parse_threads(value.as_deref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_counts() {
        assert_eq!(parse_threads(None).unwrap(), None);
        assert_eq!(parse_threads(Some("3")).unwrap(), Some(3));
        assert!(parse_threads(Some("0")).is_err());
        assert!(parse_threads(Some("many")).is_err());
        assert_eq!(build_pool(Some(2)).unwrap().current_num_threads(), 2);
    }
}
