//! Encoding of a UI group chain as one flat string: ids joined by `/`, with `\/`
//! and `\\` escaping literal slashes and backslashes inside ids.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("group path `{0}` contains an empty segment")]
    EmptySegment(String),
    #[error("group path `{0}` ends in a dangling escape")]
    DanglingEscape(String),
}

pub const SEPARATOR: char = '/';
const ESCAPE: char = '\\';

/// Joins group ids, outermost first.
pub fn encode_group_path<S: AsRef<str>>(groups: &[S]) -> String {
    let mut out = String::new();
    for (i, g) in groups.iter().enumerate() {
        if i > 0 {
            out.push(SEPARATOR);
        }
        for c in g.as_ref().chars() {
            if c == SEPARATOR || c == ESCAPE {
                out.push(ESCAPE);
            }
            out.push(c);
        }
    }
    out
}

/// Splits an encoded path. The empty string is the empty path.
pub fn decode_group_path(path: &str) -> Result<Vec<String>, PathError> {
    if path.is_empty() {
        return Ok(Vec::new());
    }
    let mut groups = Vec::new();
    let mut current = String::new();
    let mut chars = path.chars();
    while let Some(c) = chars.next() {
        match c {
            ESCAPE => match chars.next() {
                Some(next) => current.push(next),
                None => return Err(PathError::DanglingEscape(path.to_string())),
            },
            SEPARATOR => {
                if current.is_empty() {
                    return Err(PathError::EmptySegment(path.to_string()));
                }
                groups.push(std::mem::take(&mut current));
            }
            other => current.push(other),
        }
    }
    if current.is_empty() {
        return Err(PathError::EmptySegment(path.to_string()));
    }
    groups.push(current);
    Ok(groups)
}
