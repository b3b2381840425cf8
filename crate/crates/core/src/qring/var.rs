//! Formal variable names.

use std::fmt;

use thiserror::Error;

/// Name of a formal variable other than the base `q`.
///
/// Stored inline (at most [`VarTag::MAX_LEN`] ASCII bytes, zero padded) so that
/// exponent vectors stay `Copy`-cheap. The derived ordering on the padded bytes is
/// the lexicographic ordering of the names.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarTag([u8; VarTag::MAX_LEN]);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarTagError {
    #[error("variable name must not be empty")]
    Empty,
    #[error("variable name `{0}` is longer than {max} bytes", max = VarTag::MAX_LEN)]
    TooLong(String),
    #[error("variable name `{0}` must be an ASCII identifier")]
    NotIdentifier(String),
    #[error("`q` is the series base and cannot be used as a formal variable")]
    Reserved,
}

impl VarTag {
    pub const MAX_LEN: usize = 8;

    pub fn new(name: &str) -> Result<Self, VarTagError> {
        if name.is_empty() {
            return Err(VarTagError::Empty);
        }
        if name == "q" {
            return Err(VarTagError::Reserved);
        }
        if name.len() > Self::MAX_LEN {
            return Err(VarTagError::TooLong(name.to_string()));
        }
        let bytes = name.as_bytes();
        let ident = (bytes[0].is_ascii_alphabetic() || bytes[0] == b'_')
            && bytes.iter().all(|b| b.is_ascii_alphanumeric() || *b == b'_');
        if !ident {
            return Err(VarTagError::NotIdentifier(name.to_string()));
        }
        let mut buf = [0u8; Self::MAX_LEN];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(VarTag(buf))
    }

    pub fn as_str(&self) -> &str {
        let len = self.0.iter().position(|&b| b == 0).unwrap_or(Self::MAX_LEN);
        // Only ASCII bytes are ever stored.
        std::str::from_utf8(&self.0[..len]).expect("ascii variable name")
    }
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarTag({})", self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_lexicographic() {
        let a = VarTag::new("a").unwrap();
        let ab = VarTag::new("ab").unwrap();
        let b = VarTag::new("b").unwrap();
        assert!(a < ab && ab < b);
        assert_eq!(ab.as_str(), "ab");
    }

    #[test]
    fn rejects_bad_names() {
        assert_eq!(VarTag::new("q"), Err(VarTagError::Reserved));
        assert!(matches!(VarTag::new("toolongname"), Err(VarTagError::TooLong(_))));
        assert!(matches!(VarTag::new("1x"), Err(VarTagError::NotIdentifier(_))));
        assert_eq!(VarTag::new(""), Err(VarTagError::Empty));
    }
}
