use thiserror::Error;

use crate::model::{CellId, StructureId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown cell {0}")]
    UnknownCell(CellId),

    #[error("unknown structure {0}")]
    UnknownStructure(StructureId),

    #[error("no execution edge {from} -> {to}")]
    UnknownEdge { from: CellId, to: CellId },

    #[error("parameter error: {0}")]
    Param(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("stream error: {0}")]
    Stream(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Converts a serde_json error into a parse error carrying the byte
    /// offset of the failure inside `input`.
    pub fn from_json(err: &serde_json::Error, input: &[u8]) -> Self {
        if err.is_data() {
            return Error::Schema(err.to_string());
        }
        Error::Parse {
            offset: byte_offset(input, err.line(), err.column()),
            message: err.to_string(),
        }
    }
}

/// serde_json reports 1-based line and column; turn that into a byte offset.
fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0usize;
    let mut current = 1usize;
    for (i, b) in input.iter().enumerate() {
        if current == line {
            offset = i;
            break;
        }
        if *b == b'\n' {
            current += 1;
            offset = i + 1;
        }
    }
    (offset + column.saturating_sub(1)).min(input.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_on_second_line() {
        let input = b"{\n  \"a\": ,\n}";
        let err = serde_json::from_slice::<serde_json::Value>(input).unwrap_err();
        match Error::from_json(&err, input) {
            Error::Parse { offset, .. } => assert_eq!(input[offset], b','),
            other => panic!("unexpected {other:?}"),
        }
    }
}
