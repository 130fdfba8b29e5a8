use std::io::Write;

use super::{GenerateError, GenerationList};

/// One JSON object per line.
pub fn write_generation_dump<W: Write>(mut w: W, lists: &[GenerationList]) -> Result<(), GenerateError> {
    for list in lists {
        let line = serde_json::to_string(list).map_err(|e| GenerateError::Dump { line: 0, message: e.to_string() })?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn parse_generation_dump(input: &str) -> Result<Vec<GenerationList>, GenerateError> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let list: GenerationList = serde_json::from_str(raw)
            .map_err(|e| GenerateError::Dump { line: i + 1, message: e.to_string() })?;
        if !list.is_well_formed() {
            return Err(GenerateError::Dump {
                line: i + 1,
                message: "entries must be unique, at most beam_width, and sorted by score".into(),
            });
        }
        out.push(list);
    }
    Ok(out)
}
