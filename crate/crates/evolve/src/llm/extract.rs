use netrobust_core::hdsl::{parse, validate, HeuristicProgram, ParseError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("response contains no fenced code block")]
    NoFence,
    #[error("code block opened on line {0} is never closed")]
    UnterminatedFence(usize),
    #[error("program does not parse: {0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    /// Prose outside every fenced block, whitespace-normalized.
    pub description: String,
    pub program: HeuristicProgram,
    pub warnings: Vec<String>,
}

struct Block {
    tag: String,
    body: String,
}

/// Splits a markdown reply into fenced blocks and the surrounding prose.
fn split(text: &str) -> Result<(Vec<Block>, String), ExtractError> {
    let mut blocks = Vec::new();
    let mut prose = Vec::new();
    let mut open: Option<(usize, Block)> = None;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        match open.take() {
            None => match trimmed.strip_prefix("```") {
                Some(tag) => {
                    open = Some((
                        i + 1,
                        Block {
                            tag: tag.trim().to_ascii_lowercase(),
                            body: String::new(),
                        },
                    ))
                }
                None => prose.push(line.trim()),
            },
            Some((start, mut block)) => {
                if trimmed.trim_end() == "```" {
                    blocks.push(block);
                } else {
                    block.body.push_str(line);
                    block.body.push('\n');
                    open = Some((start, block));
                }
            }
        }
    }
    if let Some((start, _)) = open {
        return Err(ExtractError::UnterminatedFence(start));
    }
    let description = prose
        .into_iter()
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    Ok((blocks, description))
}

/// Parses the program in a model reply. A block tagged `dsl` wins over
/// untagged ones; otherwise the first block is used.
pub fn extract_program(text: &str) -> Result<Extracted, ExtractError> {
    let (blocks, description) = split(text)?;
    let chosen = blocks
        .iter()
        .position(|b| b.tag == "dsl")
        .or(if blocks.is_empty() { None } else { Some(0) })
        .ok_or(ExtractError::NoFence)?;
    let program = parse(&blocks[chosen].body)?;
    let mut warnings = Vec::new();
    if blocks.len() > 1 {
        warnings.push(format!(
            "reply has {} code blocks; used block {}",
            blocks.len(),
            chosen + 1
        ));
    }
    warnings.extend(validate(&program).iter().map(ToString::to_string));
    Ok(Extracted {
        description,
        program,
        warnings,
    })
}
