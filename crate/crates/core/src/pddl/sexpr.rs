//! Minimal s-expression reader with source positions.

use super::error::{PddlError, PddlErrorKind, Pos, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// Case-insensitive keyword test.
    pub fn is_keyword(&self, keyword: &str) -> bool {
        self.as_atom().is_some_and(|a| a.eq_ignore_ascii_case(keyword))
    }

    /// The head atom of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|items| items.first()).and_then(SExpr::as_atom)
    }

    pub fn head_is(&self, keyword: &str) -> bool {
        self.head().is_some_and(|h| h.eq_ignore_ascii_case(keyword))
    }
}

fn syntax(msg: impl Into<String>, pos: Pos) -> PddlError {
    PddlError::new(PddlErrorKind::Syntax(msg.into()), pos)
}

/// Reads every top-level expression in `text`. `;` starts a comment that runs
/// to the end of the line.
pub fn read_all(text: &str) -> Result<Vec<SExpr>> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                col += 1;
                let (items, open) = stack.pop().ok_or_else(|| syntax("unexpected `)`", pos))?;
                let list = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    col += 1;
                }
                let expr = SExpr::Atom(atom, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(expr),
                    None => top.push(expr),
                }
            }
        }
    }
    if let Some((_, open)) = stack.pop() {
        return Err(syntax("unclosed `(`", open));
    }
    Ok(top)
}
