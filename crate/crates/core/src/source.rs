//! Minimal lexical helpers over Rust source text.

use alloc::vec::Vec;

/// Source text split into lines (1-based access).
#[derive(Debug, Clone, Copy)]
pub struct SourceText<'a> {
    text: &'a str,
}

impl<'a> SourceText<'a> {
    pub fn new(text: &'a str) -> Self {
        Self { text }
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn line_count(&self) -> u32 {
        self.text.lines().count() as u32
    }

    pub fn line(&self, line: u32) -> Option<&'a str> {
        let idx = (line as usize).checked_sub(1)?;
        self.text.lines().nth(idx).map(|l| l.strip_suffix('\r').unwrap_or(l))
    }

    /// Last line of the innermost `fn` body that contains `line`.
    pub fn enclosing_fn_end(&self, line: u32) -> Option<u32> {
        fn_bodies(self.text)
            .into_iter()
            .filter(|&(open, close)| open <= line && line <= close)
            .min_by_key(|&(open, close)| close - open)
            .map(|(_, close)| close)
    }
}

/// `(open_line, close_line)` of every `fn` body, skipping comments and literals.
fn fn_bodies(text: &str) -> Vec<(u32, u32)> {
    let bytes = text.as_bytes();
    let mut bodies = Vec::new();
    // Each open brace remembers whether it starts a fn body, and its line.
    let mut stack: Vec<(bool, u32)> = Vec::new();
    let mut pending_fn = false;
    let mut line = 1u32;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'\n' => line += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let mut depth = 1;
                i += 2;
                while i < bytes.len() && depth > 0 {
                    if bytes[i] == b'\n' {
                        line += 1;
                    } else if bytes[i] == b'/' && bytes.get(i + 1) == Some(&b'*') {
                        depth += 1;
                        i += 1;
                    } else if bytes[i] == b'*' && bytes.get(i + 1) == Some(&b'/') {
                        depth -= 1;
                        i += 1;
                    }
                    i += 1;
                }
                continue;
            }
            b'"' => {
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    } else if bytes[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
            }
            b'\'' => {
                // Char literal (`'a'`, `'\n'`) versus lifetime (`'a`).
                if bytes.get(i + 1) == Some(&b'\\') {
                    i += 2;
                    while i < bytes.len() && bytes[i] != b'\'' {
                        i += 1;
                    }
                } else if let Some(len) = char_literal_len(&text[i + 1..]) {
                    i += len;
                }
            }
            b'{' => {
                stack.push((pending_fn, line));
                pending_fn = false;
            }
            b'}' => {
                if let Some((true, open)) = stack.pop() {
                    bodies.push((open, line));
                }
            }
            b';' => pending_fn = false,
            b'f' if bytes.get(i + 1) == Some(&b'n')
                && !is_ident(bytes.get(i + 2).copied())
                && (i == 0 || !is_ident(Some(bytes[i - 1]))) =>
            {
                pending_fn = true;
            }
            _ => {}
        }
        i += 1;
    }
    bodies
}

fn char_literal_len(rest: &str) -> Option<usize> {
    let mut chars = rest.char_indices();
    let (_, c) = chars.next()?;
    let (idx, close) = chars.next()?;
    (close == '\'' && c != '\'').then_some(idx + 1)
}

fn is_ident(b: Option<u8>) -> bool {
    b.is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "\
fn outer<'a>(x: &'a str) -> impl Fn() {
    let c = '}';
    let s = \"{ not a brace\";
    // fn fake() {
    let f = || {
        x.len()
    };
    f
}

fn second() {}
";

    #[test]
    fn finds_enclosing_bodies() {
        let src = SourceText::new(SRC);
        assert_eq!(src.enclosing_fn_end(5), Some(9));
        assert_eq!(src.enclosing_fn_end(6), Some(9));
        assert_eq!(src.enclosing_fn_end(11), Some(11));
        assert_eq!(src.enclosing_fn_end(10), None);
    }

    #[test]
    fn line_access_is_one_based() {
        let src = SourceText::new("a\r\nb\n");
        assert_eq!(src.line_count(), 2);
        assert_eq!(src.line(1), Some("a"));
        assert_eq!(src.line(2), Some("b"));
        assert_eq!(src.line(0), None);
        assert_eq!(src.line(3), None);
    }
}
