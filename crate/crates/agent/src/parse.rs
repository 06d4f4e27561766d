//! Parsers for the constrained output formats the prompts ask for: string
//! list literals, one-word verdicts, fenced code blocks and Python literals.

use serde_json::{Map, Number, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("no bracketed string list found")]
    NoList,
    #[error("response contains no code")]
    EmptyCode,
    #[error("bad literal at byte {pos}: {message}")]
    Literal { pos: usize, message: String },
}

/// Items of the first well-formed `["a", "b"]` list in `text`, duplicates
/// removed keeping the first occurrence.
pub fn parse_string_list(text: &str) -> Result<Vec<String>, ParseError> {
    for (start, _) in text.match_indices('[') {
        if let Some(items) = string_list_at(&text[start..]) {
            let mut out: Vec<String> = Vec::with_capacity(items.len());
            for item in items {
                if !out.contains(&item) {
                    out.push(item);
                }
            }
            return Ok(out);
        }
    }
    Err(ParseError::NoList)
}

/// Parses `[ "x" , "y" ]` at the start of `s`.
fn string_list_at(s: &str) -> Option<Vec<String>> {
    let mut chars = s.char_indices().peekable();
    chars.next(); // '['
    let mut items = Vec::new();
    let skip_ws = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
        while chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            chars.next();
        }
    };
    skip_ws(&mut chars);
    if chars.peek().is_some_and(|&(_, c)| c == ']') {
        return Some(items);
    }
    loop {
        skip_ws(&mut chars);
        if chars.next()?.1 != '"' {
            return None;
        }
        let mut item = String::new();
        loop {
            match chars.next()?.1 {
                '"' => break,
                '\\' => item.push(chars.next()?.1),
                c => item.push(c),
            }
        }
        items.push(item);
        skip_ws(&mut chars);
        match chars.next()?.1 {
            ',' => {}
            ']' => return Some(items),
            _ => return None,
        }
    }
}

/// True iff the first word is "yes" (case-insensitive, surrounding
/// punctuation ignored); anything else, including empty text, is false.
pub fn parse_yes_no(text: &str) -> bool {
    text.split_whitespace()
        .next()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .is_some_and(|w| w.eq_ignore_ascii_case("yes"))
}

/// Contents of the last fenced code block, or the whole trimmed text when
/// there is no fence.
pub fn extract_code_block(text: &str) -> Result<String, ParseError> {
    let mut blocks = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        // the info string runs to the end of the fence line
        let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
        let body = &after[body_start..];
        match body.find("```") {
            Some(close) => {
                blocks.push(&body[..close]);
                rest = &body[close + 3..];
            }
            None => {
                blocks.push(body);
                break;
            }
        }
    }
    let code = match blocks.last() {
        Some(block) => block.trim_end().trim_start_matches('\n').to_string(),
        None => text.trim().to_string(),
    };
    if code.trim().is_empty() {
        return Err(ParseError::EmptyCode);
    }
    Ok(code)
}

/// Render a list the way the relevance prompt asks for it.
pub fn render_string_list(items: &[String]) -> String {
    serde_json::to_string(items).expect("strings serialise")
}

/// Parse a Python literal (the subset that test-case generators emit:
/// dicts, lists, tuples, sets, strings, numbers, booleans and None) into
/// JSON. Tuples and sets become arrays, dict keys become strings.
pub fn parse_python_literal(text: &str) -> Result<Value, ParseError> {
    let mut p = LiteralParser {
        s: text.as_bytes(),
        pos: 0,
    };
    p.ws();
    let v = p.value()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing characters"));
    }
    Ok(v)
}

/// The first parseable list literal in `text` (prose around it is ignored).
pub fn find_python_list(text: &str) -> Result<Value, ParseError> {
    let mut last_err = ParseError::NoList;
    for (start, _) in text.match_indices('[') {
        let mut p = LiteralParser {
            s: &text.as_bytes()[start..],
            pos: 0,
        };
        match p.value() {
            Ok(v) => return Ok(v),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

struct LiteralParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn err(&self, message: &str) -> ParseError {
        ParseError::Literal {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while self.peek().is_some_and(|c| c != b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        self.ws();
        match self.peek() {
            Some(b'[') => self.sequence(b']').map(Value::Array),
            Some(b'(') => {
                let items = self.sequence(b')')?;
                Ok(Value::Array(items))
            }
            Some(b'{') => self.dict_or_set(),
            Some(b'"') | Some(b'\'') => self.string().map(Value::String),
            Some(c) if c == b'-' || c == b'+' || c == b'.' || c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn sequence(&mut self, close: u8) -> Result<Vec<Value>, ParseError> {
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.ws();
            if self.peek() == Some(close) {
                self.pos += 1;
                return Ok(items);
            }
            items.push(self.value()?);
            self.ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(c) if c == close => {}
                _ => return Err(self.err("expected ',' or closing bracket")),
            }
        }
    }

    fn dict_or_set(&mut self) -> Result<Value, ParseError> {
        self.pos += 1;
        self.ws();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(Value::Object(Map::new()));
        }
        let first = self.value()?;
        self.ws();
        if self.peek() != Some(b':') {
            // a set literal
            let mut items = vec![first];
            loop {
                self.ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                        self.ws();
                        if self.peek() == Some(b'}') {
                            continue;
                        }
                        items.push(self.value()?);
                    }
                    Some(b'}') => {
                        self.pos += 1;
                        return Ok(Value::Array(items));
                    }
                    _ => return Err(self.err("expected ',' or '}' in set")),
                }
            }
        }
        let mut map = Map::new();
        let mut key = first;
        loop {
            self.ws();
            if self.peek() != Some(b':') {
                return Err(self.err("expected ':'"));
            }
            self.pos += 1;
            let value = self.value()?;
            map.insert(key_string(&key), value);
            self.ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    self.ws();
                    if self.peek() == Some(b'}') {
                        self.pos += 1;
                        return Ok(Value::Object(map));
                    }
                    key = self.value()?;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(Value::Object(map));
                }
                _ => return Err(self.err("expected ',' or '}' in dict")),
            }
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let quote = self.s[self.pos];
        self.pos += 1;
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated string")),
                Some(c) if c == quote => {
                    self.pos += 1;
                    break;
                }
                Some(b'\\') => {
                    self.pos += 1;
                    let c = self.peek().ok_or_else(|| self.err("dangling escape"))?;
                    out.push(match c {
                        b'n' => b'\n',
                        b't' => b'\t',
                        other => other,
                    });
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
        String::from_utf8(out).map_err(|_| self.err("invalid utf-8 in string"))
    }

    fn number(&mut self) -> Result<Value, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| {
            c.is_ascii_digit() || matches!(c, b'-' | b'+' | b'.' | b'e' | b'E' | b'_')
        }) {
            self.pos += 1;
        }
        let raw: String = std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii")
            .replace('_', "");
        let raw = raw.strip_prefix('+').unwrap_or(&raw).to_string();
        if let Ok(i) = raw.parse::<i64>() {
            return Ok(Value::Number(i.into()));
        }
        raw.parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map(Value::Number)
            .ok_or_else(|| self.err("malformed number"))
    }

    fn word(&mut self) -> Result<Value, ParseError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'.')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        match word {
            "True" | "true" => Ok(Value::Bool(true)),
            "False" | "false" => Ok(Value::Bool(false)),
            "None" | "null" => Ok(Value::Null),
            // tuple(...), set(...), frozenset(...) wrappers around a literal
            "tuple" | "set" | "frozenset" | "list" => {
                self.ws();
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after constructor"));
                }
                self.pos += 1;
                self.ws();
                let inner = if self.peek() == Some(b')') {
                    Value::Array(Vec::new())
                } else {
                    self.value()?
                };
                self.ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(ParseError::Literal {
                pos: start,
                message: format!("unknown name `{word}`"),
            }),
        }
    }
}

fn key_string(key: &Value) -> String {
    match key {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
