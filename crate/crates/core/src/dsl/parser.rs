//! Recursive-descent parser for `.csm` text.
//!
//! Errors inside an item are reported and the parser skips ahead to the next
//! item keyword at the same nesting level, so one pass reports every broken
//! item. Inside a process body the same happens at process-item granularity.

use crate::diagnostic::{Code, Diagnostic, Site, SourceSpan};
use crate::privilege::{Privilege, ProcessPrivilege, StatusPoint, TransformMode};

use super::lexer::{Token, TokenKind};
use super::resolve::{Located, RawItem, RawModel, RawProcessItem};

const ITEM_KEYWORDS: [&str; 4] = ["role", "class", "process", "grant"];
const PROCESS_KEYWORDS: [&str; 5] = ["owner", "responsible", "input", "output", "transform"];

/// Marker for an error that has already been reported.
struct Reported;

type PResult<T> = Result<T, Reported>;

pub(crate) struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    file: &'a str,
    /// Braces opened by the item being parsed.
    open: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    pub fn new(tokens: &'a [Token], file: &'a str) -> Self {
        Self {
            tokens,
            pos: 0,
            file,
            open: 0,
            diagnostics: Vec::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> &Token {
        let tok = &self.tokens[self.pos.min(self.tokens.len() - 1)];
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn span_of(&self, tok: &Token) -> Option<SourceSpan> {
        Some(tok.span(self.file))
    }

    fn error_at(&mut self, tok: &Token, message: String) -> Reported {
        let span = tok.span(self.file);
        self.diagnostics.push(
            Diagnostic::new(Code::Syntax, Site::Text(span.to_string()), message)
                .with_span(Some(span)),
        );
        Reported
    }

    fn unexpected(&mut self, expected: &str) -> Reported {
        let tok = self.peek().clone();
        let msg = format!("expected {expected}, found {}", tok.kind.describe());
        self.error_at(&tok, msg)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.peek().kind == kind {
            Ok(self.bump().clone())
        } else {
            Err(self.unexpected(&kind.describe()))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Token> {
        if self.peek().is_word(word) {
            Ok(self.bump().clone())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Located<String>> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Word(w) if !w.ends_with('+') => {
                self.bump();
                Ok(Located::new(w.clone(), self.span_of(&tok)))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Parses a whole file. Always returns a (possibly partial) item list.
    pub fn parse_model(&mut self) -> RawModel {
        let mut name = String::new();
        let header = (|| -> PResult<()> {
            self.expect_word("model")?;
            match &self.peek().kind {
                TokenKind::Str(s) => {
                    name = s.clone();
                    self.bump();
                }
                _ => return Err(self.unexpected("model name string")),
            }
            self.expect(TokenKind::LBrace)?;
            Ok(())
        })();
        if header.is_err() {
            // Resume at the first brace, or treat the rest as items.
            if let Some(offset) = self.tokens[self.pos..]
                .iter()
                .position(|t| t.kind == TokenKind::LBrace)
            {
                self.pos += offset + 1;
            }
        }

        let mut items = Vec::new();
        loop {
            let tok = self.peek().clone();
            match &tok.kind {
                TokenKind::RBrace => {
                    self.bump();
                    break;
                }
                TokenKind::Eof => {
                    self.error_at(&tok, "expected `}` closing the model".to_owned());
                    break;
                }
                _ => match self.item() {
                    Ok(item) => items.push(item),
                    Err(Reported) => self.recover_item(),
                },
            }
        }
        if !self.at_eof() {
            let tok = self.peek().clone();
            let msg = format!("unexpected {} after the model", tok.kind.describe());
            self.error_at(&tok, msg);
        }
        RawModel { name, items }
    }

    /// Skips to the next item keyword or to the model's closing brace.
    fn recover_item(&mut self) {
        let mut depth = self.open;
        loop {
            let tok = self.peek();
            match &tok.kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace if depth == 0 => return,
                TokenKind::RBrace => depth -= 1,
                TokenKind::Word(w) if depth == 0 && ITEM_KEYWORDS.contains(&w.as_str()) => return,
                _ => {}
            }
            self.bump();
        }
    }

    fn item(&mut self) -> PResult<RawItem> {
        self.open = 0;
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Word(w) if w == "role" => {
                self.bump();
                Ok(RawItem::Role(self.ident("role name")?))
            }
            TokenKind::Word(w) if w == "class" => {
                self.bump();
                self.class()
            }
            TokenKind::Word(w) if w == "process" => {
                self.bump();
                self.process()
            }
            TokenKind::Word(w) if w == "grant" => {
                self.bump();
                self.grant()
            }
            _ => {
                let tok = self.bump().clone();
                let msg = format!(
                    "expected `role`, `class`, `process` or `grant`, found {}",
                    tok.kind.describe()
                );
                Err(self.error_at(&tok, msg))
            }
        }
    }

    fn class(&mut self) -> PResult<RawItem> {
        let name = self.ident("class name")?;
        let dynamic = if self.peek().is_word("dynamic") {
            self.bump();
            true
        } else {
            false
        };
        let mut points = Vec::new();
        if self.peek().kind == TokenKind::LBrace {
            self.bump();
            self.open += 1;
            loop {
                let tok = self.peek().clone();
                let point = match &tok.kind {
                    TokenKind::Word(w) => w.parse::<StatusPoint>().ok(),
                    _ => None,
                };
                let Some(point) = point else {
                    return Err(self.unexpected("`waiting`, `fail` or `decision`"));
                };
                self.bump();
                points.push(Located::new(point, self.span_of(&tok)));
                if !self.list_continues()? {
                    break;
                }
            }
        }
        Ok(RawItem::Class {
            name,
            dynamic,
            points,
        })
    }

    /// After a list element: `,` continues, `}` ends.
    fn list_continues(&mut self) -> PResult<bool> {
        match self.peek().kind {
            TokenKind::Comma => {
                self.bump();
                Ok(true)
            }
            TokenKind::RBrace => {
                self.bump();
                self.open -= 1;
                Ok(false)
            }
            _ => Err(self.unexpected("`,` or `}`")),
        }
    }

    fn grant(&mut self) -> PResult<RawItem> {
        let role = self.ident("role name")?;
        self.expect_word("on")?;
        let class = self.ident("class name")?;
        self.expect(TokenKind::LBrace)?;
        self.open += 1;
        let mut privileges = Vec::new();
        loop {
            let tok = self.peek().clone();
            let privilege = match &tok.kind {
                TokenKind::Word(w) => w.parse::<Privilege>().ok(),
                _ => None,
            };
            let Some(privilege) = privilege else {
                return Err(self.unexpected("a privilege"));
            };
            self.bump();
            privileges.push(Located::new(privilege, self.span_of(&tok)));
            if !self.list_continues()? {
                break;
            }
        }
        Ok(RawItem::Grant {
            role,
            class,
            privileges,
        })
    }

    fn process(&mut self) -> PResult<RawItem> {
        let name = self.ident("process name")?;
        self.expect(TokenKind::LBrace)?;
        self.open += 1;
        let mut items = Vec::new();
        loop {
            let tok = self.peek().clone();
            match &tok.kind {
                TokenKind::RBrace => {
                    self.bump();
                    self.open -= 1;
                    break;
                }
                TokenKind::Eof => {
                    return Err(self.error_at(&tok, format!("process `{}` is not closed", name.value)))
                }
                TokenKind::Word(w) if ITEM_KEYWORDS.contains(&w.as_str()) => {
                    // A missing `}`; let the item loop pick up from here.
                    self.error_at(&tok, format!("expected `}}` closing process `{}`", name.value));
                    break;
                }
                _ => match self.process_item() {
                    Ok(item) => items.push(item),
                    Err(Reported) => self.recover_process_item(),
                },
            }
        }
        Ok(RawItem::Process { name, items })
    }

    fn recover_process_item(&mut self) {
        let mut depth = 0usize;
        loop {
            let tok = self.peek();
            match &tok.kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace if depth == 0 => return,
                TokenKind::RBrace => depth -= 1,
                TokenKind::Word(w)
                    if depth == 0
                        && (PROCESS_KEYWORDS.contains(&w.as_str())
                            || ITEM_KEYWORDS.contains(&w.as_str())) =>
                {
                    return
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn process_item(&mut self) -> PResult<RawProcessItem> {
        let tok = self.bump().clone();
        let word = match &tok.kind {
            TokenKind::Word(w) => w.as_str(),
            _ => "",
        };
        match word {
            "owner" => Ok(RawProcessItem::Privilege(
                ProcessPrivilege::Owner,
                self.ident("role name")?,
            )),
            "responsible" => Ok(RawProcessItem::Privilege(
                ProcessPrivilege::Responsibility,
                self.ident("role name")?,
            )),
            "input" => Ok(RawProcessItem::Input(self.ident("class name")?)),
            "output" => Ok(RawProcessItem::Output(self.ident("class name")?)),
            "transform" => self.transform(&tok),
            _ => {
                let msg = format!(
                    "expected `owner`, `responsible`, `input`, `output`, `transform` or `}}`, found {}",
                    tok.kind.describe()
                );
                Err(self.error_at(&tok, msg))
            }
        }
    }

    fn transform(&mut self, keyword: &Token) -> PResult<RawProcessItem> {
        let from = self.ident("source class")?;
        self.expect(TokenKind::Arrow)?;
        let to = self.ident("target class")?;
        let mut end = self.tokens[self.pos - 1].clone();
        let mode = match &self.peek().kind {
            TokenKind::Word(w) if w == "remaining" || w == "leaving" => {
                let mode = w.parse::<TransformMode>().ok();
                end = self.bump().clone();
                mode
            }
            // A misspelt mode: consume it, the resolver reports the missing mode.
            TokenKind::Word(w)
                if !PROCESS_KEYWORDS.contains(&w.as_str()) && !ITEM_KEYWORDS.contains(&w.as_str()) =>
            {
                end = self.bump().clone();
                None
            }
            _ => None,
        };
        let length = if end.line == keyword.line {
            end.column + end.length - keyword.column
        } else {
            keyword.length
        };
        let span = SourceSpan {
            file: self.file.to_owned(),
            line: keyword.line,
            column: keyword.column,
            length,
        };
        Ok(RawProcessItem::Transform {
            from,
            to,
            mode,
            span: Some(span),
        })
    }
}
