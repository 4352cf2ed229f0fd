use crate::diagnostic::{Code, Diagnostic, Site, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    /// Identifier or keyword; privilege keywords keep their trailing `+`.
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    Comma,
    Arrow,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Str(s) => format!("string {s:?}"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl Token {
    pub(crate) fn is_word(&self, word: &str) -> bool {
        matches!(&self.kind, TokenKind::Word(w) if w == word)
    }

    pub(crate) fn span(&self, file: &str) -> SourceSpan {
        SourceSpan {
            file: file.to_owned(),
            line: self.line,
            column: self.column,
            length: self.length,
        }
    }
}

pub(crate) fn tokenize(source: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lexer = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        file,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
    };
    lexer.run();
    (lexer.tokens, lexer.diagnostics)
}

struct Lexer<'f> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    file: &'f str,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let (line, column, start) = (self.line, self.column, self.pos);
            let kind = match c {
                c if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                    continue;
                }
                '{' => {
                    self.bump();
                    TokenKind::LBrace
                }
                '}' => {
                    self.bump();
                    TokenKind::RBrace
                }
                ',' => {
                    self.bump();
                    TokenKind::Comma
                }
                '-' if self.chars.get(self.pos + 1) == Some(&'>') => {
                    self.bump();
                    self.bump();
                    TokenKind::Arrow
                }
                '"' => match self.string() {
                    Some(s) => TokenKind::Str(s),
                    None => continue,
                },
                c if c.is_alphabetic() => {
                    let mut word = String::new();
                    while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
                        word.push(c);
                        self.bump();
                    }
                    if self.peek() == Some('+') {
                        word.push('+');
                        self.bump();
                    }
                    TokenKind::Word(word)
                }
                other => {
                    self.bump();
                    self.error(line, column, 1, format!("unexpected character {other:?}"));
                    continue;
                }
            };
            self.tokens.push(Token {
                kind,
                line,
                column,
                length: (self.pos - start) as u32,
            });
        }
        self.tokens.push(Token {
            kind: TokenKind::Eof,
            line: self.line,
            column: self.column,
            length: 0,
        });
    }

    fn string(&mut self) -> Option<String> {
        let (line, column) = (self.line, self.column);
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Some(out),
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('r') => out.push('\r'),
                    other => {
                        let shown = other.map(|c| c.to_string()).unwrap_or_default();
                        self.error(
                            self.line,
                            self.column.saturating_sub(2).max(1),
                            2,
                            format!("unknown escape `\\{shown}` in string"),
                        );
                    }
                },
                Some(c) => out.push(c),
                None => {
                    self.error(line, column, 1, "unterminated string".to_owned());
                    return None;
                }
            }
        }
    }

    fn error(&mut self, line: u32, column: u32, length: u32, message: String) {
        let span = SourceSpan {
            file: self.file.to_owned(),
            line,
            column,
            length,
        };
        self.diagnostics.push(
            Diagnostic::new(Code::Syntax, Site::Text(format!("{span}")), message)
                .with_span(Some(span)),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let (tokens, diags) = tokenize(src, "t");
        assert!(diags.is_empty(), "{diags:?}");
        tokens.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn words_plus_and_arrows() {
        assert_eq!(
            kinds("grant GP on X { reference+ } # trailing\nA->B"),
            vec![
                TokenKind::Word("grant".into()),
                TokenKind::Word("GP".into()),
                TokenKind::Word("on".into()),
                TokenKind::Word("X".into()),
                TokenKind::LBrace,
                TokenKind::Word("reference+".into()),
                TokenKind::RBrace,
                TokenKind::Word("A".into()),
                TokenKind::Arrow,
                TokenKind::Word("B".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            kinds(r#""a \"b\" \\ c""#),
            vec![TokenKind::Str("a \"b\" \\ c".into()), TokenKind::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let (tokens, _) = tokenize("model\n  \"M\"", "f");
        assert_eq!((tokens[0].line, tokens[0].column, tokens[0].length), (1, 1, 5));
        assert_eq!((tokens[1].line, tokens[1].column, tokens[1].length), (2, 3, 3));
    }

    #[test]
    fn bad_characters_and_unterminated_strings() {
        let (_, diags) = tokenize("role G$P \"open", "f");
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.code == Code::Syntax && d.span.is_some()));
        assert_eq!(diags[0].span.as_ref().unwrap().column, 7);
    }
}
