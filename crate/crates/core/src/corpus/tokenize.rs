//! Twitter-aware tokenization.
//!
//! The input is first split on Unicode whitespace; each non-whitespace chunk
//! is then scanned left to right. At every position the recognizers are tried
//! in a fixed precedence order: url, mention, hashtag, emoticon, emoji,
//! numeral/word run, punctuation. Spans are half-open character offsets (not
//! byte offsets) into the original text, so concatenating token surfaces with
//! the whitespace gaps between spans reproduces the input exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Url,
    Emoticon,
    Emoji,
    Numeral,
    Punctuation,
}

impl TokenKind {
    pub const ALL: [TokenKind; 8] = [
        TokenKind::Word,
        TokenKind::Hashtag,
        TokenKind::Mention,
        TokenKind::Url,
        TokenKind::Emoticon,
        TokenKind::Emoji,
        TokenKind::Numeral,
        TokenKind::Punctuation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Word => "word",
            TokenKind::Hashtag => "hashtag",
            TokenKind::Mention => "mention",
            TokenKind::Url => "url",
            TokenKind::Emoticon => "emoticon",
            TokenKind::Emoji => "emoji",
            TokenKind::Numeral => "numeral",
            TokenKind::Punctuation => "punctuation",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TokenKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown token kind {s:?}"))
    }
}

/// Half-open `[start, end)` interval of character offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub span: Span,
    pub kind: TokenKind,
}

impl Token {
    /// Builds a standalone token for a surface read from an external file
    /// (tagged corpora, parallel corpora). The kind is what the tokenizer
    /// would assign if the surface came out as a single token, else `Word`.
    pub fn from_surface(surface: &str, start: usize) -> Token {
        let toks = tokenize(surface);
        let kind = match toks.as_slice() {
            [only] if only.span.len() == surface.chars().count() => only.kind,
            _ => TokenKind::Word,
        };
        Token {
            surface: surface.to_string(),
            span: Span {
                start,
                end: start + surface.chars().count(),
            },
            kind,
        }
    }

    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// Builds tokens for whitespace-separated surfaces, with spans laid out as if
/// the surfaces were joined by single spaces.
pub fn tokens_from_surfaces<S: AsRef<str>>(surfaces: &[S]) -> Vec<Token> {
    let mut offset = 0;
    surfaces
        .iter()
        .map(|s| {
            let tok = Token::from_surface(s.as_ref(), offset);
            offset = tok.span.end + 1;
            tok
        })
        .collect()
}

/// Closed emoticon inventory. Matching is longest-first; a final mouth
/// character may repeat (`:)))`).
pub const EMOTICONS: &[&str] = &[
    ":)", ":-)", ":(", ":-(", ";)", ";-)", ";(", ":/", ":-/", ":\\", ":-\\", ":p", ":P", ":-p", ":-P", ";p", ";P",
    ":D", ":-D", ";D", "=)", "=(", "=D", "=/", "=p", "=P", ":'(", ":'-(", ":')", ":o", ":O", ":-o", ":-O", ":|", ":-|",
    ":*", ":-*", ":]", ":[", ":-]", ":-[", ":@", ":$", ":x", ":X", "<3", "</3", "XD", "xD", "X-D", "x-D", "-_-", "^_^",
    "^^", "o_O", "O_o", "o_o", "O_O", "T_T", "._.",
];

const URL_SCHEMES: &[&str] = &["http://", "https://"];

pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        tokenize_chunk(&chars, start, i, &mut tokens);
    }
    tokens
}

fn tokenize_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let chunk = &chars[start..end];
    let mut i = 0;
    while i < chunk.len() {
        let (len, kind) = match_url(chunk, i)
            .map(|n| (n, TokenKind::Url))
            .or_else(|| match_tagged(chunk, i, '@', is_handle_char).map(|n| (n, TokenKind::Mention)))
            .or_else(|| match_tagged(chunk, i, '#', is_hashtag_char).map(|n| (n, TokenKind::Hashtag)))
            .or_else(|| match_emoticon(chunk, i).map(|n| (n, TokenKind::Emoticon)))
            .or_else(|| match_emoji(chunk, i).map(|n| (n, TokenKind::Emoji)))
            .or_else(|| match_word(chunk, i))
            .unwrap_or_else(|| (match_punct(chunk, i), TokenKind::Punctuation));
        let surface: String = chunk[i..i + len].iter().collect();
        out.push(Token {
            surface,
            span: Span {
                start: start + i,
                end: start + i + len,
            },
            kind,
        });
        i += len;
    }
}

fn starts_with_ci(chunk: &[char], at: usize, prefix: &str) -> bool {
    let mut n = 0;
    for p in prefix.chars() {
        match chunk.get(at + n) {
            Some(c) if c.to_ascii_lowercase() == p => n += 1,
            _ => return false,
        }
    }
    true
}

fn match_url(chunk: &[char], at: usize) -> Option<usize> {
    let scheme = URL_SCHEMES
        .iter()
        .find(|s| starts_with_ci(chunk, at, s))?
        .chars()
        .count();
    let mut end = chunk.len();
    // Sentence punctuation glued to the end of a link is not part of it.
    while end > at + scheme && matches!(chunk[end - 1], '.' | ',' | ';' | ':' | '!' | '?' | ')' | '"' | '\'') {
        end -= 1;
    }
    Some(end - at)
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_hashtag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn match_tagged(chunk: &[char], at: usize, sigil: char, body: fn(char) -> bool) -> Option<usize> {
    if chunk[at] != sigil {
        return None;
    }
    let n = chunk[at + 1..].iter().take_while(|&&c| body(c)).count();
    (n > 0).then_some(n + 1)
}

fn match_emoticon(chunk: &[char], at: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for emo in EMOTICONS {
        let ec: Vec<char> = emo.chars().collect();
        if chunk.len() - at < ec.len() || chunk[at..at + ec.len()] != ec[..] {
            continue;
        }
        if best.is_none_or(|b| ec.len() > b) {
            best = Some(ec.len());
        }
    }
    let mut len = best?;
    let last = chunk[at + len - 1];
    if matches!(last, ')' | '(' | 'D' | 'P' | 'p' | '/' | '[' | ']' | '*' | '3') {
        while at + len < chunk.len() && chunk[at + len] == last {
            len += 1;
        }
    }
    // Emoticons may not be carved out of the middle of a word.
    let first = chunk[at];
    if first.is_alphanumeric() && at > 0 && chunk[at - 1].is_alphanumeric() {
        return None;
    }
    if chunk[at + len - 1].is_alphanumeric() && chunk.get(at + len).is_some_and(|c| c.is_alphanumeric()) {
        return None;
    }
    Some(len)
}

fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1F02F   // mahjong
        | 0x1F0A0..=0x1F0FF // playing cards
        | 0x1F1E6..=0x1F1FF // regional indicators
        | 0x1F300..=0x1F5FF // misc symbols and pictographs
        | 0x1F600..=0x1F64F // emoticons
        | 0x1F680..=0x1F6FF // transport and map
        | 0x1F700..=0x1F77F
        | 0x1F780..=0x1F7FF // geometric shapes extended
        | 0x1F800..=0x1F8FF
        | 0x1F900..=0x1F9FF // supplemental symbols and pictographs
        | 0x1FA00..=0x1FAFF // symbols and pictographs extended-a
        | 0x2600..=0x26FF   // misc symbols
        | 0x2700..=0x27BF   // dingbats
        | 0x2B50 | 0x2B55 | 0x2B1B | 0x2B1C
        | 0x203C | 0x2049 | 0x2122 | 0x2139
        | 0x231A | 0x231B | 0x2328 | 0x23CF | 0x23E9..=0x23F3 | 0x23F8..=0x23FA
        | 0x3030 | 0x303D | 0x3297 | 0x3299)
}

fn is_emoji_modifier(c: char) -> bool {
    matches!(c as u32, 0xFE0E | 0xFE0F | 0x1F3FB..=0x1F3FF | 0x20E3 | 0xE0020..=0xE007F)
}

/// One emoji with its trailing modifiers, including ZWJ sequences. Paired
/// regional indicators form a single flag.
fn match_emoji(chunk: &[char], at: usize) -> Option<usize> {
    let c = chunk[at];
    if !is_emoji(c) {
        return None;
    }
    let is_ri = |c: char| (0x1F1E6..=0x1F1FF).contains(&(c as u32));
    let mut i = at + 1;
    if is_ri(c) && chunk.get(i).is_some_and(|&n| is_ri(n)) {
        i += 1;
    }
    loop {
        while i < chunk.len() && is_emoji_modifier(chunk[i]) {
            i += 1;
        }
        if i + 1 < chunk.len() && chunk[i] == '\u{200D}' && is_emoji(chunk[i + 1]) {
            i += 2;
        } else {
            break;
        }
    }
    Some(i - at)
}

fn is_combining(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

fn is_word_char(c: char) -> bool {
    (c.is_alphanumeric() || c == '_' || is_combining(c)) && !is_emoji(c)
}

/// A maximal run of word characters. Apostrophes and hyphens join letters
/// (`can't`, `lil-b`); `.`, `,` and `:` join digits (`3.5`, `10:30`). A run
/// made only of digits and digit separators is a numeral.
fn match_word(chunk: &[char], at: usize) -> Option<(usize, TokenKind)> {
    if !is_word_char(chunk[at]) || is_combining(chunk[at]) {
        return None;
    }
    let mut i = at + 1;
    while i < chunk.len() {
        let c = chunk[i];
        if is_word_char(c) {
            i += 1;
            continue;
        }
        let prev = chunk[i - 1];
        let next = chunk.get(i + 1).copied();
        let joins = match c {
            '\'' | '\u{2019}' | '-' => {
                next.is_some_and(|n| n.is_alphanumeric() && !is_emoji(n)) && prev.is_alphanumeric()
            }
            '.' | ',' | ':' => next.is_some_and(|n| n.is_ascii_digit()) && prev.is_ascii_digit(),
            _ => false,
        };
        if joins {
            i += 2;
        } else {
            break;
        }
    }
    let run = &chunk[at..i];
    let numeral = run[0].is_ascii_digit() && run.iter().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | ':'));
    Some((i - at, if numeral { TokenKind::Numeral } else { TokenKind::Word }))
}

/// Runs of one repeated punctuation character (`!!!`, `...`) form one token.
fn match_punct(chunk: &[char], at: usize) -> usize {
    let c = chunk[at];
    let mut n = 1;
    while chunk.get(at + n) == Some(&c) {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(String, TokenKind)> {
        tokenize(text).into_iter().map(|t| (t.surface, t.kind)).collect()
    }

    fn pairs(items: &[(&str, TokenKind)]) -> Vec<(String, TokenKind)> {
        items.iter().map(|(s, k)| (s.to_string(), *k)).collect()
    }

    #[test]
    fn hashtag_mention_url() {
        use TokenKind::*;
        assert_eq!(
            kinds("#GBE @TyquanAssassin http://t.co/x"),
            pairs(&[("#GBE", Hashtag), ("@TyquanAssassin", Mention), ("http://t.co/x", Url)])
        );
    }

    #[test]
    fn empty_and_blank() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \t\n ").is_empty());
    }

    #[test]
    fn emoticon_after_word() {
        use TokenKind::*;
        assert_eq!(kinds("smh :("), pairs(&[("smh", Word), (":(", Emoticon)]));
        assert_eq!(kinds("smh:("), pairs(&[("smh", Word), (":(", Emoticon)]));
        assert_eq!(kinds("lol :)))"), pairs(&[("lol", Word), (":)))", Emoticon)]));
        assert_eq!(kinds("<3"), pairs(&[("<3", Emoticon)]));
    }

    #[test]
    fn letter_emoticons_need_boundaries() {
        use TokenKind::*;
        assert_eq!(kinds("XD"), pairs(&[("XD", Emoticon)]));
        assert_eq!(kinds("XDD"), pairs(&[("XDD", Emoticon)]));
        assert_eq!(kinds("XDA"), pairs(&[("XDA", Word)]));
        assert_eq!(kinds("maxD"), pairs(&[("maxD", Word)]));
    }

    #[test]
    fn url_beats_emoticon_and_strips_trailing_punct() {
        use TokenKind::*;
        assert_eq!(
            kinds("see https://t.co/abc:p."),
            pairs(&[("see", Word), ("https://t.co/abc:p", Url), (".", Punctuation)])
        );
    }

    #[test]
    fn numerals_and_words() {
        use TokenKind::*;
        assert_eq!(
            kinds("4 me 10:30 2day 3.5 can't lil-b"),
            pairs(&[
                ("4", Numeral),
                ("me", Word),
                ("10:30", Numeral),
                ("2day", Word),
                ("3.5", Numeral),
                ("can't", Word),
                ("lil-b", Word),
            ])
        );
    }

    #[test]
    fn emoji_sequences() {
        use TokenKind::*;
        assert_eq!(
            kinds("rip😢😢 🙏🏾"),
            pairs(&[("rip", Word), ("😢", Emoji), ("😢", Emoji), ("🙏🏾", Emoji)])
        );
        assert_eq!(
            kinds("👨\u{200D}👩\u{200D}👧"),
            pairs(&[("👨\u{200D}👩\u{200D}👧", Emoji)])
        );
        assert_eq!(kinds("🇺🇸"), pairs(&[("🇺🇸", Emoji)]));
    }

    #[test]
    fn bare_sigils_are_punctuation() {
        use TokenKind::*;
        assert_eq!(
            kinds("# @ !!!"),
            pairs(&[("#", Punctuation), ("@", Punctuation), ("!!!", Punctuation)])
        );
        assert_eq!(kinds("@x."), pairs(&[("@x", Mention), (".", Punctuation)]));
    }

    #[test]
    fn spans_are_char_offsets() {
        let toks = tokenize("é 😂 ok");
        assert_eq!(toks[0].span, Span { start: 0, end: 1 });
        assert_eq!(toks[1].span, Span { start: 2, end: 3 });
        assert_eq!(toks[2].span, Span { start: 4, end: 6 });
    }

    #[test]
    fn from_surface_kinds() {
        assert_eq!(Token::from_surface("#gbe", 0).kind, TokenKind::Hashtag);
        assert_eq!(Token::from_surface(":(", 0).kind, TokenKind::Emoticon);
        assert_eq!(Token::from_surface("opp", 0).kind, TokenKind::Word);
        assert_eq!(Token::from_surface("a.b", 0).kind, TokenKind::Word);
        let toks = tokens_from_surfaces(&["i", "blow"]);
        assert_eq!(toks[1].span, Span { start: 2, end: 6 });
    }
}
