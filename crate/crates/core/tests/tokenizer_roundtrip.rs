use proptest::prelude::*;
use streetlex::corpus::{tokenize, Token, TokenKind};

/// Rebuilds the text from token spans, filling gaps from the original, and
/// checks every token invariant along the way.
fn check(text: &str, tokens: &[Token]) -> Result<(), TestCaseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut rebuilt = String::new();
    let mut pos = 0;
    for t in tokens {
        prop_assert!(t.span.start >= pos, "overlap or disorder at {:?}", t);
        prop_assert!(t.span.start < t.span.end && t.span.end <= chars.len());
        let gap: String = chars[pos..t.span.start].iter().collect();
        prop_assert!(gap.chars().all(char::is_whitespace), "dropped {:?}", gap);
        rebuilt.push_str(&gap);
        let slice: String = chars[t.span.start..t.span.end].iter().collect();
        prop_assert_eq!(&slice, &t.surface);
        prop_assert!(!t.surface.chars().any(char::is_whitespace));
        match t.kind {
            TokenKind::Hashtag => prop_assert!(t.surface.starts_with('#')),
            TokenKind::Mention => prop_assert!(t.surface.starts_with('@')),
            _ => {}
        }
        rebuilt.push_str(&t.surface);
        pos = t.span.end;
    }
    let tail: String = chars[pos..].iter().collect();
    prop_assert!(tail.chars().all(char::is_whitespace));
    rebuilt.push_str(&tail);
    prop_assert_eq!(rebuilt, text);
    Ok(())
}

fn tweetish() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        Just("#GBE".to_string()),
        Just("@lil_b".to_string()),
        Just("http://t.co/abc?x=1.".to_string()),
        Just(":-(".to_string()),
        Just("<3".to_string()),
        Just("😂😂".to_string()),
        Just("👍🏾".to_string()),
        Just("🇺🇸".to_string()),
        Just("don't".to_string()),
        Just("3.14".to_string()),
        Just("!!!".to_string()),
        Just("\u{200d}".to_string()),
        Just("\u{301}".to_string()),
        "[a-zA-Z0-9]{1,6}",
        any::<char>().prop_map(String::from),
        "[ \t\n\u{a0}]{1,2}",
    ];
    prop::collection::vec(piece, 0..12).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn arbitrary_unicode(text in any::<String>()) {
        check(&text, &tokenize(&text))?;
    }

    #[test]
    fn tweet_like(text in tweetish()) {
        check(&text, &tokenize(&text))?;
    }
}
