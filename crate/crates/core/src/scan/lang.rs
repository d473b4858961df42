use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Lexical description of the analysed language. Only Java ships, but the
/// lexer and the statement grouping read everything from here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LanguageConfig {
    pub source_extension: String,
    pub line_comment: String,
    pub block_comment_open: String,
    pub block_comment_close: String,
    pub keywords: BTreeSet<String>,
    pub modifiers: BTreeSet<String>,
    pub primitive_types: BTreeSet<String>,
}

fn set(words: &str) -> BTreeSet<String> {
    words.split_whitespace().map(str::to_string).collect()
}

impl LanguageConfig {
    pub fn java() -> Self {
        LanguageConfig {
            source_extension: ".java".into(),
            line_comment: "//".into(),
            block_comment_open: "/*".into(),
            block_comment_close: "*/".into(),
            keywords: set(
                "abstract assert boolean break byte case catch char class const continue \
                 default do double else enum extends final finally float for goto if \
                 implements import instanceof int interface long native new package private \
                 protected public return short static strictfp super switch synchronized \
                 this throw throws transient try void volatile while",
            ),
            modifiers: set(
                "public protected private static final abstract native synchronized \
                 transient volatile strictfp default",
            ),
            primitive_types: set("boolean byte char short int long float double void"),
        }
    }

    pub fn is_keyword(&self, s: &str) -> bool {
        self.keywords.contains(s)
    }

    pub fn is_modifier(&self, s: &str) -> bool {
        self.modifiers.contains(s)
    }

    pub fn is_primitive(&self, s: &str) -> bool {
        self.primitive_types.contains(s)
    }
}

impl Default for LanguageConfig {
    fn default() -> Self {
        Self::java()
    }
}
