use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collapsed category. Declaration order is the tie-break priority used by
/// the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Aggression,
    Grief,
    Other,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Aggression, Category::Grief, Category::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Aggression => "aggression",
            Category::Grief => "grief",
            Category::Other => "other",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

/// Fine-code inventory with its total collapse map.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Codebook {
    collapse_map: BTreeMap<String, Category>,
}

/// Default fine codes, used when no codebook file is given. Deliberately
/// partial; `aggression` and `threats` are kept as distinct codes.
pub const BUILTIN_CODES: &[(&str, Category)] = &[
    ("aggression", Category::Aggression),
    ("insults", Category::Aggression),
    ("threats", Category::Aggression),
    ("bragging", Category::Aggression),
    ("hypervigilance", Category::Aggression),
    ("authority-challenge", Category::Aggression),
    ("distress", Category::Grief),
    ("sadness", Category::Grief),
    ("loneliness", Category::Grief),
    ("death", Category::Grief),
    ("general-conversation", Category::Other),
    ("women", Category::Other),
    ("happiness", Category::Other),
];

impl Codebook {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Category)>,
        S: Into<String>,
    {
        let mut collapse_map = BTreeMap::new();
        for (code, cat) in entries {
            let code = code.into();
            if code.is_empty() || code.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("bad fine code {code:?}")));
            }
            if collapse_map.insert(code.clone(), cat).is_some() {
                return Err(Error::invalid(format!("fine code {code:?} listed twice")));
            }
        }
        Ok(Codebook { collapse_map })
    }

    pub fn builtin() -> Self {
        Codebook::new(BUILTIN_CODES.iter().copied()).expect("static codebook is valid")
    }

    pub fn fine_codes(&self) -> impl Iterator<Item = &str> {
        self.collapse_map.keys().map(String::as_str)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.collapse_map.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.collapse_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collapse_map.is_empty()
    }

    pub fn collapse(&self, code: &str) -> Result<Category> {
        self.collapse_map.get(code).copied().ok_or_else(|| Error::UnknownCode {
            code: code.to_string(),
            line: None,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Category)> {
        self.collapse_map.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Reads `fine_code<TAB>category` lines; `#` lines and blank lines are skipped.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split('\t');
            let (Some(code), Some(cat), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::parse(lineno, "expected fine_code<TAB>category"));
            };
            let code = code.trim();
            if code.is_empty() {
                return Err(Error::parse(lineno, "empty fine code"));
            }
            let cat: Category = cat
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            if map.insert(code.to_string(), cat).is_some() {
                return Err(Error::parse(lineno, format!("fine code {code:?} listed twice")));
            }
        }
        Ok(Codebook { collapse_map: map })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# fine_code\tcategory\n");
        for (code, cat) in &self.collapse_map {
            out.push_str(&format!("{code}\t{cat}\n"));
        }
        out
    }
}
