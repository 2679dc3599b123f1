//! The fixed card vocabulary: categories, programming cards and data-fallacy cards.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUILTIN_CATALOG: &str = include_str!("../assets/catalog.json");

/// What a category consumes and produces. Every card inherits its category's signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IoSignature {
    Source,
    Transform,
    Variable,
    Aggregate,
    Visualization,
    ChartElement,
}

/// Kind of value flowing between two cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Nothing,
    Table,
    Scalar,
    Chart,
}

impl IoSignature {
    pub fn input(self) -> ValueKind {
        match self {
            IoSignature::Source => ValueKind::Nothing,
            IoSignature::ChartElement => ValueKind::Chart,
            _ => ValueKind::Table,
        }
    }

    pub fn output(self) -> ValueKind {
        match self {
            IoSignature::Source | IoSignature::Transform | IoSignature::Variable => {
                ValueKind::Table
            }
            IoSignature::Aggregate => ValueKind::Scalar,
            IoSignature::Visualization | IoSignature::ChartElement => ValueKind::Chart,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardCategory {
    pub id: String,
    pub display_name: String,
    /// `#RRGGBB`
    pub color: String,
    pub io_signature: IoSignature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FieldKind {
    ColumnName,
    Comparator,
    Literal,
    ColumnList,
    VariableName,
    Url,
    File,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFieldSpec {
    pub name: String,
    pub kind: FieldKind,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardSpec {
    pub id: String,
    pub category: String,
    pub title: String,
    pub definition: String,
    pub example_usage: String,
    #[serde(default)]
    pub input_fields: Vec<InputFieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tips: Option<String>,
}

impl CardSpec {
    pub fn field(&self, name: &str) -> Option<&InputFieldSpec> {
        self.input_fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallacyCard {
    pub id: String,
    pub name: String,
    pub description: String,
    pub samples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("malformed catalog at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("card `{card}` refers to unknown category `{category}`")]
    UnknownCategory { card: String, category: String },
    #[error("invalid catalog entry `{id}`: {reason}")]
    Invalid { id: String, reason: String },
    #[error("no card with id `{0}`")]
    CardNotFound(String),
    #[error("no category with id `{0}`")]
    CategoryNotFound(String),
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    #[serde(default)]
    categories: Vec<CardCategory>,
    #[serde(default)]
    cards: Vec<CardSpec>,
    #[serde(default)]
    fallacies: Vec<FallacyCard>,
}

/// Immutable after load. Categories are ordered by signature then id; cards by
/// (category, id); fallacies keep document order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Catalog {
    categories: Vec<CardCategory>,
    cards: Vec<CardSpec>,
    fallacies: Vec<FallacyCard>,
}

/// Parses and validates a catalog document. Blank input is an empty catalog.
pub fn load_catalog(source: &str) -> Result<Catalog, CatalogError> {
    if source.trim().is_empty() {
        return Ok(Catalog::default());
    }
    let doc: CatalogDoc = serde_json::from_str(source).map_err(|e| CatalogError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Catalog::from_doc(doc)
}

impl Catalog {
    /// The catalog compiled into the binary.
    pub fn builtin() -> &'static Catalog {
        static BUILTIN: OnceLock<Catalog> = OnceLock::new();
        BUILTIN.get_or_init(|| load_catalog(BUILTIN_CATALOG).expect("built-in catalog is valid"))
    }

    pub fn builtin_json() -> &'static str {
        BUILTIN_CATALOG
    }

    fn from_doc(doc: CatalogDoc) -> Result<Catalog, CatalogError> {
        let mut ids = HashSet::new();
        let mut claim = |id: &str| {
            if ids.insert(id.to_string()) {
                Ok(())
            } else {
                Err(CatalogError::DuplicateId(id.to_string()))
            }
        };
        let invalid = |id: &str, reason: &str| CatalogError::Invalid {
            id: id.to_string(),
            reason: reason.to_string(),
        };

        let mut colors = HashSet::new();
        for cat in &doc.categories {
            claim(&cat.id)?;
            if !is_hex_color(&cat.color) {
                return Err(invalid(&cat.id, "color must be #RRGGBB"));
            }
            if !colors.insert(cat.color.to_ascii_uppercase()) {
                return Err(invalid(&cat.id, "color is shared with another category"));
            }
        }
        for card in &doc.cards {
            claim(&card.id)?;
            if !doc.categories.iter().any(|c| c.id == card.category) {
                return Err(CatalogError::UnknownCategory {
                    card: card.id.clone(),
                    category: card.category.clone(),
                });
            }
            if card.definition.trim().is_empty() || card.example_usage.trim().is_empty() {
                return Err(invalid(
                    &card.id,
                    "definition and example usage are required",
                ));
            }
            let mut names = HashSet::new();
            if let Some(dup) = card.input_fields.iter().find(|f| !names.insert(&f.name)) {
                return Err(invalid(
                    &card.id,
                    &format!("input field `{}` repeats", dup.name),
                ));
            }
        }
        for fallacy in &doc.fallacies {
            claim(&fallacy.id)?;
            if fallacy.samples.len() != 3 {
                return Err(invalid(
                    &fallacy.id,
                    "a fallacy card carries exactly 3 samples",
                ));
            }
        }

        let mut categories = doc.categories;
        categories.sort_by(|a, b| (a.io_signature, &a.id).cmp(&(b.io_signature, &b.id)));
        let rank = |category: &str| categories.iter().position(|c| c.id == category);
        let mut cards = doc.cards;
        cards.sort_by(|a, b| (rank(&a.category), &a.id).cmp(&(rank(&b.category), &b.id)));
        Ok(Catalog {
            categories,
            cards,
            fallacies: doc.fallacies,
        })
    }

    pub fn categories(&self) -> &[CardCategory] {
        &self.categories
    }

    pub fn cards(&self) -> &[CardSpec] {
        &self.cards
    }

    pub fn fallacies(&self) -> &[FallacyCard] {
        &self.fallacies
    }

    /// Case-sensitive lookup.
    pub fn get_card(&self, id: &str) -> Result<&CardSpec, CatalogError> {
        self.cards
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| CatalogError::CardNotFound(id.to_string()))
    }

    pub fn category(&self, id: &str) -> Result<&CardCategory, CatalogError> {
        self.categories
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| CatalogError::CategoryNotFound(id.to_string()))
    }

    /// The signature of a card, always taken from its category.
    pub fn signature_of(&self, card: &CardSpec) -> IoSignature {
        self.category(&card.category)
            .expect("cards reference known categories")
            .io_signature
    }

    pub fn list_by_category(&self, category: &str) -> Result<Vec<&CardSpec>, CatalogError> {
        self.category(category)?;
        Ok(self
            .cards
            .iter()
            .filter(|c| c.category == category)
            .collect())
    }

    pub fn to_json(&self) -> String {
        let doc = CatalogDoc {
            categories: self.categories.clone(),
            cards: self.cards.clone(),
            fallacies: self.fallacies.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("catalog serializes")
    }
}

impl Serialize for Catalog {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Ref<'a> {
            categories: &'a [CardCategory],
            cards: &'a [CardSpec],
            fallacies: &'a [FallacyCard],
        }
        Ref {
            categories: &self.categories,
            cards: &self.cards,
            fallacies: &self.fallacies,
        }
        .serialize(serializer)
    }
}

fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].bytes().all(|b| b.is_ascii_hexdigit())
}
