//! The nine if-then dimensions and their coordinates in the relation taxonomy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AtlasError;

/// One of the nine typed if-then relations.
///
/// Variants are declared in lexicographic order of their names so that the
/// derived `Ord` agrees with ordering by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "oEffect")]
    OEffect,
    #[serde(rename = "oReact")]
    OReact,
    #[serde(rename = "oWant")]
    OWant,
    #[serde(rename = "xAttr")]
    XAttr,
    #[serde(rename = "xEffect")]
    XEffect,
    #[serde(rename = "xIntent")]
    XIntent,
    #[serde(rename = "xNeed")]
    XNeed,
    #[serde(rename = "xReact")]
    XReact,
    #[serde(rename = "xWant")]
    XWant,
}

impl Dimension {
    /// All dimensions, in name order.
    pub const ALL: [Dimension; 9] = [
        Dimension::OEffect,
        Dimension::OReact,
        Dimension::OWant,
        Dimension::XAttr,
        Dimension::XEffect,
        Dimension::XIntent,
        Dimension::XNeed,
        Dimension::XReact,
        Dimension::XWant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::OEffect => "oEffect",
            Dimension::OReact => "oReact",
            Dimension::OWant => "oWant",
            Dimension::XAttr => "xAttr",
            Dimension::XEffect => "xEffect",
            Dimension::XIntent => "xIntent",
            Dimension::XNeed => "xNeed",
            Dimension::XReact => "xReact",
            Dimension::XWant => "xWant",
        }
    }

    /// `true` for the dimensions about participants other than PersonX.
    pub fn is_other(self) -> bool {
        matches!(self, Dimension::OEffect | Dimension::OReact | Dimension::OWant)
    }

    pub fn coords(self) -> TaxonomyCoords {
        classify_dimension(self)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = AtlasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .iter()
            .copied()
            .find(|d| d.name() == s)
            .ok_or_else(|| AtlasError::UnknownDimension(s.to_string()))
    }
}

/// What kind of content an inference describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContentType {
    MentalState,
    Event,
    Persona,
}

impl ContentType {
    pub const ALL: [ContentType; 3] = [ContentType::MentalState, ContentType::Event, ContentType::Persona];

    pub fn name(self) -> &'static str {
        match self {
            ContentType::MentalState => "MentalState",
            ContentType::Event => "Event",
            ContentType::Persona => "Persona",
        }
    }
}

impl fmt::Display for ContentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CausalCategory {
    Cause,
    Effect,
    Stative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subject {
    Agent,
    Theme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Volition {
    Voluntary,
    Involuntary,
}

/// Position of a dimension along the four taxonomy axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaxonomyCoords {
    pub content_type: ContentType,
    pub causal_category: CausalCategory,
    pub subject: Subject,
    pub volition: Volition,
}

impl TaxonomyCoords {
    const fn new(
        content_type: ContentType,
        causal_category: CausalCategory,
        subject: Subject,
        volition: Volition,
    ) -> Self {
        Self { content_type, causal_category, subject, volition }
    }
}

/// Returns the fixed taxonomy row for `dim`.
pub fn classify_dimension(dim: Dimension) -> TaxonomyCoords {
    use CausalCategory::*;
    use ContentType::*;
    use Subject::*;
    use Volition::*;

    match dim {
        Dimension::XIntent => TaxonomyCoords::new(MentalState, Cause, Agent, Voluntary),
        Dimension::XNeed => TaxonomyCoords::new(Event, Cause, Agent, Voluntary),
        Dimension::XAttr => TaxonomyCoords::new(Persona, Stative, Agent, Involuntary),
        Dimension::XEffect => TaxonomyCoords::new(Event, Effect, Agent, Involuntary),
        Dimension::XReact => TaxonomyCoords::new(MentalState, Effect, Agent, Involuntary),
        Dimension::XWant => TaxonomyCoords::new(Event, Effect, Agent, Voluntary),
        Dimension::OEffect => TaxonomyCoords::new(Event, Effect, Theme, Involuntary),
        Dimension::OReact => TaxonomyCoords::new(MentalState, Effect, Theme, Involuntary),
        Dimension::OWant => TaxonomyCoords::new(Event, Effect, Theme, Voluntary),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in Dimension::ALL {
            assert_eq!(d.name().parse::<Dimension>().unwrap(), d);
            let json = serde_json::to_string(&d).unwrap();
            assert_eq!(json, format!("\"{}\"", d.name()));
            assert_eq!(serde_json::from_str::<Dimension>(&json).unwrap(), d);
        }
        assert!("xintent".parse::<Dimension>().is_err());
        assert!("xFoo".parse::<Dimension>().is_err());
    }

    #[test]
    fn derived_order_is_name_order() {
        let mut by_name = Dimension::ALL;
        by_name.sort_by_key(|d| d.name());
        assert_eq!(by_name, Dimension::ALL);
    }

    #[test]
    fn quoted_rows() {
        use CausalCategory::*;
        use ContentType::*;
        use Subject::*;
        use Volition::*;
        assert_eq!(
            classify_dimension(Dimension::XIntent),
            TaxonomyCoords::new(MentalState, Cause, Agent, Voluntary)
        );
        assert_eq!(
            classify_dimension(Dimension::OReact),
            TaxonomyCoords::new(MentalState, Effect, Theme, Involuntary)
        );
        assert_eq!(
            classify_dimension(Dimension::XAttr),
            TaxonomyCoords::new(Persona, Stative, Agent, Involuntary)
        );
        assert_eq!(
            classify_dimension(Dimension::XNeed),
            TaxonomyCoords::new(Event, Cause, Agent, Voluntary)
        );
    }

    #[test]
    fn row_invariants() {
        for d in Dimension::ALL {
            let c = classify_dimension(d);
            if c.content_type == ContentType::Persona {
                assert_eq!(c.causal_category, CausalCategory::Stative);
            }
            if c.subject == Subject::Theme {
                assert_ne!(c.causal_category, CausalCategory::Cause);
            }
            assert_eq!(c.subject == Subject::Theme, d.is_other());
        }
    }
}
