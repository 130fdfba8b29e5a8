use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Seq2SeqError;
use crate::atlas::Dimension;

/// Encoder sharing layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// One encoder and one decoder per dimension.
    #[serde(rename = "single9")]
    Single9,
    /// Voluntary and involuntary encoders.
    #[serde(rename = "event-invol")]
    EventInvolEvent,
    /// Agent (PersonX) and theme (others) encoders.
    #[serde(rename = "event-person-xy")]
    EventPersonXY,
    /// Pre-condition and post-condition encoders; `xAttr` is not modelled.
    #[serde(rename = "event-pre-post")]
    EventPrePost,
    /// Retrieval baseline with no trainable parameters.
    #[serde(rename = "nearest-neighbor")]
    NearestNeighbor,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Single9,
        Variant::EventInvolEvent,
        Variant::EventPersonXY,
        Variant::EventPrePost,
        Variant::NearestNeighbor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Single9 => "single9",
            Variant::EventInvolEvent => "event-invol",
            Variant::EventPersonXY => "event-person-xy",
            Variant::EventPrePost => "event-pre-post",
            Variant::NearestNeighbor => "nearest-neighbor",
        }
    }

    /// Dimensions this variant produces output for.
    pub fn dimensions(self) -> Vec<Dimension> {
        match self {
            Variant::EventPrePost => Dimension::ALL.into_iter().filter(|d| *d != Dimension::XAttr).collect(),
            _ => Dimension::ALL.to_vec(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Seq2SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Seq2SeqError::BadConfig(format!("unknown variant {s:?}")))
    }
}

/// Which encoder feeds each decoder. Dimensions missing from the map are not
/// modelled by the variant.
pub fn encoder_grouping(variant: Variant) -> Result<BTreeMap<Dimension, String>, Seq2SeqError> {
    use Dimension::*;
    let groups: Vec<(&str, Vec<Dimension>)> = match variant {
        Variant::Single9 => return Ok(Dimension::ALL.into_iter().map(|d| (d, d.name().to_string())).collect()),
        Variant::EventInvolEvent => vec![
            ("voluntary", vec![XIntent, XNeed, XWant, OWant]),
            ("involuntary", vec![XAttr, XEffect, XReact, OEffect, OReact]),
        ],
        Variant::EventPersonXY => vec![
            ("agent", vec![XIntent, XNeed, XAttr, XEffect, XReact, XWant]),
            ("theme", vec![OEffect, OReact, OWant]),
        ],
        Variant::EventPrePost => {
            vec![("pre", vec![XNeed, XIntent]), ("post", vec![XWant, XEffect, XReact, OWant, OEffect, OReact])]
        }
        Variant::NearestNeighbor => {
            return Err(Seq2SeqError::BadConfig("the nearest-neighbor baseline has no encoders".into()))
        }
    };
    Ok(groups
        .into_iter()
        .flat_map(|(id, dims)| dims.into_iter().map(move |d| (d, id.to_string())))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub variant: Variant,
    pub embed_dim: usize,
    /// Concatenated size of both encoder directions; must be even.
    pub enc_hidden: usize,
    pub dec_hidden: usize,
    pub max_decode_len: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Global gradient-norm ceiling; non-positive disables clipping.
    pub clip_norm: f64,
    /// Half-width of the uniform weight initializer.
    pub init_scale: f64,
    /// Keep the embedding matrix fixed during training.
    pub freeze_embeddings: bool,
    pub min_count: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Single9,
            embed_dim: 64,
            enc_hidden: 64,
            dec_hidden: 64,
            max_decode_len: 16,
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 10,
            seed: 0,
            clip_norm: 5.0,
            init_scale: 0.1,
            freeze_embeddings: false,
            min_count: 1,
        }
    }
}

impl ModelConfig {
    /// Sizes used for the published models.
    pub fn full_scale() -> Self {
        Self { embed_dim: 1324, enc_hidden: 100, dec_hidden: 100, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), Seq2SeqError> {
        let bad = |m: &str| Err(Seq2SeqError::BadConfig(m.to_string()));
        if self.embed_dim == 0 || self.dec_hidden == 0 || self.enc_hidden == 0 {
            return bad("layer sizes must be positive");
        }
        if self.enc_hidden % 2 != 0 {
            return bad("enc_hidden must be even");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.max_decode_len == 0 {
            return bad("max_decode_len must be positive");
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return bad("learning_rate must be finite and non-negative");
        }
        if !self.clip_norm.is_finite() || !self.init_scale.is_finite() || self.init_scale < 0.0 {
            return bad("clip_norm and init_scale must be finite");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn group_sizes(v: Variant) -> Vec<usize> {
        let g = encoder_grouping(v).unwrap();
        let ids: BTreeSet<&String> = g.values().collect();
        let mut sizes: Vec<usize> = ids.iter().map(|id| g.values().filter(|v| v == id).count()).collect();
        sizes.sort();
        sizes
    }

    #[test]
    fn group_sizes_per_variant() {
        assert_eq!(group_sizes(Variant::Single9), vec![1; 9]);
        assert_eq!(group_sizes(Variant::EventInvolEvent), vec![4, 5]);
        assert_eq!(group_sizes(Variant::EventPersonXY), vec![3, 6]);
        assert_eq!(group_sizes(Variant::EventPrePost), vec![2, 6]);
        assert!(!encoder_grouping(Variant::EventPrePost).unwrap().contains_key(&Dimension::XAttr));
        assert!(encoder_grouping(Variant::NearestNeighbor).is_err());
    }

    #[test]
    fn voluntary_group_agrees_with_taxonomy() {
        use crate::atlas::Volition;
        let g = encoder_grouping(Variant::EventInvolEvent).unwrap();
        for (d, id) in &g {
            let vol = d.coords().volition == Volition::Voluntary;
            assert_eq!(id == "voluntary", vol, "{d}");
        }
        let g = encoder_grouping(Variant::EventPersonXY).unwrap();
        for (d, id) in &g {
            assert_eq!(id == "theme", d.is_other(), "{d}");
        }
    }

    #[test]
    fn config_checks() {
        assert!(ModelConfig::default().validate().is_ok());
        assert!(ModelConfig { enc_hidden: 7, ..Default::default() }.validate().is_err());
        assert_eq!(ModelConfig::full_scale().embed_dim, 1324);
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(json, format!("\"{}\"", v.name()));
        }
    }
}
