use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The linguistic contrasts the toolkit knows how to generate and validate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinguisticProperty {
    Control,
    Synonym,
    Quantity,
    Tense,
    Intensifier,
    Voice,
    Definiteness,
    Factuality,
    Polarity,
    Negation,
}

impl LinguisticProperty {
    pub const ALL: [LinguisticProperty; 10] = [
        Self::Control,
        Self::Synonym,
        Self::Quantity,
        Self::Tense,
        Self::Intensifier,
        Self::Voice,
        Self::Definiteness,
        Self::Factuality,
        Self::Polarity,
        Self::Negation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Control => "control",
            Self::Synonym => "synonym",
            Self::Quantity => "quantity",
            Self::Tense => "tense",
            Self::Intensifier => "intensifier",
            Self::Voice => "voice",
            Self::Definiteness => "definiteness",
            Self::Factuality => "factuality",
            Self::Polarity => "polarity",
            Self::Negation => "negation",
        }
    }

    /// Description inserted into the generation prompt.
    pub fn description(self) -> &'static str {
        match self {
            Self::Definiteness => "Definiteness involves the use of definite or indefinite articles within a sentence, such as the compared to a, respectively.",
            Self::Factuality => "Factuality refers to the degree of truth implied by the structure of the sentence.",
            Self::Intensifier => "Intensifier refers to the degree of emphasis present within a sentence.",
            Self::Negation => "Negation occurs when a not is added to a sentence, negating the meaning.",
            Self::Polarity => "Polarity this is similar to a negation, and occurs when an antonym is added, reversing the meaning of the sentence completely.",
            Self::Quantity => "Quantity a switch from an exact number used to numerate the items to a grouping word.",
            Self::Synonym => "Synonym both sentences have the same meaning, with one word being replaced by one of its synonyms.",
            Self::Tense => "Tense one sentence is constructed in the present tense, while the other is in the past tense.",
            Self::Voice => "Voice the first sentence is in the active voice and the second sentence expresses the same event in the passive voice.",
            Self::Control => "Control the two sentences are completely unrelated to each other in topic, structure and meaning.",
        }
    }

    /// Reference pair shown to the generator for this property.
    pub fn example_pair(self) -> (&'static str, &'static str) {
        match self {
            Self::Control => ("They sound excited.", "The farmer has 20 sheep."),
            Self::Synonym => ("The music was calming.", "The music was soothing."),
            Self::Quantity => ("I ate two cookies.", "I ate several cookies."),
            Self::Tense => ("The river flows swiftly.", "The river flowed swiftly."),
            Self::Intensifier => ("The task is easy.", "The task is surprisingly easy."),
            Self::Voice => ("The team won the game.", "The game was won by the team."),
            Self::Definiteness => ("The bird flew away.", "A bird flew away."),
            Self::Factuality => ("The car is red.", "The car could be red."),
            Self::Polarity => ("She passed the exam.", "She failed the exam."),
            Self::Negation => ("The project is successful.", "The project is not successful."),
        }
    }
}

impl fmt::Display for LinguisticProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown linguistic property `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for LinguisticProperty {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|p| p.name() == lower)
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}
