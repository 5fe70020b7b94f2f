//! Heuristic checks that `sentence1` is the base form and `sentence2` the
//! transformed form. Rules only flag a pair when the contrast they detect
//! points the wrong way; pairs they cannot read are accepted.

use serde::{Deserialize, Serialize};

use crate::io::LdspRecord;
use crate::properties::LinguisticProperty;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlaggedRecord {
    pub record: LdspRecord,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub accepted: Vec<LdspRecord>,
    pub flagged: Vec<FlaggedRecord>,
}

impl OrderingReport {
    pub fn flag_rate(&self) -> f64 {
        let total = self.accepted.len() + self.flagged.len();
        if total == 0 { 0.0 } else { self.flagged.len() as f64 / total as f64 }
    }
}

const NEGATORS: &[&str] = &["not", "no", "never", "none", "nobody", "nothing", "neither", "nor", "cannot", "nowhere"];
const PAST_AUX: &[&str] = &["was", "were", "had", "did"];
const BE_FORMS: &[&str] = &["is", "are", "was", "were", "be", "been", "being", "am"];
const INTENSIFIERS: &[&str] = &[
    "very", "really", "extremely", "surprisingly", "incredibly", "so", "too", "quite", "absolutely",
    "remarkably", "highly", "totally", "exceptionally", "truly", "deeply", "utterly", "particularly",
    "terribly", "awfully", "completely", "entirely", "super",
];
const HEDGES: &[&str] = &[
    "could", "might", "may", "possibly", "perhaps", "probably", "maybe", "seems", "seem", "likely",
    "allegedly", "reportedly", "supposedly", "apparently", "would",
];
const NUMBER_WORDS: &[&str] = &[
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "twenty", "thirty", "forty", "fifty", "hundred", "thousand", "million",
];

fn tokens(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn count_in(tokens: &[String], list: &[&str]) -> usize {
    tokens.iter().filter(|t| list.contains(&t.as_str())).count()
}

fn negations(t: &[String]) -> usize {
    count_in(t, NEGATORS) + t.iter().filter(|w| w.ends_with("n't")).count()
}

fn past_markers(t: &[String]) -> usize {
    count_in(t, PAST_AUX) + t.iter().filter(|w| w.len() > 3 && w.ends_with("ed")).count()
}

fn passive(t: &[String]) -> bool {
    t.iter()
        .position(|w| BE_FORMS.contains(&w.as_str()))
        .is_some_and(|i| t[i + 1..].iter().any(|w| w == "by"))
}

fn numbers(t: &[String]) -> usize {
    count_in(t, NUMBER_WORDS) + t.iter().filter(|w| w.chars().any(|c| c.is_ascii_digit())).count()
}

fn definite_minus_indefinite(t: &[String]) -> isize {
    let def = t.iter().filter(|w| *w == "the").count() as isize;
    let indef = t.iter().filter(|w| *w == "a" || *w == "an").count() as isize;
    def - indef
}

/// `Some(reason)` when the pair looks reversed.
fn reversed_reason(property: LinguisticProperty, s1: &[String], s2: &[String]) -> Option<&'static str> {
    use LinguisticProperty::*;
    let reversed = match property {
        Negation => negations(s1) > negations(s2),
        Tense => past_markers(s1) > past_markers(s2),
        Definiteness => definite_minus_indefinite(s1) < definite_minus_indefinite(s2),
        Voice => passive(s1) && !passive(s2),
        Quantity => numbers(s2) > numbers(s1),
        Intensifier => count_in(s1, INTENSIFIERS) > count_in(s2, INTENSIFIERS),
        Factuality => count_in(s1, HEDGES) > count_in(s2, HEDGES),
        Polarity | Synonym | Control => false,
    };
    reversed.then(|| match property {
        Negation => "sentence1 carries the negation",
        Tense => "sentence1 is in the past tense",
        Definiteness => "sentence1 is the indefinite form",
        Voice => "sentence1 is the passive form",
        Quantity => "sentence2 carries the exact number",
        Intensifier => "sentence1 carries the intensifier",
        Factuality => "sentence1 carries the hedge",
        Polarity | Synonym | Control => unreachable!(),
    })
}

pub fn validate_ordering(records: Vec<LdspRecord>, property: LinguisticProperty) -> OrderingReport {
    let mut accepted = Vec::with_capacity(records.len());
    let mut flagged = Vec::new();
    for record in records {
        let s1 = tokens(&record.sentence1);
        let s2 = tokens(&record.sentence2);
        match reversed_reason(property, &s1, &s2) {
            Some(reason) => flagged.push(FlaggedRecord { record, reason: reason.to_string() }),
            None => accepted.push(record),
        }
    }
    OrderingReport { accepted, flagged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use LinguisticProperty::*;

    fn rec(p: LinguisticProperty, a: &str, b: &str) -> LdspRecord {
        LdspRecord { property: p, sentence1: a.into(), sentence2: b.into() }
    }

    fn check(p: LinguisticProperty, a: &str, b: &str) -> (usize, usize) {
        let r = validate_ordering(vec![rec(p, a, b)], p);
        (r.accepted.len(), r.flagged.len())
    }

    #[test]
    fn negation_pair_and_its_reverse() {
        let (a, b) = ("The project is successful.", "The project is not successful.");
        assert_eq!(check(Negation, a, b), (1, 0));
        assert_eq!(check(Negation, b, a), (0, 1));
        assert_eq!(check(Negation, "She can swim.", "She can't swim."), (1, 0));
    }

    #[test]
    fn reference_pairs_are_accepted() {
        for p in LinguisticProperty::ALL {
            let (a, b) = p.example_pair();
            assert_eq!(check(p, a, b), (1, 0), "{p}");
        }
    }

    #[test]
    fn reversed_reference_pairs_are_flagged() {
        for p in [Negation, Tense, Definiteness, Voice, Quantity, Intensifier, Factuality] {
            let (a, b) = p.example_pair();
            assert_eq!(check(p, b, a), (0, 1), "{p}");
        }
    }

    #[test]
    fn control_never_flagged() {
        assert_eq!(check(Control, "It is not raining.", "Dogs bark."), (1, 0));
        let r = validate_ordering(vec![rec(Control, "x", "y"); 4], Control);
        assert_eq!(r.flag_rate(), 0.0);
    }
}
