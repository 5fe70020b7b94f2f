use super::GenerationJob;

/// Generation prompt. `{batch_size}` renders as 100 with the default job.
pub const PROMPT_TEMPLATE: &str = "\
You are generating a dataset of Linguistically Distinct Sentence Pairs (LDSPs).
Each LDSP will differ in one key linguistic property while maintaining the same overall meaning.

Below are some examples of LDSPs

Linguistic Property: negation
LDSP: ('The box is on the counter', 'The box is not on the counter')

Linguistic Property: tense
LDSP: ('The box is on the counter', 'The box was on the counter')

You will generate {num_ldsps} distinct LDSPs of various topics, {batch_size} at a time.

You will generate them as two columns of a CSV. One column for first sentence of the LDSP, and the other column for the second.
Each row is a new LDSP, so you will generate {num_ldsps} rows in total.

Generate no other text. Vary the sentence structure.

The property for which you will be generating LDSPs will be {linguistic_property}.

Property Description: {property_description}

An example LDSP for this property is
{example_ldsp}

Generate the first {batch_size} LDSPs.";

/// Follow-up turn requesting each later batch.
pub fn continuation_prompt(batch_size: usize) -> String {
    format!("Generate the next {batch_size} LDSPs.")
}

pub fn format_pair(s1: &str, s2: &str) -> String {
    format!("('{s1}', '{s2}')")
}

pub fn build_prompt(job: &GenerationJob) -> String {
    PROMPT_TEMPLATE
        .replace("{num_ldsps}", &job.total.to_string())
        .replace("{batch_size}", &job.batch_size.to_string())
        .replace("{linguistic_property}", job.property.name())
        .replace("{property_description}", &job.property_description)
        .replace(
            "{example_ldsp}",
            &format_pair(&job.example_ldsp.sentence1, &job.example_ldsp.sentence2),
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::LinguisticProperty;

    fn job(p: LinguisticProperty) -> GenerationJob {
        GenerationJob::new(p, "http://localhost/v1/chat/completions", "m")
    }

    #[test]
    fn negation_prompt_has_fixed_examples() {
        let prompt = build_prompt(&job(LinguisticProperty::Negation));
        assert!(prompt.contains("('The box is on the counter', 'The box is not on the counter')"));
        assert!(prompt.contains("will be negation."));
        assert!(prompt.contains("You will generate 1000 distinct LDSPs of various topics, 100 at a time."));
        assert!(prompt.contains("('The project is successful.', 'The project is not successful.')"));
        assert!(prompt.ends_with("Generate the first 100 LDSPs."));
        assert!(!prompt.contains('{'));
    }

    #[test]
    fn tense_prompt() {
        let prompt = build_prompt(&job(LinguisticProperty::Tense));
        assert!(prompt.contains("LDSP: ('The box is on the counter', 'The box was on the counter')"));
        assert!(prompt.contains(LinguisticProperty::Tense.description()));
    }
}
