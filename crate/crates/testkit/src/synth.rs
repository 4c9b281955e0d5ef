//! Deterministic synthetic corpora with known ground truth.

/// One synthetic review with the template it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledReview {
    pub id: String,
    pub text: String,
    pub label: usize,
}

struct Template {
    /// Words before and after the variable slot.
    head: &'static [&'static str],
    tail: &'static [&'static str],
    slot: [&'static str; 10],
    /// Short exclamation prepended as its own sentence on some variants.
    exclamation: &'static str,
    /// Extra leading word on some variants, making sentence lengths differ.
    lead: &'static str,
}

// Vocabularies are pairwise disjoint across templates, slot words included.
const TEMPLATES: [Template; 3] = [
    Template {
        head: &["pad", "thai", "noodles", "tasted"],
        tail: &["alongside", "crispy", "spring", "rolls", "fragrant", "basil", "curry", "jasmine", "rice", "mango", "sticky", "dessert"],
        slot: ["amazing", "delicious", "superb", "wonderful", "heavenly", "outstanding", "scrumptious", "divine", "marvelous", "terrific"],
        exclamation: "Yum!",
        lead: "seriously",
    },
    Template {
        head: &["our", "waiter", "stayed", "remarkably"],
        tail: &["throughout", "dinner", "refilling", "water", "glasses", "bringing", "extra", "napkins", "promptly", "answering", "every", "question"],
        slot: ["attentive", "courteous", "polite", "friendly", "helpful", "gracious", "cheerful", "patient", "welcoming", "considerate"],
        exclamation: "Bravo!",
        lead: "truly",
    },
    Template {
        head: &["dining", "room", "lighting", "felt"],
        tail: &["despite", "loud", "music", "crowded", "tables", "narrow", "hallway", "tiny", "restroom", "beside", "front", "entrance"],
        slot: ["cozy", "dim", "warm", "moody", "soft", "gloomy", "romantic", "harsh", "mellow", "intimate"],
        exclamation: "Hmm.",
        lead: "frankly",
    },
];

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// 30 reviews: 3 topic templates with disjoint vocabularies, 10 lexical
/// variants each (one slot word swapped). Every third variant opens with a
/// short exclamation that sentence merging folds into the main sentence, and
/// odd variants carry an extra leading word. Reviews are interleaved by
/// template so corpus order does not reveal the labels.
pub fn summarization_corpus() -> Vec<LabeledReview> {
    let mut out = Vec::with_capacity(30);
    for v in 0..10 {
        for (label, t) in TEMPLATES.iter().enumerate() {
            let mut words: Vec<&str> = Vec::new();
            if v % 2 == 1 {
                words.push(t.lead);
            }
            words.extend(t.head);
            words.push(t.slot[v]);
            words.extend(t.tail);
            let mut text = capitalize(&words.join(" "));
            text.push('.');
            if v % 3 == 0 {
                text = format!("{} {text}", t.exclamation);
            }
            out.push(LabeledReview {
                id: format!("t{label}-v{v}"),
                text,
                label,
            });
        }
    }
    out
}

/// Renders reviews as the JSON Lines corpus format.
pub fn to_jsonl<'a>(reviews: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut out = String::new();
    for (id, text) in reviews {
        out.push_str(&format!(
            "{{\"id\":{},\"text\":{},\"rating\":null}}\n",
            json_string(id),
            json_string(text)
        ));
    }
    out
}

fn json_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Eight single-answer reviews for one question; the answer texts fall into
/// three dishes. `(review id, review text, answer span)`.
pub fn answer_set() -> Vec<(String, String, String)> {
    let spans = [
        "pad thai",
        "the pad thai",
        "pad thai",
        "crab noodles",
        "crab noodles with pork",
        "the crab noodles",
        "mango sticky rice",
        "mango sticky rice",
    ];
    spans
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let text = format!("We came on a weeknight. You have to order {s} here. Service was quick.");
            (format!("a{i}"), text, s.to_string())
        })
        .collect()
}
