//! Seeded synthetic corpora with a planted label rule.
//!
//! An article is fake exactly when its title is mostly upper case
//! (`title_caps_ratio > 0.5`) and its body contains [`PLANTED_TOKEN`].
//! Half the articles satisfy both; the rest are split evenly over the three
//! other combinations, so neither signal alone determines the label. Every
//! other statistic is drawn independently of the label.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::{caps_ratio, preprocess, Article, Label};
use crate::Rng;

pub const PLANTED_TOKEN: &str = "zorblax";

const FILLER: [&str; 48] = [
    "council", "river", "market", "report", "weather", "station", "garden", "budget", "teacher", "bridge",
    "harbor", "museum", "county", "library", "farmer", "engine", "festival", "highway", "village", "orchard",
    "season", "meeting", "office", "tunnel", "canal", "stadium", "harvest", "forest", "railway", "island",
    "plan", "vote", "road", "park", "school", "clinic", "water", "power", "street", "center",
    "north", "south", "local", "annual", "public", "central", "coastal", "rural",
];
const PUNCT: [&str; 6] = [".", ",", "!", "?", ";", ":"];

/// Which of the two planted signals an article carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signals {
    pub caps: bool,
    pub token: bool,
}

impl Signals {
    pub fn label(self) -> Label {
        if self.caps && self.token {
            Label::Fake
        } else {
            Label::Real
        }
    }
}

fn word(rng: &mut Rng) -> &'static str {
    FILLER[rng.below(FILLER.len())]
}

fn title(rng: &mut Rng, caps: bool) -> String {
    loop {
        let n = 3 + rng.below(6);
        let p_upper = if caps { 0.85 } else { 0.15 };
        let words: Vec<String> = (0..n)
            .map(|_| {
                let w = word(rng);
                if rng.bernoulli(p_upper) {
                    w.to_uppercase()
                } else {
                    let mut c = w.chars();
                    let first = c.next().map(|f| f.to_uppercase().collect::<String>()).unwrap_or_default();
                    first + c.as_str()
                }
            })
            .collect();
        let mut t = words.join(" ");
        if rng.bernoulli(0.3) {
            t.push_str(PUNCT[rng.below(PUNCT.len())]);
        }
        if (caps_ratio(&t) > 0.5) == caps {
            return t;
        }
    }
}

fn body(rng: &mut Rng, token: bool) -> String {
    let n = 6 + rng.below(12);
    let plant_at = if token { Some(rng.below(n)) } else { None };
    let mut parts: Vec<String> = Vec::with_capacity(n + 1);
    for i in 0..n {
        if plant_at == Some(i) {
            parts.push(String::from(PLANTED_TOKEN));
        }
        let mut w = if rng.bernoulli(0.1) {
            format!("{}", rng.below(1000))
        } else {
            String::from(word(rng))
        };
        if rng.bernoulli(0.15) {
            w.push_str(PUNCT[rng.below(PUNCT.len())]);
        }
        parts.push(w);
    }
    parts.join(" ")
}

/// Signal pattern for position `i` of a corpus, before shuffling.
fn pattern(i: usize) -> Signals {
    match i % 6 {
        0..=2 => Signals { caps: true, token: true },
        3 => Signals { caps: true, token: false },
        4 => Signals { caps: false, token: true },
        _ => Signals { caps: false, token: false },
    }
}

/// `n` articles with ids `syn-000000`, ... in shuffled signal order.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<Article> {
    let mut patterns: Vec<Signals> = (0..n).map(pattern).collect();
    Rng::derive(seed, 0).shuffle(&mut patterns);
    let mut rng = Rng::derive(seed, 1);
    patterns
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let t = title(&mut rng, s.caps);
            let b = body(&mut rng, s.token);
            Article::new(format!("syn-{i:06}"), t, b, s.label())
        })
        .collect()
}

/// Signals an article actually carries, recomputed from its text.
pub fn observed_signals(article: &Article) -> Signals {
    Signals {
        caps: caps_ratio(&article.title) > 0.5,
        token: preprocess(&article.body).iter().any(|t| t == PLANTED_TOKEN),
    }
}

/// `n` labels, `n / 2` of them fake, in seeded shuffled order.
pub fn balanced_labels(n: usize, seed: u64) -> Vec<Label> {
    let mut labels: Vec<Label> = (0..n)
        .map(|i| if i < n / 2 { Label::Fake } else { Label::Real })
        .collect();
    Rng::derive(seed, 0).shuffle(&mut labels);
    labels
}
