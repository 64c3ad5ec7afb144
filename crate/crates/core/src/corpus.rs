//! Named reference functions.

use crate::dynamics::DEFAULT_ESCAPE_RADIUS;
use crate::expr::{parse, MeroExpr};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub description: &'static str,
    /// Escape radius for orbit classification. The Baker-domain example
    /// drifts by about 1 per step, so it uses a small one.
    pub escape: f64,
}

pub const CORPUS: [CorpusEntry; 7] = [
    CorpusEntry {
        name: "expz",
        source: "exp(z)",
        description: "exponential, order 1, no poles",
        escape: DEFAULT_ESCAPE_RADIUS,
    },
    CorpusEntry {
        name: "tanz",
        source: "tan(z)",
        description: "tangent, order 1, simple poles at (k + 1/2) pi",
        escape: DEFAULT_ESCAPE_RADIUS,
    },
    CorpusEntry {
        name: "zsq",
        source: "z^2",
        description: "square, basin of 0 is the unit disk",
        escape: DEFAULT_ESCAPE_RADIUS,
    },
    CorpusEntry {
        name: "invz",
        source: "1/z",
        description: "reciprocal, one simple pole",
        escape: DEFAULT_ESCAPE_RADIUS,
    },
    CorpusEntry {
        name: "fatou",
        source: "fatou(z)",
        description: "z + 1 + exp(-z), invariant Baker domain",
        escape: 100.0,
    },
    CorpusEntry {
        name: "lacunary2",
        source: "lacunary(2)",
        description: "sum of 2^(-n^2) z^n, order 0",
        escape: DEFAULT_ESCAPE_RADIUS,
    },
    CorpusEntry {
        name: "canprod4",
        source: "canprod(4)",
        description: "product of (1 + z/k^4), order 1/4",
        escape: DEFAULT_ESCAPE_RADIUS,
    },
];

pub fn lookup(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

impl CorpusEntry {
    pub fn expr(&self) -> MeroExpr {
        parse(self.source).expect("corpus sources parse")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_parse() {
        for e in &CORPUS {
            let _ = e.expr();
            assert!(lookup(e.name).is_some());
        }
        assert!(lookup("nope").is_none());
    }
}
