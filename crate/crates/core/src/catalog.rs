//! The seven non-dominated 8-point approximations and their names.

use crate::class::ParamVector;

#[derive(Clone, Copy, Debug)]
pub struct Optimum {
    /// Position in the published list, 1-based.
    pub index: usize,
    pub label: &'static str,
    /// Name accepted by the command line.
    pub short: &'static str,
    halves: [i8; 8],
}

impl Optimum {
    pub fn params(&self) -> ParamVector {
        ParamVector::from_halves(self.halves).expect("catalog entries are valid")
    }
}

pub const OPTIMA: [Optimum; 7] = [
    Optimum {
        index: 1,
        label: "MRDCT",
        short: "mrdct",
        halves: [0, 0, 0, 0, 0, 0, 0, 0],
    },
    Optimum {
        index: 2,
        label: "OCBT",
        short: "ocbt",
        halves: [2, 0, 0, 0, 2, 0, 0, 0],
    },
    Optimum {
        index: 3,
        label: "new-j3",
        short: "j3",
        halves: [2, 0, 0, 2, 2, 0, 0, 2],
    },
    Optimum {
        index: 4,
        label: "new-j4",
        short: "j4",
        halves: [2, 0, 0, 1, 2, 0, 0, 1],
    },
    Optimum {
        index: 5,
        label: "new-j5",
        short: "j5",
        halves: [2, 2, 2, -2, 2, -2, -2, -2],
    },
    Optimum {
        index: 6,
        label: "RDCT",
        short: "rdct",
        halves: [2, 2, 2, 2, 2, 2, 2, 2],
    },
    Optimum {
        index: 7,
        label: "new-j7",
        short: "j7",
        halves: [2, 1, 1, 2, 2, 1, 1, 2],
    },
];

/// Looks up an entry by CLI name (`mrdct`, `j7`, ...), label, or `j1`..`j7`.
pub fn by_name(name: &str) -> Option<&'static Optimum> {
    let lower = name.to_ascii_lowercase();
    OPTIMA.iter().find(|o| {
        o.short == lower || o.label.eq_ignore_ascii_case(&lower) || format!("j{}", o.index) == lower
    })
}

pub fn label_for(a: &ParamVector) -> Option<&'static str> {
    OPTIMA.iter().find(|o| o.params() == *a).map(|o| o.label)
}
