//! The bundled fixture files. Demos read these rather than hard-coding
//! tables, so the fixtures double as regression inputs.

pub const HORSES: &str = include_str!("../../../corpus/horses.json");
pub const ALLAIS: &str = include_str!("../../../corpus/allais.json");
pub const ELLSBERG: &str = include_str!("../../../corpus/ellsberg.json");
pub const RYDER: &str = include_str!("../../../corpus/ryder.json");

pub const ALL: [(&str, &str); 4] = [
    ("horses.json", HORSES),
    ("allais.json", ALLAIS),
    ("ellsberg.json", ELLSBERG),
    ("ryder.json", RYDER),
];
