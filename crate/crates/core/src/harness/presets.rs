//! Named experiment presets. A user config may start from one with `preset = "name"`.

pub const NAMES: &[&str] = &[
    "spanne-classical",
    "spanne-endpoint",
    "spanne-zero",
    "spanne-weak",
    "spanne-weak-weighted",
    "adams-classical",
    "adams-listed",
    "adams-weak",
    "adams-increasing-phi",
    "lemma-classical",
    "lemma-weak",
    "conditions-classical",
    "hardy-classical",
];

pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "spanne-classical" => SPANNE_CLASSICAL,
        "spanne-endpoint" => SPANNE_ENDPOINT,
        "spanne-zero" => SPANNE_ZERO,
        "spanne-weak" => SPANNE_WEAK,
        "spanne-weak-weighted" => SPANNE_WEAK_WEIGHTED,
        "adams-classical" => ADAMS_CLASSICAL,
        "adams-listed" => ADAMS_LISTED,
        "adams-weak" => ADAMS_WEAK,
        "adams-increasing-phi" => ADAMS_INCREASING,
        "lemma-classical" => LEMMA_CLASSICAL,
        "lemma-weak" => LEMMA_WEAK,
        "conditions-classical" => CONDITIONS_CLASSICAL,
        "hardy-classical" => HARDY_CLASSICAL,
        _ => return None,
    })
}

// indicators at three scales, a Gaussian, a singular bump and the slowly decaying tail
macro_rules! family_1d {
    () => {
        r#"
[[functions]]
id = "indicator-0.5"
terms = [{ shape = "indicator", radius = 0.5 }]

[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "indicator-2"
terms = [{ shape = "indicator", radius = 2.0 }]

[[functions]]
id = "gaussian"
terms = [{ shape = "gaussian", width = 1.0 }]

[[functions]]
id = "bump"
terms = [{ shape = "bump", radius = 1.0, gamma = 0.125 }]

[[functions]]
id = "tail"
terms = [{ shape = "complement-power", radius = 1.0 }]
"#
    };
}

const SPANNE_CLASSICAL: &str = concat!(
    r#"
version = 1
kind = "spanne"
name = "spanne-classical"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 2.0, q = 4.0 }
phi1 = { family = "morrey", lambda = 0.25 }
phi2 = { family = "morrey", lambda = 0.5 }
"#,
    family_1d!()
);

const SPANNE_ENDPOINT: &str = concat!(
    r#"
version = 1
kind = "spanne"
name = "spanne-endpoint"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 2.0, q = 4.0 }
phi1 = { family = "morrey", lambda = 0.5 }
phi2 = { family = "morrey", lambda = 1.0 }
"#,
    family_1d!()
);

const SPANNE_ZERO: &str = r#"
version = 1
kind = "spanne"
name = "spanne-zero"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 2.0, q = 4.0 }
phi1 = { family = "morrey", lambda = 0.25 }
phi2 = { family = "morrey", lambda = 0.5 }

[[functions]]
id = "zero"
terms = []
"#;

const SPANNE_WEAK: &str = r#"
version = 1
kind = "weak-type"
name = "spanne-weak"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 1.0, q = 1.3333333333333333 }
phi1 = { family = "morrey", lambda = 0.25 }
phi2 = { family = "morrey", lambda = 0.3333333333333333 }

[[functions]]
id = "indicator-0.5"
terms = [{ shape = "indicator", radius = 0.5 }]

[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "indicator-2"
terms = [{ shape = "indicator", radius = 2.0 }]
"#;

const SPANNE_WEAK_WEIGHTED: &str = r#"
version = 1
kind = "weak-type"
name = "spanne-weak-weighted"
n = 1
kernel = { family = "power", alpha = 0.25 }
weight = { family = "power", beta = -0.1 }
exponents = { p = 1.0, q = 1.3333333333333333 }
phi1 = { family = "morrey", lambda = 0.25 }
phi2 = { family = "morrey", lambda = 0.3333333333333333 }

[[functions]]
id = "indicator-0.5"
terms = [{ shape = "indicator", radius = 0.5 }]

[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "indicator-2"
terms = [{ shape = "indicator", radius = 2.0 }]
"#;

const ADAMS_CLASSICAL: &str = concat!(
    r#"
version = 1
kind = "adams"
name = "adams-classical"
n = 1
seed = 7
kernel = { family = "power", alpha = 0.125 }
exponents = { p = 2.0, q = 4.0 }
phi = { family = "power", exponent = -0.5 }
centers = [[0.0], [-0.5], [0.5], [-2.0], [2.0]]
hedberg_samples = 64
"#,
    family_1d!()
);

const ADAMS_LISTED: &str = concat!(
    r#"
version = 1
kind = "adams"
name = "adams-listed"
n = 1
seed = 7
kernel = { family = "power", alpha = 0.125 }
exponents = { p = 2.0, q = 2.6666666666666665 }
phi = { family = "power", exponent = -0.5 }
centers = [[0.0], [-0.5], [0.5], [-2.0], [2.0]]
hedberg_samples = 64
"#,
    family_1d!()
);

const ADAMS_WEAK: &str = r#"
version = 1
kind = "adams"
name = "adams-weak"
n = 1
seed = 7
kernel = { family = "power", alpha = 0.125 }
exponents = { p = 1.0, q = 1.3333333333333333 }
phi = { family = "power", exponent = -0.5 }
centers = [[0.0], [-0.5], [0.5], [-2.0], [2.0]]
hedberg_samples = 32

[[functions]]
id = "indicator-0.5"
terms = [{ shape = "indicator", radius = 0.5 }]

[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "indicator-2"
terms = [{ shape = "indicator", radius = 2.0 }]
"#;

const ADAMS_INCREASING: &str = r#"
version = 1
kind = "adams"
name = "adams-increasing-phi"
n = 1
seed = 7
kernel = { family = "power", alpha = 0.125 }
exponents = { p = 2.0, q = 4.0 }
phi = { family = "power", exponent = 0.5 }
centers = [[0.0]]
hedberg_samples = 8

[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]
"#;

const LEMMA_CLASSICAL: &str = concat!(
    r#"
version = 1
kind = "lemma-local"
name = "lemma-classical"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 2.0, q = 4.0 }
"#,
    family_1d!()
);

const LEMMA_WEAK: &str = r#"
version = 1
kind = "lemma-local"
name = "lemma-weak"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 1.0, q = 1.3333333333333333 }

[[functions]]
id = "indicator-0.5"
terms = [{ shape = "indicator", radius = 0.5 }]

[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "indicator-2"
terms = [{ shape = "indicator", radius = 2.0 }]
"#;

const CONDITIONS_CLASSICAL: &str = r#"
version = 1
kind = "conditions-only"
name = "conditions-classical"
n = 1
kernel = { family = "power", alpha = 0.25 }
exponents = { p = 2.0, q = 4.0 }
phi1 = { family = "morrey", lambda = 0.25 }
phi2 = { family = "morrey", lambda = 0.5 }
"#;

const HARDY_CLASSICAL: &str = r#"
version = 1
kind = "hardy"
name = "hardy-classical"
n = 1

[hardy]
w1 = { family = "power", gamma = 0.0 }
w2 = { family = "power", gamma = 1.0 }
w = { family = "power", gamma = -2.0 }

[[hardy.g]]
id = "constant"
family = "power"
gamma = 0.0

[[hardy.g]]
id = "ramp"
family = "table"
t = [0.1, 1.0, 10.0]
g = [0.0, 0.5, 1.0]

[[hardy.g]]
id = "step"
family = "table"
t = [1.0, 1.001]
g = [0.0, 2.0]
"#;
