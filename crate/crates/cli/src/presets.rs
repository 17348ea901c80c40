//! Scenario presets compiled into the binary.

use crate::config::ScenarioConfig;
use crate::CliError;

pub const PRESETS: [(&str, &str); 8] = [
    ("table1-two-cavity", include_str!("../presets/table1-two-cavity.toml")),
    ("table1-one-cavity", include_str!("../presets/table1-one-cavity.toml")),
    ("table2-two-cavity", include_str!("../presets/table2-two-cavity.toml")),
    ("table2-one-cavity", include_str!("../presets/table2-one-cavity.toml")),
    ("fig2-two-cavity", include_str!("../presets/fig2-two-cavity.toml")),
    ("fig2-one-cavity", include_str!("../presets/fig2-one-cavity.toml")),
    ("fig3-two-cavity", include_str!("../presets/fig3-two-cavity.toml")),
    ("fig3-one-cavity", include_str!("../presets/fig3-one-cavity.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn source(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset `{name}`; available: {}",
                names().collect::<Vec<_>>().join(", ")
            ))
        })
}

pub fn load(name: &str, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    ScenarioConfig::parse_with_overrides(source(name)?, overrides)
        .map_err(|e| CliError::Config(format!("preset {name}: {}", e.message())))
}
