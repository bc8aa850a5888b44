//! Built-in run files reproducing the figure data sets.

use crate::config::{parse_config, RunConfig};
use crate::error::CliError;

const PRESETS: [(&str, &str); 10] = [
    ("fig2a", include_str!("../presets/fig2a.toml")),
    ("fig2b", include_str!("../presets/fig2b.toml")),
    ("fig2c", include_str!("../presets/fig2c.toml")),
    ("fig2d", include_str!("../presets/fig2d.toml")),
    ("fig3ab", include_str!("../presets/fig3ab.toml")),
    ("fig3cd", include_str!("../presets/fig3cd.toml")),
    ("fig3ef", include_str!("../presets/fig3ef.toml")),
    ("fig3g", include_str!("../presets/fig3g.toml")),
    ("fig3h", include_str!("../presets/fig3h.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
];

pub fn list_presets() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Source text of a preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let src = preset_source(name).ok_or_else(|| {
        CliError::validation(format!("unknown preset '{name}' (known: {})", list_presets().join(", ")))
    })?;
    parse_config(src)
}
