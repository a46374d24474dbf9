//! Built-in manifests reproducing the standard comparison tables.

use crate::manifest::RunManifest;
use crate::report::ReportRow;
use crate::runner::{run, RunOptions};
use crate::{CliError, Result};

pub const PRESETS: &[(&str, &str)] = &[
    ("measure-I-gallery", include_str!("../presets/measure-I-gallery.toml")),
    ("disconnectivity", include_str!("../presets/disconnectivity.toml")),
    ("cavalcanti-reid", include_str!("../presets/cavalcanti-reid.toml")),
    ("sekatski", include_str!("../presets/sekatski.toml")),
    ("dur", include_str!("../presets/dur.toml")),
    ("korsbakken", include_str!("../presets/korsbakken.toml")),
    ("marquardt", include_str!("../presets/marquardt.toml")),
    ("fisher", include_str!("../presets/fisher.toml")),
    ("index-p", include_str!("../presets/index-p.toml")),
    ("bjork-mana", include_str!("../presets/bjork-mana.toml")),
    ("schemes", include_str!("../presets/schemes.toml")),
];

pub fn preset_source(tag: &str) -> Result<&'static str> {
    PRESETS.iter().find(|(t, _)| *t == tag).map(|(_, src)| *src).ok_or_else(|| CliError::UnknownPreset {
        tag: tag.to_string(),
        known: PRESETS.iter().map(|(t, _)| *t).collect::<Vec<_>>().join(", "),
    })
}

pub fn preset_manifest(tag: &str) -> Result<RunManifest> {
    RunManifest::from_toml_str(preset_source(tag)?)
}

pub fn preset_rows(tag: &str, opts: &RunOptions) -> Result<Vec<ReportRow>> {
    run(&preset_manifest(tag)?, opts)
}
