//! Location of the shipped assets (domain, scenarios, matrices, goldens).

use std::path::PathBuf;

/// Environment variable overriding the asset directory.
pub const ASSETS_ENV: &str = "ALHOME_ASSETS";

/// `$ALHOME_ASSETS` if set, else the `assets/` directory of the source tree.
pub fn asset_root() -> PathBuf {
    match std::env::var_os(ASSETS_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../assets")),
    }
}

pub fn asset_path(name: &str) -> PathBuf {
    asset_root().join(name)
}
