//! Every shipped preset, written to a directory.

use gausslab::cli::{run_preset, ExperimentPreset, PresetName};

fn main() -> gausslab::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "preset-out".into());
    std::fs::create_dir_all(&dir)?;
    for name in [
        PresetName::GaussIdentity,
        PresetName::Thm1Flip,
        PresetName::CorollaryLiouville,
        PresetName::WalkerCover,
        PresetName::FriableAp,
    ] {
        let out = run_preset(&ExperimentPreset::new(name))?;
        for a in &out.artifacts {
            std::fs::write(format!("{dir}/{}", a.name), &a.contents)?;
            println!("{dir}/{}", a.name);
        }
        if !out.violations.is_empty() {
            println!("{name:?}: {:?}", out.violations);
        }
    }
    Ok(())
}
