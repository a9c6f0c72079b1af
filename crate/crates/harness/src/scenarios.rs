//! Scenario files shipped with the crate.

use crate::config::ScenarioFile;
use crate::HarnessError;

const FILES: [(&str, &str); 5] = [
    ("noiseless-2h", include_str!("../scenarios/noiseless-2h.toml")),
    ("harmonic-noise", include_str!("../scenarios/harmonic-noise.toml")),
    ("uniform-noise", include_str!("../scenarios/uniform-noise.toml")),
    ("step-change", include_str!("../scenarios/step-change.toml")),
    ("step-change-reset", include_str!("../scenarios/step-change-reset.toml")),
];

pub const NAMES: [&str; 5] = [
    FILES[0].0, FILES[1].0, FILES[2].0, FILES[3].0, FILES[4].0,
];

/// Source text of a built-in scenario.
pub fn source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn builtin(name: &str) -> Result<ScenarioFile, HarnessError> {
    let text = source(name).ok_or_else(|| HarnessError::UnknownScenario(name.to_string()))?;
    Ok(ScenarioFile::parse(text).expect("built-in scenarios parse"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::validate_config;

    #[test]
    fn every_builtin_is_valid_and_named_after_itself() {
        for name in NAMES {
            let f = builtin(name).unwrap();
            assert_eq!(f.name, name);
            let cfg = validate_config(&f).unwrap_or_else(|v| panic!("{name}: {v:?}"));
            assert!(cfg.signal.is_some() && cfg.duration.is_some());
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin("nope"), Err(HarnessError::UnknownScenario(_))));
    }
}
