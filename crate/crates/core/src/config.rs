//! Optional `--config` file: layout and gesture overrides in one JSON
//! object. Missing fields keep their defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gesture::GestureThresholds;
use crate::layout::LayoutConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub layout: LayoutConfig,
    pub gestures: GestureThresholds,
}

impl Settings {
    pub fn parse(bytes: &[u8]) -> Result<Settings> {
        let s: Settings = serde_json::from_slice(bytes).map_err(|e| Error::from_json(&e, bytes))?;
        s.layout.check()?;
        s.gestures.check()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_overrides() {
        let s =
            Settings::parse(br#"{"layout": {"gap": 0.1}, "gestures": {"row_step": 0.2}}"#).unwrap();
        assert_eq!(s.layout.gap, 0.1);
        assert_eq!(s.layout.cell_width, LayoutConfig::default().cell_width);
        assert_eq!(s.gestures.row_step, 0.2);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Settings::parse(br#"{"layout": {"gap": -1}}"#).is_err());
        assert!(Settings::parse(br#"{"colour": 1}"#).is_err());
    }
}
