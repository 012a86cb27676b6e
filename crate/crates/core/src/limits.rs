//! Joint-limit table and leg geometry, loaded from the versioned
//! `nao_v6_limits` data file. A copy of the file is embedded so binaries work
//! without an install step; `LimitsTable::load` accepts an external path for
//! overrides.

use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::LimitsError;
use crate::joints::{JointId, JOINT_COUNT};

const EMBEDDED: &str = include_str!("../data/nao_v6_limits.toml");

#[derive(Debug, Clone, Copy)]
pub struct JointLimit {
    pub min_rad: f64,
    pub max_rad: f64,
    pub max_vel_rad_s: f64,
}

impl JointLimit {
    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.min_rad, self.max_rad)
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.min_rad && value <= self.max_rad
    }
}

/// Leg link lengths and offsets, lengths in meters.
///
/// The kinematic torso frame has its origin on the hip axis, midway between
/// the hip joints; `hip_offset_z_m` records the distance up to the torso
/// center for reference.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct LegGeometry {
    pub hip_offset_y_m: f64,
    pub hip_offset_z_m: f64,
    pub thigh_length_m: f64,
    pub tibia_length_m: f64,
    pub ankle_height_m: f64,
}

impl LegGeometry {
    pub fn max_leg_extent(&self) -> f64 {
        self.thigh_length_m + self.tibia_length_m
    }
}

#[derive(Debug, Clone)]
pub struct LimitsTable {
    pub version: u32,
    pub geometry: LegGeometry,
    limits: [JointLimit; JOINT_COUNT],
}

#[derive(Deserialize)]
struct FileFormat {
    version: u32,
    geometry: LegGeometry,
    joint: Vec<FileJoint>,
}

#[derive(Deserialize)]
struct FileJoint {
    name: String,
    ordinal: usize,
    min_rad: f64,
    max_rad: f64,
    max_vel_rad_s: f64,
}

impl LimitsTable {
    /// The embedded default table. Parsed once, then shared.
    pub fn builtin() -> &'static LimitsTable {
        static TABLE: OnceLock<LimitsTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            LimitsTable::parse(EMBEDDED).expect("embedded nao_v6_limits must be valid")
        })
    }

    pub fn load(path: &Path) -> Result<LimitsTable, LimitsError> {
        let text = std::fs::read_to_string(path).map_err(|e| LimitsError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        LimitsTable::parse(&text)
    }

    pub fn parse(text: &str) -> Result<LimitsTable, LimitsError> {
        let file: FileFormat =
            toml::from_str(text).map_err(|e| LimitsError::Format(e.to_string()))?;
        if file.joint.len() != JOINT_COUNT {
            return Err(LimitsError::Format(format!(
                "expected {JOINT_COUNT} joint entries, found {}",
                file.joint.len()
            )));
        }
        let mut limits = [JointLimit {
            min_rad: 0.0,
            max_rad: 0.0,
            max_vel_rad_s: 0.0,
        }; JOINT_COUNT];
        let mut seen = [false; JOINT_COUNT];
        for entry in &file.joint {
            let joint = JointId::from_name(&entry.name)
                .map_err(|e| LimitsError::Format(e.to_string()))?;
            if joint.ordinal() != entry.ordinal {
                return Err(LimitsError::Format(format!(
                    "{}: ordinal {} does not match wire ordinal {}",
                    entry.name,
                    entry.ordinal,
                    joint.ordinal()
                )));
            }
            if seen[entry.ordinal] {
                return Err(LimitsError::Format(format!("duplicate joint {}", entry.name)));
            }
            if !(entry.min_rad < entry.max_rad) || entry.max_vel_rad_s <= 0.0 {
                return Err(LimitsError::Format(format!(
                    "{}: invalid range or velocity",
                    entry.name
                )));
            }
            seen[entry.ordinal] = true;
            limits[entry.ordinal] = JointLimit {
                min_rad: entry.min_rad,
                max_rad: entry.max_rad,
                max_vel_rad_s: entry.max_vel_rad_s,
            };
        }
        let g = &file.geometry;
        if g.thigh_length_m <= 0.0
            || g.tibia_length_m <= 0.0
            || g.ankle_height_m <= 0.0
            || g.hip_offset_y_m <= 0.0
        {
            return Err(LimitsError::Format("non-positive geometry length".into()));
        }
        Ok(LimitsTable {
            version: file.version,
            geometry: file.geometry,
            limits,
        })
    }

    pub fn limit(&self, joint: JointId) -> &JointLimit {
        &self.limits[joint.ordinal()]
    }

    /// Clamps a value to the joint's range, reporting whether clamping occurred.
    pub fn clamp(&self, joint: JointId, value: f64) -> (f64, bool) {
        let l = self.limit(joint);
        let clamped = l.clamp(value);
        (clamped, clamped != value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_and_covers_all_joints() {
        let t = LimitsTable::builtin();
        assert_eq!(t.version, 1);
        for j in JointId::ALL {
            let l = t.limit(j);
            assert!(l.min_rad < l.max_rad, "{j}");
            assert!(l.max_vel_rad_s > 0.0, "{j}");
        }
        assert!((t.geometry.max_leg_extent() - 0.2029).abs() < 1e-12);
    }

    #[test]
    fn clamp_reports() {
        let t = LimitsTable::builtin();
        let (v, clamped) = t.clamp(JointId::HeadYaw, 3.0);
        assert!(clamped);
        assert!((v - 2.0857).abs() < 1e-12);
        let (v, clamped) = t.clamp(JointId::HeadYaw, 0.3);
        assert!(!clamped);
        assert_eq!(v, 0.3);
    }

    #[test]
    fn rejects_mismatched_ordinal() {
        let text = EMBEDDED.replace("ordinal = 0\n", "ordinal = 1\n");
        assert!(LimitsTable::parse(&text).is_err());
    }
}
