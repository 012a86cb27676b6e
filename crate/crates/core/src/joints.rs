//! Joint roster and wire ordering.
//!
//! The 25 joints of the NAO V6 body, each with a fixed ordinal that defines
//! the order of every per-joint array on the wire. `HipYawPitch` is a single
//! physical joint shared by both legs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::JointParseError;

pub const JOINT_COUNT: usize = 25;

/// One of the 25 body joints, in wire order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum JointId {
    HeadYaw = 0,
    HeadPitch = 1,
    LShoulderPitch = 2,
    LShoulderRoll = 3,
    LElbowYaw = 4,
    LElbowRoll = 5,
    LWristYaw = 6,
    HipYawPitch = 7,
    LHipRoll = 8,
    LHipPitch = 9,
    LKneePitch = 10,
    LAnklePitch = 11,
    LAnkleRoll = 12,
    RHipRoll = 13,
    RHipPitch = 14,
    RKneePitch = 15,
    RAnklePitch = 16,
    RAnkleRoll = 17,
    RShoulderPitch = 18,
    RShoulderRoll = 19,
    RElbowYaw = 20,
    RElbowRoll = 21,
    RWristYaw = 22,
    LHand = 23,
    RHand = 24,
}

impl JointId {
    pub const ALL: [JointId; JOINT_COUNT] = [
        JointId::HeadYaw,
        JointId::HeadPitch,
        JointId::LShoulderPitch,
        JointId::LShoulderRoll,
        JointId::LElbowYaw,
        JointId::LElbowRoll,
        JointId::LWristYaw,
        JointId::HipYawPitch,
        JointId::LHipRoll,
        JointId::LHipPitch,
        JointId::LKneePitch,
        JointId::LAnklePitch,
        JointId::LAnkleRoll,
        JointId::RHipRoll,
        JointId::RHipPitch,
        JointId::RKneePitch,
        JointId::RAnklePitch,
        JointId::RAnkleRoll,
        JointId::RShoulderPitch,
        JointId::RShoulderRoll,
        JointId::RElbowYaw,
        JointId::RElbowRoll,
        JointId::RWristYaw,
        JointId::LHand,
        JointId::RHand,
    ];

    pub const LEFT_LEG: [JointId; 6] = [
        JointId::HipYawPitch,
        JointId::LHipRoll,
        JointId::LHipPitch,
        JointId::LKneePitch,
        JointId::LAnklePitch,
        JointId::LAnkleRoll,
    ];

    pub const RIGHT_LEG: [JointId; 6] = [
        JointId::HipYawPitch,
        JointId::RHipRoll,
        JointId::RHipPitch,
        JointId::RKneePitch,
        JointId::RAnklePitch,
        JointId::RAnkleRoll,
    ];

    pub const HEAD: [JointId; 2] = [JointId::HeadYaw, JointId::HeadPitch];

    pub const ARMS: [JointId; 12] = [
        JointId::LShoulderPitch,
        JointId::LShoulderRoll,
        JointId::LElbowYaw,
        JointId::LElbowRoll,
        JointId::LWristYaw,
        JointId::LHand,
        JointId::RShoulderPitch,
        JointId::RShoulderRoll,
        JointId::RElbowYaw,
        JointId::RElbowRoll,
        JointId::RWristYaw,
        JointId::RHand,
    ];

    /// Both legs plus the shared hip joint.
    pub const LEGS: [JointId; 11] = [
        JointId::HipYawPitch,
        JointId::LHipRoll,
        JointId::LHipPitch,
        JointId::LKneePitch,
        JointId::LAnklePitch,
        JointId::LAnkleRoll,
        JointId::RHipRoll,
        JointId::RHipPitch,
        JointId::RKneePitch,
        JointId::RAnklePitch,
        JointId::RAnkleRoll,
    ];

    pub const fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<JointId> {
        JointId::ALL.get(ordinal).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            JointId::HeadYaw => "HeadYaw",
            JointId::HeadPitch => "HeadPitch",
            JointId::LShoulderPitch => "LShoulderPitch",
            JointId::LShoulderRoll => "LShoulderRoll",
            JointId::LElbowYaw => "LElbowYaw",
            JointId::LElbowRoll => "LElbowRoll",
            JointId::LWristYaw => "LWristYaw",
            JointId::HipYawPitch => "HipYawPitch",
            JointId::LHipRoll => "LHipRoll",
            JointId::LHipPitch => "LHipPitch",
            JointId::LKneePitch => "LKneePitch",
            JointId::LAnklePitch => "LAnklePitch",
            JointId::LAnkleRoll => "LAnkleRoll",
            JointId::RHipRoll => "RHipRoll",
            JointId::RHipPitch => "RHipPitch",
            JointId::RKneePitch => "RKneePitch",
            JointId::RAnklePitch => "RAnklePitch",
            JointId::RAnkleRoll => "RAnkleRoll",
            JointId::RShoulderPitch => "RShoulderPitch",
            JointId::RShoulderRoll => "RShoulderRoll",
            JointId::RElbowYaw => "RElbowYaw",
            JointId::RElbowRoll => "RElbowRoll",
            JointId::RWristYaw => "RWristYaw",
            JointId::LHand => "LHand",
            JointId::RHand => "RHand",
        }
    }

    pub fn from_name(name: &str) -> Result<JointId, JointParseError> {
        JointId::ALL
            .iter()
            .copied()
            .find(|j| j.name() == name)
            .ok_or_else(|| JointParseError {
                name: name.to_string(),
            })
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of joints, used for masking and ownership grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JointMask(u32);

impl JointMask {
    pub const EMPTY: JointMask = JointMask(0);

    pub fn all() -> JointMask {
        JointMask((1u32 << JOINT_COUNT) - 1)
    }

    pub fn from_joints<I: IntoIterator<Item = JointId>>(joints: I) -> JointMask {
        let mut mask = JointMask::EMPTY;
        for j in joints {
            mask.insert(j);
        }
        mask
    }

    /// Parses a comma-separated joint name list, e.g. `HeadYaw,HeadPitch`.
    pub fn parse(list: &str) -> Result<JointMask, JointParseError> {
        let mut mask = JointMask::EMPTY;
        for part in list.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            mask.insert(JointId::from_name(part)?);
        }
        Ok(mask)
    }

    pub fn insert(&mut self, joint: JointId) {
        self.0 |= 1 << joint.ordinal();
    }

    pub fn remove(&mut self, joint: JointId) {
        self.0 &= !(1 << joint.ordinal());
    }

    pub fn contains(&self, joint: JointId) -> bool {
        self.0 & (1 << joint.ordinal()) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersects(&self, other: &JointMask) -> bool {
        self.0 & other.0 != 0
    }

    pub fn intersection(&self, other: &JointMask) -> JointMask {
        JointMask(self.0 & other.0)
    }

    pub fn union(&self, other: &JointMask) -> JointMask {
        JointMask(self.0 | other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = JointId> + '_ {
        JointId::ALL.iter().copied().filter(|j| self.contains(*j))
    }
}

impl FromIterator<JointId> for JointMask {
    fn from_iter<T: IntoIterator<Item = JointId>>(iter: T) -> Self {
        JointMask::from_joints(iter)
    }
}

impl fmt::Display for JointMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(|j| j.name()).collect();
        f.write_str(&names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinals_are_a_bijection() {
        for (i, j) in JointId::ALL.iter().enumerate() {
            assert_eq!(j.ordinal(), i);
            assert_eq!(JointId::from_ordinal(i), Some(*j));
        }
        assert_eq!(JointId::from_ordinal(25), None);
    }

    #[test]
    fn name_round_trip() {
        for j in JointId::ALL {
            assert_eq!(JointId::from_name(j.name()).unwrap(), j);
        }
        assert!(JointId::from_name("Tail").is_err());
    }

    #[test]
    fn mask_parse_and_ops() {
        let m = JointMask::parse("HeadYaw, HeadPitch").unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.contains(JointId::HeadYaw));
        assert!(!m.contains(JointId::LHand));
        assert!(m.intersects(&JointMask::from_joints([JointId::HeadYaw])));
        assert!(!m.intersects(&JointMask::from_joints([JointId::LHand])));
    }
}
