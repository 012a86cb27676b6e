//! Per-cycle hardware state: what the robot reports and what we command.

use serde::{Deserialize, Serialize};

use crate::error::FrameValidationError;
use crate::joints::{JointId, JOINT_COUNT};
use crate::limits::LimitsTable;

pub type Rgb = [f64; 3];

/// Complete LED state of the robot. All channels in `[0, 1]`, eyes are
/// 8-LED RGB rings, ears 10 single-intensity LEDs, the skull 12.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LedState {
    pub chest: Rgb,
    pub left_eye: [Rgb; 8],
    pub right_eye: [Rgb; 8],
    pub left_ear: [f64; 10],
    pub right_ear: [f64; 10],
    pub left_foot: Rgb,
    pub right_foot: Rgb,
    pub skull: [f64; 12],
}

/// One LED group addressable as a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LedGroup {
    Chest,
    LeftEye,
    RightEye,
    LeftEar,
    RightEar,
    LeftFoot,
    RightFoot,
    Skull,
}

impl LedGroup {
    pub const ALL: [LedGroup; 8] = [
        LedGroup::Chest,
        LedGroup::LeftEye,
        LedGroup::RightEye,
        LedGroup::LeftEar,
        LedGroup::RightEar,
        LedGroup::LeftFoot,
        LedGroup::RightFoot,
        LedGroup::Skull,
    ];

    /// Number of scalar channels in the group's wire layout.
    pub fn arity(self) -> usize {
        match self {
            LedGroup::Chest | LedGroup::LeftFoot | LedGroup::RightFoot => 3,
            LedGroup::LeftEye | LedGroup::RightEye => 24,
            LedGroup::LeftEar | LedGroup::RightEar => 10,
            LedGroup::Skull => 12,
        }
    }

    /// Ring groups support rotation animations.
    pub fn is_ring(self) -> bool {
        matches!(
            self,
            LedGroup::LeftEye
                | LedGroup::RightEye
                | LedGroup::LeftEar
                | LedGroup::RightEar
                | LedGroup::Skull
        )
    }

    /// Ring length in LEDs (not scalar channels).
    pub fn ring_len(self) -> usize {
        match self {
            LedGroup::LeftEye | LedGroup::RightEye => 8,
            LedGroup::LeftEar | LedGroup::RightEar => 10,
            LedGroup::Skull => 12,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LedGroup::Chest => "Chest",
            LedGroup::LeftEye => "LEye",
            LedGroup::RightEye => "REye",
            LedGroup::LeftEar => "LEar",
            LedGroup::RightEar => "REar",
            LedGroup::LeftFoot => "LFoot",
            LedGroup::RightFoot => "RFoot",
            LedGroup::Skull => "Skull",
        }
    }
}

impl LedState {
    /// Flat channel values of one group, in wire order (eyes interleaved
    /// r0 g0 b0 r1 g1 b1 ...).
    pub fn group(&self, group: LedGroup) -> Vec<f64> {
        match group {
            LedGroup::Chest => self.chest.to_vec(),
            LedGroup::LeftFoot => self.left_foot.to_vec(),
            LedGroup::RightFoot => self.right_foot.to_vec(),
            LedGroup::LeftEye => self.left_eye.iter().flatten().copied().collect(),
            LedGroup::RightEye => self.right_eye.iter().flatten().copied().collect(),
            LedGroup::LeftEar => self.left_ear.to_vec(),
            LedGroup::RightEar => self.right_ear.to_vec(),
            LedGroup::Skull => self.skull.to_vec(),
        }
    }

    /// Overwrites a group from flat channel values. Panics if the arity is
    /// wrong; callers validate arity at the boundary.
    pub fn set_group(&mut self, group: LedGroup, values: &[f64]) {
        assert_eq!(values.len(), group.arity(), "{} arity", group.name());
        match group {
            LedGroup::Chest => self.chest.copy_from_slice(values),
            LedGroup::LeftFoot => self.left_foot.copy_from_slice(values),
            LedGroup::RightFoot => self.right_foot.copy_from_slice(values),
            LedGroup::LeftEar => self.left_ear.copy_from_slice(values),
            LedGroup::RightEar => self.right_ear.copy_from_slice(values),
            LedGroup::Skull => self.skull.copy_from_slice(values),
            LedGroup::LeftEye => {
                for (i, led) in self.left_eye.iter_mut().enumerate() {
                    led.copy_from_slice(&values[i * 3..i * 3 + 3]);
                }
            }
            LedGroup::RightEye => {
                for (i, led) in self.right_eye.iter_mut().enumerate() {
                    led.copy_from_slice(&values[i * 3..i * 3 + 3]);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<(), FrameValidationError> {
        for group in LedGroup::ALL {
            for (i, v) in self.group(group).iter().enumerate() {
                if !(0.0..=1.0).contains(v) || !v.is_finite() {
                    return Err(FrameValidationError {
                        channel: format!("{}[{i}]", group.name()),
                        reason: "LED channel outside [0,1]",
                        value: *v,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Touch and bumper switches, in wire order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TouchState {
    pub head_front: bool,
    pub head_middle: bool,
    pub head_rear: bool,
    pub chest_button: bool,
    pub l_foot_bumper_left: bool,
    pub l_foot_bumper_right: bool,
    pub r_foot_bumper_left: bool,
    pub r_foot_bumper_right: bool,
}

impl TouchState {
    pub fn to_array(self) -> [bool; 8] {
        [
            self.head_front,
            self.head_middle,
            self.head_rear,
            self.chest_button,
            self.l_foot_bumper_left,
            self.l_foot_bumper_right,
            self.r_foot_bumper_left,
            self.r_foot_bumper_right,
        ]
    }

    pub fn from_array(a: [bool; 8]) -> TouchState {
        TouchState {
            head_front: a[0],
            head_middle: a[1],
            head_rear: a[2],
            chest_button: a[3],
            l_foot_bumper_left: a[4],
            l_foot_bumper_right: a[5],
            r_foot_bumper_left: a[6],
            r_foot_bumper_right: a[7],
        }
    }
}

/// FSR order on the wire: left foot FL FR RL RR, then right foot FL FR RL RR.
pub const FSR_COUNT: usize = 8;

/// Everything the robot reports each cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    pub cycle_index: u64,
    /// Seconds since the endpoint started, `cycle_index * cycle_period`.
    pub timestamp: f64,
    pub joint_positions: [f64; JOINT_COUNT],
    pub joint_stiffness: [f64; JOINT_COUNT],
    /// rad/s, torso frame x y z.
    pub gyro: [f64; 3],
    /// m/s², torso frame x y z.
    pub accel: [f64; 3],
    /// Torso roll and pitch, radians.
    pub torso_angles: [f64; 2],
    /// Kilograms, see [`FSR_COUNT`] for ordering.
    pub fsr: [f64; FSR_COUNT],
    pub touch: TouchState,
    /// State of charge in [0,1].
    pub battery_charge: f64,
}

impl Default for SensorFrame {
    fn default() -> Self {
        SensorFrame {
            cycle_index: 0,
            timestamp: 0.0,
            joint_positions: [0.0; JOINT_COUNT],
            joint_stiffness: [0.0; JOINT_COUNT],
            gyro: [0.0; 3],
            accel: [0.0; 3],
            torso_angles: [0.0; 2],
            fsr: [0.0; FSR_COUNT],
            touch: TouchState::default(),
            battery_charge: 1.0,
        }
    }
}

impl SensorFrame {
    pub fn left_fsr_sum(&self) -> f64 {
        self.fsr[..4].iter().sum()
    }

    pub fn right_fsr_sum(&self) -> f64 {
        self.fsr[4..].iter().sum()
    }

    pub fn position(&self, joint: JointId) -> f64 {
        self.joint_positions[joint.ordinal()]
    }

    pub fn validate(&self) -> Result<(), FrameValidationError> {
        for (i, v) in self.fsr.iter().enumerate() {
            if *v < 0.0 || !v.is_finite() {
                return Err(FrameValidationError {
                    channel: format!("FSR[{i}]"),
                    reason: "FSR must be finite and >= 0",
                    value: *v,
                });
            }
        }
        if !(0.0..=1.0).contains(&self.battery_charge) {
            return Err(FrameValidationError {
                channel: "Battery".into(),
                reason: "battery charge outside [0,1]",
                value: self.battery_charge,
            });
        }
        Ok(())
    }
}

/// Everything we command each cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorFrame {
    pub joint_positions: [f64; JOINT_COUNT],
    pub joint_stiffness: [f64; JOINT_COUNT],
    pub leds: LedState,
}

impl Default for ActuatorFrame {
    fn default() -> Self {
        ActuatorFrame {
            joint_positions: [0.0; JOINT_COUNT],
            joint_stiffness: [0.0; JOINT_COUNT],
            leds: LedState::default(),
        }
    }
}

impl ActuatorFrame {
    /// Checks positions against the limits table and stiffness/LED ranges.
    pub fn validate(&self, limits: &LimitsTable) -> Result<(), FrameValidationError> {
        for j in JointId::ALL {
            let p = self.joint_positions[j.ordinal()];
            if !p.is_finite() || !limits.limit(j).contains(p) {
                return Err(FrameValidationError {
                    channel: j.name().to_string(),
                    reason: "position outside joint limits",
                    value: p,
                });
            }
            let s = self.joint_stiffness[j.ordinal()];
            if !(0.0..=1.0).contains(&s) || !s.is_finite() {
                return Err(FrameValidationError {
                    channel: format!("{}.stiffness", j.name()),
                    reason: "stiffness outside [0,1]",
                    value: s,
                });
            }
        }
        self.leds.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn led_group_round_trip() {
        let mut s = LedState::default();
        let vals: Vec<f64> = (0..24).map(|i| i as f64 / 24.0).collect();
        s.set_group(LedGroup::LeftEye, &vals);
        assert_eq!(s.group(LedGroup::LeftEye), vals);
        assert_eq!(s.left_eye[1], [3.0 / 24.0, 4.0 / 24.0, 5.0 / 24.0]);
    }

    #[test]
    fn validate_flags_bad_channels() {
        let mut f = ActuatorFrame::default();
        f.joint_positions[JointId::HeadYaw.ordinal()] = 9.0;
        let err = f.validate(LimitsTable::builtin()).unwrap_err();
        assert_eq!(err.channel, "HeadYaw");

        let mut f = ActuatorFrame::default();
        f.leds.chest = [0.0, 2.0, 0.0];
        let err = f.validate(LimitsTable::builtin()).unwrap_err();
        assert!(err.channel.starts_with("Chest"));
    }

    #[test]
    fn fsr_sums_split_by_foot() {
        let mut f = SensorFrame::default();
        f.fsr = [0.5, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25];
        assert_eq!(f.left_fsr_sum(), 2.0);
        assert_eq!(f.right_fsr_sum(), 1.0);
    }
}
