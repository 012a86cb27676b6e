//! Multi-source actuator command multiplexing.
//!
//! Motion, walk, head tracking and LED engines all write concurrently; the
//! arbiter decides which value reaches each actuator channel every cycle.
//! Sources must hold an ownership grant for every channel they touch
//! (default-deny). Requests on the same channel resolve by priority, ties by
//! latest submission. Channels nobody addresses hold their previous value.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frame::{ActuatorFrame, LedGroup};
use crate::joints::{JointId, JointMask};
use crate::limits::LimitsTable;

/// Opaque label identifying a command source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceId(Arc<str>);

impl SourceId {
    pub fn new(name: impl Into<String>) -> SourceId {
        SourceId(Arc::from(name.into().into_boxed_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SourceId {
    fn from(s: &str) -> SourceId {
        SourceId::new(s)
    }
}

/// Set of LED groups, used in grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LedGroupSet(u8);

impl LedGroupSet {
    pub const EMPTY: LedGroupSet = LedGroupSet(0);

    pub fn all() -> LedGroupSet {
        LedGroupSet(0xff)
    }

    pub fn from_groups<I: IntoIterator<Item = LedGroup>>(groups: I) -> LedGroupSet {
        let mut s = LedGroupSet::EMPTY;
        for g in groups {
            s.insert(g);
        }
        s
    }

    fn bit(group: LedGroup) -> u8 {
        1 << LedGroup::ALL.iter().position(|g| *g == group).unwrap()
    }

    pub fn insert(&mut self, group: LedGroup) {
        self.0 |= Self::bit(group);
    }

    pub fn contains(&self, group: LedGroup) -> bool {
        self.0 & Self::bit(group) != 0
    }

    pub fn intersects(&self, other: &LedGroupSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = LedGroup> + '_ {
        LedGroup::ALL.iter().copied().filter(|g| self.contains(*g))
    }
}

/// Joints plus LED groups a source may command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChannelMask {
    pub joints: JointMask,
    pub leds: LedGroupSet,
}

impl ChannelMask {
    pub fn joints<I: IntoIterator<Item = JointId>>(joints: I) -> ChannelMask {
        ChannelMask {
            joints: JointMask::from_joints(joints),
            leds: LedGroupSet::EMPTY,
        }
    }

    pub fn leds<I: IntoIterator<Item = LedGroup>>(groups: I) -> ChannelMask {
        ChannelMask {
            joints: JointMask::EMPTY,
            leds: LedGroupSet::from_groups(groups),
        }
    }

    pub fn intersects(&self, other: &ChannelMask) -> bool {
        self.joints.intersects(&other.joints) || self.leds.intersects(&other.leds)
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty() && self.leds.is_empty()
    }

    fn contested_with(&self, other: &ChannelMask) -> Vec<String> {
        let mut out: Vec<String> = self
            .joints
            .intersection(&other.joints)
            .iter()
            .map(|j| j.name().to_string())
            .collect();
        for g in self.leds.iter() {
            if other.leds.contains(g) {
                out.push(g.name().to_string());
            }
        }
        out
    }
}

/// Exclusive grants reject any overlapping grant; shared grants coexist and
/// resolve per-request by priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrantMode {
    Shared,
    Exclusive,
}

#[derive(Debug, Error)]
pub enum ArbiterError {
    #[error("grant for `{source}` conflicts with `{holder}` on [{}]", contested.join(","))]
    GrantConflict {
        source: SourceId,
        holder: SourceId,
        contested: Vec<String>,
    },
    #[error("source `{source}` does not own channel `{channel}`")]
    NotOwned { source: SourceId, channel: String },
}

#[derive(Debug, Clone)]
struct Grant {
    mask: ChannelMask,
    mode: GrantMode,
}

/// Per-joint command: either field may be left unset to hold.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JointTarget {
    pub position: Option<f64>,
    pub stiffness: Option<f64>,
}

impl JointTarget {
    pub fn position(p: f64) -> JointTarget {
        JointTarget {
            position: Some(p),
            stiffness: None,
        }
    }

    pub fn full(p: f64, s: f64) -> JointTarget {
        JointTarget {
            position: Some(p),
            stiffness: Some(s),
        }
    }

    pub fn stiffness(s: f64) -> JointTarget {
        JointTarget {
            position: None,
            stiffness: Some(s),
        }
    }
}

/// One source's command for a subset of channels.
#[derive(Debug, Clone, Default)]
pub struct CommandRequest {
    pub source: Option<SourceId>,
    pub priority: i32,
    pub joints: Vec<(JointId, JointTarget)>,
    /// Flat channel values per group, arity per the wire layout.
    pub leds: Vec<(LedGroup, Vec<f64>)>,
}

impl CommandRequest {
    pub fn new(source: &SourceId, priority: i32) -> CommandRequest {
        CommandRequest {
            source: Some(source.clone()),
            priority,
            ..CommandRequest::default()
        }
    }

    pub fn set_joint(&mut self, joint: JointId, target: JointTarget) -> &mut Self {
        self.joints.push((joint, target));
        self
    }

    pub fn set_led(&mut self, group: LedGroup, channels: Vec<f64>) -> &mut Self {
        debug_assert_eq!(channels.len(), group.arity());
        self.leds.push((group, channels));
        self
    }

    fn touched(&self) -> ChannelMask {
        ChannelMask {
            joints: self.joints.iter().map(|(j, _)| *j).collect(),
            leds: LedGroupSet::from_groups(self.leds.iter().map(|(g, _)| *g)),
        }
    }
}

/// What happened during one arbitration pass.
#[derive(Debug, Clone, Default)]
pub struct ArbitrationReport {
    /// Requests rejected for touching unowned channels.
    pub rejected: Vec<ArbiterError>,
    /// Number of position values clamped to the limits table this pass.
    pub clamped: u64,
    /// Channels clamped, for logging.
    pub clamped_joints: Vec<JointId>,
}

#[derive(Debug, Default)]
pub struct OwnershipTable {
    grants: HashMap<SourceId, Grant>,
    /// Running totals across the table's lifetime.
    pub total_conflicts: u64,
    pub total_clamps: u64,
}

impl OwnershipTable {
    pub fn new() -> OwnershipTable {
        OwnershipTable::default()
    }

    /// Records a grant. Exclusive grants fail on any overlap; shared grants
    /// fail only on overlap with an exclusive grant. Failure has no side
    /// effects.
    pub fn grant(
        &mut self,
        source: &SourceId,
        mask: ChannelMask,
        mode: GrantMode,
    ) -> Result<(), ArbiterError> {
        for (holder, grant) in &self.grants {
            if holder == source {
                continue;
            }
            let overlap = grant.mask.intersects(&mask);
            if overlap && (mode == GrantMode::Exclusive || grant.mode == GrantMode::Exclusive) {
                self.total_conflicts += 1;
                return Err(ArbiterError::GrantConflict {
                    source: source.clone(),
                    holder: holder.clone(),
                    contested: grant.mask.contested_with(&mask),
                });
            }
        }
        match self.grants.entry(source.clone()) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let g = e.get_mut();
                g.mask.joints = g.mask.joints.union(&mask.joints);
                for led in mask.leds.iter() {
                    g.mask.leds.insert(led);
                }
                if mode == GrantMode::Exclusive {
                    g.mode = GrantMode::Exclusive;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(Grant { mask, mode });
            }
        }
        Ok(())
    }

    pub fn release(&mut self, source: &SourceId) {
        self.grants.remove(source);
    }

    pub fn owned_mask(&self, source: &SourceId) -> Option<ChannelMask> {
        self.grants.get(source).map(|g| g.mask)
    }

    pub fn is_granted(&self, source: &SourceId, mask: &ChannelMask) -> bool {
        match self.grants.get(source) {
            Some(g) => {
                mask.joints.intersection(&g.mask.joints) == mask.joints
                    && mask.leds.iter().all(|l| g.mask.leds.contains(l))
            }
            None => mask.is_empty(),
        }
    }

    /// Folds pending requests over the previous frame.
    ///
    /// Deterministic: the same request sequence and previous frame always
    /// produce the same output. Submission order in `requests` is the
    /// tie-break order (later wins at equal priority).
    pub fn arbitrate(
        &mut self,
        requests: &[CommandRequest],
        previous: &ActuatorFrame,
        limits: &LimitsTable,
    ) -> (ActuatorFrame, ArbitrationReport) {
        let mut out = previous.clone();
        let mut report = ArbitrationReport::default();

        // (priority, submission index) per sub-channel, to resolve later
        // requests at >= priority winning.
        let mut pos_rank: [Option<(i32, usize)>; 25] = [None; 25];
        let mut stiff_rank: [Option<(i32, usize)>; 25] = [None; 25];
        let mut led_rank: [Option<(i32, usize)>; 8] = [None; 8];

        for (idx, req) in requests.iter().enumerate() {
            let touched = req.touched();
            let source = req.source.clone().unwrap_or_else(|| SourceId::new("?"));
            if !self.is_granted(&source, &touched) {
                let channel = touched
                    .joints
                    .iter()
                    .find(|j| {
                        !self
                            .grants
                            .get(&source)
                            .map(|g| g.mask.joints.contains(*j))
                            .unwrap_or(false)
                    })
                    .map(|j| j.name().to_string())
                    .or_else(|| {
                        touched
                            .leds
                            .iter()
                            .find(|l| {
                                !self
                                    .grants
                                    .get(&source)
                                    .map(|g| g.mask.leds.contains(*l))
                                    .unwrap_or(false)
                            })
                            .map(|l| l.name().to_string())
                    })
                    .unwrap_or_default();
                self.total_conflicts += 1;
                report.rejected.push(ArbiterError::NotOwned { source, channel });
                continue;
            }

            for (joint, target) in &req.joints {
                let o = joint.ordinal();
                if let Some(p) = target.position {
                    if pos_rank[o].map_or(true, |(pr, pi)| (req.priority, idx) >= (pr, pi)) {
                        pos_rank[o] = Some((req.priority, idx));
                        let (clamped, did) = limits.clamp(*joint, p);
                        if did {
                            report.clamped += 1;
                            report.clamped_joints.push(*joint);
                        }
                        out.joint_positions[o] = clamped;
                    }
                }
                if let Some(s) = target.stiffness {
                    if stiff_rank[o].map_or(true, |(pr, pi)| (req.priority, idx) >= (pr, pi)) {
                        stiff_rank[o] = Some((req.priority, idx));
                        out.joint_stiffness[o] = s.clamp(0.0, 1.0);
                    }
                }
            }
            for (group, channels) in &req.leds {
                let gi = LedGroup::ALL.iter().position(|g| g == group).unwrap();
                if channels.len() != group.arity() {
                    continue;
                }
                if led_rank[gi].map_or(true, |(pr, pi)| (req.priority, idx) >= (pr, pi)) {
                    led_rank[gi] = Some((req.priority, idx));
                    let clamped: Vec<f64> =
                        channels.iter().map(|v| v.clamp(0.0, 1.0)).collect();
                    out.leds.set_group(*group, &clamped);
                }
            }
        }
        self.total_clamps += report.clamped;
        (out, report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_with(source: &SourceId, joints: &[JointId]) -> OwnershipTable {
        let mut t = OwnershipTable::new();
        t.grant(source, ChannelMask::joints(joints.iter().copied()), GrantMode::Shared)
            .unwrap();
        t
    }

    #[test]
    fn single_request_holds_other_channels() {
        let src = SourceId::new("head");
        let mut t = table_with(&src, &[JointId::HeadYaw]);
        let mut prev = ActuatorFrame::default();
        prev.joint_positions[JointId::LHand.ordinal()] = 0.7;
        let mut req = CommandRequest::new(&src, 0);
        req.set_joint(JointId::HeadYaw, JointTarget::position(0.3));
        let (out, report) = t.arbitrate(&[req], &prev, LimitsTable::builtin());
        assert!(report.rejected.is_empty());
        assert_eq!(out.joint_positions[JointId::HeadYaw.ordinal()], 0.3);
        assert_eq!(out.joint_positions[JointId::LHand.ordinal()], 0.7);
        assert_eq!(out.joint_stiffness, prev.joint_stiffness);
        assert_eq!(out.leds, prev.leds);
    }

    #[test]
    fn higher_priority_wins_ties_to_latest() {
        let a = SourceId::new("a");
        let b = SourceId::new("b");
        let mut t = OwnershipTable::new();
        let mask = ChannelMask::joints([JointId::HeadYaw]);
        t.grant(&a, mask, GrantMode::Shared).unwrap();
        t.grant(&b, mask, GrantMode::Shared).unwrap();

        let mut r1 = CommandRequest::new(&a, 1);
        r1.set_joint(JointId::HeadYaw, JointTarget::position(0.1));
        let mut r2 = CommandRequest::new(&b, 2);
        r2.set_joint(JointId::HeadYaw, JointTarget::position(0.2));
        let (out, _) = t.arbitrate(
            &[r1.clone(), r2.clone()],
            &ActuatorFrame::default(),
            LimitsTable::builtin(),
        );
        assert_eq!(out.joint_positions[0], 0.2);
        // order flipped, still priority 2 value
        let (out, _) = t.arbitrate(&[r2, r1], &ActuatorFrame::default(), LimitsTable::builtin());
        assert_eq!(out.joint_positions[0], 0.2);

        // equal priority: latest submission wins
        let mut r3 = CommandRequest::new(&a, 2);
        r3.set_joint(JointId::HeadYaw, JointTarget::position(0.5));
        let mut r4 = CommandRequest::new(&b, 2);
        r4.set_joint(JointId::HeadYaw, JointTarget::position(0.6));
        let (out, _) = t.arbitrate(&[r3, r4], &ActuatorFrame::default(), LimitsTable::builtin());
        assert_eq!(out.joint_positions[0], 0.6);
    }

    #[test]
    fn out_of_limit_position_clamps_and_counts() {
        let src = SourceId::new("head");
        let mut t = table_with(&src, &[JointId::HeadYaw]);
        let mut req = CommandRequest::new(&src, 0);
        req.set_joint(JointId::HeadYaw, JointTarget::position(5.0));
        let (out, report) = t.arbitrate(&[req], &ActuatorFrame::default(), LimitsTable::builtin());
        assert!((out.joint_positions[0] - 2.0857).abs() < 1e-12);
        assert_eq!(report.clamped, 1);
        assert_eq!(t.total_clamps, 1);
    }

    #[test]
    fn unowned_request_rejected_others_unaffected() {
        let good = SourceId::new("good");
        let bad = SourceId::new("bad");
        let mut t = table_with(&good, &[JointId::HeadYaw]);
        let mut r_bad = CommandRequest::new(&bad, 10);
        r_bad.set_joint(JointId::HeadYaw, JointTarget::position(1.0));
        let mut r_good = CommandRequest::new(&good, 0);
        r_good.set_joint(JointId::HeadYaw, JointTarget::position(0.2));
        let (out, report) =
            t.arbitrate(&[r_bad, r_good], &ActuatorFrame::default(), LimitsTable::builtin());
        assert_eq!(out.joint_positions[0], 0.2);
        assert_eq!(report.rejected.len(), 1);
        assert!(matches!(report.rejected[0], ArbiterError::NotOwned { .. }));
    }

    #[test]
    fn exclusive_grant_conflicts() {
        let a = SourceId::new("walk");
        let b = SourceId::new("sway");
        let mut t = OwnershipTable::new();
        t.grant(&a, ChannelMask::joints(JointId::LEGS), GrantMode::Exclusive)
            .unwrap();
        let err = t
            .grant(&b, ChannelMask::joints([JointId::LKneePitch]), GrantMode::Exclusive)
            .unwrap_err();
        match err {
            ArbiterError::GrantConflict { contested, .. } => {
                assert!(contested.contains(&"LKneePitch".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        // failed grant left no side effects
        assert!(t.owned_mask(&b).is_none());
        // releasing frees the channels
        t.release(&a);
        t.grant(&b, ChannelMask::joints([JointId::LKneePitch]), GrantMode::Exclusive)
            .unwrap();
    }

    #[test]
    fn arbitration_is_deterministic() {
        let src = SourceId::new("s");
        let mut t = table_with(&src, &[JointId::HeadYaw, JointId::HeadPitch]);
        let mut req = CommandRequest::new(&src, 0);
        req.set_joint(JointId::HeadYaw, JointTarget::full(0.3, 0.9));
        req.set_joint(JointId::HeadPitch, JointTarget::position(-0.1));
        let prev = ActuatorFrame::default();
        let (a, _) = t.arbitrate(&[req.clone()], &prev, LimitsTable::builtin());
        let (b, _) = t.arbitrate(&[req], &prev, LimitsTable::builtin());
        assert_eq!(a, b);
    }
}
