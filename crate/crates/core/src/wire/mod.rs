//! Wire protocol: MessagePack-encoded sensor and actuator messages.
//!
//! One message is one map; key set, key order and array ordering are
//! normative and documented in `docs/wire.md`. Encoding is deterministic,
//! decoding is total — arbitrary bytes yield a frame or a structured error,
//! never a panic.

pub mod msgpack;

use thiserror::Error;

use crate::frame::{ActuatorFrame, LedGroup, SensorFrame, TouchState, FSR_COUNT};
use crate::joints::JOINT_COUNT;
use msgpack::{Parse, Value, Writer};

/// Sensor message keys, in normative order.
pub const SENSOR_KEYS: [&str; 10] = [
    "Position",
    "Stiffness",
    "Gyroscope",
    "Accelerometer",
    "Angles",
    "FSR",
    "Touch",
    "Battery",
    "Cycle",
    "Time",
];

/// Actuator message keys, in normative order.
pub const ACTUATOR_KEYS: [&str; 10] = [
    "Position",
    "Stiffness",
    "Chest",
    "LEye",
    "REye",
    "LEar",
    "REar",
    "LFoot",
    "RFoot",
    "Skull",
];

#[derive(Debug, Error)]
pub enum WireError {
    #[error("truncated message ({have} bytes)")]
    Truncated { have: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("`{key}`: expected {expected} entries, found {found}")]
    WrongArity {
        key: String,
        expected: usize,
        found: usize,
    },
    #[error("`{key}`: expected {expected}, found {found}")]
    WrongType {
        key: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("malformed message: {0}")]
    Malformed(String),
}

fn expect_f64_array(key: &str, v: &Value, arity: usize) -> Result<Vec<f64>, WireError> {
    let items = match v {
        Value::Array(items) => items,
        other => {
            return Err(WireError::WrongType {
                key: key.to_string(),
                expected: "array of floats",
                found: other.type_name(),
            })
        }
    };
    if items.len() != arity {
        return Err(WireError::WrongArity {
            key: key.to_string(),
            expected: arity,
            found: items.len(),
        });
    }
    items
        .iter()
        .map(|item| match item {
            Value::F64(f) => Ok(*f),
            other => Err(WireError::WrongType {
                key: key.to_string(),
                expected: "float",
                found: other.type_name(),
            }),
        })
        .collect()
}

fn expect_bool_array(key: &str, v: &Value, arity: usize) -> Result<Vec<bool>, WireError> {
    let items = match v {
        Value::Array(items) => items,
        other => {
            return Err(WireError::WrongType {
                key: key.to_string(),
                expected: "array of bools",
                found: other.type_name(),
            })
        }
    };
    if items.len() != arity {
        return Err(WireError::WrongArity {
            key: key.to_string(),
            expected: arity,
            found: items.len(),
        });
    }
    items
        .iter()
        .map(|item| match item {
            Value::Bool(b) => Ok(*b),
            other => Err(WireError::WrongType {
                key: key.to_string(),
                expected: "bool",
                found: other.type_name(),
            }),
        })
        .collect()
}

fn expect_f64(key: &str, v: &Value) -> Result<f64, WireError> {
    match v {
        Value::F64(f) => Ok(*f),
        other => Err(WireError::WrongType {
            key: key.to_string(),
            expected: "float",
            found: other.type_name(),
        }),
    }
}

fn expect_u64(key: &str, v: &Value) -> Result<u64, WireError> {
    match v {
        Value::U64(u) => Ok(*u),
        other => Err(WireError::WrongType {
            key: key.to_string(),
            expected: "uint",
            found: other.type_name(),
        }),
    }
}

/// Validates the key set of a decoded map against a normative key list and
/// returns values in normative order.
fn check_keys<'v>(
    map: &'v [(String, Value)],
    keys: &'static [&'static str],
) -> Result<Vec<&'v Value>, WireError> {
    for (k, _) in map {
        if !keys.contains(&k.as_str()) {
            return Err(WireError::UnknownKey(k.clone()));
        }
    }
    let mut out = Vec::with_capacity(keys.len());
    for key in keys {
        let mut found = None;
        for (k, v) in map {
            if k == key {
                if found.is_some() {
                    return Err(WireError::DuplicateKey(k.clone()));
                }
                found = Some(v);
            }
        }
        out.push(found.ok_or(WireError::MissingKey(key))?);
    }
    Ok(out)
}

fn as_map(v: Value) -> Result<Vec<(String, Value)>, WireError> {
    match v {
        Value::Map(m) => Ok(m),
        other => Err(WireError::WrongType {
            key: "<message>".into(),
            expected: "map",
            found: other.type_name(),
        }),
    }
}

/// Encodes an actuator frame into its normative byte sequence.
pub fn encode_actuators(frame: &ActuatorFrame) -> Vec<u8> {
    let mut w = Writer::new();
    w.map_header(ACTUATOR_KEYS.len());
    w.str("Position");
    w.f64_array(&frame.joint_positions);
    w.str("Stiffness");
    w.f64_array(&frame.joint_stiffness);
    for group in LedGroup::ALL {
        w.str(group.name());
        w.f64_array(&frame.leds.group(group));
    }
    w.into_bytes()
}

/// Decodes an actuator message. Total over arbitrary bytes.
pub fn decode_actuators(bytes: &[u8]) -> Result<ActuatorFrame, WireError> {
    actuators_from_value(msgpack::parse_complete(bytes)?)
}

/// Encodes a sensor frame into its normative byte sequence (endpoint side).
pub fn encode_sensors(frame: &SensorFrame) -> Vec<u8> {
    let mut w = Writer::new();
    w.map_header(SENSOR_KEYS.len());
    w.str("Position");
    w.f64_array(&frame.joint_positions);
    w.str("Stiffness");
    w.f64_array(&frame.joint_stiffness);
    w.str("Gyroscope");
    w.f64_array(&frame.gyro);
    w.str("Accelerometer");
    w.f64_array(&frame.accel);
    w.str("Angles");
    w.f64_array(&frame.torso_angles);
    w.str("FSR");
    w.f64_array(&frame.fsr);
    w.str("Touch");
    w.array_header(8);
    for b in frame.touch.to_array() {
        w.bool(b);
    }
    w.str("Battery");
    w.f64(frame.battery_charge);
    w.str("Cycle");
    w.u64(frame.cycle_index);
    w.str("Time");
    w.f64(frame.timestamp);
    w.into_bytes()
}

/// Decodes a sensor message. Total over arbitrary bytes.
pub fn decode_sensors(bytes: &[u8]) -> Result<SensorFrame, WireError> {
    sensors_from_value(msgpack::parse_complete(bytes)?)
}

/// Incremental extraction of one message from a stream buffer.
///
/// `Ok(Some((value, consumed)))` when a complete message is available,
/// `Ok(None)` when more bytes are needed.
pub fn take_message(buf: &[u8]) -> Result<Option<(Value, usize)>, WireError> {
    match msgpack::parse(buf)? {
        Parse::Complete(v, used) => Ok(Some((v, used))),
        Parse::NeedMore => Ok(None),
    }
}

/// Decodes a sensor frame from an already-parsed stream value.
pub fn sensors_from_value(v: Value) -> Result<SensorFrame, WireError> {
    let map = as_map(v)?;
    let vals = check_keys(&map, &SENSOR_KEYS)?;
    let mut frame = SensorFrame::default();
    frame
        .joint_positions
        .copy_from_slice(&expect_f64_array("Position", vals[0], JOINT_COUNT)?);
    frame
        .joint_stiffness
        .copy_from_slice(&expect_f64_array("Stiffness", vals[1], JOINT_COUNT)?);
    frame
        .gyro
        .copy_from_slice(&expect_f64_array("Gyroscope", vals[2], 3)?);
    frame
        .accel
        .copy_from_slice(&expect_f64_array("Accelerometer", vals[3], 3)?);
    frame
        .torso_angles
        .copy_from_slice(&expect_f64_array("Angles", vals[4], 2)?);
    frame
        .fsr
        .copy_from_slice(&expect_f64_array("FSR", vals[5], FSR_COUNT)?);
    let touch = expect_bool_array("Touch", vals[6], 8)?;
    let mut touch_arr = [false; 8];
    touch_arr.copy_from_slice(&touch);
    frame.touch = TouchState::from_array(touch_arr);
    frame.battery_charge = expect_f64("Battery", vals[7])?;
    frame.cycle_index = expect_u64("Cycle", vals[8])?;
    frame.timestamp = expect_f64("Time", vals[9])?;
    Ok(frame)
}

/// Decodes an actuator frame from an already-parsed stream value.
pub fn actuators_from_value(v: Value) -> Result<ActuatorFrame, WireError> {
    let map = as_map(v)?;
    let vals = check_keys(&map, &ACTUATOR_KEYS)?;
    let positions = expect_f64_array("Position", vals[0], JOINT_COUNT)?;
    let stiffness = expect_f64_array("Stiffness", vals[1], JOINT_COUNT)?;
    let mut frame = ActuatorFrame::default();
    frame.joint_positions.copy_from_slice(&positions);
    frame.joint_stiffness.copy_from_slice(&stiffness);
    for (i, group) in LedGroup::ALL.iter().enumerate() {
        let channels = expect_f64_array(group.name(), vals[2 + i], group.arity())?;
        frame.leds.set_group(*group, &channels);
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joints::JointId;

    #[test]
    fn actuator_round_trip_identity() {
        let mut frame = ActuatorFrame::default();
        frame.joint_positions[JointId::HeadYaw.ordinal()] = 0.25;
        frame.joint_positions[JointId::RKneePitch.ordinal()] = 1.0;
        frame.joint_stiffness = [0.8; JOINT_COUNT];
        frame.leds.chest = [0.0, 0.5, 1.0];
        frame.leds.left_eye[3] = [1.0, 0.25, 0.125];
        let decoded = decode_actuators(&encode_actuators(&frame)).unwrap();
        assert_eq!(decoded, frame);
    }

    #[test]
    fn encode_is_deterministic() {
        let frame = ActuatorFrame::default();
        assert_eq!(encode_actuators(&frame), encode_actuators(&frame));
        let s = SensorFrame::default();
        assert_eq!(encode_sensors(&s), encode_sensors(&s));
    }

    #[test]
    fn sensor_round_trip_identity() {
        let mut frame = SensorFrame {
            cycle_index: 42,
            timestamp: 42.0 / 83.0,
            battery_charge: 0.87,
            ..SensorFrame::default()
        };
        frame.joint_positions[5] = -0.4;
        frame.gyro = [0.1, -0.2, 0.3];
        frame.fsr = [0.7, 0.7, 0.7, 0.7, 0.6, 0.6, 0.6, 0.6];
        frame.touch.chest_button = true;
        let decoded = decode_sensors(&encode_sensors(&frame)).unwrap();
        assert_eq!(decoded, frame);
    }

    #[test]
    fn empty_input_is_truncated_error() {
        match decode_sensors(&[]) {
            Err(WireError::Truncated { .. }) => {}
            other => panic!("expected Truncated, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_distinct_error() {
        let mut w = Writer::new();
        w.map_header(1);
        w.str("Bogus");
        w.f64(1.0);
        match decode_sensors(&w.into_bytes()) {
            Err(WireError::UnknownKey(k)) => assert_eq!(k, "Bogus"),
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn wrong_arity_is_distinct_error() {
        let mut frame_bytes = encode_sensors(&SensorFrame::default());
        // Shrink the Gyroscope array from 3 to 2 entries by rewriting bytes:
        // simpler to build the message manually.
        frame_bytes.clear();
        let mut w = Writer::new();
        w.map_header(10);
        w.str("Position");
        w.f64_array(&[0.0; 25]);
        w.str("Stiffness");
        w.f64_array(&[0.0; 25]);
        w.str("Gyroscope");
        w.f64_array(&[0.0; 2]);
        w.str("Accelerometer");
        w.f64_array(&[0.0; 3]);
        w.str("Angles");
        w.f64_array(&[0.0; 2]);
        w.str("FSR");
        w.f64_array(&[0.0; 8]);
        w.str("Touch");
        w.array_header(8);
        for _ in 0..8 {
            w.bool(false);
        }
        w.str("Battery");
        w.f64(1.0);
        w.str("Cycle");
        w.u64(0);
        w.str("Time");
        w.f64(0.0);
        frame_bytes.extend_from_slice(&w.into_bytes());
        match decode_sensors(&frame_bytes) {
            Err(WireError::WrongArity { key, expected, found }) => {
                assert_eq!(key, "Gyroscope");
                assert_eq!(expected, 3);
                assert_eq!(found, 2);
            }
            other => panic!("expected WrongArity, got {other:?}"),
        }
    }

    #[test]
    fn wrong_scalar_type_is_distinct_error() {
        let mut w = Writer::new();
        w.map_header(10);
        w.str("Position");
        w.f64_array(&[0.0; 25]);
        w.str("Stiffness");
        w.f64_array(&[0.0; 25]);
        w.str("Gyroscope");
        w.f64_array(&[0.0; 3]);
        w.str("Accelerometer");
        w.f64_array(&[0.0; 3]);
        w.str("Angles");
        w.f64_array(&[0.0; 2]);
        w.str("FSR");
        w.f64_array(&[0.0; 8]);
        w.str("Touch");
        w.array_header(8);
        for _ in 0..8 {
            w.bool(false);
        }
        w.str("Battery");
        w.bool(true); // wrong type
        w.str("Cycle");
        w.u64(0);
        w.str("Time");
        w.f64(0.0);
        match decode_sensors(&w.into_bytes()) {
            Err(WireError::WrongType { key, .. }) => assert_eq!(key, "Battery"),
            other => panic!("expected WrongType, got {other:?}"),
        }
    }
}
