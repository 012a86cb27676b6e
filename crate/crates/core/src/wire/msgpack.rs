//! Minimal MessagePack subset used by the wire protocol.
//!
//! The writer emits exactly the normative layout documented in
//! `docs/wire.md`; the reader is total over arbitrary bytes and accepts the
//! common encodings for each value class (any uint width, f32 or f64).

use super::WireError;

pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Writer {
        Writer {
            buf: Vec::with_capacity(1536),
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn map_header(&mut self, len: usize) {
        debug_assert!(len <= 15, "wire messages use fixmap only");
        self.buf.push(0x80 | len as u8);
    }

    pub fn str(&mut self, s: &str) {
        debug_assert!(s.len() <= 31, "wire keys use fixstr only");
        self.buf.push(0xa0 | s.len() as u8);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn array_header(&mut self, len: usize) {
        if len <= 15 {
            self.buf.push(0x90 | len as u8);
        } else {
            self.buf.push(0xdc);
            self.buf.extend_from_slice(&(len as u16).to_be_bytes());
        }
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.push(0xcb);
        self.buf.extend_from_slice(&v.to_bits().to_be_bytes());
    }

    pub fn f64_array(&mut self, vals: &[f64]) {
        self.array_header(vals.len());
        for v in vals {
            self.f64(*v);
        }
    }

    pub fn bool(&mut self, v: bool) {
        self.buf.push(if v { 0xc3 } else { 0xc2 });
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.push(0xcf);
        self.buf.extend_from_slice(&v.to_be_bytes());
    }
}

/// A decoded MessagePack value, restricted to what the protocol carries.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    F64(f64),
    U64(u64),
    Bool(bool),
    Array(Vec<Value>),
    Str(String),
    Map(Vec<(String, Value)>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::F64(_) => "float",
            Value::U64(_) => "uint",
            Value::Bool(_) => "bool",
            Value::Array(_) => "array",
            Value::Str(_) => "str",
            Value::Map(_) => "map",
        }
    }
}

/// Incremental parse result: either a value plus the bytes consumed, or a
/// signal that the buffer ends mid-value.
pub enum Parse {
    Complete(Value, usize),
    NeedMore,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

/// Parse failure modes. `Incomplete` means more bytes may fix it; everything
/// else is a hard error for this message.
enum Raw {
    Incomplete,
    Bad(WireError),
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], Raw> {
        if self.bytes.len() - self.pos < n {
            return Err(Raw::Incomplete);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8, Raw> {
        Ok(self.take(1)?[0])
    }

    fn be_uint(&mut self, n: usize) -> Result<u64, Raw> {
        let b = self.take(n)?;
        let mut v: u64 = 0;
        for byte in b {
            v = (v << 8) | *byte as u64;
        }
        Ok(v)
    }

    fn value(&mut self, depth: usize) -> Result<Value, Raw> {
        if depth > 8 {
            return Err(Raw::Bad(WireError::Malformed("nesting too deep".into())));
        }
        let tag = self.byte()?;
        match tag {
            // positive fixint
            0x00..=0x7f => Ok(Value::U64(tag as u64)),
            // fixmap
            0x80..=0x8f => self.map((tag & 0x0f) as usize, depth),
            // fixarray
            0x90..=0x9f => self.array((tag & 0x0f) as usize, depth),
            // fixstr
            0xa0..=0xbf => self.str((tag & 0x1f) as usize),
            0xc2 => Ok(Value::Bool(false)),
            0xc3 => Ok(Value::Bool(true)),
            // f32 accepted for interop, widened to f64
            0xca => {
                let b = self.take(4)?;
                let bits = u32::from_be_bytes([b[0], b[1], b[2], b[3]]);
                Ok(Value::F64(f32::from_bits(bits) as f64))
            }
            0xcb => {
                let b = self.take(8)?;
                let bits = u64::from_be_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]);
                Ok(Value::F64(f64::from_bits(bits)))
            }
            0xcc => Ok(Value::U64(self.be_uint(1)?)),
            0xcd => Ok(Value::U64(self.be_uint(2)?)),
            0xce => Ok(Value::U64(self.be_uint(4)?)),
            0xcf => Ok(Value::U64(self.be_uint(8)?)),
            0xd9 => {
                let len = self.be_uint(1)? as usize;
                self.str(len)
            }
            0xda => {
                let len = self.be_uint(2)? as usize;
                self.str(len)
            }
            0xdc => {
                let len = self.be_uint(2)? as usize;
                self.array(len, depth)
            }
            0xdd => {
                let len = self.be_uint(4)? as usize;
                self.array(len, depth)
            }
            0xde => {
                let len = self.be_uint(2)? as usize;
                self.map(len, depth)
            }
            other => Err(Raw::Bad(WireError::Malformed(format!(
                "unsupported msgpack tag 0x{other:02x}"
            )))),
        }
    }

    fn str(&mut self, len: usize) -> Result<Value, Raw> {
        let bytes = self.take(len)?;
        match std::str::from_utf8(bytes) {
            Ok(s) => Ok(Value::Str(s.to_string())),
            Err(_) => Err(Raw::Bad(WireError::Malformed("key is not UTF-8".into()))),
        }
    }

    fn array(&mut self, len: usize, depth: usize) -> Result<Value, Raw> {
        // Each element takes at least one byte; reject lengths the buffer
        // can never satisfy before allocating.
        if len > self.bytes.len().saturating_sub(self.pos) && len > 4096 {
            return Err(Raw::Incomplete);
        }
        let mut items = Vec::with_capacity(len.min(256));
        for _ in 0..len {
            items.push(self.value(depth + 1)?);
        }
        Ok(Value::Array(items))
    }

    fn map(&mut self, len: usize, depth: usize) -> Result<Value, Raw> {
        if len > self.bytes.len().saturating_sub(self.pos) && len > 4096 {
            return Err(Raw::Incomplete);
        }
        let mut entries = Vec::with_capacity(len.min(64));
        for _ in 0..len {
            let key = match self.value(depth + 1)? {
                Value::Str(s) => s,
                other => {
                    return Err(Raw::Bad(WireError::WrongType {
                        key: "<map key>".into(),
                        expected: "str",
                        found: other.type_name(),
                    }))
                }
            };
            let val = self.value(depth + 1)?;
            entries.push((key, val));
        }
        Ok(Value::Map(entries))
    }
}

/// Parses one value from the front of `bytes`.
///
/// Returns `NeedMore` when the buffer ends mid-value, so callers reading from
/// a stream can accumulate and retry. Never panics on any input.
pub fn parse(bytes: &[u8]) -> Result<Parse, WireError> {
    if bytes.is_empty() {
        return Ok(Parse::NeedMore);
    }
    let mut cur = Cursor { bytes, pos: 0 };
    match cur.value(0) {
        Ok(v) => Ok(Parse::Complete(v, cur.pos)),
        Err(Raw::Incomplete) => Ok(Parse::NeedMore),
        Err(Raw::Bad(e)) => Err(e),
    }
}

/// Parses one complete value, treating a short buffer as a hard error.
/// This is the entry point for whole-message decoding.
pub fn parse_complete(bytes: &[u8]) -> Result<Value, WireError> {
    match parse(bytes)? {
        Parse::Complete(v, used) => {
            if used != bytes.len() {
                return Err(WireError::Malformed(format!(
                    "{} trailing bytes after message",
                    bytes.len() - used
                )));
            }
            Ok(v)
        }
        Parse::NeedMore => Err(WireError::Truncated {
            have: bytes.len(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writer_emits_expected_tags() {
        let mut w = Writer::new();
        w.map_header(2);
        w.str("Ab");
        w.f64(1.0);
        w.str("Cd");
        w.u64(7);
        let b = w.into_bytes();
        assert_eq!(b[0], 0x82);
        assert_eq!(b[1], 0xa2);
        assert_eq!(&b[2..4], b"Ab");
        assert_eq!(b[4], 0xcb);
        assert_eq!(&b[5..13], &1.0f64.to_bits().to_be_bytes());
        assert_eq!(b[16], 0xcf);
    }

    #[test]
    fn parse_round_trips_writer() {
        let mut w = Writer::new();
        w.map_header(1);
        w.str("X");
        w.f64_array(&[1.5, -2.25]);
        let bytes = w.into_bytes();
        let v = parse_complete(&bytes).unwrap();
        assert_eq!(
            v,
            Value::Map(vec![(
                "X".into(),
                Value::Array(vec![Value::F64(1.5), Value::F64(-2.25)])
            )])
        );
    }

    #[test]
    fn truncated_input_is_need_more() {
        let mut w = Writer::new();
        w.map_header(1);
        w.str("X");
        w.f64(3.75);
        let bytes = w.into_bytes();
        for cut in 0..bytes.len() {
            match parse(&bytes[..cut]).unwrap() {
                Parse::NeedMore => {}
                Parse::Complete(..) => panic!("prefix of len {cut} should be incomplete"),
            }
        }
    }

    #[test]
    fn huge_length_header_does_not_allocate() {
        // array32 claiming ~4 billion elements with no payload
        let bytes = [0xdd, 0xff, 0xff, 0xff, 0xff];
        assert!(matches!(parse(&bytes), Ok(Parse::NeedMore)));
    }

    #[test]
    fn unsupported_tag_is_error() {
        assert!(parse(&[0xc1]).is_err());
    }
}
