//! Socket endpoint: local-domain socket path or TCP `host:port`.

use std::fmt;
use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::os::unix::net::{UnixListener, UnixStream};
use std::path::PathBuf;

pub const DEFAULT_ENDPOINT: &str = "/tmp/oan-lola";
pub const ENDPOINT_ENV: &str = "OAN_LOLA_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Unix(PathBuf),
    Tcp(String),
}

impl Endpoint {
    /// `host:port` is TCP, anything else is a socket path.
    pub fn parse(s: &str) -> Endpoint {
        if !s.contains('/') {
            if let Some((host, port)) = s.rsplit_once(':') {
                if !host.is_empty() && port.parse::<u16>().is_ok() {
                    return Endpoint::Tcp(s.to_string());
                }
            }
        }
        Endpoint::Unix(PathBuf::from(s))
    }

    /// CLI override, then environment, then the default path.
    pub fn resolve(cli: Option<&str>) -> Endpoint {
        if let Some(s) = cli {
            return Endpoint::parse(s);
        }
        if let Ok(s) = std::env::var(ENDPOINT_ENV) {
            if !s.is_empty() {
                return Endpoint::parse(&s);
            }
        }
        Endpoint::parse(DEFAULT_ENDPOINT)
    }

    pub fn connect(&self) -> io::Result<Stream> {
        match self {
            Endpoint::Unix(path) => Ok(Stream::Unix(UnixStream::connect(path)?)),
            Endpoint::Tcp(addr) => {
                let s = TcpStream::connect(addr)?;
                s.set_nodelay(true)?;
                Ok(Stream::Tcp(s))
            }
        }
    }

    pub fn bind(&self) -> io::Result<Listener> {
        match self {
            Endpoint::Unix(path) => {
                if path.exists() {
                    // A previous server may have left a stale socket file.
                    let _ = std::fs::remove_file(path);
                }
                let l = UnixListener::bind(path)?;
                l.set_nonblocking(true)?;
                Ok(Listener::Unix(l))
            }
            Endpoint::Tcp(addr) => {
                let l = TcpListener::bind(addr)?;
                l.set_nonblocking(true)?;
                Ok(Listener::Tcp(l))
            }
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Unix(p) => write!(f, "{}", p.display()),
            Endpoint::Tcp(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Debug)]
pub enum Stream {
    Unix(UnixStream),
    Tcp(TcpStream),
}

impl Stream {
    pub fn try_clone(&self) -> io::Result<Stream> {
        match self {
            Stream::Unix(s) => Ok(Stream::Unix(s.try_clone()?)),
            Stream::Tcp(s) => Ok(Stream::Tcp(s.try_clone()?)),
        }
    }

    pub fn shutdown(&self) {
        match self {
            Stream::Unix(s) => {
                let _ = s.shutdown(std::net::Shutdown::Both);
            }
            Stream::Tcp(s) => {
                let _ = s.shutdown(std::net::Shutdown::Both);
            }
        }
    }
}

impl Read for Stream {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        match self {
            Stream::Unix(s) => s.read(buf),
            Stream::Tcp(s) => s.read(buf),
        }
    }
}

impl Write for Stream {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Stream::Unix(s) => s.write(buf),
            Stream::Tcp(s) => s.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Stream::Unix(s) => s.flush(),
            Stream::Tcp(s) => s.flush(),
        }
    }
}

#[derive(Debug)]
pub enum Listener {
    Unix(UnixListener),
    Tcp(TcpListener),
}

impl Listener {
    /// Non-blocking accept; `Ok(None)` when no client is waiting.
    pub fn try_accept(&self) -> io::Result<Option<Stream>> {
        match self {
            Listener::Unix(l) => match l.accept() {
                Ok((s, _)) => Ok(Some(Stream::Unix(s))),
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => Ok(None),
                Err(e) => Err(e),
            },
            Listener::Tcp(l) => match l.accept() {
                Ok((s, _)) => {
                    s.set_nodelay(true)?;
                    Ok(Some(Stream::Tcp(s)))
                }
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => Ok(None),
                Err(e) => Err(e),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_distinguishes_tcp_and_paths() {
        assert_eq!(
            Endpoint::parse("127.0.0.1:9559"),
            Endpoint::Tcp("127.0.0.1:9559".into())
        );
        assert_eq!(
            Endpoint::parse("/tmp/oan-lola"),
            Endpoint::Unix(PathBuf::from("/tmp/oan-lola"))
        );
        // a path with a colon-ish suffix stays a path
        assert_eq!(
            Endpoint::parse("/tmp/x:1"),
            Endpoint::Unix(PathBuf::from("/tmp/x:1"))
        );
        assert_eq!(
            Endpoint::parse("relative-socket"),
            Endpoint::Unix(PathBuf::from("relative-socket"))
        );
    }
}
