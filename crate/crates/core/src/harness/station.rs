use std::io::BufReader;
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use crate::prng::{hidden_stream, word_from_hex, HiddenVariable};
use crate::strategy::builtin;

use super::wire::StationConfig;
use super::{HarnessError, Role, StationRuntime, WireMessage, PROTOCOL_VERSION};

/// How many `λ` frames the source may send ahead of the last `SYNC`.
const SOURCE_WINDOW: u64 = 64;
const CONNECT_PATIENCE: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationSummary {
    pub role: Role,
    pub strategy: String,
    pub trials: u64,
}

struct Link {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Link {
    fn open(addr: impl ToSocketAddrs + Clone, role: Role) -> Result<Self, HarnessError> {
        let start = Instant::now();
        let stream = loop {
            match TcpStream::connect(addr.clone()) {
                Ok(s) => break s,
                Err(e) if start.elapsed() < CONNECT_PATIENCE && e.kind() == std::io::ErrorKind::ConnectionRefused => {
                    thread::sleep(Duration::from_millis(50));
                }
                Err(e) => return Err(e.into()),
            }
        };
        stream.set_nodelay(true)?;
        let mut link = Link { reader: BufReader::new(stream.try_clone()?), writer: stream };
        link.send(&WireMessage::hello(role))?;
        Ok(link)
    }

    fn send(&mut self, msg: &WireMessage) -> Result<(), HarnessError> {
        msg.write_to(&mut self.writer)
    }

    fn recv(&mut self) -> Result<WireMessage, HarnessError> {
        match WireMessage::read_from(&mut self.reader)? {
            Some(WireMessage::Error { code, text }) => Err(HarnessError::Remote { code, text }),
            Some(msg) => Ok(msg),
            None => Err(HarnessError::Protocol("referee closed the connection before END".into())),
        }
    }

    fn handshake(&mut self) -> Result<StationConfig, HarnessError> {
        match self.recv()? {
            WireMessage::Hello { role: Role::Referee, version } if version == PROTOCOL_VERSION => {}
            other => return Err(self.fail(format!("expected referee HELLO, got {}", other.kind()))),
        }
        match self.recv()? {
            WireMessage::Config(cfg) => Ok(cfg),
            other => Err(self.fail(format!("expected CONFIG, got {}", other.kind()))),
        }
    }

    /// Reports a violation to the referee and returns it as an error.
    fn fail(&mut self, text: String) -> HarnessError {
        let _ = self.send(&WireMessage::error("protocol", text.clone()));
        HarnessError::Protocol(text)
    }
}

fn config_seed(cfg: &StationConfig) -> Result<u64, HarnessError> {
    let text = cfg.seed_lambda.as_deref().ok_or_else(|| HarnessError::Protocol("CONFIG lacks seed_lambda".into()))?;
    word_from_hex(text).ok_or_else(|| HarnessError::Protocol(format!("CONFIG seed `{text}` is not a hex word")))
}

/// Connects to a referee as Alice or Bob and answers trials until `END`.
/// `strategy` overrides the strategy named in the referee's `CONFIG`.
pub fn run_station(
    addr: impl ToSocketAddrs + Clone,
    role: Role,
    strategy: Option<&str>,
) -> Result<StationSummary, HarnessError> {
    if !matches!(role, Role::Alice | Role::Bob) {
        return Err(HarnessError::InvalidConfig(format!("`{role}` is not a station role")));
    }
    let mut link = Link::open(addr, role)?;
    let cfg = link.handshake()?;
    let name = match strategy.map(str::to_string).or_else(|| cfg.strategy.clone()) {
        Some(name) => name,
        None => return Err(link.fail("no strategy configured".into())),
    };
    let mut runtime = StationRuntime::new(Arc::from(builtin(&name, cfg.grid)?), cfg.memory_mode);
    let seed = if cfg.virtual_source { Some(config_seed(&cfg)?) } else { None };

    let mut pending: Option<HiddenVariable> = None;
    let mut last = 0u64;
    loop {
        match link.recv()? {
            WireMessage::Lambda { n, words } if seed.is_none() && n == last + 1 && pending.is_none() => {
                pending = Some(WireMessage::parse_lambda(n, &words)?);
            }
            WireMessage::Trial { n, setting } if n == last + 1 && n <= cfg.n_trials => {
                let lambda = match seed {
                    Some(seed) => hidden_stream(seed, n)?,
                    None => match pending.take() {
                        Some(l) => l,
                        None => return Err(link.fail(format!("TRIAL {n} arrived before its LAMBDA"))),
                    },
                };
                let setting = cfg.grid.index(setting as usize)?;
                let outcome = runtime.respond(setting, &lambda);
                link.send(&WireMessage::Outcome { n, value: outcome.value() as i64 })?;
                last = n;
            }
            WireMessage::Sync { n } if n == last => {}
            WireMessage::End {} => break,
            other => return Err(link.fail(format!("unexpected {} after trial {last}", other.kind()))),
        }
    }
    Ok(StationSummary { role, strategy: name, trials: last })
}

/// Connects as the hidden-variable source and streams `λ_1 … λ_N`, staying
/// at most a fixed window ahead of the referee's `SYNC` frames.
pub fn run_source(addr: impl ToSocketAddrs + Clone) -> Result<u64, HarnessError> {
    let mut link = Link::open(addr, Role::Source)?;
    let cfg = link.handshake()?;
    let seed = config_seed(&cfg)?;
    let mut next = 1u64;
    let mut synced = 0u64;
    loop {
        while next <= cfg.n_trials && next <= synced + SOURCE_WINDOW {
            link.send(&WireMessage::lambda(&hidden_stream(seed, next)?))?;
            next += 1;
        }
        match link.recv()? {
            WireMessage::Sync { n } if n > synced && n < next => synced = n,
            WireMessage::End {} => return Ok(next - 1),
            other => return Err(link.fail(format!("unexpected {} at the source", other.kind()))),
        }
    }
}
