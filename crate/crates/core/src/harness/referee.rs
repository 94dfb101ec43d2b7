use std::collections::{HashMap, VecDeque};
use std::io::{BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::grid::Outcome;
use crate::prng::word_to_hex;

use super::station::{run_source, run_station};
use super::wire::StationConfig;
use super::{generate_settings, HarnessError, Role, RunConfig, RunLog, TrialRecord, WireMessage, PROTOCOL_VERSION};

pub const DEFAULT_TRIAL_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Sent,
    Received,
}

/// One frame as seen by the referee, in the order it was sent or handled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapturedFrame {
    pub direction: Direction,
    pub peer: Role,
    pub message: WireMessage,
}

#[derive(Debug, Clone)]
pub struct SocketRun {
    pub log: RunLog,
    pub capture: Vec<CapturedFrame>,
}

enum Event {
    Frame(Role, Result<WireMessage, HarnessError>),
    Closed(Role),
}

/// The central process: it draws settings, relays `λ_n`, collects outcomes
/// and enforces the per-trial barrier.
#[derive(Debug)]
pub struct Referee {
    listener: TcpListener,
    trial_timeout: Duration,
}

impl Referee {
    pub fn bind(addr: impl ToSocketAddrs) -> Result<Self, HarnessError> {
        Ok(Referee { listener: TcpListener::bind(addr)?, trial_timeout: DEFAULT_TRIAL_TIMEOUT })
    }

    pub fn with_trial_timeout(mut self, timeout: Duration) -> Self {
        self.trial_timeout = timeout;
        self
    }

    pub fn local_addr(&self) -> Result<SocketAddr, HarnessError> {
        Ok(self.listener.local_addr()?)
    }

    /// Waits for the stations (and the source unless it is virtual), then
    /// runs every trial. On any violation all peers get an `ERROR` frame.
    pub fn run(&self, config: &RunConfig) -> Result<SocketRun, HarnessError> {
        config.validate()?;
        if config.oracle.is_some() {
            return Err(HarnessError::InvalidConfig("oracles cannot run over sockets".into()));
        }
        let mut roles = vec![Role::Alice, Role::Bob];
        if !config.virtual_source {
            roles.push(Role::Source);
        }
        let (tx, rx) = mpsc::channel();
        let mut session = Session { peers: HashMap::new(), rx, capture: Vec::new(), source_queue: VecDeque::new() };
        let result =
            self.accept_peers(&roles, tx, &mut session).and_then(|()| session.run_trials(config, self.trial_timeout));
        match result {
            Ok(log) => {
                session.broadcast(&WireMessage::End {})?;
                session.close();
                Ok(SocketRun { log, capture: session.capture })
            }
            Err(err) => {
                let code = match err {
                    HarnessError::Timeout { .. } => "timeout",
                    HarnessError::Remote { .. } => "remote",
                    _ => "protocol",
                };
                let _ = session.broadcast(&WireMessage::error(code, err.to_string()));
                session.close();
                Err(err)
            }
        }
    }

    fn accept_peers(&self, roles: &[Role], tx: Sender<Event>, session: &mut Session) -> Result<(), HarnessError> {
        let deadline = Instant::now() + self.trial_timeout;
        self.listener.set_nonblocking(true)?;
        while session.peers.len() < roles.len() {
            let stream = match self.listener.accept() {
                Ok((stream, _)) => stream,
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    if Instant::now() >= deadline {
                        return Err(HarnessError::Timeout { n: 0 });
                    }
                    thread::sleep(Duration::from_millis(2));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            stream.set_nonblocking(false)?;
            stream.set_nodelay(true)?;
            let remaining = deadline.saturating_duration_since(Instant::now()).max(Duration::from_millis(1));
            stream.set_read_timeout(Some(remaining))?;
            let mut reader = BufReader::new(stream.try_clone()?);
            let mut writer = stream;
            let role = match WireMessage::read_from(&mut reader) {
                Ok(Some(WireMessage::Hello { role, version })) if version == PROTOCOL_VERSION => role,
                Ok(Some(WireMessage::Hello { version, .. })) => {
                    let _ = WireMessage::error("version", format!("expected {PROTOCOL_VERSION}, got {version}"))
                        .write_to(&mut writer);
                    continue;
                }
                _ => {
                    let _ = WireMessage::error("protocol", "expected HELLO").write_to(&mut writer);
                    continue;
                }
            };
            if !roles.contains(&role) || session.peers.contains_key(&role) {
                let _ = WireMessage::error("role", format!("role `{role}` is not available")).write_to(&mut writer);
                continue;
            }
            writer.set_read_timeout(None)?;
            session.capture.push(CapturedFrame {
                direction: Direction::Received,
                peer: role,
                message: WireMessage::Hello { role, version: PROTOCOL_VERSION.to_string() },
            });
            let tx = tx.clone();
            thread::spawn(move || loop {
                match WireMessage::read_from(&mut reader) {
                    Ok(Some(msg)) => {
                        if tx.send(Event::Frame(role, Ok(msg))).is_err() {
                            return;
                        }
                    }
                    Ok(None) => {
                        let _ = tx.send(Event::Closed(role));
                        return;
                    }
                    Err(err) => {
                        let fatal = matches!(err, HarnessError::Io(_));
                        let _ = tx.send(Event::Frame(role, Err(err)));
                        if fatal {
                            return;
                        }
                    }
                }
            });
            session.peers.insert(role, writer);
        }
        Ok(())
    }
}

struct Session {
    peers: HashMap<Role, TcpStream>,
    rx: Receiver<Event>,
    capture: Vec<CapturedFrame>,
    source_queue: VecDeque<WireMessage>,
}

impl Session {
    fn send(&mut self, role: Role, msg: WireMessage) -> Result<(), HarnessError> {
        let stream = self.peers.get_mut(&role).ok_or_else(|| HarnessError::Protocol(format!("no {role} connected")))?;
        stream.write_all(msg.to_line().as_bytes())?;
        self.capture.push(CapturedFrame { direction: Direction::Sent, peer: role, message: msg });
        Ok(())
    }

    fn broadcast(&mut self, msg: &WireMessage) -> Result<(), HarnessError> {
        let mut roles: Vec<Role> = self.peers.keys().copied().collect();
        roles.sort_by_key(|r| *r as u8);
        let mut first_err = None;
        for role in roles {
            if let Err(e) = self.send(role, msg.clone()) {
                first_err.get_or_insert(e);
            }
        }
        first_err.map_or(Ok(()), Err)
    }

    fn close(&mut self) {
        for stream in self.peers.values() {
            let _ = stream.shutdown(Shutdown::Write);
        }
    }

    /// Next frame from anyone, or a timeout for trial `n`.
    fn next_frame(&mut self, n: u64, deadline: Instant) -> Result<(Role, WireMessage), HarnessError> {
        let wait = deadline.saturating_duration_since(Instant::now());
        match self.rx.recv_timeout(wait) {
            Ok(Event::Frame(role, Ok(msg))) => {
                self.capture.push(CapturedFrame { direction: Direction::Received, peer: role, message: msg.clone() });
                if let WireMessage::Error { code, text } = msg {
                    return Err(HarnessError::Remote { code, text });
                }
                Ok((role, msg))
            }
            Ok(Event::Frame(role, Err(err))) => Err(HarnessError::Protocol(format!("{role}: {err}"))),
            Ok(Event::Closed(role)) => {
                Err(HarnessError::Protocol(format!("{role} closed the connection during trial {n}")))
            }
            Err(RecvTimeoutError::Timeout) => Err(HarnessError::Timeout { n }),
            Err(RecvTimeoutError::Disconnected) => Err(HarnessError::Protocol("all peers disconnected".into())),
        }
    }

    fn run_trials(&mut self, config: &RunConfig, timeout: Duration) -> Result<RunLog, HarnessError> {
        let seed_hex = word_to_hex(config.seed_lambda);
        for (role, strategy) in [(Role::Alice, &config.alice), (Role::Bob, &config.bob)] {
            self.send(role, WireMessage::hello(Role::Referee))?;
            self.send(
                role,
                WireMessage::Config(StationConfig {
                    n_trials: config.n_trials,
                    grid: config.grid,
                    strategy: Some(strategy.clone()),
                    memory_mode: config.memory_mode,
                    virtual_source: config.virtual_source,
                    seed_lambda: config.virtual_source.then(|| seed_hex.clone()),
                }),
            )?;
        }
        if !config.virtual_source {
            self.send(Role::Source, WireMessage::hello(Role::Referee))?;
            self.send(
                Role::Source,
                WireMessage::Config(StationConfig {
                    n_trials: config.n_trials,
                    grid: config.grid,
                    strategy: None,
                    memory_mode: false,
                    virtual_source: false,
                    seed_lambda: Some(seed_hex),
                }),
            )?;
        }

        let mut trials = Vec::with_capacity(config.n_trials as usize);
        for n in 1..=config.n_trials {
            let deadline = Instant::now() + timeout;
            let (a, b) = generate_settings(config, n)?;
            if !config.virtual_source {
                let frame = self.next_source_frame(n, deadline)?;
                match frame {
                    WireMessage::Lambda { n: got, ref words } if got == n => {
                        WireMessage::parse_lambda(n, words)?;
                        self.send(Role::Alice, frame.clone())?;
                        self.send(Role::Bob, frame)?;
                    }
                    other => {
                        return Err(HarnessError::Protocol(format!(
                            "source sent {} where LAMBDA {n} was due",
                            describe(&other)
                        )))
                    }
                }
            }
            self.send(Role::Alice, WireMessage::Trial { n, setting: a.get() as u32 })?;
            self.send(Role::Bob, WireMessage::Trial { n, setting: b.get() as u32 })?;
            let (x, y) = self.collect_outcomes(n, deadline)?;
            trials.push(TrialRecord { n, a, b, x, y });
            self.broadcast(&WireMessage::Sync { n })?;
        }
        Ok(RunLog::new(config.clone(), trials, false))
    }

    fn next_source_frame(&mut self, n: u64, deadline: Instant) -> Result<WireMessage, HarnessError> {
        if let Some(msg) = self.source_queue.pop_front() {
            return Ok(msg);
        }
        let (role, msg) = self.next_frame(n, deadline)?;
        if role == Role::Source {
            return Ok(msg);
        }
        Err(HarnessError::Protocol(format!("{role} sent {} while no trial was open", describe(&msg))))
    }

    fn collect_outcomes(&mut self, n: u64, deadline: Instant) -> Result<(Outcome, Outcome), HarnessError> {
        let mut x = None;
        let mut y = None;
        while x.is_none() || y.is_none() {
            let (role, msg) = self.next_frame(n, deadline)?;
            let slot = match role {
                Role::Alice => &mut x,
                Role::Bob => &mut y,
                Role::Source => {
                    self.source_queue.push_back(msg);
                    continue;
                }
                Role::Referee => unreachable!("the referee does not connect to itself"),
            };
            match msg {
                WireMessage::Outcome { n: got, value } if got == n => {
                    if slot.is_some() {
                        return Err(HarnessError::Protocol(format!("{role} sent a second OUTCOME for trial {n}")));
                    }
                    let outcome = Outcome::try_from(value)
                        .map_err(|_| HarnessError::Protocol(format!("{role} sent outcome {value} for trial {n}")))?;
                    *slot = Some(outcome);
                }
                other => {
                    return Err(HarnessError::Protocol(format!("{role} sent {} during trial {n}", describe(&other))));
                }
            }
        }
        Ok((x.unwrap(), y.unwrap()))
    }
}

fn describe(msg: &WireMessage) -> String {
    match msg {
        WireMessage::Lambda { n, .. }
        | WireMessage::Trial { n, .. }
        | WireMessage::Outcome { n, .. }
        | WireMessage::Sync { n } => {
            format!("{} {n}", msg.kind())
        }
        other => other.kind().to_string(),
    }
}

/// Binds `addr` and runs one experiment with externally started peers.
pub fn run_sockets(config: &RunConfig, addr: impl ToSocketAddrs) -> Result<SocketRun, HarnessError> {
    Referee::bind(addr)?.run(config)
}

/// Runs the referee, both stations and the source as threads talking over
/// loopback TCP.
pub fn run_loopback(config: &RunConfig) -> Result<SocketRun, HarnessError> {
    config.validate()?;
    if config.oracle.is_some() {
        return Err(HarnessError::InvalidConfig("oracles cannot run over sockets".into()));
    }
    let referee = Referee::bind("127.0.0.1:0")?;
    let addr = referee.local_addr()?;
    let mut peers = vec![
        thread::spawn(move || run_station(addr, Role::Alice, None).map(|_| ())),
        thread::spawn(move || run_station(addr, Role::Bob, None).map(|_| ())),
    ];
    if !config.virtual_source {
        peers.push(thread::spawn(move || run_source(addr).map(|_| ())));
    }
    let result = referee.run(config);
    // Closing the listener releases peers that never got past HELLO.
    drop(referee);
    let peer_results: Vec<_> = peers
        .into_iter()
        .map(|h| h.join().unwrap_or_else(|_| Err(HarnessError::Protocol("peer thread panicked".into()))))
        .collect();
    let run = result?;
    peer_results.into_iter().collect::<Result<Vec<()>, _>>()?;
    Ok(run)
}
