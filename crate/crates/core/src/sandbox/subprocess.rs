use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::protocol::plan_text;
use super::{Backend, ExecutionOutcome, Executor, Reply, Request, SandboxError, SandboxPolicy, TaskPayload};

/// Environment variable through which the runner receives its policy as JSON.
pub const POLICY_ENV: &str = "GENEPLAN_SANDBOX_POLICY";

/// Launches one runner process per session and talks to it over stdio.
#[derive(Debug, Clone)]
pub struct SubprocessExecutor {
    program: String,
    args: Vec<String>,
    policy: SandboxPolicy,
}

impl SubprocessExecutor {
    pub fn new(command: &[String], policy: SandboxPolicy) -> Result<Self, SandboxError> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| SandboxError::InvalidPolicy("empty runner command".into()))?;
        policy.check()?;
        Ok(Self {
            program: program.clone(),
            args: args.to_vec(),
            policy,
        })
    }
}

struct RunnerProcess {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
}

impl RunnerProcess {
    fn kill(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    fn exchange(&mut self, request: &Request, timeout: Duration) -> Result<Reply, ExecutionOutcome> {
        let Some(stdin) = self.stdin.as_mut() else {
            return Err(ExecutionOutcome::ProtocolError("runner already stopped".into()));
        };
        if let Err(e) = stdin.write_all(request.to_line().as_bytes()).and_then(|_| stdin.flush()) {
            self.kill();
            return Err(ExecutionOutcome::ProtocolError(format!("runner write failed: {e}")));
        }
        match self.lines.recv_timeout(timeout) {
            Ok(line) => Reply::parse(&line).map_err(|e| {
                self.kill();
                ExecutionOutcome::ProtocolError(e)
            }),
            Err(RecvTimeoutError::Timeout) => {
                self.kill();
                Err(ExecutionOutcome::Timeout)
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.kill();
                Err(ExecutionOutcome::ProtocolError("runner exited".into()))
            }
        }
    }
}

impl Drop for RunnerProcess {
    fn drop(&mut self) {
        self.kill();
    }
}

impl Backend for RunnerProcess {
    fn validate(&mut self, source: &str, timeout: Duration) -> Result<(), ExecutionOutcome> {
        let request = Request::Validate {
            source: source.to_string(),
        };
        match self.exchange(&request, timeout)? {
            Reply::Ok => Ok(()),
            Reply::Reject(reason) => Err(ExecutionOutcome::ValidationRejected(reason)),
            other => {
                self.kill();
                Err(ExecutionOutcome::ProtocolError(format!("unexpected validate reply {other:?}")))
            }
        }
    }

    fn plan(&mut self, task: &TaskPayload, timeout: Duration) -> ExecutionOutcome {
        match self.exchange(&Request::plan(task), timeout) {
            Ok(Reply::Plan(steps)) => ExecutionOutcome::Plan(plan_text(&steps)),
            Ok(Reply::Error { message, .. }) => ExecutionOutcome::RuntimeError(message),
            Ok(other) => {
                self.kill();
                ExecutionOutcome::ProtocolError(format!("unexpected plan reply {other:?}"))
            }
            Err(outcome) => outcome,
        }
    }

    fn pid(&self) -> Option<u32> {
        Some(self.child.id())
    }
}

#[cfg(unix)]
fn limit_memory(cmd: &mut Command, bytes: u64) {
    use std::os::unix::process::CommandExt;
    let limit = libc::rlimit {
        rlim_cur: bytes as libc::rlim_t,
        rlim_max: bytes as libc::rlim_t,
    };
    // SAFETY: setrlimit is async-signal-safe and touches only the child.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setrlimit(libc::RLIMIT_AS, &limit) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            Ok(())
        });
    }
}

#[cfg(not(unix))]
fn limit_memory(_cmd: &mut Command, _bytes: u64) {}

impl Executor for SubprocessExecutor {
    fn policy(&self) -> &SandboxPolicy {
        &self.policy
    }

    fn start(&self) -> Result<Box<dyn Backend>, SandboxError> {
        let mut cmd = Command::new(&self.program);
        cmd.args(&self.args)
            .env(POLICY_ENV, serde_json::to_string(&self.policy).expect("policy serializes"))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null());
        if self.policy.memory_cap_bytes > 0 {
            limit_memory(&mut cmd, self.policy.memory_cap_bytes);
        }
        let mut child = cmd.spawn()?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if line.trim().is_empty() {
                    continue;
                }
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        log::debug!("started runner pid {}", child.id());
        Ok(Box::new(RunnerProcess {
            child,
            stdin,
            lines: rx,
        }))
    }
}
