use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::{json, Value};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("no more scripted or recorded responses")]
    Exhausted,
    #[error("io error: {0}")]
    Io(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response shape: {0}")]
    BadResponse(String),
    #[error("missing API key: set {0}")]
    MissingKey(String),
}

/// A text-completion backend.
pub trait GenerationClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, ClientError>;
}

impl<T: GenerationClient + ?Sized> GenerationClient for &T {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        (**self).complete(prompt)
    }
}

impl<T: GenerationClient + ?Sized> GenerationClient for Box<T> {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        (**self).complete(prompt)
    }
}

/// Returns a fixed sequence of responses and records every prompt.
#[derive(Debug, Default)]
pub struct ScriptedClient {
    responses: Mutex<VecDeque<String>>,
    prompts: Mutex<Vec<String>>,
}

impl ScriptedClient {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedClient {
            responses: Mutex::new(responses.into_iter().map(Into::into).collect()),
            prompts: Mutex::default(),
        }
    }

    pub fn prompts(&self) -> Vec<String> {
        self.prompts.lock().expect("prompt log poisoned").clone()
    }

    pub fn calls(&self) -> usize {
        self.prompts.lock().expect("prompt log poisoned").len()
    }
}

impl GenerationClient for ScriptedClient {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        self.prompts.lock().expect("prompt log poisoned").push(prompt.to_string());
        self.responses.lock().expect("response queue poisoned").pop_front().ok_or(ClientError::Exhausted)
    }
}

/// Serves recorded responses from `<root>/<model_tag>/<num_destinations>/`,
/// one file per call in file-name order.
#[derive(Debug)]
pub struct ReplayClient {
    inner: ScriptedClient,
    dir: PathBuf,
}

impl ReplayClient {
    pub fn open(root: &Path, model_tag: &str, num_destinations: usize) -> Result<Self, ClientError> {
        let dir = root.join(model_tag).join(num_destinations.to_string());
        Self::from_dir(&dir)
    }

    pub fn from_dir(dir: &Path) -> Result<Self, ClientError> {
        let io = |e: std::io::Error| ClientError::Io(format!("{}: {e}", dir.display()));
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        let responses = files
            .iter()
            .map(|p| fs::read_to_string(p).map_err(|e| ClientError::Io(format!("{}: {e}", p.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ReplayClient { inner: ScriptedClient::new(responses), dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn prompts(&self) -> Vec<String> {
        self.inner.prompts()
    }
}

impl GenerationClient for ReplayClient {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        self.inner.complete(prompt)
    }
}

/// Chat-completions style HTTP client: POSTs
/// `{"model": ..., "messages": [{"role": "user", "content": prompt}]}` and
/// reads `choices[0].message.content`.
pub struct LiveClient {
    endpoint: String,
    model: String,
    api_key: String,
    agent: ureq::Agent,
}

impl LiveClient {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        LiveClient { endpoint: endpoint.into(), model: model.into(), api_key: api_key.into(), agent }
    }

    /// Environment variable for a provider tag: `openai` -> `OPENAI_API_KEY`.
    pub fn key_env_var(provider_tag: &str) -> String {
        let tag: String =
            provider_tag.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' }).collect();
        format!("{tag}_API_KEY")
    }

    pub fn from_env(provider_tag: &str, endpoint: impl Into<String>, model: impl Into<String>) -> Result<Self, ClientError> {
        let var = Self::key_env_var(provider_tag);
        let key = std::env::var(&var).map_err(|_| ClientError::MissingKey(var))?;
        Ok(Self::new(endpoint, model, key, DEFAULT_TIMEOUT))
    }
}

impl GenerationClient for LiveClient {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| ClientError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(ClientError::Status { status, body: text });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| ClientError::BadResponse(e.to_string()))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ClientError::BadResponse("no choices[0].message.content".into()))
    }
}

#[cfg(test)]
mod tests {
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    use super::*;

    #[test]
    fn scripted_records_prompts() {
        let c = ScriptedClient::new(["a", "b"]);
        assert_eq!(c.complete("p1").unwrap(), "a");
        assert_eq!(c.complete("p2").unwrap(), "b");
        assert_eq!(c.complete("p3"), Err(ClientError::Exhausted));
        assert_eq!(c.prompts(), vec!["p1", "p2", "p3"]);
    }

    #[test]
    fn replay_reads_in_name_order() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("model-x").join("4");
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("002.json"), "second").unwrap();
        fs::write(dir.join("001.json"), "first").unwrap();
        let c = ReplayClient::open(root.path(), "model-x", 4).unwrap();
        assert_eq!(c.complete("").unwrap(), "first");
        assert_eq!(c.complete("").unwrap(), "second");
        assert_eq!(c.complete(""), Err(ClientError::Exhausted));
        assert!(ReplayClient::open(root.path(), "model-x", 5).is_err());
    }

    #[test]
    fn key_variable_naming() {
        assert_eq!(LiveClient::key_env_var("openai"), "OPENAI_API_KEY");
        assert_eq!(LiveClient::key_env_var("gemini-2.0"), "GEMINI_2_0_API_KEY");
    }

    #[test]
    fn live_client_round_trip() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            let mut length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
                if line == "\r\n" {
                    break;
                }
                head.push_str(&line);
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            let reply = r#"{"choices": [{"message": {"role": "assistant", "content": "[]"}}]}"#;
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                reply.len()
            )
            .unwrap();
            (head, String::from_utf8(body).unwrap())
        });
        let client = LiveClient::new(format!("http://{addr}/v1/chat/completions"), "m", "k", DEFAULT_TIMEOUT);
        assert_eq!(client.complete("hello").unwrap(), "[]");
        let (head, body) = server.join().unwrap();
        assert!(head.to_ascii_lowercase().contains("authorization: bearer k"));
        let body: Value = serde_json::from_str(&body).unwrap();
        assert_eq!(body["messages"][0]["content"], "hello");
        assert_eq!(body["model"], "m");
    }
}
