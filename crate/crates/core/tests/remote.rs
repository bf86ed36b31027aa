use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;

use clinarg::agents::{AgentBackend, BackendConfig, BackendError, CompletionRequest, RemoteBackend, Role};
use serde_json::Value;

/// Serves one canned (status, body) per connection and hands back each
/// request body it saw.
fn mock_server(replies: Vec<(u16, String)>) -> (String, mpsc::Receiver<(String, Value)>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for (status, body) in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line["authorization:".len()..].trim().to_owned();
                }
            }
            let mut buf = vec![0; length];
            reader.read_exact(&mut buf).unwrap();
            tx.send((auth, serde_json::from_slice(&buf).unwrap())).unwrap();
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, rx)
}

fn request() -> CompletionRequest {
    CompletionRequest {
        role: Role::Generator,
        system: "You propose treatments.".into(),
        context: "Case: headache".into(),
        instruction: "Propose one.".into(),
    }
}

fn ok_body(content: &str) -> String {
    serde_json::json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string()
}

#[test]
fn retries_transient_failures_then_succeeds() {
    let (url, seen) = mock_server(vec![
        (503, "busy".into()),
        (503, "busy".into()),
        (200, ok_body("```json\n{\"type\":\"done\"}\n```")),
    ]);
    std::env::set_var("CLINARG_TEST_KEY_RETRY", "sk-test");
    let mut config = BackendConfig::remote(url, "test-model", "CLINARG_TEST_KEY_RETRY");
    config.backoff_ms = 1;
    config.max_retries = 3;
    let backend = RemoteBackend::new(config).unwrap();
    let text = backend.complete(&request()).unwrap();
    assert!(text.contains("done"));

    let bodies: Vec<(String, Value)> = seen.try_iter().collect();
    assert_eq!(bodies.len(), 3);
    for (auth, body) in &bodies {
        assert_eq!(auth, "Bearer sk-test");
        assert_eq!(body["temperature"], 0.0);
        assert_eq!(body["model"], "test-model");
    }
}

#[test]
fn gives_up_after_max_retries() {
    let (url, seen) = mock_server(vec![(500, "down".into()), (502, "down".into())]);
    std::env::set_var("CLINARG_TEST_KEY_GIVEUP", "sk-test");
    let mut config = BackendConfig::remote(url, "m", "CLINARG_TEST_KEY_GIVEUP");
    config.backoff_ms = 1;
    config.max_retries = 1;
    let err = RemoteBackend::new(config).unwrap().complete(&request()).unwrap_err();
    assert!(matches!(err, BackendError::Http { status: 502, .. }), "{err:?}");
    assert_eq!(seen.try_iter().count(), 2);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = mock_server(vec![(401, "no".into())]);
    std::env::set_var("CLINARG_TEST_KEY_401", "sk-test");
    let mut config = BackendConfig::remote(url, "m", "CLINARG_TEST_KEY_401");
    config.backoff_ms = 1;
    let err = RemoteBackend::new(config).unwrap().complete(&request()).unwrap_err();
    assert!(matches!(err, BackendError::Http { status: 401, .. }));
    assert_eq!(seen.try_iter().count(), 1);
}

#[test]
fn missing_credential_fails_before_any_request() {
    let (url, seen) = mock_server(vec![]);
    let config = BackendConfig::remote(url, "m", "CLINARG_TEST_KEY_UNSET");
    let err = RemoteBackend::new(config).unwrap().complete(&request()).unwrap_err();
    assert_eq!(err, BackendError::MissingCredential("CLINARG_TEST_KEY_UNSET".into()));
    assert_eq!(seen.try_iter().count(), 0);
}

#[test]
fn malformed_success_body_is_reported() {
    let (url, _seen) = mock_server(vec![(200, "{\"choices\": []}".into())]);
    std::env::set_var("CLINARG_TEST_KEY_BODY", "sk-test");
    let err = RemoteBackend::new(BackendConfig::remote(url, "m", "CLINARG_TEST_KEY_BODY"))
        .unwrap()
        .complete(&request())
        .unwrap_err();
    assert!(matches!(err, BackendError::Response(_)));
}
