//! Serves the demo archive over HTTP on a local port and walks through a
//! few public and authenticated requests with a bare HTTP/1.1 client.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::sync::Arc;

use sciarchive::citegraph::DEFAULT_FUZZY_THRESHOLD;
use sciarchive::fixtures::demo_state;
use sciarchive::store::Store;
use sciarchive_gateway::http::{serve_on, BASE};
use sciarchive_gateway::ops::Service;

fn request(addr: SocketAddr, method: &str, path: &str, token: Option<&str>, body: &str) -> (u16, String) {
    let mut s = TcpStream::connect(addr).expect("connect");
    let auth = token.map(|t| format!("Authorization: Bearer {t}\r\n")).unwrap_or_default();
    write!(
        s,
        "{method} {BASE}{path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n{auth}\
         Content-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .expect("send");
    let mut reply = String::new();
    s.read_to_string(&mut reply).expect("read");
    let status = reply[9..12].parse().expect("status line");
    let body = reply.split_once("\r\n\r\n").map(|(_, b)| b.to_string()).unwrap_or_default();
    (status, body)
}

fn show(label: &str, (status, body): (u16, String)) -> String {
    let shown = if body.len() > 300 { format!("{}...", &body[..300]) } else { body.clone() };
    println!("{label}\n  {status} {shown}\n");
    body
}

fn main() {
    let (catalog, refs, editorial) = demo_state();
    let service = Arc::new(Service::new(Store::from_state(catalog, refs, editorial), DEFAULT_FUZZY_THRESHOLD));
    service.set_password(&"editor".into(), "correct horse").expect("demo user");

    let runtime = tokio::runtime::Runtime::new().expect("runtime");
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).expect("bind");
    let addr = listener.local_addr().expect("address");
    runtime.spawn(serve_on(service, listener));
    println!("serving on http://{addr}{BASE}\n");

    show("health", request(addr, "GET", "/health", None, ""));
    show(
        "impact factor",
        request(addr, "GET", "/journals/mat-sb/impact-factor?year=2011&horizon=2&mode=integral", None, ""),
    );
    show(
        "parse a reference (the body is AMSBIB text)",
        request(addr, "POST", "/references/parse?format=plain", None, r"\by A.~M.~Lyapunov \paper The general problem of the stability of motion \yr 1892"),
    );
    show("editorial report without a token", request(addr, "GET", "/journals/mat-sb/editorial-report?from=2024-03-01&to=2024-03-31", None, ""));

    let session = show(
        "login",
        request(addr, "POST", "/auth/login", None, r#"{"user_id":"editor","password":"correct horse"}"#),
    );
    let session: serde_json::Value = serde_json::from_str(&session).expect("json session");
    let token = session["token"].as_str().expect("token");
    show(
        "editorial report as editor",
        request(addr, "GET", "/journals/mat-sb/editorial-report?from=2024-03-01&to=2024-03-31", Some(token), ""),
    );
    show("forthcoming", request(addr, "GET", "/journals/mat-sb/forthcoming", None, ""));
}
