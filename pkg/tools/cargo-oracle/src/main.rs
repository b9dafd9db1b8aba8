use semver::{Version, VersionReq};
use std::io::{self, BufRead};

// Reads lines "SPEC\tVERSION"; prints true/false/invalid per line.
fn main() {
    let stdin = io::stdin();
    for line in stdin.lock().lines() {
        let line = line.unwrap();
        if line.is_empty() { continue; }
        let mut parts = line.splitn(2, '\t');
        let spec = parts.next().unwrap();
        let ver = parts.next().unwrap();
        match (VersionReq::parse(spec), Version::parse(ver)) {
            (Ok(req), Ok(v)) => println!("{}", req.matches(&v)),
            _ => println!("invalid"),
        }
    }
}
