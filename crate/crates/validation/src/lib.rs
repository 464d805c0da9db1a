//! Home of the `acceptance` test target, which checks the workspace against
//! its numerical acceptance criteria and prints one PASS/FAIL line each.
//!
//! Run it with `cargo test -p trapfid-validation --test acceptance`.
