//! Toolkit for the μRTLola stream specification language.
pub mod ast;
pub mod cli;
pub mod evaluator;
pub mod generate;
pub mod oracle;
pub mod parser;
pub mod semantics;
pub mod trace;
pub mod typecheck;
