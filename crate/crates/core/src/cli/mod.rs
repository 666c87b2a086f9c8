//! Surface syntax, the checking file format and command dispatch.

pub mod lexer;
pub mod parser;
pub mod printer;
pub mod run;
