//! Model-file front end: tokenizer, parser, resolved models, and the
//! command implementations behind the `adjflux` binary.

pub mod cmd;
pub mod lex;
pub mod model;
pub mod parse;
