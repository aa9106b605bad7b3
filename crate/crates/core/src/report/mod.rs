//! The JSON report bundle written by `analyze`/`sweep` and its HTML rendering.

mod bundle;
mod html;

pub use bundle::{ModelReport, ReportBundle, TransitionReport, SCHEMA};
pub use html::{render_html, write_html};
