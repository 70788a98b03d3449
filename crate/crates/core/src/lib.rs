//! Staged animated transitions between declarative statistical charts.
//!
//! The pipeline runs in four steps:
//!
//! 1. [`edit::diff`] itemizes the difference between two charts into edit
//!    operations.
//! 2. [`keyframe::recommend_keyframes`] recombines those operations into
//!    ranked sequences of intermediate charts.
//! 3. [`anim::recommend_animations`] stages the transition between each
//!    adjacent pair under a total stage budget.
//! 4. [`timeline::compile`] turns a sequence and a plan into tween tracks that
//!    [`timeline::sample`] evaluates at any time.
//!
//! ```
//! use keystage::spec::parse_chart_spec;
//!
//! let chart = parse_chart_spec(r#"{
//!     "mark": "point",
//!     "data": {"values": [{"a": 1, "b": 2}, {"a": 3, "b": 5}]},
//!     "encoding": {
//!         "x": {"field": "a", "type": "quantitative"},
//!         "y": {"field": "b", "type": "quantitative"}
//!     }
//! }"#).unwrap();
//! assert_eq!(chart.encodings.len(), 2);
//! ```

pub mod anim;
pub mod cli;
pub mod data;
pub mod edit;
pub mod keyframe;
pub mod partitions;
pub mod spec;
pub mod timeline;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/charts.md")]
    mod charts {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/edits.md")]
    mod edits {}
    #[doc = include_str!("../../../book/src/keyframes.md")]
    mod keyframes {}
    #[doc = include_str!("../../../book/src/animation.md")]
    mod animation {}
    #[doc = include_str!("../../../book/src/timelines.md")]
    mod timelines {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
