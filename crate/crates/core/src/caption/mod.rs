//! Rule-based event captions: the template vocabulary, detectors over state
//! pairs and paraphrase tables.

mod dataset;
mod detect;
mod paraphrase;
mod vocab;

pub use dataset::{
    generate_caption_dataset, read_caption_dataset, read_caption_records, CaptionDatasetOptions, CaptionDatasetSummary,
    CaptionLine,
};
pub use detect::{detect_events, detect_in, pocket_size_with, CaptionRecord, EventDetector};
pub use paraphrase::{load_paraphrases, sample_caption, ParaphraseSampler, ParaphraseTable};
pub use vocab::{
    is_caption, list_caption_vocabulary, parse_caption, render_caption, rule_of, Bindings, Category, Rule,
};
