//! Fused sequence labeler: text, audio, and video encoders feeding a fusion
//! recurrence, pairwise self-attention, and either a CRF or a per-token
//! softmax over the tagset, with an optional sentence-sentiment head.
//!
//! All parameters live in a flat [`ParamStore`]; a forward pass first binds
//! them into a fresh [`Graph`] as leaves, then builds per-sentence ops on
//! top. Several sentences may share one graph (and one binding), which makes
//! their parameter gradients accumulate, so a mini-batch is just a loop plus
//! a mean over the per-sentence losses.

mod attention;
mod crf;
mod gru;

pub use crf::{crf_log_partition, crf_score, viterbi, CrfNll};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autodiff::{Array, AutodiffError, Graph, ParamStore, TensorId};
use crate::features::{FeatureSequence, SpectrogramConfig, DEFAULT_VIDEO_DIM};
use crate::ingest::EmbeddingTable;
use crate::labels::{LabelError, Scheme, SentimentClass, TagVocab, CANONICAL_SENTIMENTS};

use attention::AttentionParams;
use gru::GruParams;

/// Widths of the two hidden sentence-head layers.
const SENTENCE_HEAD_WIDTHS: [usize; 2] = [128, 64];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("empty sentence: the encoder needs at least one token")]
    EmptySentence,
    #[error("invalid model config: {detail}")]
    BadConfig { detail: String },
    #[error("label index {index} out of range for a tagset of {size}")]
    LabelIndex { index: usize, size: usize },
    #[error("expected {expected} labels, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{modality} frames are {got}-dimensional, the encoder expects {expected}")]
    FeatureDim { modality: &'static str, expected: usize, got: usize },
    #[error("the config does not enable the {modality} encoder")]
    ModalityDisabled { modality: &'static str },
    #[error("the {setting} setting has no sentence sentiment head")]
    NoSentenceHead { setting: Setting },
    #[error("a sentence sentiment label is required for the joint loss")]
    MissingSentenceLabel,
    #[error("checkpoint mismatch: {detail}")]
    Checkpoint { detail: String },
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// Task framing. `Simple` and `Jsl` label aspect membership only (`Jsl`
/// additionally classifies the whole sentence); `Cal` and `Csl` label
/// membership and polarity in one collapsed tag per token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Simple,
    Cal,
    Csl,
    Jsl,
}

impl Setting {
    pub fn scheme(self) -> Scheme {
        match self {
            Setting::Simple | Setting::Jsl => Scheme::Ae,
            Setting::Cal | Setting::Csl => Scheme::Collapsed,
        }
    }

    /// Whether the model carries the sentence-sentiment head.
    pub fn has_sentence_head(self) -> bool {
        self == Setting::Jsl
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::Simple => "simple",
            Setting::Cal => "cal",
            Setting::Csl => "csl",
            Setting::Jsl => "jsl",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Setting {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simple" => Ok(Setting::Simple),
            "cal" => Ok(Setting::Cal),
            "csl" => Ok(Setting::Csl),
            "jsl" => Ok(Setting::Jsl),
            other => Err(ModelError::BadConfig { detail: format!("unknown setting `{other}`") }),
        }
    }
}

/// Everything that fixes the network shape and the ablation switches.
///
/// The four booleans span the ablation grid: audio and video add their
/// encoders to the fusion input, `use_crf` swaps the per-token softmax for
/// the CRF, and `use_pretrained_embeddings` only tells the training driver
/// where the embedding table comes from (the architecture is unchanged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub setting: Setting,
    pub use_audio: bool,
    pub use_video: bool,
    pub use_crf: bool,
    pub use_pretrained_embeddings: bool,
    pub sentiments: Vec<SentimentClass>,
    pub embedding_dim: usize,
    pub text_hidden: usize,
    pub audio_hidden: usize,
    pub video_hidden: usize,
    pub fusion_hidden: usize,
    pub attention_dim: usize,
    pub audio_input_dim: usize,
    pub video_input_dim: usize,
    pub dropout: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            setting: Setting::Simple,
            use_audio: false,
            use_video: false,
            use_crf: false,
            use_pretrained_embeddings: false,
            sentiments: CANONICAL_SENTIMENTS.to_vec(),
            embedding_dim: 300,
            text_hidden: 150,
            audio_hidden: 128,
            video_hidden: 128,
            fusion_hidden: 150,
            attention_dim: 150,
            audio_input_dim: SpectrogramConfig::default().dim(),
            video_input_dim: DEFAULT_VIDEO_DIM,
            dropout: 0.5,
        }
    }
}

impl ModelConfig {
    /// Width of one fused input column: the token state plus the pooled
    /// state of every enabled media encoder.
    pub fn fusion_input_dim(&self) -> usize {
        let mut dim = 2 * self.text_hidden;
        if self.use_audio {
            dim += 2 * self.audio_hidden;
        }
        if self.use_video {
            dim += 2 * self.video_hidden;
        }
        dim
    }

    /// Width of one fused state, as produced by the fusion recurrence.
    pub fn fused_state_dim(&self) -> usize {
        2 * self.fusion_hidden
    }

    pub fn tag_vocab(&self) -> Result<TagVocab, ModelError> {
        Ok(TagVocab::new(self.setting.scheme(), &self.sentiments)?)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |detail: String| Err(ModelError::BadConfig { detail });
        let mut dims = vec![
            ("embedding_dim", self.embedding_dim),
            ("text_hidden", self.text_hidden),
            ("fusion_hidden", self.fusion_hidden),
            ("attention_dim", self.attention_dim),
        ];
        if self.use_audio {
            dims.push(("audio_hidden", self.audio_hidden));
            dims.push(("audio_input_dim", self.audio_input_dim));
        }
        if self.use_video {
            dims.push(("video_hidden", self.video_hidden));
            dims.push(("video_input_dim", self.video_input_dim));
        }
        for (name, dim) in dims {
            if dim == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if self.setting.has_sentence_head() && self.sentiments.is_empty() {
            return bad("the sentence head needs a non-empty sentiment set".to_string());
        }
        self.tag_vocab()?;
        Ok(())
    }
}

/// One sentence's model inputs: vocabulary indices plus optional media
/// frames, one column per frame.
#[derive(Debug, Clone)]
pub struct SentenceInput {
    pub token_ids: Vec<usize>,
    pub audio: Option<Array>,
    pub video: Option<Array>,
}

impl SentenceInput {
    pub fn text(token_ids: Vec<usize>) -> Self {
        SentenceInput { token_ids, audio: None, video: None }
    }

    pub fn with_audio(mut self, frames: Array) -> Self {
        self.audio = Some(frames);
        self
    }

    pub fn with_video(mut self, frames: Array) -> Self {
        self.video = Some(frames);
        self
    }
}

/// Lays a feature sequence out as one column per frame, or `None` when the
/// segment is empty (the encoder then falls back to its learned blank frame).
pub fn feature_columns(seq: &FeatureSequence) -> Option<Array> {
    if seq.is_empty() {
        return None;
    }
    let mut out = Array::zeros(seq.dim, seq.n_frames());
    for k in 0..seq.n_frames() {
        for (d, &v) in seq.frame(k).iter().enumerate() {
            out.set(d, k, v);
        }
    }
    Some(out)
}

/// Graph handles produced by a forward pass over one sentence.
pub struct SentenceStates {
    /// `[n, tagset_len]` scores, one row per token.
    pub emissions: TensorId,
    /// Mean of the fused states, `[fused_state_dim, 1]`.
    pub pooled: TensorId,
    /// Per-token fused states.
    pub fused: Vec<TensorId>,
}

/// Parameter leaves for one graph, indexed like the store.
pub struct BoundParams {
    ids: Vec<TensorId>,
}

impl BoundParams {
    pub fn id(&self, index: usize) -> TensorId {
        self.ids[index]
    }
}

#[derive(Debug, Clone, Copy)]
struct SentenceHeadParams {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    w3: usize,
    b3: usize,
}

impl SentenceHeadParams {
    fn register(
        store: &mut ParamStore,
        input_dim: usize,
        classes: usize,
        rng: &mut impl Rng,
    ) -> Result<(), AutodiffError> {
        let [h1, h2] = SENTENCE_HEAD_WIDTHS;
        for (w, b, rows, cols) in [
            ("jsl.w1", "jsl.b1", h1, input_dim),
            ("jsl.w2", "jsl.b2", h2, h1),
            ("jsl.w3", "jsl.b3", classes, h2),
        ] {
            store.insert_uniform(w, rows, cols, glorot(rows, cols), rng)?;
            store.insert_zeros(b, rows, 1)?;
        }
        Ok(())
    }

    fn resolve(store: &ParamStore) -> Result<SentenceHeadParams, AutodiffError> {
        let find = |name: &str| {
            store.index_of(name).ok_or_else(|| AutodiffError::UnknownParam(name.to_string()))
        };
        Ok(SentenceHeadParams {
            w1: find("jsl.w1")?,
            b1: find("jsl.b1")?,
            w2: find("jsl.w2")?,
            b2: find("jsl.b2")?,
            w3: find("jsl.w3")?,
            b3: find("jsl.b3")?,
        })
    }
}

// Uniform init range that keeps pre-activation variance roughly constant.
pub(crate) fn glorot(rows: usize, cols: usize) -> f64 {
    (6.0 / (rows + cols) as f64).sqrt()
}

const BLANK_FRAME_RANGE: f64 = 0.05;

/// The full parameter set plus the wiring to run it.
#[derive(Debug)]
pub struct EncoderStack {
    config: ModelConfig,
    vocab: TagVocab,
    store: ParamStore,
    embed: usize,
    text_fwd: GruParams,
    text_bwd: GruParams,
    audio_fwd: Option<GruParams>,
    audio_bwd: Option<GruParams>,
    audio_blank: Option<usize>,
    video_fwd: Option<GruParams>,
    video_bwd: Option<GruParams>,
    video_blank: Option<usize>,
    fusion_fwd: GruParams,
    fusion_bwd: GruParams,
    attn: AttentionParams,
    crf_pi: Option<usize>,
    sentence_head: Option<SentenceHeadParams>,
}

impl EncoderStack {
    /// Fresh stack with a randomly initialized embedding table of
    /// `vocab_len` rows.
    pub fn new(
        config: ModelConfig,
        vocab_len: usize,
        rng: &mut impl Rng,
    ) -> Result<EncoderStack, ModelError> {
        config.validate()?;
        let embed = EmbeddingTable::random(vocab_len, config.embedding_dim, rng);
        EncoderStack::with_embeddings(config, &embed, rng)
    }

    /// Fresh stack around an existing embedding table (copied in).
    pub fn with_embeddings(
        config: ModelConfig,
        table: &EmbeddingTable,
        rng: &mut impl Rng,
    ) -> Result<EncoderStack, ModelError> {
        config.validate()?;
        if table.dimension != config.embedding_dim {
            return Err(ModelError::BadConfig {
                detail: format!(
                    "embedding table is {}-dimensional, the config expects {}",
                    table.dimension, config.embedding_dim
                ),
            });
        }
        if table.vocab_len() == 0 {
            return Err(ModelError::BadConfig { detail: "empty embedding table".to_string() });
        }
        let tagset = config.tag_vocab()?.len();
        let mut store = ParamStore::new();
        store.insert(
            "embed.table",
            Array::from_vec(table.vocab_len(), table.dimension, table.matrix.clone()),
        )?;
        GruParams::register(&mut store, "text.fwd", config.embedding_dim, config.text_hidden, rng)?;
        GruParams::register(&mut store, "text.bwd", config.embedding_dim, config.text_hidden, rng)?;
        if config.use_audio {
            GruParams::register(
                &mut store,
                "audio.fwd",
                config.audio_input_dim,
                config.audio_hidden,
                rng,
            )?;
            GruParams::register(
                &mut store,
                "audio.bwd",
                config.audio_input_dim,
                config.audio_hidden,
                rng,
            )?;
            store.insert_uniform("audio.blank", config.audio_input_dim, 1, BLANK_FRAME_RANGE, rng)?;
        }
        if config.use_video {
            GruParams::register(
                &mut store,
                "video.fwd",
                config.video_input_dim,
                config.video_hidden,
                rng,
            )?;
            GruParams::register(
                &mut store,
                "video.bwd",
                config.video_input_dim,
                config.video_hidden,
                rng,
            )?;
            store.insert_uniform("video.blank", config.video_input_dim, 1, BLANK_FRAME_RANGE, rng)?;
        }
        GruParams::register(
            &mut store,
            "fusion.fwd",
            config.fusion_input_dim(),
            config.fusion_hidden,
            rng,
        )?;
        GruParams::register(
            &mut store,
            "fusion.bwd",
            config.fusion_input_dim(),
            config.fusion_hidden,
            rng,
        )?;
        AttentionParams::register(
            &mut store,
            config.attention_dim,
            config.fused_state_dim(),
            tagset,
            rng,
        )?;
        if config.use_crf {
            store.insert_zeros("crf.pi", tagset + 2, tagset + 2)?;
        }
        if config.setting.has_sentence_head() {
            SentenceHeadParams::register(
                &mut store,
                config.fused_state_dim(),
                config.sentiments.len(),
                rng,
            )?;
        }
        EncoderStack::from_parts(config, store)
    }

    /// Wires a config to an already populated store, checking that the
    /// store's shapes are the ones the config implies.
    pub fn from_parts(config: ModelConfig, store: ParamStore) -> Result<EncoderStack, ModelError> {
        config.validate()?;
        let vocab = config.tag_vocab()?;
        let mismatch = |name: &str, got: &Array, expected: String| ModelError::Checkpoint {
            detail: format!("{name} is {}, the config implies {expected}", got.shape_string()),
        };

        let embed = store
            .index_of("embed.table")
            .ok_or(AutodiffError::UnknownParam("embed.table".to_string()))?;
        let table = store.value_at(embed);
        if table.cols() != config.embedding_dim || table.rows() == 0 {
            return Err(mismatch(
                "embed.table",
                table,
                format!("[>=1,{}]", config.embedding_dim),
            ));
        }

        let text_fwd = GruParams::resolve(&store, "text.fwd")?;
        let text_bwd = GruParams::resolve(&store, "text.bwd")?;
        let (mut audio_fwd, mut audio_bwd, mut audio_blank) = (None, None, None);
        if config.use_audio {
            audio_fwd = Some(GruParams::resolve(&store, "audio.fwd")?);
            audio_bwd = Some(GruParams::resolve(&store, "audio.bwd")?);
            audio_blank = Some(
                store
                    .index_of("audio.blank")
                    .ok_or(AutodiffError::UnknownParam("audio.blank".to_string()))?,
            );
        }
        let (mut video_fwd, mut video_bwd, mut video_blank) = (None, None, None);
        if config.use_video {
            video_fwd = Some(GruParams::resolve(&store, "video.fwd")?);
            video_bwd = Some(GruParams::resolve(&store, "video.bwd")?);
            video_blank = Some(
                store
                    .index_of("video.blank")
                    .ok_or(AutodiffError::UnknownParam("video.blank".to_string()))?,
            );
        }
        let fusion_fwd = GruParams::resolve(&store, "fusion.fwd")?;
        let fusion_bwd = GruParams::resolve(&store, "fusion.bwd")?;
        let fusion_in = store.get("fusion.fwd.wz")?;
        if fusion_in.cols() != config.fusion_input_dim() {
            return Err(mismatch(
                "fusion.fwd.wz",
                fusion_in,
                format!("[{},{}]", config.fusion_hidden, config.fusion_input_dim()),
            ));
        }
        let attn = AttentionParams::resolve(&store)?;
        let attn_w = store.get("attn.w")?;
        if attn_w.shape() != (config.attention_dim, 2 * config.fused_state_dim()) {
            return Err(mismatch(
                "attn.w",
                attn_w,
                format!("[{},{}]", config.attention_dim, 2 * config.fused_state_dim()),
            ));
        }
        let out_w = store.get("out.w")?;
        if out_w.rows() != vocab.len() {
            return Err(mismatch(
                "out.w",
                out_w,
                format!("[{},{}]", vocab.len(), 2 * config.fused_state_dim()),
            ));
        }
        let crf_pi = if config.use_crf {
            let idx = store
                .index_of("crf.pi")
                .ok_or(AutodiffError::UnknownParam("crf.pi".to_string()))?;
            let pi = store.value_at(idx);
            if pi.shape() != (vocab.len() + 2, vocab.len() + 2) {
                return Err(mismatch(
                    "crf.pi",
                    pi,
                    format!("[{0},{0}]", vocab.len() + 2),
                ));
            }
            Some(idx)
        } else {
            None
        };
        let sentence_head = if config.setting.has_sentence_head() {
            Some(SentenceHeadParams::resolve(&store)?)
        } else {
            None
        };
        Ok(EncoderStack {
            config,
            vocab,
            store,
            embed,
            text_fwd,
            text_bwd,
            audio_fwd,
            audio_bwd,
            audio_blank,
            video_fwd,
            video_bwd,
            video_blank,
            fusion_fwd,
            fusion_bwd,
            attn,
            crf_pi,
            sentence_head,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn tag_vocab(&self) -> &TagVocab {
        &self.vocab
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut ParamStore {
        &mut self.store
    }

    pub fn vocab_len(&self) -> usize {
        self.store.value_at(self.embed).rows()
    }

    /// Creates one leaf per parameter in `g`, in store order.
    pub fn bind(&self, g: &mut Graph) -> Result<BoundParams, ModelError> {
        let mut ids = Vec::with_capacity(self.store.len());
        for i in 0..self.store.len() {
            ids.push(g.leaf(self.store.value_at(i).clone())?);
        }
        Ok(BoundParams { ids })
    }

    /// Per-parameter gradients after a backward pass, in store order.
    /// Parameters the loss never touched come back as `None`.
    pub fn gradients(&self, g: &Graph, bound: &BoundParams) -> Vec<Option<Array>> {
        bound.ids.iter().map(|&id| g.grad(id).cloned()).collect()
    }

    /// Embeds and encodes the token sequence; one `[2*text_hidden, 1]` state
    /// per token. Dropout hits the embedded inputs, and only when `train`.
    pub fn encode_text(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        token_ids: &[usize],
        train: bool,
        rng: &mut impl Rng,
    ) -> Result<Vec<TensorId>, ModelError> {
        if token_ids.is_empty() {
            return Err(ModelError::EmptySentence);
        }
        let embedded = g.embedding_lookup(bound.ids[self.embed], token_ids)?;
        let embedded = g.dropout(embedded, self.config.dropout, train, rng)?;
        let xs: Vec<TensorId> = (0..token_ids.len())
            .map(|i| g.slice(embedded, 1, i, i + 1))
            .collect::<Result<_, _>>()?;
        Ok(gru::run_bigru(g, &bound.ids, &self.text_fwd, &self.text_bwd, &xs)?)
    }

    /// Mean-pooled audio encoding, `[2*audio_hidden, 1]`. A missing or empty
    /// segment is stood in for by the learned blank frame.
    pub fn encode_audio(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        frames: Option<&Array>,
    ) -> Result<TensorId, ModelError> {
        match (&self.audio_fwd, &self.audio_bwd, self.audio_blank) {
            (Some(fwd), Some(bwd), Some(blank)) => self.encode_media(
                g,
                bound,
                frames,
                fwd,
                bwd,
                blank,
                self.config.audio_input_dim,
                "audio",
            ),
            _ => Err(ModelError::ModalityDisabled { modality: "audio" }),
        }
    }

    /// Mean-pooled video encoding, `[2*video_hidden, 1]`; blank-frame
    /// fallback as for audio.
    pub fn encode_video(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        frames: Option<&Array>,
    ) -> Result<TensorId, ModelError> {
        match (&self.video_fwd, &self.video_bwd, self.video_blank) {
            (Some(fwd), Some(bwd), Some(blank)) => self.encode_media(
                g,
                bound,
                frames,
                fwd,
                bwd,
                blank,
                self.config.video_input_dim,
                "video",
            ),
            _ => Err(ModelError::ModalityDisabled { modality: "video" }),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn encode_media(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        frames: Option<&Array>,
        fwd: &GruParams,
        bwd: &GruParams,
        blank: usize,
        input_dim: usize,
        modality: &'static str,
    ) -> Result<TensorId, ModelError> {
        let xs: Vec<TensorId> = match frames {
            Some(m) if m.cols() > 0 => {
                if m.rows() != input_dim {
                    return Err(ModelError::FeatureDim {
                        modality,
                        expected: input_dim,
                        got: m.rows(),
                    });
                }
                let mat = g.constant(m.clone())?;
                (0..m.cols()).map(|k| g.slice(mat, 1, k, k + 1)).collect::<Result<_, _>>()?
            }
            _ => vec![bound.ids[blank]],
        };
        let states = gru::run_bigru(g, &bound.ids, fwd, bwd, &xs)?;
        let stacked = g.concat(&states, 1)?;
        Ok(g.mean_pool(stacked, 1)?)
    }

    /// Runs the fusion recurrence over `[token_state ; pooled audio ; pooled
    /// video]` columns; the same pooled vectors are attached to every token.
    pub fn fuse(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        text: &[TensorId],
        audio: Option<TensorId>,
        video: Option<TensorId>,
    ) -> Result<Vec<TensorId>, ModelError> {
        if audio.is_some() != self.config.use_audio || video.is_some() != self.config.use_video {
            return Err(ModelError::BadConfig {
                detail: format!(
                    "fusion inputs (audio {}, video {}) disagree with the config (audio {}, video {})",
                    audio.is_some(),
                    video.is_some(),
                    self.config.use_audio,
                    self.config.use_video
                ),
            });
        }
        let inputs = self.fusion_inputs(g, text, audio, video)?;
        Ok(gru::run_bigru(g, &bound.ids, &self.fusion_fwd, &self.fusion_bwd, &inputs)?)
    }

    fn fusion_inputs(
        &self,
        g: &mut Graph,
        text: &[TensorId],
        audio: Option<TensorId>,
        video: Option<TensorId>,
    ) -> Result<Vec<TensorId>, AutodiffError> {
        text.iter()
            .map(|&t| {
                let mut parts = vec![t];
                parts.extend(audio);
                parts.extend(video);
                if parts.len() == 1 {
                    Ok(t)
                } else {
                    g.concat(&parts, 0)
                }
            })
            .collect()
    }

    /// Attention plus projection over fused states: `[n, tagset_len]`
    /// scores, one row per token.
    pub fn emissions(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        fused: &[TensorId],
    ) -> Result<TensorId, ModelError> {
        let trace = attention::self_attend(g, &bound.ids, &self.attn, fused)?;
        let columns = g.concat(&trace.outputs, 1)?;
        Ok(g.transpose(columns)?)
    }

    /// Full pass over one sentence: encoders, fusion, attention.
    pub fn forward(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        input: &SentenceInput,
        train: bool,
        rng: &mut impl Rng,
    ) -> Result<SentenceStates, ModelError> {
        let text = self.encode_text(g, bound, &input.token_ids, train, rng)?;
        let audio = if self.config.use_audio {
            Some(self.encode_audio(g, bound, input.audio.as_ref())?)
        } else {
            None
        };
        let video = if self.config.use_video {
            Some(self.encode_video(g, bound, input.video.as_ref())?)
        } else {
            None
        };
        let fused = self.fuse(g, bound, &text, audio, video)?;
        let stacked = g.concat(&fused, 1)?;
        let pooled = g.mean_pool(stacked, 1)?;
        let emissions = self.emissions(g, bound, &fused)?;
        Ok(SentenceStates { emissions, pooled, fused })
    }

    /// Tagging loss for one sentence: CRF negative log-likelihood when the
    /// config says so, otherwise per-token cross-entropy averaged over the
    /// sentence.
    pub fn sequence_loss(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        emissions: TensorId,
        gold: &[usize],
    ) -> Result<TensorId, ModelError> {
        let (n, l) = g.value(emissions).shape();
        if gold.len() != n {
            return Err(ModelError::LengthMismatch { expected: n, got: gold.len() });
        }
        for &y in gold {
            if y >= l {
                return Err(ModelError::LabelIndex { index: y, size: l });
            }
        }
        match self.crf_pi {
            Some(pi) => {
                Ok(g.custom(&[emissions, bound.ids[pi]], Box::new(CrfNll::new(gold.to_vec())))?)
            }
            None => {
                let log_probs = g.log_softmax(emissions, 1)?;
                let mut mask = Array::zeros(n, l);
                for (i, &y) in gold.iter().enumerate() {
                    mask.set(i, y, 1.0);
                }
                let mask = g.constant(mask)?;
                let picked = g.mul(log_probs, mask)?;
                let total = g.sum_all(picked)?;
                Ok(g.scale(total, -1.0 / n as f64)?)
            }
        }
    }

    /// Sentence-sentiment scores from the pooled fused state,
    /// `[n_classes, 1]`.
    pub fn sentence_logits(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        pooled: TensorId,
    ) -> Result<TensorId, ModelError> {
        let Some(head) = &self.sentence_head else {
            return Err(ModelError::NoSentenceHead { setting: self.config.setting });
        };
        let mut x = pooled;
        for (w, b, saturate) in
            [(head.w1, head.b1, true), (head.w2, head.b2, true), (head.w3, head.b3, false)]
        {
            let wx = g.matmul(bound.ids[w], x)?;
            x = g.add(wx, bound.ids[b])?;
            if saturate {
                x = g.tanh(x)?;
            }
        }
        Ok(x)
    }

    /// Cross-entropy of the sentence head against one gold class.
    pub fn sentence_loss(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        pooled: TensorId,
        gold_class: usize,
    ) -> Result<TensorId, ModelError> {
        let logits = self.sentence_logits(g, bound, pooled)?;
        let k = g.value(logits).rows();
        if gold_class >= k {
            return Err(ModelError::LabelIndex { index: gold_class, size: k });
        }
        let log_probs = g.log_softmax(logits, 0)?;
        let mut mask = Array::zeros(k, 1);
        mask.set(gold_class, 0, 1.0);
        let mask = g.constant(mask)?;
        let picked = g.mul(log_probs, mask)?;
        let total = g.sum_all(picked)?;
        Ok(g.scale(total, -1.0)?)
    }

    /// Complete per-sentence loss for the configured setting. The joint
    /// setting adds the sentence cross-entropy to the tagging loss and
    /// requires `sentiment`.
    pub fn loss(
        &self,
        g: &mut Graph,
        bound: &BoundParams,
        states: &SentenceStates,
        gold_tags: &[usize],
        sentiment: Option<usize>,
    ) -> Result<TensorId, ModelError> {
        let sequence = self.sequence_loss(g, bound, states.emissions, gold_tags)?;
        if !self.config.setting.has_sentence_head() {
            return Ok(sequence);
        }
        let Some(class) = sentiment else {
            return Err(ModelError::MissingSentenceLabel);
        };
        let sentence = self.sentence_loss(g, bound, states.pooled, class)?;
        Ok(g.add(sequence, sentence)?)
    }

    /// Best label path for emission values: Viterbi under the CRF, otherwise
    /// the per-row argmax. Ties go to the lowest label index.
    pub fn decode(&self, emissions: &Array) -> Vec<usize> {
        match self.crf_pi {
            Some(pi) => viterbi(emissions, self.store.value_at(pi)),
            None => (0..emissions.rows())
                .map(|i| {
                    let row = emissions.row(i);
                    let mut best = 0;
                    for (y, &v) in row.iter().enumerate() {
                        if v > row[best] {
                            best = y;
                        }
                    }
                    best
                })
                .collect(),
        }
    }

    /// Writes every parameter plus the config as checkpoint metadata.
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let meta = serde_json::json!({ "model": self.config });
        Ok(self.store.save(path, &meta)?)
    }

    /// Restores a stack saved by [`EncoderStack::save`], refusing files
    /// whose config header is missing or inconsistent with the parameters.
    pub fn load(path: &Path) -> Result<EncoderStack, ModelError> {
        let (store, meta) = ParamStore::load(path)?;
        let header = meta.get("model").cloned().ok_or_else(|| ModelError::Checkpoint {
            detail: format!("{}: no model config header", path.display()),
        })?;
        let config: ModelConfig =
            serde_json::from_value(header).map_err(|e| ModelError::Checkpoint {
                detail: format!("{}: bad model config header: {e}", path.display()),
            })?;
        EncoderStack::from_parts(config, store)
    }
}
