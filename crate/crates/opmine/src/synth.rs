//! Deterministic fixture corpora. Real review datasets with aligned media
//! are not redistributable, so the toolkit ships generators for two
//! constructed ones whose properties are known exactly:
//!
//! * the **basic** corpus: 50 text-only sentences over three sentence
//!   patterns with a filler vocabulary disjoint from the aspect vocabulary,
//!   so a capable tagger can reach a perfect training F1;
//! * the **media** corpus: 60 sentences (20 templates, each instantiated
//!   once per sentiment class with identical tokens) where the sentence
//!   sentiment is carried *only* by the audio (a class-keyed tone) and the
//!   video (class-keyed cluster means). Text is balanced by construction,
//!   so any text-only classifier degrades to the class prior while a
//!   multi-modal one can read the class off either media channel.
//!
//! Everything is a pure function of the seed: [`write_fixture`] emits
//! byte-identical files on repeated calls, and [`media_fixture`] returns
//! the same in-memory features.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::features::{
    spectrogram, write_video_features, write_wav, AudioSignal, FeatureSequence, FeaturesError,
    Modality, SpectrogramConfig,
};
use crate::ingest::{write_conll, write_jsonl, IngestError, Sentence};
use crate::labels::{CollapsedTag, SentimentClass, TagSequence, CANONICAL_SENTIMENTS};
use crate::subalign::{emit_srt, SubtitleChunk};
use crate::train::CorpusSentence;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Features(#[from] FeaturesError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Sample rate of generated WAV clips.
pub const MEDIA_SAMPLE_RATE: u32 = 8000;
/// Video descriptor width in the generated feature files.
pub const MEDIA_VIDEO_DIM: usize = 8;
/// Video frame rate of the generated feature files.
pub const MEDIA_VIDEO_FPS: f64 = 10.0;
/// Per-class tone frequencies (positive, negative, neutral). Each lands on
/// an exact FFT bin of [`media_spectrogram_config`]: 8, 16, 24.
pub const MEDIA_TONE_HZ: [f64; 3] = [1000.0, 2000.0, 3000.0];

const SENTENCE_MS: u64 = 600;
const SPEECH_MS: u64 = 540;
const TONE_AMPLITUDE: f64 = 0.2;
const AUDIO_NOISE: f64 = 0.05;
const VIDEO_NOISE: f64 = 0.2;
const MEDIA_TEMPLATES: usize = 20;
const MEDIA_CLIPS: usize = 4;
const MAX_AUDIO_FRAMES: usize = 10;

/// Spectrogram parameters matched to the generated clips: the window is
/// short enough for sub-second sentences and the class tones hit exact bins.
pub fn media_spectrogram_config() -> SpectrogramConfig {
    SpectrogramConfig { window: 64, hop: 64, hann: true, log_compress: true }
}

// Aspect tokens split by chunk position, so `B` vs `I` is decidable from
// the word alone; filler words never appear in either pool.
const ASPECT_FIRST: [&str; 8] =
    ["battery", "screen", "camera", "keyboard", "speaker", "trackpad", "headphone", "charger"];
const ASPECT_REST: [&str; 8] =
    ["life", "panel", "module", "backlight", "grille", "surface", "jack", "cable"];
const BASIC_ADJECTIVES: [&str; 6] = ["solid", "flimsy", "bright", "quiet", "sturdy", "loose"];
const BASIC_VERBS: [&str; 4] = ["seems", "feels", "looks", "stays"];

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|w| w.to_string()).collect()
}

fn sentence_with_tags(id: String, surfaces: &[String], tags: TagSequence) -> Sentence {
    let mut s = Sentence::from_tokens(id, surfaces);
    s.gold = Some(tags);
    s
}

/// The 50-sentence separable text-only corpus. Three patterns place a one-
/// or two-word aspect among filler words; every aspect token is tagged and
/// every filler token is `O`, with no overlap between the vocabularies.
pub fn basic_corpus(seed: u64) -> Vec<Sentence> {
    use crate::labels::AeTag::{Begin, Inside, Outside};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(50);
    for i in 0..50 {
        let first = ASPECT_FIRST[rng.random_range(0..ASPECT_FIRST.len())];
        let rest = ASPECT_REST[rng.random_range(0..ASPECT_REST.len())];
        let adj = BASIC_ADJECTIVES[rng.random_range(0..BASIC_ADJECTIVES.len())];
        let verb = BASIC_VERBS[rng.random_range(0..BASIC_VERBS.len())];
        let (surfaces, tags) = match i % 3 {
            0 => (
                words(&["the", first, rest, verb, adj]),
                vec![Outside, Begin, Inside, Outside, Outside],
            ),
            1 => (words(&[adj, first, "again"]), vec![Outside, Begin, Outside]),
            _ => (
                words(&["this", first, rest, verb, "rather", adj]),
                vec![Outside, Begin, Inside, Outside, Outside, Outside],
            ),
        };
        out.push(sentence_with_tags(format!("basic-{i:02}"), &surfaces, TagSequence::Ae(tags)));
    }
    out
}

// One media sentence before any signal is attached: where it sits in a
// clip, which template it came from, and which class its media encodes.
struct Scene {
    template: usize,
    class: SentimentClass,
    clip: usize,
    slot: usize,
    sentence: Sentence,
}

impl Scene {
    fn span_ms(&self) -> (u64, u64) {
        let start = self.slot as u64 * SENTENCE_MS;
        (start, start + SPEECH_MS)
    }
}

fn template_surfaces_and_positions(t: usize) -> (Vec<String>, Vec<bool>) {
    let first = ASPECT_FIRST[t % ASPECT_FIRST.len()];
    let rest = ASPECT_REST[(t / ASPECT_FIRST.len()) % ASPECT_REST.len()];
    // every word outside the aspect pools is polarity-free on purpose
    match t % 3 {
        0 => (
            words(&["the", first, rest, "sits", "there"]),
            vec![false, true, true, false, false],
        ),
        1 => (words(&["that", first, "again"]), vec![false, true, false]),
        _ => (
            words(&["people", "mention", "the", first, rest]),
            vec![false, false, false, true, true],
        ),
    }
}

fn collapsed_tags(positions: &[bool], class: SentimentClass) -> TagSequence {
    let mut prev = false;
    let tags = positions
        .iter()
        .map(|&in_chunk| {
            let tag = match (in_chunk, prev) {
                (false, _) => CollapsedTag::Outside,
                (true, false) => CollapsedTag::Begin(class),
                (true, true) => CollapsedTag::Inside(class),
            };
            prev = in_chunk;
            tag
        })
        .collect();
    TagSequence::Collapsed(tags)
}

fn class_short(class: SentimentClass) -> &'static str {
    match class {
        SentimentClass::Positive => "pos",
        SentimentClass::Negative => "neg",
        SentimentClass::Neutral => "neu",
    }
}

// Lay out all template x class instances across clips so that a template's
// three copies (identical text) land in three different clips, keeping
// per-clip subtitle matching unambiguous. Slot order inside a clip is a
// seeded shuffle.
fn media_scenes(seed: u64) -> Vec<Scene> {
    let mut by_clip: Vec<Vec<(usize, SentimentClass)>> = vec![Vec::new(); MEDIA_CLIPS];
    for t in 0..MEDIA_TEMPLATES {
        for (c, &class) in CANONICAL_SENTIMENTS.iter().enumerate() {
            by_clip[(t + 7 * c) % MEDIA_CLIPS].push((t, class));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scenes = Vec::with_capacity(MEDIA_TEMPLATES * 3);
    for (clip, mut members) in by_clip.into_iter().enumerate() {
        members.shuffle(&mut rng);
        for (slot, (template, class)) in members.into_iter().enumerate() {
            let (surfaces, positions) = template_surfaces_and_positions(template);
            let mut sentence = sentence_with_tags(
                format!("m-t{template:02}-{}", class_short(class)),
                &surfaces,
                collapsed_tags(&positions, class),
            );
            sentence.sentence_sentiment = Some(class);
            sentence.media_ref = Some(format!("clip{clip}"));
            scenes.push(Scene { template, class, clip, slot, sentence });
        }
    }
    scenes.sort_by_key(|s| (s.template, s.class as usize));
    scenes
}

fn tone_burst(rng: &mut ChaCha8Rng, class: SentimentClass, samples: usize) -> Vec<f64> {
    let freq = MEDIA_TONE_HZ[class as usize];
    let phase = rng.random_range(0.0..TAU);
    (0..samples)
        .map(|i| {
            let t = i as f64 / MEDIA_SAMPLE_RATE as f64;
            TONE_AMPLITUDE * (TAU * freq * t + phase).sin()
                + rng.random_range(-AUDIO_NOISE..=AUDIO_NOISE)
        })
        .collect()
}

fn video_frames(rng: &mut ChaCha8Rng, class: SentimentClass, n_frames: usize) -> Vec<f64> {
    let hot = class as usize;
    let mut frames = Vec::with_capacity(n_frames * MEDIA_VIDEO_DIM);
    for _ in 0..n_frames {
        for d in 0..MEDIA_VIDEO_DIM {
            let mean = if d == hot { 0.8 } else { 0.1 };
            frames.push(mean + rng.random_range(-VIDEO_NOISE..=VIDEO_NOISE));
        }
    }
    frames
}

/// The in-memory media corpus: sentences with per-sentence audio
/// spectrogram and video features attached, plus the template-grouped
/// splits used for held-out evaluation.
pub struct MediaFixture {
    pub corpus: Vec<CorpusSentence>,
    /// Template index per corpus entry, for leakage-free splitting.
    pub template_of: Vec<usize>,
    /// Spectrogram bins per audio frame.
    pub audio_dim: usize,
    pub video_dim: usize,
}

impl MediaFixture {
    /// Indices grouped by template: templates 0..14 train, 14..17
    /// validation, 17..20 test. Identical text appears on every side, so
    /// the split leaks nothing a text model could use.
    pub fn grouped_splits(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let bucket = |lo: usize, hi: usize| -> Vec<usize> {
            (0..self.corpus.len())
                .filter(|&i| (lo..hi).contains(&self.template_of[i]))
                .collect()
        };
        (bucket(0, 14), bucket(14, 17), bucket(17, MEDIA_TEMPLATES))
    }
}

/// Builds the media corpus with features computed through the real signal
/// path: a class tone rendered to samples, the spectrogram of those
/// samples (thinned to at most 10 frames), and class-centered video
/// descriptors.
pub fn media_fixture(seed: u64) -> Result<MediaFixture, SynthError> {
    let scenes = media_scenes(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6D65_6469); // media stream
    let config = media_spectrogram_config();
    let speech_samples = (MEDIA_SAMPLE_RATE as u64 * SPEECH_MS / 1000) as usize;
    let frames_per_sentence = (SPEECH_MS as f64 / 1000.0 * MEDIA_VIDEO_FPS) as usize;

    let mut corpus = Vec::with_capacity(scenes.len());
    let mut template_of = Vec::with_capacity(scenes.len());
    for scene in &scenes {
        let samples = tone_burst(&mut rng, scene.class, speech_samples);
        let signal = AudioSignal::new(samples, MEDIA_SAMPLE_RATE);
        let full = spectrogram(&signal, &config)?;
        let audio = crate::features::downsample(&full, MAX_AUDIO_FRAMES);
        let video = FeatureSequence::new(
            Modality::Video,
            MEDIA_VIDEO_DIM,
            video_frames(&mut rng, scene.class, frames_per_sentence),
        );
        let mut sentence = scene.sentence.clone();
        sentence.time_span = Some(scene.span_ms());
        corpus.push(CorpusSentence { sentence, audio: Some(audio), video: Some(video) });
        template_of.push(scene.template);
    }
    Ok(MediaFixture { corpus, template_of, audio_dim: config.dim(), video_dim: MEDIA_VIDEO_DIM })
}

/// Paths of everything [`write_fixture`] produced.
#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub root: PathBuf,
    /// The basic corpus, CoNLL format, AE tags.
    pub basic: PathBuf,
    /// The media corpus sentences, JSONL, collapsed tags, no time spans
    /// (alignment against the subtitles reconstructs them).
    pub media_corpus: PathBuf,
    /// Stand-in pre-trained embeddings covering both corpora, GloVe text
    /// layout, [`EMBEDDINGS_DIM`]-dimensional.
    pub embeddings: PathBuf,
    /// Per-clip (subtitles, audio, video features) file triples.
    pub clips: Vec<ClipPaths>,
}

/// Width of the fixture embedding vectors.
pub const EMBEDDINGS_DIM: usize = 32;

fn fixture_embeddings(seed: u64) -> String {
    let mut vocabulary: Vec<String> = basic_corpus(seed)
        .iter()
        .chain(media_scenes(seed).iter().map(|s| &s.sentence))
        .flat_map(|s| s.tokens.iter().map(|t| t.surface.clone()))
        .collect();
    vocabulary.sort_unstable();
    vocabulary.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x676C_6F76); // glove stream
    let mut out = String::new();
    for word in &vocabulary {
        out.push_str(word);
        for _ in 0..EMBEDDINGS_DIM {
            out.push_str(&format!(" {:.6}", rng.random_range(-0.5..=0.5)));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct ClipPaths {
    pub stem: String,
    pub srt: PathBuf,
    pub wav: PathBuf,
    pub video: PathBuf,
}

/// Writes both fixture corpora under `dir`: `basic.conll`, plus a `media/`
/// directory holding `corpus.jsonl` and one SRT + WAV + feature-file triple
/// per clip. Pure function of the seed; a second call produces
/// byte-identical files.
pub fn write_fixture(dir: &Path, seed: u64) -> Result<FixturePaths, SynthError> {
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| SynthError::Io { path, source }
    };
    let media_dir = dir.join("media");
    std::fs::create_dir_all(&media_dir).map_err(io_err(&media_dir))?;

    let basic = dir.join("basic.conll");
    write_conll(&basic, &basic_corpus(seed))?;

    let embeddings = dir.join("embeddings.txt");
    std::fs::write(&embeddings, fixture_embeddings(seed)).map_err(io_err(&embeddings))?;

    let scenes = media_scenes(seed);
    // corpus.jsonl keeps corpus order (template, class); clips are built in
    // slot order from the same scene list
    let media_corpus = media_dir.join("corpus.jsonl");
    let sentences: Vec<Sentence> = scenes.iter().map(|s| s.sentence.clone()).collect();
    write_jsonl(&media_corpus, &sentences)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636C_6970); // clip stream
    let mut clips = Vec::with_capacity(MEDIA_CLIPS);
    for clip in 0..MEDIA_CLIPS {
        let mut members: Vec<&Scene> = scenes.iter().filter(|s| s.clip == clip).collect();
        members.sort_by_key(|s| s.slot);
        let n = members.len();
        let clip_ms = n as u64 * SENTENCE_MS;
        let clip_samples = (MEDIA_SAMPLE_RATE as u64 * clip_ms / 1000) as usize;

        // noise floor everywhere, class tone only inside each speech span
        let mut samples: Vec<f64> =
            (0..clip_samples).map(|_| rng.random_range(-AUDIO_NOISE..=AUDIO_NOISE)).collect();
        for scene in &members {
            let (start_ms, end_ms) = scene.span_ms();
            let start = (MEDIA_SAMPLE_RATE as u64 * start_ms / 1000) as usize;
            let end = (MEDIA_SAMPLE_RATE as u64 * end_ms / 1000) as usize;
            let freq = MEDIA_TONE_HZ[scene.class as usize];
            let phase = rng.random_range(0.0..TAU);
            for (i, slot) in samples[start..end].iter_mut().enumerate() {
                let t = i as f64 / MEDIA_SAMPLE_RATE as f64;
                *slot += TONE_AMPLITUDE * (TAU * freq * t + phase).sin();
            }
        }

        // video frames tile the clip; each frame takes the class of the
        // sentence whose span covers its timestamp (gaps keep the noise)
        let n_frames = (clip_ms as f64 / 1000.0 * MEDIA_VIDEO_FPS) as usize;
        let mut frames = Vec::with_capacity(n_frames * MEDIA_VIDEO_DIM);
        for k in 0..n_frames {
            let t_ms = (k as f64 * 1000.0 / MEDIA_VIDEO_FPS) as u64;
            let hot = members.iter().find_map(|s| {
                let (a, b) = s.span_ms();
                (t_ms >= a && t_ms < b).then_some(s.class as usize)
            });
            for d in 0..MEDIA_VIDEO_DIM {
                let mean = match hot {
                    Some(h) if h == d => 0.8,
                    Some(_) => 0.1,
                    None => 0.0,
                };
                frames.push(mean + rng.random_range(-VIDEO_NOISE..=VIDEO_NOISE));
            }
        }

        let chunks: Vec<SubtitleChunk> = members
            .iter()
            .enumerate()
            .map(|(j, scene)| {
                let (start_ms, end_ms) = scene.span_ms();
                SubtitleChunk {
                    counter: j as u64 + 1,
                    start_ms,
                    end_ms,
                    text: scene
                        .sentence
                        .tokens
                        .iter()
                        .map(|t| t.surface.as_str())
                        .collect::<Vec<_>>()
                        .join(" "),
                }
            })
            .collect();

        let stem = format!("clip{clip}");
        let srt = media_dir.join(format!("{stem}.srt"));
        let wav = media_dir.join(format!("{stem}.wav"));
        let video = media_dir.join(format!("{stem}.vft"));
        std::fs::write(&srt, emit_srt(&chunks)).map_err(io_err(&srt))?;
        write_wav(&wav, &samples, MEDIA_SAMPLE_RATE)?;
        write_video_features(&video, &frames, MEDIA_VIDEO_DIM, MEDIA_VIDEO_FPS)?;
        clips.push(ClipPaths { stem, srt, wav, video });
    }

    Ok(FixturePaths { root: dir.to_path_buf(), basic, media_corpus, embeddings, clips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{cut_to_span, load_video_features, read_wav};
    use crate::ingest::{read_conll, read_jsonl};
    use crate::subalign::{align, parse_srt};

    #[test]
    fn basic_corpus_is_separable_by_vocabulary() {
        let corpus = basic_corpus(7);
        assert_eq!(corpus.len(), 50);
        let mut seen_two_token_chunk = false;
        for s in &corpus {
            s.validate().unwrap();
            let TagSequence::Ae(tags) = s.gold.as_ref().unwrap() else {
                panic!("basic corpus is AE-tagged");
            };
            for (token, tag) in s.tokens.iter().zip(tags) {
                use crate::labels::AeTag;
                let expect = if ASPECT_FIRST.contains(&token.surface.as_str()) {
                    AeTag::Begin
                } else if ASPECT_REST.contains(&token.surface.as_str()) {
                    AeTag::Inside
                } else {
                    AeTag::Outside
                };
                assert_eq!(*tag, expect, "{}: {}", s.id, token.surface);
            }
            seen_two_token_chunk |= tags.windows(2).any(|w| {
                w == [crate::labels::AeTag::Begin, crate::labels::AeTag::Inside]
            });
        }
        assert!(seen_two_token_chunk);
    }

    #[test]
    fn media_text_is_class_balanced() {
        let fixture = media_fixture(7).unwrap();
        assert_eq!(fixture.corpus.len(), 60);
        // identical token sequences appear once per class
        for template in (0..fixture.corpus.len()).step_by(3) {
            let trio = &fixture.corpus[template..template + 3];
            let texts: Vec<Vec<&str>> = trio
                .iter()
                .map(|c| c.sentence.tokens.iter().map(|t| t.surface.as_str()).collect())
                .collect();
            assert_eq!(texts[0], texts[1]);
            assert_eq!(texts[1], texts[2]);
            let mut classes: Vec<SentimentClass> =
                trio.iter().map(|c| c.sentence.sentence_sentiment.unwrap()).collect();
            classes.sort_by_key(|c| *c as usize);
            assert_eq!(classes, CANONICAL_SENTIMENTS);
        }
    }

    #[test]
    fn media_audio_carries_the_class_in_its_hot_bin() {
        let fixture = media_fixture(3).unwrap();
        for cs in &fixture.corpus {
            let audio = cs.audio.as_ref().unwrap();
            assert_eq!(audio.dim, 33);
            assert!(audio.n_frames() <= MAX_AUDIO_FRAMES);
            let class = cs.sentence.sentence_sentiment.unwrap() as usize;
            let expected_bin = 8 * (class + 1);
            // skip bin 0: DC offset from uniform noise
            for k in 0..audio.n_frames() {
                let frame = cs.audio.as_ref().unwrap().frame(k);
                let hottest = (1..audio.dim).max_by(|&a, &b| {
                    frame[a].partial_cmp(&frame[b]).unwrap()
                });
                assert_eq!(hottest, Some(expected_bin), "{}", cs.sentence.id);
            }
        }
    }

    #[test]
    fn media_video_centers_on_the_class_coordinate() {
        let fixture = media_fixture(3).unwrap();
        for cs in &fixture.corpus {
            let video = cs.video.as_ref().unwrap();
            let class = cs.sentence.sentence_sentiment.unwrap() as usize;
            for k in 0..video.n_frames() {
                let frame = video.frame(k);
                let hottest =
                    (0..video.dim).max_by(|&a, &b| frame[a].partial_cmp(&frame[b]).unwrap());
                assert_eq!(hottest, Some(class), "{}", cs.sentence.id);
            }
        }
    }

    #[test]
    fn grouped_splits_partition_by_template() {
        let fixture = media_fixture(7).unwrap();
        let (train, valid, test) = fixture.grouped_splits();
        assert_eq!((train.len(), valid.len(), test.len()), (42, 9, 9));
        let mut all: Vec<usize> = train.iter().chain(&valid).chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..60).collect::<Vec<_>>());
        let train_templates: Vec<usize> = train.iter().map(|&i| fixture.template_of[i]).collect();
        let test_templates: Vec<usize> = test.iter().map(|&i| fixture.template_of[i]).collect();
        assert!(train_templates.iter().all(|t| !test_templates.contains(t)));
    }

    #[test]
    fn written_fixture_is_byte_identical_across_calls() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = write_fixture(dir_a.path(), 7).unwrap();
        let b = write_fixture(dir_b.path(), 7).unwrap();
        let pairs = [
            (&a.basic, &b.basic),
            (&a.media_corpus, &b.media_corpus),
            (&a.clips[0].srt, &b.clips[0].srt),
            (&a.clips[0].wav, &b.clips[0].wav),
            (&a.clips[3].video, &b.clips[3].video),
        ];
        for (pa, pb) in pairs {
            assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap(), "{pa:?}");
        }
        // a different seed changes content
        let dir_c = tempfile::tempdir().unwrap();
        let c = write_fixture(dir_c.path(), 8).unwrap();
        assert_ne!(std::fs::read(&a.clips[0].wav).unwrap(), std::fs::read(&c.clips[0].wav).unwrap());
    }

    #[test]
    fn written_files_read_back_through_the_real_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_fixture(dir.path(), 7).unwrap();

        let basic = read_conll(&paths.basic).unwrap();
        assert_eq!(basic.len(), 50);
        assert_eq!(basic[0].id, "basic-00");

        let sentences = read_jsonl(&paths.media_corpus).unwrap();
        assert_eq!(sentences.len(), 60);
        assert!(sentences.iter().all(|s| s.media_ref.is_some() && s.time_span.is_none()));

        // the embedding file covers the full fixture vocabulary
        let all: Vec<Sentence> = basic.iter().cloned().chain(sentences.iter().cloned()).collect();
        let vocab = crate::ingest::Vocabulary::build(&all, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (table, coverage) =
            crate::ingest::load_embeddings(&paths.embeddings, &vocab, &mut rng).unwrap();
        assert_eq!(table.dimension, EMBEDDINGS_DIM);
        // only <unk> and <pad> fall outside the file
        assert_eq!(coverage.missing, 2);

        // every clip sentence aligns exactly to its subtitle block
        let clip0: Vec<Sentence> = sentences
            .iter()
            .filter(|s| s.media_ref.as_deref() == Some("clip0"))
            .cloned()
            .collect();
        assert_eq!(clip0.len(), 15);
        let chunks = parse_srt(&paths.clips[0].srt).unwrap();
        assert_eq!(chunks.len(), 15);
        let results = align(&clip0, &chunks, 0.9, 3);
        for r in &results {
            assert!(r.matched(), "{} failed to align", r.sentence_id);
            assert_eq!(r.end_ms.unwrap() - r.start_ms.unwrap(), SPEECH_MS);
        }

        // the audio cut to an aligned span shows that sentence's tone bin
        let signal = read_wav(&paths.clips[0].wav).unwrap();
        assert_eq!(signal.sample_rate_hz, MEDIA_SAMPLE_RATE);
        let spec = spectrogram(&signal, &media_spectrogram_config()).unwrap();
        let first = &results[0];
        let cut = cut_to_span(&spec, first.start_ms.unwrap(), first.end_ms.unwrap());
        assert!(cut.n_frames() > 0);
        let class = clip0[0].sentence_sentiment.unwrap() as usize;
        let frame = cut.frame(cut.n_frames() / 2);
        let hottest = (1..cut.dim).max_by(|&a, &b| frame[a].partial_cmp(&frame[b]).unwrap());
        assert_eq!(hottest, Some(8 * (class + 1)));

        // video features load and carry per-frame timestamps for cutting
        let video = load_video_features(&paths.clips[0].video, MEDIA_VIDEO_DIM).unwrap();
        assert_eq!(video.dim, MEDIA_VIDEO_DIM);
        let vcut = cut_to_span(&video, first.start_ms.unwrap(), first.end_ms.unwrap());
        assert_eq!(vcut.n_frames(), 6);
        let vframe = vcut.frame(0);
        let hottest =
            (0..vcut.dim).max_by(|&a, &b| vframe[a].partial_cmp(&vframe[b]).unwrap());
        assert_eq!(hottest, Some(class));
    }
}
