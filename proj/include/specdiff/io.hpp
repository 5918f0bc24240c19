#pragma once

#include <cstdint>
#include <string>

#include "specdiff/diffusion.hpp"
#include "specdiff/filter.hpp"
#include "specdiff/grid.hpp"

namespace specdiff {

/// SPGR spectrogram container, all multi-byte fields little-endian:
///   "SPGR" | u16 version (=1) | u32 n_freq | u32 n_time | f64 freq_max |
///   n_freq*n_time f32 values, row-major.
/// Values are stored at 32-bit precision; read(write(x)) == float(x) exactly.
inline constexpr std::uint16_t kSpectrogramFileVersion = 1;

Spectrogram read_spectrogram(const std::string& path);
void write_spectrogram(const std::string& path, const Spectrogram& spec);

/// Binary 8-bit PGM (P5); rows top-to-bottom = high-to-low frequency,
/// min-max normalized per image; a zero-range grid maps to mid-gray 128.
void export_pgm(const Spectrogram& spec, const std::string& path);

/// Run configuration: "key = value" lines under [section] headers, '#'
/// comments. Unknown sections or keys are rejected, as is any constraint
/// violation, always naming the offending key.
struct RunConfig {
    // [schedule]
    double beta0 = 0.05;
    double beta_t = 20.0;
    int steps = 50;
    // [guidance]
    FilterSpec filter{1, 18, -0.5};
    int stop_step = 6;
    double temperature = 1.0;
    AlignMode align = AlignMode::Stretch;
    // [score]
    std::string score_model = "template"; // "analytic" | "template"
    double score_sigma = 0.1;
    double score_f0 = 220.0;
    double score_vibrato_depth = 0.0;
    double score_vibrato_rate = 0.0;
    // [run]
    std::uint64_t seed = 0;
};

RunConfig load_config(const std::string& path);

/// Parses config text directly (the file loader is a thin wrapper).
RunConfig parse_config(const std::string& text);

} // namespace specdiff
