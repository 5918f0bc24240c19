#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "specdiff/filter.hpp"
#include "specdiff/grid.hpp"

namespace specdiff {

/// Per-frame cepstral vectors c_1..c_order (c_0 excluded).
struct CepstraSequence {
    int order = 0;
    std::vector<std::vector<double>> frames;

    std::size_t size() const { return frames.size(); }
};

/// Per-frame pitch track. f0_hz is meaningful only where voiced.
struct F0Track {
    std::vector<double> f0_hz;
    std::vector<bool> voiced;
};

/// Monotone DTW path from (0,0) to (n-1,m-1) with steps (1,0),(0,1),(1,1).
struct AlignmentPath {
    std::vector<std::pair<int, int>> pairs;
};

/// Pitch-estimation knobs. Defaults were calibrated on the synthetic
/// speaker templates.
struct F0Options {
    double f0_min = 50.0;   // Hz
    double f0_max = 400.0;  // Hz
    int harmonics = 5;      // summation depth K
    double grid_step = 1.0; // candidate spacing, Hz
    double voicing_threshold = 0.3; // of gated frame energy
    double noise_gate = 0.05;       // bins below this fraction of frame peak are ignored
};

/// Orthonormal DCT-II of each log-magnitude column, keeping coefficients 1..d.
CepstraSequence cepstra(const Spectrogram& spec, int d);

/// Minimal cumulative Euclidean frame-distance alignment (dynamic
/// programming); returns the path and its total cost.
std::pair<AlignmentPath, double> dtw(const CepstraSequence& a,
                                     const CepstraSequence& b);

/// Mel-cepstral distortion in dB over the DTW alignment:
/// (10/ln10) sqrt(2) * mean over aligned pairs of the cepstral distance.
double mcd_dtw(const Spectrogram& x, const Spectrogram& y, int d = 13);

/// Harmonic-summation pitch per frame: score candidates on a 1 Hz grid by
/// summing gated magnitudes in a +-1 bin window around each of the first K
/// harmonics, take the argmax, refine with parabolic interpolation.
/// A frame is voiced when the winning sum exceeds
/// voicing_threshold * gated frame energy.
F0Track estimate_f0(const Spectrogram& spec, double f0_min, double f0_max);
F0Track estimate_f0(const Spectrogram& spec, const F0Options& opt);

/// Mean |f0_x - f0_y| over DTW-aligned frame pairs where both sides are
/// voiced. nullopt when no such pair exists (undefined, not zero).
std::optional<double> mae_f0(const Spectrogram& x, const Spectrogram& y);
std::optional<double> mae_f0(const Spectrogram& x, const Spectrogram& y,
                             const F0Options& opt, int d = 13);

/// ||lowpass(x) - lowpass(y)|| / ||lowpass(y)||; nullopt when the reference
/// band has zero norm.
std::optional<double> band_distance(const Spectrogram& x, const Spectrogram& y,
                                    const FilterSpec& fs);

} // namespace specdiff
