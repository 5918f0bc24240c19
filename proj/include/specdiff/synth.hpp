#pragma once

#include <string>
#include <vector>

#include "specdiff/grid.hpp"

namespace specdiff {

/// Deterministic synthetic "speaker": a harmonic stack at f0 (optionally
/// vibrato-modulated) on a linear frequency axis, shaped by a sum-of-Gaussians
/// formant envelope over an exponential spectral tilt, then log(1+x)
/// compressed. Known ground truth for every experiment in this repo.
struct SpeakerTemplate {
    double f0 = 220.0;                                   // Hz
    std::vector<double> formant_centers = {500.0, 1500.0, 2500.0}; // Hz
    std::vector<double> formant_widths = {120.0, 180.0, 240.0};    // Hz
    int n_freq = 512;
    int n_time = 128;
    double freq_max = 8000.0;                            // Hz, axis upper bound
    double vibrato_depth = 0.0;                          // Hz
    double vibrato_rate = 0.0;                           // cycles per frame
    double vibrato_phase = 0.0;                          // radians
    double amplitude = 12.0;                             // linear gain before log
    double spectral_tilt = 800.0;                        // Hz, exp(-f/tilt) decay
    double formant_floor = 0.3;                          // envelope floor
};

/// Throws std::invalid_argument when a template violates its constraints
/// (f0 must stay below freq_max/2 including vibrato excursion).
void validate(const SpeakerTemplate& tpl);

/// Renders the harmonic stack. Deterministic: same template, same grid.
Spectrogram render(const SpeakerTemplate& tpl);

/// Time-axis blurred render: lowpass(render(tpl), FilterSpec(1, blur)).
/// Stands in for the coarse spectrogram-shaped prior field.
Spectrogram make_prior(const SpeakerTemplate& tpl, int blur_time_factor);

/// Parses a compact "key=value,key=value" template description, e.g.
/// "f0=220,bins=512,frames=128,fmax=8000,vibrato_depth=5,vibrato_rate=0.06".
/// Unknown keys are rejected.
SpeakerTemplate parse_template_spec(const std::string& text);

} // namespace specdiff
