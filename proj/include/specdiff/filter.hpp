#pragma once

#include "specdiff/grid.hpp"

namespace specdiff {

/// Separable bicubic low-pass operator: downsample by (n_f, n_t), then
/// upsample back to the original shape. Keys cubic-convolution kernel with
/// sharpness kernel_a (default -0.5, Catmull-Rom), align-centers sample
/// positions (src = (dst + 0.5) * in/out - 0.5) and clamp-to-edge taps.
/// With n_f = n_t = 1 every stage is an exact copy.
struct FilterSpec {
    int n_f = 1;
    int n_t = 1;
    double kernel_a = -0.5;
};

/// Throws std::invalid_argument when a factor is < 1.
void validate(const FilterSpec& fs);

/// Output shape (ceil(n_freq/n_f), ceil(n_time/n_t)), never below 1x1.
Spectrogram downsample(const Spectrogram& spec, const FilterSpec& fs);

/// Bicubic interpolation up to (target_freq, target_time); targets must not
/// be smaller than the source.
Spectrogram upsample(const Spectrogram& spec, int target_freq, int target_time,
                     const FilterSpec& fs);

/// upsample(downsample(spec)) back to the input shape.
Spectrogram lowpass(const Spectrogram& spec, const FilterSpec& fs);

} // namespace specdiff
