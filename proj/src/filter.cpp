#include "specdiff/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace specdiff {

namespace {

// Keys cubic convolution weight for |s| <= 2.
double keys_weight(double s, double a) {
    s = std::abs(s);
    if (s <= 1.0) {
        return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
    }
    if (s < 2.0) {
        return (((s - 5.0) * s + 8.0) * s - 4.0) * a;
    }
    return 0.0;
}

struct Tap {
    std::array<int, 4> idx;
    std::array<double, 4> w;
};

// One tap set per output coordinate: 4 clamped source indices and their
// kernel weights under the align-centers mapping.
std::vector<Tap> make_taps(int in_n, int out_n, double a) {
    std::vector<Tap> taps(out_n);
    const double scale = static_cast<double>(in_n) / out_n;
    for (int d = 0; d < out_n; ++d) {
        const double s = (d + 0.5) * scale - 0.5;
        const double base = std::floor(s);
        const double frac = s - base;
        Tap tap{};
        for (int k = -1; k <= 2; ++k) {
            const int j = static_cast<int>(base) + k;
            tap.idx[k + 1] = std::clamp(j, 0, in_n - 1);
            tap.w[k + 1] = keys_weight(frac - k, a);
        }
        taps[d] = tap;
    }
    return taps;
}

enum class Axis { Freq, Time };

Spectrogram resample_axis(const Spectrogram& in, int out_n, Axis axis, double a) {
    const int in_n = axis == Axis::Freq ? in.n_freq() : in.n_time();
    if (out_n == in_n) {
        return in; // align-centers with scale 1 is the identity; skip the arithmetic
    }
    const auto taps = make_taps(in_n, out_n, a);
    if (axis == Axis::Freq) {
        Spectrogram out(out_n, in.n_time(), 0.0, in.freq_max());
        for (int d = 0; d < out_n; ++d) {
            const Tap& tap = taps[d];
            for (int t = 0; t < in.n_time(); ++t) {
                out.at(d, t) = tap.w[0] * in.at(tap.idx[0], t) + tap.w[1] * in.at(tap.idx[1], t) +
                               tap.w[2] * in.at(tap.idx[2], t) + tap.w[3] * in.at(tap.idx[3], t);
            }
        }
        return out;
    }
    Spectrogram out(in.n_freq(), out_n, 0.0, in.freq_max());
    for (int f = 0; f < in.n_freq(); ++f) {
        for (int d = 0; d < out_n; ++d) {
            const Tap& tap = taps[d];
            out.at(f, d) = tap.w[0] * in.at(f, tap.idx[0]) + tap.w[1] * in.at(f, tap.idx[1]) +
                           tap.w[2] * in.at(f, tap.idx[2]) + tap.w[3] * in.at(f, tap.idx[3]);
        }
    }
    return out;
}

int ceil_div(int n, int factor) {
    return (n + factor - 1) / factor;
}

} // namespace

void validate(const FilterSpec& fs) {
    if (fs.n_f < 1 || fs.n_t < 1) {
        throw std::invalid_argument("filter factors must be >= 1, got n_f=" +
                                    std::to_string(fs.n_f) + " n_t=" + std::to_string(fs.n_t));
    }
}

Spectrogram downsample(const Spectrogram& spec, const FilterSpec& fs) {
    validate(fs);
    const int out_f = std::max(1, ceil_div(spec.n_freq(), fs.n_f));
    const int out_t = std::max(1, ceil_div(spec.n_time(), fs.n_t));
    Spectrogram tmp = resample_axis(spec, out_f, Axis::Freq, fs.kernel_a);
    return resample_axis(tmp, out_t, Axis::Time, fs.kernel_a);
}

Spectrogram upsample(const Spectrogram& spec, int target_freq, int target_time,
                     const FilterSpec& fs) {
    validate(fs);
    if (target_freq < spec.n_freq() || target_time < spec.n_time()) {
        throw std::invalid_argument("upsample target " + std::to_string(target_freq) + "x" +
                                    std::to_string(target_time) + " smaller than source " +
                                    std::to_string(spec.n_freq()) + "x" +
                                    std::to_string(spec.n_time()));
    }
    Spectrogram tmp = resample_axis(spec, target_freq, Axis::Freq, fs.kernel_a);
    return resample_axis(tmp, target_time, Axis::Time, fs.kernel_a);
}

Spectrogram lowpass(const Spectrogram& spec, const FilterSpec& fs) {
    return upsample(downsample(spec, fs), spec.n_freq(), spec.n_time(), fs);
}

} // namespace specdiff
