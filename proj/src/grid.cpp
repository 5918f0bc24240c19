#include "specdiff/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "specdiff/errors.hpp"

namespace specdiff {

namespace {

void check_dims(int n_freq, int n_time) {
    if (n_freq < 1 || n_time < 1) {
        throw std::invalid_argument("spectrogram dimensions must be >= 1, got " +
                                    std::to_string(n_freq) + "x" + std::to_string(n_time));
    }
}

} // namespace

Spectrogram::Spectrogram(int n_freq, int n_time, double fill, double freq_max)
    : n_freq_(n_freq), n_time_(n_time), freq_max_(freq_max) {
    check_dims(n_freq, n_time);
    if (!std::isfinite(fill)) {
        throw std::invalid_argument("spectrogram fill value must be finite");
    }
    values_.assign(static_cast<std::size_t>(n_freq) * n_time, fill);
}

Spectrogram::Spectrogram(int n_freq, int n_time, std::vector<double> values, double freq_max)
    : n_freq_(n_freq), n_time_(n_time), freq_max_(freq_max), values_(std::move(values)) {
    check_dims(n_freq, n_time);
    if (values_.size() != static_cast<std::size_t>(n_freq) * n_time) {
        throw std::invalid_argument("spectrogram value buffer has " +
                                    std::to_string(values_.size()) + " entries, expected " +
                                    std::to_string(static_cast<std::size_t>(n_freq) * n_time));
    }
    if (!all_finite()) {
        throw std::invalid_argument("spectrogram values must be finite");
    }
}

bool Spectrogram::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Rng::Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

double Rng::next_unit_open() {
    // 53-bit mantissa draw shifted into (0, 1] so log() below is safe.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::next_unit_half_open() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit_half_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Spectrogram new_spectrogram(int n_freq, int n_time, double fill, double freq_max) {
    return Spectrogram(n_freq, n_time, fill, freq_max);
}

Spectrogram axpy(double a, const Spectrogram& x, const Spectrogram& y) {
    if (!x.same_shape(y)) {
        throw ShapeError("axpy: shape mismatch " + std::to_string(x.n_freq()) + "x" +
                         std::to_string(x.n_time()) + " vs " + std::to_string(y.n_freq()) +
                         "x" + std::to_string(y.n_time()));
    }
    std::vector<double> out(x.size());
    auto xv = x.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a * xv[i] + yv[i];
    }
    return Spectrogram(x.n_freq(), x.n_time(), std::move(out), x.freq_max());
}

Spectrogram gaussian_like(const Spectrogram& tmpl, Rng& rng) {
    std::vector<double> out(tmpl.size());
    for (double& v : out) {
        v = rng.normal();
    }
    return Spectrogram(tmpl.n_freq(), tmpl.n_time(), std::move(out), tmpl.freq_max());
}

double frobenius_norm(const Spectrogram& x) {
    double acc = 0.0;
    for (double v : x.values()) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

double max_abs(const Spectrogram& x) {
    double m = 0.0;
    for (double v : x.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace specdiff
