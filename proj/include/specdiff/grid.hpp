#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace specdiff {

inline constexpr double kDefaultFreqMax = 8000.0;

/// Dense 2-D grid of log-amplitude values. Rows are frequency bins
/// (row 0 = lowest frequency), columns are time frames, storage row-major.
/// Operations treat grids as values: they never modify their inputs, so a
/// grid shared between threads is safe as long as nobody writes to it.
class Spectrogram {
public:
    Spectrogram(int n_freq, int n_time, double fill, double freq_max = kDefaultFreqMax);

    /// Takes ownership of a row-major value buffer. Rejects size mismatch
    /// and non-finite entries.
    Spectrogram(int n_freq, int n_time, std::vector<double> values,
                double freq_max = kDefaultFreqMax);

    int n_freq() const { return n_freq_; }
    int n_time() const { return n_time_; }
    double freq_max() const { return freq_max_; }
    std::size_t size() const { return values_.size(); }

    double at(int f, int t) const { return values_[idx(f, t)]; }
    double& at(int f, int t) { return values_[idx(f, t)]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool same_shape(const Spectrogram& other) const {
        return n_freq_ == other.n_freq_ && n_time_ == other.n_time_;
    }

    bool all_finite() const;

private:
    std::size_t idx(int f, int t) const {
        return static_cast<std::size_t>(f) * n_time_ + t;
    }

    int n_freq_;
    int n_time_;
    double freq_max_;
    std::vector<double> values_;
};

/// Seeded source of standard-normal draws. mt19937_64 with a Box-Muller
/// transform on top, so the stream is fully determined by the seed and
/// identical across platforms. Single-owner: never share between threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double normal();
    std::uint64_t seed() const { return seed_; }

    /// Identifier recorded in run metadata.
    static const char* generator_name() { return "mt19937_64+box-muller"; }

private:
    double next_unit_open();      // uniform in (0, 1]
    double next_unit_half_open(); // uniform in [0, 1)

    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

Spectrogram new_spectrogram(int n_freq, int n_time, double fill,
                            double freq_max = kDefaultFreqMax);

/// a*x + y, element-wise. Result carries x's freq_max.
Spectrogram axpy(double a, const Spectrogram& x, const Spectrogram& y);

/// Grid of i.i.d. standard normals with the template's shape, filled in
/// row-major order.
Spectrogram gaussian_like(const Spectrogram& tmpl, Rng& rng);

double frobenius_norm(const Spectrogram& x);
double max_abs(const Spectrogram& x);

} // namespace specdiff
