#include "specdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "specdiff/errors.hpp"

namespace specdiff {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMcdScale = (10.0 / 2.302585092994046) * 1.4142135623730951; // 10/ln10 * sqrt(2)

double frame_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace

CepstraSequence cepstra(const Spectrogram& spec, int d) {
    const int n = spec.n_freq();
    if (d < 1 || d >= n) {
        throw std::invalid_argument("cepstral order must satisfy 1 <= d < n_freq, got d=" +
                                    std::to_string(d) + " n_freq=" + std::to_string(n));
    }
    // Orthonormal DCT-II basis rows for k = 1..d.
    std::vector<double> basis(static_cast<std::size_t>(d) * n);
    const double scale = std::sqrt(2.0 / n);
    for (int k = 1; k <= d; ++k) {
        for (int j = 0; j < n; ++j) {
            basis[static_cast<std::size_t>(k - 1) * n + j] =
                scale * std::cos(kPi * k * (2.0 * j + 1.0) / (2.0 * n));
        }
    }
    CepstraSequence seq;
    seq.order = d;
    seq.frames.resize(spec.n_time());
    for (int t = 0; t < spec.n_time(); ++t) {
        std::vector<double>& frame = seq.frames[t];
        frame.assign(d, 0.0);
        for (int k = 0; k < d; ++k) {
            double acc = 0.0;
            const double* row = &basis[static_cast<std::size_t>(k) * n];
            for (int j = 0; j < n; ++j) {
                acc += row[j] * spec.at(j, t);
            }
            frame[k] = acc;
        }
    }
    return seq;
}

std::pair<AlignmentPath, double> dtw(const CepstraSequence& a, const CepstraSequence& b) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (n == 0 || m == 0) {
        throw std::invalid_argument("dtw requires non-empty sequences");
    }
    if (a.order != b.order) {
        throw std::invalid_argument("dtw sequences have different cepstral orders");
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<std::size_t>(n) * m, inf);
    std::vector<std::uint8_t> from(static_cast<std::size_t>(n) * m, 0); // 1=(1,0) 2=(0,1) 3=(1,1)
    auto id = [m](int i, int j) { return static_cast<std::size_t>(i) * m + j; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double d = frame_distance(a.frames[i], b.frames[j]);
            if (i == 0 && j == 0) {
                cost[id(0, 0)] = d;
                continue;
            }
            double best = inf;
            std::uint8_t dir = 0;
            if (i > 0 && cost[id(i - 1, j)] < best) { best = cost[id(i - 1, j)]; dir = 1; }
            if (j > 0 && cost[id(i, j - 1)] < best) { best = cost[id(i, j - 1)]; dir = 2; }
            if (i > 0 && j > 0 && cost[id(i - 1, j - 1)] <= best) { best = cost[id(i - 1, j - 1)]; dir = 3; }
            cost[id(i, j)] = best + d;
            from[id(i, j)] = dir;
        }
    }
    AlignmentPath path;
    int i = n - 1;
    int j = m - 1;
    while (true) {
        path.pairs.emplace_back(i, j);
        if (i == 0 && j == 0) break;
        switch (from[id(i, j)]) {
        case 1: --i; break;
        case 2: --j; break;
        default: --i; --j; break;
        }
    }
    std::reverse(path.pairs.begin(), path.pairs.end());
    return {std::move(path), cost[id(n - 1, m - 1)]};
}

double mcd_dtw(const Spectrogram& x, const Spectrogram& y, int d) {
    const CepstraSequence cx = cepstra(x, d);
    const CepstraSequence cy = cepstra(y, d);
    auto [path, total] = dtw(cx, cy);
    (void)total;
    double acc = 0.0;
    for (const auto& [i, j] : path.pairs) {
        acc += frame_distance(cx.frames[i], cy.frames[j]);
    }
    return kMcdScale * acc / static_cast<double>(path.pairs.size());
}

F0Track estimate_f0(const Spectrogram& spec, double f0_min, double f0_max) {
    F0Options opt;
    opt.f0_min = f0_min;
    opt.f0_max = f0_max;
    return estimate_f0(spec, opt);
}

F0Track estimate_f0(const Spectrogram& spec, const F0Options& opt) {
    if (!(opt.f0_min > 0.0) || !(opt.f0_min < opt.f0_max) ||
        !(opt.f0_max < spec.freq_max() / 2.0)) {
        throw std::invalid_argument("estimate_f0 requires 0 < f0_min < f0_max < freq_max/2");
    }
    const int n_freq = spec.n_freq();
    const int n_time = spec.n_time();
    const double bin_width = spec.freq_max() / n_freq;
    const int n_cand = static_cast<int>(std::floor((opt.f0_max - opt.f0_min) / opt.grid_step)) + 1;

    F0Track track;
    track.f0_hz.assign(n_time, 0.0);
    track.voiced.assign(n_time, false);

    std::vector<double> col(n_freq);
    std::vector<double> scores(n_cand);
    for (int t = 0; t < n_time; ++t) {
        double peak_mag = 0.0;
        for (int f = 0; f < n_freq; ++f) {
            col[f] = std::max(spec.at(f, t), 0.0);
            peak_mag = std::max(peak_mag, col[f]);
        }
        // Noise gate: bins far below the frame peak carry no harmonic
        // information but inflate the energy denominator.
        const double gate = opt.noise_gate * peak_mag;
        double energy = 0.0;
        for (double& v : col) {
            if (v < gate) v = 0.0;
            energy += v;
        }
        if (energy <= 0.0) continue;

        for (int c = 0; c < n_cand; ++c) {
            const double f0 = opt.f0_min + c * opt.grid_step;
            double s = 0.0;
            for (int k = 1; k <= opt.harmonics; ++k) {
                const double h = k * f0;
                if (h >= spec.freq_max()) break;
                const int idx = std::clamp(
                    static_cast<int>(std::lround(h / bin_width - 0.5)), 0, n_freq - 1);
                const int lo = std::max(idx - 1, 0);
                const int hi = std::min(idx + 1, n_freq - 1);
                for (int b = lo; b <= hi; ++b) s += col[b];
            }
            scores[c] = s;
        }
        int best = 0;
        for (int c = 1; c < n_cand; ++c) {
            if (scores[c] > scores[best]) best = c;
        }
        if (scores[best] < opt.voicing_threshold * energy) continue;

        double f0 = opt.f0_min + best * opt.grid_step;
        if (best > 0 && best < n_cand - 1) {
            const double y0 = scores[best - 1];
            const double y1 = scores[best];
            const double y2 = scores[best + 1];
            const double den = y0 - 2.0 * y1 + y2;
            if (den != 0.0) {
                f0 += 0.5 * (y0 - y2) / den * opt.grid_step;
            }
        }
        track.f0_hz[t] = f0;
        track.voiced[t] = true;
    }
    return track;
}

std::optional<double> mae_f0(const Spectrogram& x, const Spectrogram& y) {
    return mae_f0(x, y, F0Options{});
}

std::optional<double> mae_f0(const Spectrogram& x, const Spectrogram& y,
                             const F0Options& opt, int d) {
    auto [path, total] = dtw(cepstra(x, d), cepstra(y, d));
    (void)total;
    const F0Track fx = estimate_f0(x, opt);
    const F0Track fy = estimate_f0(y, opt);
    double acc = 0.0;
    int count = 0;
    for (const auto& [i, j] : path.pairs) {
        if (fx.voiced[i] && fy.voiced[j]) {
            acc += std::abs(fx.f0_hz[i] - fy.f0_hz[j]);
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return acc / count;
}

std::optional<double> band_distance(const Spectrogram& x, const Spectrogram& y,
                                    const FilterSpec& fs) {
    if (!x.same_shape(y)) {
        throw ShapeError("band_distance: shapes differ");
    }
    const Spectrogram lx = lowpass(x, fs);
    const Spectrogram ly = lowpass(y, fs);
    const double ref = frobenius_norm(ly);
    if (ref == 0.0) return std::nullopt;
    return frobenius_norm(axpy(-1.0, ly, lx)) / ref;
}

} // namespace specdiff
