#include "specdiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "specdiff/errors.hpp"

namespace specdiff {

namespace {

struct ReverseUpdate {
    Spectrogram next;
    double drift_norm;
};

// Alg. update x_{i-1} = x_i - 0.5 (mu - x_i - score) beta(t) / steps at
// t = i/steps. Kept in one place so the public reverse_step and the sampling
// loops share the arithmetic (and its trace quantities) exactly.
ReverseUpdate reverse_update(const Spectrogram& x, const Spectrogram& mu, int i,
                             const GuidanceConfig& cfg, const NoiseSchedule& sched,
                             const ScoreModel& model) {
    if (i < 1 || i > cfg.steps) {
        throw std::invalid_argument("reverse step index " + std::to_string(i) +
                                    " outside [1, steps=" + std::to_string(cfg.steps) + "]");
    }
    if (!x.same_shape(mu)) {
        throw ShapeError("reverse step: x and mu shapes differ");
    }
    const double t = static_cast<double>(i) / cfg.steps;
    const double z = sched.beta_at(t);
    const double h = 0.5 * z / cfg.steps;
    const Spectrogram score = model.evaluate(x, mu, t, cfg.speaker);
    if (!score.all_finite()) {
        throw NumericError("score model returned non-finite values at step " + std::to_string(i));
    }
    std::vector<double> out(x.size());
    double drift_sq = 0.0;
    auto xv = x.values();
    auto mv = mu.values();
    auto sv = score.values();
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double dx = h * (mv[k] - xv[k] - sv[k]);
        drift_sq += dx * dx;
        out[k] = xv[k] - dx;
    }
    return {Spectrogram(x.n_freq(), x.n_time(), std::move(out), x.freq_max()),
            std::sqrt(drift_sq)};
}

Spectrogram initial_noise(const Spectrogram& mu, double temperature, Rng& rng) {
    // x_T ~ N(mu, I/temperature)
    const Spectrogram alpha = gaussian_like(mu, rng);
    return axpy(1.0 / std::sqrt(temperature), alpha, mu);
}

} // namespace

void validate(const GuidanceConfig& cfg) {
    if (cfg.steps < 1) {
        throw ValidationError("steps must be >= 1, got " + std::to_string(cfg.steps));
    }
    if (cfg.stop_step < 0 || cfg.stop_step > cfg.steps) {
        throw ValidationError("stop_step must lie in [0, steps], got " +
                              std::to_string(cfg.stop_step));
    }
    if (!(cfg.temperature > 0.0)) {
        throw ValidationError("temperature must be > 0");
    }
    if (cfg.filter.n_f < 1 || cfg.filter.n_t < 1) {
        throw ValidationError("filter factors n_f, n_t must be >= 1");
    }
}

void write_trace_csv(const SampleTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open trace file for writing: " + path);
    }
    out << "step,t,drift_norm,ilvr_active,lowpass_residual\n";
    out.precision(17);
    for (const TraceRecord& r : trace) {
        out << r.step << ',' << r.t << ',' << r.drift_norm << ',' << (r.ilvr_active ? 1 : 0)
            << ',' << r.lowpass_residual << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing trace file: " + path);
    }
}

Spectrogram forward_sample(const Spectrogram& y, const Spectrogram& mu, double t,
                           const NoiseSchedule& sched, Rng& rng) {
    TransitionMoments m = sched.transition_moments(y, mu, t);
    const Spectrogram alpha = gaussian_like(y, rng);
    return axpy(std::sqrt(m.variance), alpha, m.mean);
}

Spectrogram reverse_step(const Spectrogram& x_i, const Spectrogram& mu, int i,
                         const GuidanceConfig& cfg, const NoiseSchedule& sched,
                         const ScoreModel& model) {
    return reverse_update(x_i, mu, i, cfg, sched, model).next;
}

Spectrogram ilvr_step(const Spectrogram& x_prime, const Spectrogram& y_next,
                      const FilterSpec& fs) {
    if (!x_prime.same_shape(y_next)) {
        throw ShapeError("ilvr_step: proposal and reference shapes differ");
    }
    if (fs.n_f == 1 && fs.n_t == 1) {
        return y_next; // f is the identity operator: full replacement
    }
    const Spectrogram fy = lowpass(y_next, fs);
    const Spectrogram fx = lowpass(x_prime, fs);
    // Grouped as x' + (f(y) - f(x')) so y == x' cancels to x' exactly.
    std::vector<double> out(x_prime.size());
    auto fyv = fy.values();
    auto fxv = fx.values();
    auto xv = x_prime.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = xv[i] + (fyv[i] - fxv[i]);
    }
    return Spectrogram(x_prime.n_freq(), x_prime.n_time(), std::move(out), x_prime.freq_max());
}

std::pair<Spectrogram, SampleTrace>
sample_guided(const Spectrogram& mu, const Spectrogram& y_ref, const GuidanceConfig& cfg,
              const NoiseSchedule& sched, const ScoreModel& model, Rng& rng) {
    validate(cfg);
    if (!mu.same_shape(y_ref)) {
        throw ShapeError("sample_guided: reference shape " + std::to_string(y_ref.n_freq()) +
                         "x" + std::to_string(y_ref.n_time()) + " does not match prior " +
                         std::to_string(mu.n_freq()) + "x" + std::to_string(mu.n_time()) +
                         "; align it first");
    }
    SampleTrace trace;
    trace.reserve(cfg.steps);
    Spectrogram x = initial_noise(mu, cfg.temperature, rng);
    for (int i = cfg.steps; i >= 1; --i) {
        ReverseUpdate upd = reverse_update(x, mu, i, cfg, sched, model);
        const double t = static_cast<double>(i) / cfg.steps;
        const bool active = i > cfg.stop_step;
        double residual = 0.0;
        double ref_norm = 0.0;
        if (active) {
            const Spectrogram y_next = forward_sample(y_ref, mu, t, sched, rng);
            x = ilvr_step(upd.next, y_next, cfg.filter);
            const Spectrogram fx = lowpass(x, cfg.filter);
            const Spectrogram fy = lowpass(y_next, cfg.filter);
            residual = frobenius_norm(axpy(-1.0, fy, fx));
            ref_norm = frobenius_norm(fy);
        } else {
            x = std::move(upd.next);
        }
        if (!x.all_finite()) {
            throw NumericError("sampling diverged to non-finite values at step " +
                               std::to_string(i));
        }
        trace.push_back({i, t, upd.drift_norm, active, residual, ref_norm});
    }
    return {std::move(x), std::move(trace)};
}

Spectrogram sample_unguided(const Spectrogram& mu, const GuidanceConfig& cfg,
                            const NoiseSchedule& sched, const ScoreModel& model, Rng& rng) {
    validate(cfg);
    Spectrogram x = initial_noise(mu, cfg.temperature, rng);
    for (int i = cfg.steps; i >= 1; --i) {
        x = reverse_update(x, mu, i, cfg, sched, model).next;
        if (!x.all_finite()) {
            throw NumericError("sampling diverged to non-finite values at step " +
                               std::to_string(i));
        }
    }
    return x;
}

Spectrogram align_reference(const Spectrogram& y, int target_time) {
    if (target_time < 1) {
        throw std::invalid_argument("align_reference target_time must be >= 1");
    }
    if (target_time == y.n_time()) {
        return y;
    }
    const double scale = static_cast<double>(y.n_time()) / target_time;
    Spectrogram out(y.n_freq(), target_time, 0.0, y.freq_max());
    for (int d = 0; d < target_time; ++d) {
        const double s = std::clamp(d * scale, 0.0, static_cast<double>(y.n_time() - 1));
        const int j0 = static_cast<int>(std::floor(s));
        const int j1 = std::min(j0 + 1, y.n_time() - 1);
        const double w = s - j0;
        for (int f = 0; f < y.n_freq(); ++f) {
            out.at(f, d) = (1.0 - w) * y.at(f, j0) + w * y.at(f, j1);
        }
    }
    return out;
}

Spectrogram align_reference_mode(const Spectrogram& y, int target_time, AlignMode mode) {
    switch (mode) {
    case AlignMode::Stretch:
        return align_reference(y, target_time);
    case AlignMode::Pad: {
        if (y.n_time() > target_time) {
            throw std::invalid_argument("align=pad: reference is longer than the target");
        }
        Spectrogram out(y.n_freq(), target_time, 0.0, y.freq_max());
        for (int f = 0; f < y.n_freq(); ++f) {
            for (int t = 0; t < target_time; ++t) {
                out.at(f, t) = y.at(f, std::min(t, y.n_time() - 1));
            }
        }
        return out;
    }
    case AlignMode::Crop: {
        if (y.n_time() < target_time) {
            throw std::invalid_argument("align=crop: reference is shorter than the target");
        }
        Spectrogram out(y.n_freq(), target_time, 0.0, y.freq_max());
        for (int f = 0; f < y.n_freq(); ++f) {
            for (int t = 0; t < target_time; ++t) {
                out.at(f, t) = y.at(f, t);
            }
        }
        return out;
    }
    }
    throw std::logic_error("unreachable align mode");
}

} // namespace specdiff
