#include "specdiff/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "specdiff/errors.hpp"

namespace specdiff {

namespace {

void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("schedule time must lie in [0,1], got " + std::to_string(t));
    }
}

} // namespace

NoiseSchedule::NoiseSchedule(double beta0, double beta_t) : beta0_(beta0), beta_t_(beta_t) {
    if (!(beta0 > 0.0)) {
        throw std::invalid_argument("beta0 must be > 0");
    }
    if (!(beta_t > beta0)) {
        throw std::invalid_argument("betaT must exceed beta0");
    }
}

double NoiseSchedule::beta_at(double t) const {
    check_time(t);
    return beta0_ + (beta_t_ - beta0_) * t;
}

double NoiseSchedule::cumulative_n(double t) const {
    check_time(t);
    return t * beta0_ + 0.5 * (beta_t_ - beta0_) * t * t;
}

double NoiseSchedule::gamma(double t) const {
    return std::exp(-cumulative_n(t));
}

TransitionMoments NoiseSchedule::transition_moments(const Spectrogram& x0,
                                                    const Spectrogram& mu, double t) const {
    if (!x0.same_shape(mu)) {
        throw ShapeError("transition_moments: x0 and mu shapes differ");
    }
    const double n = cumulative_n(t);
    const double c0 = std::exp(-0.5 * n); // exactly 1 at t = 0
    const double c1 = 1.0 - c0;
    std::vector<double> mean(x0.size());
    auto xv = x0.values();
    auto mv = mu.values();
    for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] = c0 * xv[i] + c1 * mv[i];
    }
    const double variance = 1.0 - std::exp(-n);
    return {Spectrogram(x0.n_freq(), x0.n_time(), std::move(mean), x0.freq_max()), variance};
}

} // namespace specdiff
