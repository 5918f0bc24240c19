#pragma once

#include "specdiff/grid.hpp"

namespace specdiff {

struct TransitionMoments {
    Spectrogram mean;
    double variance; // scalar: the covariance is isotropic
};

/// Linear noise schedule beta(t) = beta0 + (betaT - beta0) t on normalized
/// time t in [0, 1], with closed-form integral n(t) and gamma(t) = exp(-n(t)).
class NoiseSchedule {
public:
    NoiseSchedule(double beta0, double beta_t);

    double beta0() const { return beta0_; }
    double beta_t() const { return beta_t_; }

    /// beta0 + (betaT - beta0) t. Throws std::invalid_argument outside [0,1].
    double beta_at(double t) const;

    /// n(t) = t*beta0 + (betaT - beta0) t^2 / 2  (= integral of beta_at).
    double cumulative_n(double t) const;

    /// exp(-n(t)), in (0, 1], gamma(0) = 1.
    double gamma(double t) const;

    /// Moments of the forward transition kernel at time t:
    /// mean = exp(-n/2) x0 + (1 - exp(-n/2)) mu, variance = 1 - exp(-n).
    TransitionMoments transition_moments(const Spectrogram& x0,
                                         const Spectrogram& mu, double t) const;

private:
    double beta0_;
    double beta_t_;
};

} // namespace specdiff
