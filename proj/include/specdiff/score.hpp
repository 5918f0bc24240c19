#pragma once

#include "specdiff/grid.hpp"
#include "specdiff/schedule.hpp"
#include "specdiff/synth.hpp"

namespace specdiff {

/// Score field estimator: maps (x_t, mu, t, speaker) to grad_x log p_t(x_t),
/// same shape as x_t. Implementations are immutable after construction and
/// safe to call concurrently.
class ScoreModel {
public:
    virtual ~ScoreModel() = default;

    virtual Spectrogram evaluate(const Spectrogram& x, const Spectrogram& mu,
                                 double t, int speaker) const = 0;
};

/// Closed-form score for Gaussian data N(data_mean, data_std^2 I) diffused by
/// the schedule's transition kernel:
///   mean_t = mu + sqrt(gamma_t) (data_mean - mu)
///   var_t  = 1 + gamma_t (data_std^2 - 1)
///   score  = -(x - mean_t) / var_t
/// The speaker id is accepted for interface compatibility and ignored; the
/// "speaker" is the data mean itself.
class AnalyticGaussianScore : public ScoreModel {
public:
    AnalyticGaussianScore(Spectrogram data_mean, double data_std,
                          NoiseSchedule schedule);

    Spectrogram evaluate(const Spectrogram& x, const Spectrogram& mu,
                         double t, int speaker) const override;

    const Spectrogram& data_mean() const { return data_mean_; }
    double data_std() const { return data_std_; }
    const NoiseSchedule& schedule() const { return schedule_; }

    /// Variance of the data marginal at time t (shared by the log-density).
    double marginal_variance(double t) const;

    /// log p_t(x) up to an additive constant; used by gradient checks.
    double log_density(const Spectrogram& x, const Spectrogram& mu, double t) const;

private:
    Spectrogram data_mean_;
    double data_std_;
    NoiseSchedule schedule_;
};

/// AnalyticGaussianScore whose data mean is a rendered speaker template.
/// Toy stand-in for a trained network.
class TemplateScore : public AnalyticGaussianScore {
public:
    TemplateScore(const SpeakerTemplate& tpl, double sigma, NoiseSchedule schedule);
};

} // namespace specdiff
