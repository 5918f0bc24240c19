#include "specdiff/score.hpp"

#include <cmath>
#include <stdexcept>

#include "specdiff/errors.hpp"

namespace specdiff {

AnalyticGaussianScore::AnalyticGaussianScore(Spectrogram data_mean, double data_std,
                                             NoiseSchedule schedule)
    : data_mean_(std::move(data_mean)), data_std_(data_std), schedule_(schedule) {
    if (!(data_std > 0.0)) {
        throw std::invalid_argument("score data_std must be > 0");
    }
}

double AnalyticGaussianScore::marginal_variance(double t) const {
    // 1 + gamma (sigma^2 - 1): exactly 1 when sigma == 1, and always > 0.
    const double g = schedule_.gamma(t);
    return 1.0 + g * (data_std_ * data_std_ - 1.0);
}

Spectrogram AnalyticGaussianScore::evaluate(const Spectrogram& x, const Spectrogram& mu,
                                            double t, int /*speaker*/) const {
    if (!x.same_shape(mu) || !x.same_shape(data_mean_)) {
        throw ShapeError("score evaluate: x, mu and data_mean shapes must agree");
    }
    // mean_t written as mu + sqrt(gamma)(m* - mu) so the stationary case
    // m* == mu yields exactly mu per entry.
    const double sqrt_g = std::exp(-0.5 * schedule_.cumulative_n(t));
    const double inv_var = 1.0 / marginal_variance(t);
    std::vector<double> out(x.size());
    auto xv = x.values();
    auto mv = mu.values();
    auto dv = data_mean_.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mean_i = mv[i] + sqrt_g * (dv[i] - mv[i]);
        out[i] = -(xv[i] - mean_i) * inv_var;
    }
    return Spectrogram(x.n_freq(), x.n_time(), std::move(out), x.freq_max());
}

double AnalyticGaussianScore::log_density(const Spectrogram& x, const Spectrogram& mu,
                                          double t) const {
    if (!x.same_shape(mu) || !x.same_shape(data_mean_)) {
        throw ShapeError("score log_density: x, mu and data_mean shapes must agree");
    }
    const double sqrt_g = std::exp(-0.5 * schedule_.cumulative_n(t));
    const double var = marginal_variance(t);
    double acc = 0.0;
    auto xv = x.values();
    auto mv = mu.values();
    auto dv = data_mean_.values();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mean_i = mv[i] + sqrt_g * (dv[i] - mv[i]);
        const double r = xv[i] - mean_i;
        acc += r * r;
    }
    return -0.5 * acc / var;
}

TemplateScore::TemplateScore(const SpeakerTemplate& tpl, double sigma, NoiseSchedule schedule)
    : AnalyticGaussianScore(render(tpl), sigma, schedule) {}

} // namespace specdiff
