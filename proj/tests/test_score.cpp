#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specdiff/errors.hpp"
#include "specdiff/score.hpp"

using namespace specdiff;

namespace {

const NoiseSchedule kSched(0.05, 20.0);

Spectrogram random_grid(int nf, int nt, Rng& rng) {
    return gaussian_like(Spectrogram(nf, nt, 0.0), rng);
}

} // namespace

TEST_CASE("stationary model: score is exactly -(x - mu)") {
    Rng rng(17);
    const Spectrogram mu = random_grid(6, 8, rng);
    const AnalyticGaussianScore model(mu, 1.0, kSched);
    const Spectrogram x = random_grid(6, 8, rng);
    for (double t : {0.0, 0.02, 0.5, 1.0}) {
        const Spectrogram s = model.evaluate(x, mu, t, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(s.values()[i] == -(x.values()[i] - mu.values()[i]));
        }
    }
}

TEST_CASE("prior dominates as gamma vanishes") {
    Rng rng(21);
    const Spectrogram mu = random_grid(4, 4, rng);
    const Spectrogram m_star = random_grid(4, 4, rng); // far from mu
    const AnalyticGaussianScore model(m_star, 0.7, kSched);
    const Spectrogram x = random_grid(4, 4, rng);
    const Spectrogram s = model.evaluate(x, mu, 1.0, 0);
    // gamma(1) ~ 4.4e-5, so the score collapses to -(x - mu) up to that scale.
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double limit = -(x.values()[i] - mu.values()[i]);
        CHECK(std::abs(s.values()[i] - limit) <= 0.05);
    }
}

TEST_CASE("score matches central finite differences of the log-density") {
    Rng rng(33);
    const Spectrogram mu = random_grid(5, 5, rng);
    const Spectrogram m_star = random_grid(5, 5, rng);
    const AnalyticGaussianScore analytic(m_star, 0.6, kSched);

    SpeakerTemplate tpl;
    tpl.n_freq = 5;
    tpl.n_time = 5;
    tpl.f0 = 900.0;
    const TemplateScore templ(tpl, 0.3, kSched);

    const std::vector<const AnalyticGaussianScore*> models = {&analytic, &templ};
    const double h = 1e-4;
    int probes = 0;
    for (const AnalyticGaussianScore* model : models) {
        for (int trial = 0; trial < 50; ++trial) {
            const double t = 0.05 + 0.9 * (trial / 49.0);
            Spectrogram x = random_grid(5, 5, rng);
            const Spectrogram s = model->evaluate(x, mu, t, 0);
            const int f = trial % 5;
            const int tt = (trial / 5) % 5;
            Spectrogram xp = x;
            Spectrogram xm = x;
            xp.at(f, tt) += h;
            xm.at(f, tt) -= h;
            const double fd =
                (model->log_density(xp, mu, t) - model->log_density(xm, mu, t)) / (2.0 * h);
            CHECK(std::abs(s.at(f, tt) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            ++probes;
        }
    }
    CHECK(probes == 100);
}

TEST_CASE("score is affine in x") {
    Rng rng(55);
    const Spectrogram mu = random_grid(7, 3, rng);
    const Spectrogram m_star = random_grid(7, 3, rng);
    const AnalyticGaussianScore model(m_star, 0.4, kSched);
    const double t = 0.37;
    const double var = model.marginal_variance(t);
    const Spectrogram x1 = random_grid(7, 3, rng);
    const Spectrogram x2 = random_grid(7, 3, rng);
    const Spectrogram s1 = model.evaluate(x1, mu, t, 0);
    const Spectrogram s2 = model.evaluate(x2, mu, t, 0);
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double want = -(x1.values()[i] - x2.values()[i]) / var;
        CHECK(std::abs((s1.values()[i] - s2.values()[i]) - want) <= 1e-12);
    }
}

TEST_CASE("template score vanishes at the mode near t = 0") {
    SpeakerTemplate tpl;
    tpl.n_freq = 64;
    tpl.n_time = 8;
    const TemplateScore model(tpl, 0.01, kSched);
    const Spectrogram x = render(tpl);
    const Spectrogram mu(64, 8, 0.0);
    const Spectrogram s = model.evaluate(x, mu, 0.0, 0);
    for (double v : s.values()) {
        CHECK(v == 0.0); // x - mean_0 = render - render cancels exactly
    }
}

TEST_CASE("speaker id is accepted and ignored") {
    Rng rng(2);
    const Spectrogram mu = random_grid(3, 3, rng);
    const AnalyticGaussianScore model(mu, 0.9, kSched);
    const Spectrogram x = random_grid(3, 3, rng);
    const Spectrogram a = model.evaluate(x, mu, 0.4, 0);
    const Spectrogram b = model.evaluate(x, mu, 0.4, 12345);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.values()[i] == b.values()[i]);
    }
}

TEST_CASE("construction and shape errors") {
    Rng rng(8);
    const Spectrogram mu = random_grid(3, 3, rng);
    CHECK_THROWS_AS(AnalyticGaussianScore(mu, 0.0, kSched), std::invalid_argument);
    CHECK_THROWS_AS(AnalyticGaussianScore(mu, -1.0, kSched), std::invalid_argument);
    const AnalyticGaussianScore model(mu, 1.0, kSched);
    const Spectrogram bad(4, 3, 0.0);
    CHECK_THROWS_AS(model.evaluate(bad, bad, 0.5, 0), ShapeError);
}
