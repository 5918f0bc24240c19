#include "specdiff/synth.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "specdiff/filter.hpp"

namespace specdiff {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Formant envelope at frequency f: exponential spectral tilt times
// (floor + sum of formant Gaussians).
double envelope(const SpeakerTemplate& tpl, double f) {
    double formants = tpl.formant_floor;
    for (std::size_t j = 0; j < tpl.formant_centers.size(); ++j) {
        const double d = f - tpl.formant_centers[j];
        const double w = tpl.formant_widths[j];
        formants += std::exp(-d * d / (2.0 * w * w));
    }
    return tpl.amplitude * std::exp(-f / tpl.spectral_tilt) * formants;
}

} // namespace

void validate(const SpeakerTemplate& tpl) {
    if (tpl.n_freq < 1 || tpl.n_time < 1) {
        throw std::invalid_argument("template grid dimensions must be >= 1");
    }
    if (!(tpl.freq_max > 0.0)) {
        throw std::invalid_argument("template freq_max must be > 0");
    }
    if (!(tpl.f0 > 0.0) || !(tpl.f0 < tpl.freq_max / 2.0)) {
        throw std::invalid_argument("template f0 must lie in (0, freq_max/2)");
    }
    if (tpl.vibrato_depth < 0.0 || tpl.vibrato_rate < 0.0) {
        throw std::invalid_argument("template vibrato parameters must be >= 0");
    }
    if (tpl.vibrato_depth >= tpl.f0 || tpl.f0 + tpl.vibrato_depth >= tpl.freq_max / 2.0) {
        throw std::invalid_argument("template vibrato excursion leaves (0, freq_max/2)");
    }
    if (tpl.formant_centers.size() != tpl.formant_widths.size()) {
        throw std::invalid_argument("template formant centers/widths size mismatch");
    }
    for (double w : tpl.formant_widths) {
        if (!(w > 0.0)) throw std::invalid_argument("template formant widths must be > 0");
    }
    if (!(tpl.amplitude > 0.0) || !(tpl.spectral_tilt > 0.0) || tpl.formant_floor < 0.0) {
        throw std::invalid_argument("template envelope parameters out of range");
    }
}

Spectrogram render(const SpeakerTemplate& tpl) {
    validate(tpl);
    const double bin_width = tpl.freq_max / tpl.n_freq;
    const double line_sigma = 0.6 * bin_width;
    const double line_window = 4.0 * line_sigma;
    Spectrogram grid(tpl.n_freq, tpl.n_time, 0.0, tpl.freq_max);
    for (int fr = 0; fr < tpl.n_time; ++fr) {
        const double f0_t =
            tpl.f0 + tpl.vibrato_depth * std::sin(2.0 * kPi * tpl.vibrato_rate * fr + tpl.vibrato_phase);
        for (int k = 1; k * f0_t < tpl.freq_max; ++k) {
            const double h = k * f0_t;
            const double amp = envelope(tpl, h);
            const int lo = std::max(0, static_cast<int>((h - line_window) / bin_width));
            const int hi = std::min(tpl.n_freq - 1, static_cast<int>((h + line_window) / bin_width) + 1);
            for (int b = lo; b <= hi; ++b) {
                const double fc = (b + 0.5) * bin_width;
                const double d = fc - h;
                grid.at(b, fr) += amp * std::exp(-d * d / (2.0 * line_sigma * line_sigma));
            }
        }
    }
    for (double& v : grid.values()) {
        v = std::log1p(v);
    }
    return grid;
}

Spectrogram make_prior(const SpeakerTemplate& tpl, int blur_time_factor) {
    if (blur_time_factor < 1) {
        throw std::invalid_argument("blur_time_factor must be >= 1");
    }
    return lowpass(render(tpl), FilterSpec{1, blur_time_factor, -0.5});
}

SpeakerTemplate parse_template_spec(const std::string& text) {
    SpeakerTemplate tpl;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(pos, end - pos);
        pos = end + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("template spec item '" + item + "' is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        double num = 0.0;
        const char* first = value.data();
        const char* last = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(first, last, num);
        if (ec != std::errc() || ptr != last) {
            throw std::invalid_argument("template spec value for '" + key + "' is not a number");
        }
        if (key == "f0") tpl.f0 = num;
        else if (key == "bins") tpl.n_freq = static_cast<int>(num);
        else if (key == "frames") tpl.n_time = static_cast<int>(num);
        else if (key == "fmax") tpl.freq_max = num;
        else if (key == "vibrato_depth") tpl.vibrato_depth = num;
        else if (key == "vibrato_rate") tpl.vibrato_rate = num;
        else if (key == "vibrato_phase") tpl.vibrato_phase = num;
        else if (key == "amplitude") tpl.amplitude = num;
        else if (key == "tilt") tpl.spectral_tilt = num;
        else if (key == "floor") tpl.formant_floor = num;
        else {
            throw std::invalid_argument("template spec has unknown key '" + key + "'");
        }
    }
    validate(tpl);
    return tpl;
}

} // namespace specdiff
