// Python bindings: numpy arrays in and out, thin wrappers over the core
// library. Grids cross the boundary as 2-D float64 arrays (rows = frequency
// bins, columns = time frames).
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <stdexcept>

#include "specdiff/diffusion.hpp"
#include "specdiff/errors.hpp"
#include "specdiff/io.hpp"
#include "specdiff/metrics.hpp"
#include "specdiff/synth.hpp"

namespace py = pybind11;
using namespace specdiff;

namespace {

Spectrogram grid_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr,
                            double freq_max) {
    if (arr.ndim() != 2) {
        throw std::invalid_argument("expected a 2-D array (n_freq x n_time)");
    }
    const auto nf = static_cast<int>(arr.shape(0));
    const auto nt = static_cast<int>(arr.shape(1));
    std::vector<double> values(arr.data(), arr.data() + static_cast<std::size_t>(nf) * nt);
    return Spectrogram(nf, nt, std::move(values), freq_max);
}

py::array_t<double> grid_to_array(const Spectrogram& spec) {
    py::array_t<double> out({spec.n_freq(), spec.n_time()});
    std::copy(spec.values().begin(), spec.values().end(), out.mutable_data());
    return out;
}

py::dict trace_record_to_dict(const TraceRecord& r) {
    py::dict d;
    d["step"] = r.step;
    d["t"] = r.t;
    d["drift_norm"] = r.drift_norm;
    d["ilvr_active"] = r.ilvr_active;
    d["lowpass_residual"] = r.lowpass_residual;
    d["lowpass_ref_norm"] = r.lowpass_ref_norm;
    return d;
}

SpeakerTemplate template_from_kwargs(double f0, int n_freq, int n_time, double freq_max,
                                     double vibrato_depth, double vibrato_rate,
                                     double vibrato_phase,
                                     const std::vector<double>& formant_centers,
                                     const std::vector<double>& formant_widths) {
    SpeakerTemplate tpl;
    tpl.f0 = f0;
    tpl.n_freq = n_freq;
    tpl.n_time = n_time;
    tpl.freq_max = freq_max;
    tpl.vibrato_depth = vibrato_depth;
    tpl.vibrato_rate = vibrato_rate;
    tpl.vibrato_phase = vibrato_phase;
    if (!formant_centers.empty()) tpl.formant_centers = formant_centers;
    if (!formant_widths.empty()) tpl.formant_widths = formant_widths;
    return tpl;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Guided diffusion sampling on spectrogram grids";

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ParseError>(m, "FileFormatError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Spectrogram>(m, "Spectrogram")
        .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                         double freq_max) { return grid_from_array(a, freq_max); }),
             py::arg("values"), py::arg("freq_max") = kDefaultFreqMax)
        .def_property_readonly("n_freq", &Spectrogram::n_freq)
        .def_property_readonly("n_time", &Spectrogram::n_time)
        .def_property_readonly("freq_max", &Spectrogram::freq_max)
        .def("to_numpy", &grid_to_array)
        .def("__repr__", [](const Spectrogram& s) {
            return "<Spectrogram " + std::to_string(s.n_freq()) + "x" +
                   std::to_string(s.n_time()) + ">";
        });

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("normal", &Rng::normal)
        .def_property_readonly("seed", &Rng::seed)
        .def_static("generator_name", &Rng::generator_name);

    py::class_<NoiseSchedule>(m, "NoiseSchedule")
        .def(py::init<double, double>(), py::arg("beta0") = 0.05, py::arg("beta_t") = 20.0)
        .def("beta_at", &NoiseSchedule::beta_at, py::arg("t"))
        .def("cumulative_n", &NoiseSchedule::cumulative_n, py::arg("t"))
        .def("gamma", &NoiseSchedule::gamma, py::arg("t"));

    py::class_<FilterSpec>(m, "FilterSpec")
        .def(py::init([](int n_f, int n_t, double kernel_a) {
                 FilterSpec fs{n_f, n_t, kernel_a};
                 validate(fs);
                 return fs;
             }),
             py::arg("n_f") = 1, py::arg("n_t") = 18, py::arg("kernel_a") = -0.5)
        .def_readonly("n_f", &FilterSpec::n_f)
        .def_readonly("n_t", &FilterSpec::n_t)
        .def_readonly("kernel_a", &FilterSpec::kernel_a);

    py::class_<GuidanceConfig>(m, "GuidanceConfig")
        .def(py::init([](const FilterSpec& filter, int stop_step, double temperature, int steps,
                         int speaker) {
                 GuidanceConfig cfg{filter, stop_step, temperature, steps, speaker};
                 validate(cfg);
                 return cfg;
             }),
             py::arg("filter") = FilterSpec{1, 18, -0.5}, py::arg("stop_step") = 6,
             py::arg("temperature") = 1.0, py::arg("steps") = 50, py::arg("speaker") = 0)
        .def_readonly("stop_step", &GuidanceConfig::stop_step)
        .def_readonly("temperature", &GuidanceConfig::temperature)
        .def_readonly("steps", &GuidanceConfig::steps)
        .def_readonly("filter", &GuidanceConfig::filter);

    py::class_<SpeakerTemplate>(m, "SpeakerTemplate")
        .def(py::init(&template_from_kwargs), py::arg("f0") = 220.0, py::arg("n_freq") = 512,
             py::arg("n_time") = 128, py::arg("freq_max") = 8000.0,
             py::arg("vibrato_depth") = 0.0, py::arg("vibrato_rate") = 0.0,
             py::arg("vibrato_phase") = 0.0,
             py::arg("formant_centers") = std::vector<double>{},
             py::arg("formant_widths") = std::vector<double>{})
        .def_readonly("f0", &SpeakerTemplate::f0)
        .def_readonly("n_freq", &SpeakerTemplate::n_freq)
        .def_readonly("n_time", &SpeakerTemplate::n_time);

    py::class_<ScoreModel, std::shared_ptr<ScoreModel>>(m, "ScoreModel");
    py::class_<AnalyticGaussianScore, ScoreModel, std::shared_ptr<AnalyticGaussianScore>>(
        m, "AnalyticGaussianScore")
        .def(py::init<Spectrogram, double, NoiseSchedule>(), py::arg("data_mean"),
             py::arg("data_std"), py::arg("schedule"))
        .def("evaluate", &AnalyticGaussianScore::evaluate, py::arg("x"), py::arg("mu"),
             py::arg("t"), py::arg("speaker") = 0);
    py::class_<TemplateScore, AnalyticGaussianScore, std::shared_ptr<TemplateScore>>(
        m, "TemplateScore")
        .def(py::init<const SpeakerTemplate&, double, NoiseSchedule>(), py::arg("template"),
             py::arg("sigma"), py::arg("schedule"));

    m.def("render", &render, py::arg("template"));
    m.def("make_prior", &make_prior, py::arg("template"), py::arg("blur_time_factor"));
    m.def("parse_template_spec", &parse_template_spec, py::arg("text"));

    m.def("new_spectrogram", &new_spectrogram, py::arg("n_freq"), py::arg("n_time"),
          py::arg("fill"), py::arg("freq_max") = kDefaultFreqMax);
    m.def("axpy", &axpy, py::arg("a"), py::arg("x"), py::arg("y"));
    m.def("gaussian_like", &gaussian_like, py::arg("template"), py::arg("rng"));

    m.def("downsample", &downsample, py::arg("spec"), py::arg("filter"));
    m.def("upsample", &upsample, py::arg("spec"), py::arg("target_freq"),
          py::arg("target_time"), py::arg("filter"));
    m.def("lowpass", &lowpass, py::arg("spec"), py::arg("filter"));

    m.def("forward_sample", &forward_sample, py::arg("y"), py::arg("mu"), py::arg("t"),
          py::arg("schedule"), py::arg("rng"));
    m.def("reverse_step", &reverse_step, py::arg("x"), py::arg("mu"), py::arg("i"),
          py::arg("config"), py::arg("schedule"), py::arg("model"));
    m.def("ilvr_step", &ilvr_step, py::arg("x_prime"), py::arg("y_next"), py::arg("filter"));
    m.def("align_reference", &align_reference, py::arg("y"), py::arg("target_time"));

    m.def(
        "sample_guided",
        [](const Spectrogram& mu, const Spectrogram& y, const GuidanceConfig& cfg,
           const NoiseSchedule& sched, const ScoreModel& model, std::uint64_t seed) {
            Rng rng(seed);
            auto [x0, trace] = sample_guided(mu, y, cfg, sched, model, rng);
            py::list rows;
            for (const TraceRecord& r : trace) rows.append(trace_record_to_dict(r));
            return py::make_tuple(x0, rows);
        },
        py::arg("mu"), py::arg("reference"), py::arg("config"), py::arg("schedule"),
        py::arg("model"), py::arg("seed"));
    m.def(
        "sample_unguided",
        [](const Spectrogram& mu, const GuidanceConfig& cfg, const NoiseSchedule& sched,
           const ScoreModel& model, std::uint64_t seed) {
            Rng rng(seed);
            return sample_unguided(mu, cfg, sched, model, rng);
        },
        py::arg("mu"), py::arg("config"), py::arg("schedule"), py::arg("model"),
        py::arg("seed"));

    m.def("cepstra",
          [](const Spectrogram& spec, int d) {
              const CepstraSequence c = cepstra(spec, d);
              py::array_t<double> out({static_cast<py::ssize_t>(c.size()),
                                       static_cast<py::ssize_t>(d)});
              auto buf = out.mutable_unchecked<2>();
              for (py::ssize_t i = 0; i < buf.shape(0); ++i) {
                  for (py::ssize_t k = 0; k < d; ++k) {
                      buf(i, k) = c.frames[i][k];
                  }
              }
              return out;
          },
          py::arg("spec"), py::arg("d") = 13);
    m.def("mcd_dtw", &mcd_dtw, py::arg("x"), py::arg("y"), py::arg("d") = 13);
    m.def(
        "estimate_f0",
        [](const Spectrogram& spec, double f0_min, double f0_max) {
            const F0Track track = estimate_f0(spec, f0_min, f0_max);
            py::array_t<double> f0(static_cast<py::ssize_t>(track.f0_hz.size()));
            py::array_t<bool> voiced(static_cast<py::ssize_t>(track.voiced.size()));
            for (std::size_t i = 0; i < track.f0_hz.size(); ++i) {
                f0.mutable_data()[i] = track.f0_hz[i];
                voiced.mutable_data()[i] = track.voiced[i];
            }
            return py::make_tuple(f0, voiced);
        },
        py::arg("spec"), py::arg("f0_min") = 50.0, py::arg("f0_max") = 400.0);
    m.def(
        "mae_f0",
        [](const Spectrogram& x, const Spectrogram& y) -> py::object {
            const auto v = mae_f0(x, y);
            if (!v) return py::none();
            return py::float_(*v);
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "band_distance",
        [](const Spectrogram& x, const Spectrogram& y, const FilterSpec& fs) -> py::object {
            const auto v = band_distance(x, y, fs);
            if (!v) return py::none();
            return py::float_(*v);
        },
        py::arg("x"), py::arg("y"), py::arg("filter"));

    m.def("read_spectrogram", &read_spectrogram, py::arg("path"));
    m.def("write_spectrogram", &write_spectrogram, py::arg("path"), py::arg("spec"));
    m.def("export_pgm", &export_pgm, py::arg("spec"), py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
