// specdiff: guided spectrogram diffusion sampling, synthetic speakers,
// low-pass previews and objective metrics from one binary.
#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "specdiff/diffusion.hpp"
#include "specdiff/errors.hpp"
#include "specdiff/io.hpp"
#include "specdiff/metrics.hpp"
#include "specdiff/synth.hpp"

namespace {

using namespace specdiff;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Per-cell seed derivation for batch runs: XOR the root with a hash of the
// cell indices, offset so cell (0,0) keeps the root seed itself (a one-cell
// sweep then matches a plain convert run exactly).
std::uint64_t cell_seed(std::uint64_t root, int i, int j) {
    const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
                              static_cast<std::uint32_t>(j);
    return root ^ splitmix64(key) ^ splitmix64(0);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ValidationError(flag + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty()) {
        throw ValidationError(flag + ": list is empty");
    }
    return out;
}

SpeakerTemplate score_template_from_config(const RunConfig& cfg, const Spectrogram& mu) {
    SpeakerTemplate tpl;
    tpl.f0 = cfg.score_f0;
    tpl.vibrato_depth = cfg.score_vibrato_depth;
    tpl.vibrato_rate = cfg.score_vibrato_rate;
    tpl.n_freq = mu.n_freq();
    tpl.n_time = mu.n_time();
    tpl.freq_max = mu.freq_max();
    return tpl;
}

std::unique_ptr<ScoreModel> make_score_model(const RunConfig& cfg, const Spectrogram& mu,
                                             const NoiseSchedule& sched) {
    if (cfg.score_model == "analytic") {
        return std::make_unique<AnalyticGaussianScore>(mu, cfg.score_sigma, sched);
    }
    return std::make_unique<TemplateScore>(score_template_from_config(cfg, mu),
                                           cfg.score_sigma, sched);
}

GuidanceConfig guidance_from_config(const RunConfig& cfg) {
    GuidanceConfig g;
    g.filter = cfg.filter;
    g.stop_step = cfg.stop_step;
    g.temperature = cfg.temperature;
    g.steps = cfg.steps;
    return g;
}

struct ConvertInputs {
    Spectrogram mu;
    Spectrogram reference; // aligned to mu's frame count
};

ConvertInputs load_convert_inputs(const RunConfig& cfg, const std::string& prior_path,
                                  const std::string& template_spec, int prior_blur,
                                  const std::string& reference_path) {
    std::optional<Spectrogram> mu;
    if (!prior_path.empty()) {
        mu = read_spectrogram(prior_path);
    } else {
        const SpeakerTemplate tpl = parse_template_spec(template_spec);
        mu = make_prior(tpl, prior_blur);
    }
    Spectrogram y = read_spectrogram(reference_path);
    if (y.n_freq() != mu->n_freq()) {
        throw ShapeError("reference has " + std::to_string(y.n_freq()) +
                         " frequency bins but the prior has " + std::to_string(mu->n_freq()));
    }
    y = align_reference_mode(y, mu->n_time(), cfg.align);
    return {std::move(*mu), std::move(y)};
}

std::string csv_cell(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream out;
    out.precision(10);
    out << *v;
    return out.str();
}

int count_voiced_pairs(const Spectrogram& x, const Spectrogram& y) {
    const auto [path, cost] = dtw(cepstra(x, 13), cepstra(y, 13));
    (void)cost;
    const F0Track fx = estimate_f0(x, F0Options{});
    const F0Track fy = estimate_f0(y, F0Options{});
    int n = 0;
    for (const auto& [i, j] : path.pairs) {
        if (fx.voiced[i] && fy.voiced[j]) ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// synth-speaker

int cmd_synth(const SpeakerTemplate& tpl, const std::string& out, const std::string& pgm,
              const std::string& prior_out, int prior_blur) {
    const Spectrogram grid = render(tpl);
    write_spectrogram(out, grid);
    if (!pgm.empty()) export_pgm(grid, pgm);
    if (!prior_out.empty()) write_spectrogram(prior_out, make_prior(tpl, prior_blur));
    std::cout << "synth-speaker: f0=" << tpl.f0 << " Hz, " << grid.n_freq() << "x"
              << grid.n_time() << " -> " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// convert

int cmd_convert(const RunConfig& cfg, const std::string& prior_path,
                const std::string& template_spec, int prior_blur,
                const std::string& reference_path, const std::string& out_path,
                const std::string& trace_path, std::uint64_t seed) {
    ConvertInputs in = load_convert_inputs(cfg, prior_path, template_spec, prior_blur,
                                           reference_path);
    const NoiseSchedule sched(cfg.beta0, cfg.beta_t);
    const GuidanceConfig gcfg = guidance_from_config(cfg);
    validate(gcfg);
    const std::unique_ptr<ScoreModel> model = make_score_model(cfg, in.mu, sched);
    Rng rng(seed);
    auto [x0, trace] = sample_guided(in.mu, in.reference, gcfg, sched, *model, rng);
    write_spectrogram(out_path, x0);
    if (!trace_path.empty()) write_trace_csv(trace, trace_path);
    std::cout << "convert: seed=" << seed << " generator=" << Rng::generator_name()
              << " steps=" << gcfg.steps << " stop=" << gcfg.stop_step << " filter="
              << gcfg.filter.n_f << "x" << gcfg.filter.n_t << " score=" << cfg.score_model
              << " -> " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// filter-preview

int cmd_filter_preview(const std::string& in_path, const FilterSpec& fs,
                       const std::string& out_path, const std::string& pgm_path) {
    validate(fs);
    const Spectrogram x = read_spectrogram(in_path);
    const Spectrogram filtered = lowpass(x, fs);
    write_spectrogram(out_path, filtered);
    if (!pgm_path.empty()) export_pgm(filtered, pgm_path);
    std::cout << "filter-preview: " << fs.n_f << "x" << fs.n_t << " applied to " << in_path
              << " -> " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalRow {
    int pair_id;
    std::optional<double> mcd;
    std::optional<double> mae;
    std::optional<double> band;
    int voiced_pairs = 0;
    std::string error;
};

int cmd_eval(const std::string& manifest_path, const std::string& out_path,
             const FilterSpec& band_fs, int d) {
    std::ifstream manifest(manifest_path);
    if (!manifest) {
        throw std::runtime_error("cannot open manifest: " + manifest_path);
    }
    std::vector<EvalRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(manifest, line)) {
        ++line_no;
        for (char& c : line) {
            if (c == ',' || c == '\t') c = ' ';
        }
        std::istringstream ss(line);
        std::string xp;
        std::string yp;
        if (!(ss >> xp)) continue; // blank line
        if (!(ss >> yp)) {
            rows.push_back({line_no, {}, {}, {}, 0, "manifest line needs two paths"});
            continue;
        }
        EvalRow row;
        row.pair_id = line_no;
        try {
            const Spectrogram x = read_spectrogram(xp);
            Spectrogram y = read_spectrogram(yp);
            row.mcd = mcd_dtw(x, y, d);
            row.mae = mae_f0(x, y);
            if (row.mae) row.voiced_pairs = count_voiced_pairs(x, y);
            if (y.n_freq() == x.n_freq()) {
                if (y.n_time() != x.n_time()) y = align_reference(y, x.n_time());
                row.band = band_distance(x, y, band_fs);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    std::ofstream out(out_path);
    if (!out) {
        throw std::runtime_error("cannot open report for writing: " + out_path);
    }
    out << "pair_id,mcd_db,mae_f0_hz,band_distance,voiced_frames,error\n";
    out.precision(10);
    double mcd_sum = 0.0;
    double mae_sum = 0.0;
    double band_sum = 0.0;
    int mcd_n = 0;
    int mae_n = 0;
    int band_n = 0;
    for (const EvalRow& r : rows) {
        std::string err = r.error;
        for (char& c : err) {
            if (c == ',' || c == '\n') c = ';';
        }
        out << r.pair_id << ',' << csv_cell(r.mcd) << ',' << csv_cell(r.mae) << ','
            << csv_cell(r.band) << ',' << r.voiced_pairs << ',' << err << '\n';
        if (r.mcd) { mcd_sum += *r.mcd; ++mcd_n; }
        if (r.mae) { mae_sum += *r.mae; ++mae_n; }
        if (r.band) { band_sum += *r.band; ++band_n; }
    }
    out << "mean," << (mcd_n ? csv_cell(mcd_sum / mcd_n) : "") << ','
        << (mae_n ? csv_cell(mae_sum / mae_n) : "") << ','
        << (band_n ? csv_cell(band_sum / band_n) : "") << ",,\n";
    std::cout << "eval: " << rows.size() << " pairs -> " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCell {
    int nt_index;
    int stop_index;
    int nt;
    int stop;
    std::uint64_t seed;
    std::optional<double> band;
    std::optional<double> mcd;
    std::optional<double> mae;
    std::string error;
};

int cmd_sweep(const RunConfig& cfg, const std::string& prior_path,
              const std::string& template_spec, int prior_blur,
              const std::string& reference_path, const std::vector<int>& nts,
              const std::vector<int>& stops, const std::string& out_dir,
              std::uint64_t root_seed, int jobs, int eval_nt) {
    ConvertInputs in = load_convert_inputs(cfg, prior_path, template_spec, prior_blur,
                                           reference_path);
    const NoiseSchedule sched(cfg.beta0, cfg.beta_t);
    const std::unique_ptr<ScoreModel> model = make_score_model(cfg, in.mu, sched);
    std::filesystem::create_directories(out_dir);
    const FilterSpec eval_fs{1, eval_nt, cfg.filter.kernel_a};

    std::vector<SweepCell> cells;
    for (std::size_t i = 0; i < nts.size(); ++i) {
        for (std::size_t j = 0; j < stops.size(); ++j) {
            SweepCell cell;
            cell.nt_index = static_cast<int>(i);
            cell.stop_index = static_cast<int>(j);
            cell.nt = nts[i];
            cell.stop = stops[j];
            cell.seed = cell_seed(root_seed, cell.nt_index, cell.stop_index);
            cells.push_back(cell);
        }
    }

    // Cells are independent runs; failures stay inside their cell.
    std::atomic<std::size_t> next{0};
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) break;
            SweepCell& cell = cells[k];
            try {
                RunConfig cell_cfg = cfg;
                cell_cfg.filter.n_t = cell.nt;
                cell_cfg.stop_step = cell.stop;
                const GuidanceConfig gcfg = guidance_from_config(cell_cfg);
                validate(gcfg);
                Rng rng(cell.seed);
                auto [x0, trace] = sample_guided(in.mu, in.reference, gcfg, sched, *model, rng);
                const std::string stem = (std::filesystem::path(out_dir) /
                                          ("nt" + std::to_string(cell.nt) + "_stop" +
                                           std::to_string(cell.stop)))
                                             .string();
                write_spectrogram(stem + ".spgr", x0);
                export_pgm(x0, stem + ".pgm");
                cell.band = band_distance(x0, in.reference, eval_fs);
                cell.mcd = mcd_dtw(x0, in.reference, 13);
                cell.mae = mae_f0(x0, in.reference);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();

    const std::string csv_path = (std::filesystem::path(out_dir) / "metrics.csv").string();
    std::ofstream out(csv_path);
    if (!out) {
        throw std::runtime_error("cannot open metrics CSV for writing: " + csv_path);
    }
    out << "nt,stop_step,seed,band_distance,mcd_db,mae_f0_hz,error\n";
    out.precision(10);
    for (const SweepCell& cell : cells) {
        std::string err = cell.error;
        for (char& c : err) {
            if (c == ',' || c == '\n') c = ';';
        }
        out << cell.nt << ',' << cell.stop << ',' << cell.seed << ',' << csv_cell(cell.band)
            << ',' << csv_cell(cell.mcd) << ',' << csv_cell(cell.mae) << ',' << err << '\n';
    }
    std::cout << "sweep: " << cells.size() << " cells (" << n_workers << " workers, root seed "
              << root_seed << ", generator " << Rng::generator_name() << ") -> " << out_dir
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// render

int cmd_render(const std::string& in_path, const std::string& out_path) {
    export_pgm(read_spectrogram(in_path), out_path);
    std::cout << "render: " << in_path << " -> " << out_path << "\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Guided diffusion sampling on spectrogram grids"};
    app.require_subcommand(1);

    // --- synth-speaker
    auto* synth = app.add_subcommand("synth-speaker", "Render a synthetic speaker template");
    double s_f0 = 220.0;
    int s_bins = 512;
    int s_frames = 128;
    double s_fmax = 8000.0;
    double s_vib_depth = 0.0;
    double s_vib_rate = 0.0;
    double s_vib_phase = 0.0;
    std::string s_formants;
    std::string s_out;
    std::string s_pgm;
    std::string s_prior_out;
    int s_prior_blur = 4;
    synth->add_option("--f0", s_f0, "Fundamental frequency, Hz");
    synth->add_option("--bins", s_bins, "Frequency bins");
    synth->add_option("--frames", s_frames, "Time frames");
    synth->add_option("--fmax", s_fmax, "Frequency axis upper bound, Hz");
    synth->add_option("--vibrato-depth", s_vib_depth, "Vibrato depth, Hz");
    synth->add_option("--vibrato-rate", s_vib_rate, "Vibrato rate, cycles/frame");
    synth->add_option("--vibrato-phase", s_vib_phase, "Vibrato phase, radians");
    synth->add_option("--formants", s_formants, "Formants as center:width[,center:width...]");
    synth->add_option("--out", s_out, "Output spectrogram file")->required();
    synth->add_option("--pgm", s_pgm, "Optional PGM image of the render");
    synth->add_option("--prior-out", s_prior_out, "Optional blurred prior output");
    synth->add_option("--prior-blur", s_prior_blur, "Time blur factor for --prior-out");

    // --- convert
    auto* convert = app.add_subcommand("convert", "Run guided sampling against a reference");
    std::string c_config;
    std::string c_prior;
    std::string c_template;
    int c_prior_blur = 4;
    std::string c_reference;
    std::string c_out;
    std::string c_trace;
    std::uint64_t c_seed = 0;
    bool c_seed_set = false;
    convert->add_option("--config", c_config, "Run config file");
    convert->add_option("--prior", c_prior, "Prior spectrogram file");
    convert->add_option("--template", c_template, "Synthesize the prior from a template spec");
    convert->add_option("--prior-blur", c_prior_blur, "Blur factor when using --template");
    convert->add_option("--reference", c_reference, "Reference spectrogram file")->required();
    convert->add_option("--out", c_out, "Output spectrogram file")->required();
    convert->add_option("--trace", c_trace, "Optional per-step trace CSV");
    convert->add_option("--seed", c_seed, "Seed override")->each([&](const std::string&) {
        c_seed_set = true;
    });

    // --- filter-preview
    auto* preview = app.add_subcommand("filter-preview", "Apply the low-pass filter to a file");
    std::string p_in;
    int p_nf = 1;
    int p_nt = 18;
    double p_kernel_a = -0.5;
    std::string p_out;
    std::string p_pgm;
    preview->add_option("--in", p_in, "Input spectrogram file")->required();
    preview->add_option("--nf", p_nf, "Frequency-axis factor");
    preview->add_option("--nt", p_nt, "Time-axis factor");
    preview->add_option("--kernel-a", p_kernel_a, "Bicubic kernel sharpness");
    preview->add_option("--out", p_out, "Filtered spectrogram output")->required();
    preview->add_option("--pgm", p_pgm, "Optional PGM image of the filtered grid");

    // --- eval
    auto* eval = app.add_subcommand("eval", "Compute objective metrics over file pairs");
    std::string e_pairs;
    std::string e_out;
    int e_nf = 1;
    int e_nt = 18;
    int e_dim = 13;
    eval->add_option("--pairs", e_pairs, "Manifest file, one 'x y' pair per line")->required();
    eval->add_option("--out", e_out, "Report CSV path")->required();
    eval->add_option("--nf", e_nf, "band_distance frequency factor");
    eval->add_option("--nt", e_nt, "band_distance time factor");
    eval->add_option("--dim", e_dim, "Cepstral order for MCD");

    // --- sweep
    auto* sweep = app.add_subcommand("sweep", "Grid of guided runs over (N_T, stop_step)");
    std::string w_config;
    std::string w_prior;
    std::string w_template;
    int w_prior_blur = 4;
    std::string w_reference;
    std::string w_nt;
    std::string w_stop;
    std::string w_out;
    std::uint64_t w_seed = 0;
    bool w_seed_set = false;
    int w_jobs = static_cast<int>(std::thread::hardware_concurrency());
    int w_eval_nt = 4;
    sweep->add_option("--config", w_config, "Run config file");
    sweep->add_option("--prior", w_prior, "Prior spectrogram file");
    sweep->add_option("--template", w_template, "Synthesize the prior from a template spec");
    sweep->add_option("--prior-blur", w_prior_blur, "Blur factor when using --template");
    sweep->add_option("--reference", w_reference, "Reference spectrogram file")->required();
    sweep->add_option("--nt", w_nt, "Comma list of time factors")->required();
    sweep->add_option("--stop", w_stop, "Comma list of stopping steps")->required();
    sweep->add_option("--out", w_out, "Output directory")->required();
    sweep->add_option("--seed", w_seed, "Root seed")->each([&](const std::string&) {
        w_seed_set = true;
    });
    sweep->add_option("--jobs", w_jobs, "Parallel workers (default: hardware threads)");
    sweep->add_option("--eval-nt", w_eval_nt, "Time factor of the evaluation band");

    // --- render
    auto* render_cmd = app.add_subcommand("render", "Write a PGM image of a spectrogram file");
    std::string r_in;
    std::string r_out;
    render_cmd->add_option("--in", r_in, "Input spectrogram file")->required();
    render_cmd->add_option("--out", r_out, "Output PGM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (*synth) {
        SpeakerTemplate tpl;
        tpl.f0 = s_f0;
        tpl.n_freq = s_bins;
        tpl.n_time = s_frames;
        tpl.freq_max = s_fmax;
        tpl.vibrato_depth = s_vib_depth;
        tpl.vibrato_rate = s_vib_rate;
        tpl.vibrato_phase = s_vib_phase;
        if (!s_formants.empty()) {
            tpl.formant_centers.clear();
            tpl.formant_widths.clear();
            std::stringstream ss(s_formants);
            std::string pair;
            while (std::getline(ss, pair, ',')) {
                const std::size_t colon = pair.find(':');
                if (colon == std::string::npos) {
                    throw ValidationError("--formants entries must be center:width");
                }
                tpl.formant_centers.push_back(std::stod(pair.substr(0, colon)));
                tpl.formant_widths.push_back(std::stod(pair.substr(colon + 1)));
            }
        }
        return cmd_synth(tpl, s_out, s_pgm, s_prior_out, s_prior_blur);
    }
    if (*convert) {
        if (c_prior.empty() == c_template.empty()) {
            throw ValidationError("convert needs exactly one of --prior or --template");
        }
        const RunConfig cfg = c_config.empty() ? RunConfig{} : load_config(c_config);
        return cmd_convert(cfg, c_prior, c_template, c_prior_blur, c_reference, c_out, c_trace,
                           c_seed_set ? c_seed : cfg.seed);
    }
    if (*preview) {
        return cmd_filter_preview(p_in, FilterSpec{p_nf, p_nt, p_kernel_a}, p_out, p_pgm);
    }
    if (*eval) {
        return cmd_eval(e_pairs, e_out, FilterSpec{e_nf, e_nt, -0.5}, e_dim);
    }
    if (*sweep) {
        if (w_prior.empty() == w_template.empty()) {
            throw ValidationError("sweep needs exactly one of --prior or --template");
        }
        const RunConfig cfg = w_config.empty() ? RunConfig{} : load_config(w_config);
        return cmd_sweep(cfg, w_prior, w_template, w_prior_blur, w_reference,
                         parse_int_list(w_nt, "--nt"), parse_int_list(w_stop, "--stop"), w_out,
                         w_seed_set ? w_seed : cfg.seed, w_jobs, w_eval_nt);
    }
    if (*render_cmd) {
        return cmd_render(r_in, r_out);
    }
    return kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ParseError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}
