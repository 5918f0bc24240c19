#include "specdiff/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "specdiff/errors.hpp"

namespace specdiff {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'G', 'R'};

void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_f32(std::string& buf, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u32(buf, bits);
}

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(buf, bits);
}

class Reader {
public:
    Reader(const std::string& data) : data_(data) {}

    bool take(void* out, std::size_t n) {
        if (pos_ + n > data_.size()) return false;
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
        return true;
    }

    std::uint16_t u16() {
        unsigned char b[2];
        require(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t u32() {
        unsigned char b[4];
        require(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64() {
        std::uint64_t v = u32();
        return v | (static_cast<std::uint64_t>(u32()) << 32);
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void require(void* out, std::size_t n) {
        if (!take(out, n)) {
            throw ParseError(ParseError::Kind::TruncatedPayload,
                             "spectrogram file truncated in header");
        }
    }

    const std::string& data_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path);
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw std::runtime_error("failed writing file: " + path);
    }
}

} // namespace

void write_spectrogram(const std::string& path, const Spectrogram& spec) {
    std::string buf;
    buf.reserve(22 + 4 * spec.size());
    buf.append(kMagic, 4);
    put_u16(buf, kSpectrogramFileVersion);
    put_u32(buf, static_cast<std::uint32_t>(spec.n_freq()));
    put_u32(buf, static_cast<std::uint32_t>(spec.n_time()));
    put_f64(buf, spec.freq_max());
    for (double v : spec.values()) {
        put_f32(buf, static_cast<float>(v));
    }
    write_file(path, buf);
}

Spectrogram read_spectrogram(const std::string& path) {
    const std::string data = read_file(path);
    Reader r(data);
    char magic[4];
    if (!r.take(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw ParseError(ParseError::Kind::BadMagic, "bad magic in " + path +
                                                     " (not a SPGR spectrogram file)");
    }
    const std::uint16_t version = r.u16();
    if (version != kSpectrogramFileVersion) {
        throw ParseError(ParseError::Kind::VersionMismatch,
                         "unsupported spectrogram file version " + std::to_string(version));
    }
    const std::uint32_t n_freq = r.u32();
    const std::uint32_t n_time = r.u32();
    const double freq_max = r.f64();
    if (n_freq < 1 || n_time < 1 || !std::isfinite(freq_max) || freq_max <= 0.0) {
        throw ParseError(ParseError::Kind::Malformed, "spectrogram header has invalid fields");
    }
    const std::size_t count = static_cast<std::size_t>(n_freq) * n_time;
    if (r.remaining() != count * 4) {
        throw ParseError(ParseError::Kind::TruncatedPayload,
                         "truncated payload: expected " + std::to_string(count * 4) +
                             " bytes, found " + std::to_string(r.remaining()));
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const float v = r.f32();
        if (!std::isfinite(v)) {
            throw ParseError(ParseError::Kind::Malformed, "non-finite value in payload");
        }
        values[i] = static_cast<double>(v);
    }
    return Spectrogram(static_cast<int>(n_freq), static_cast<int>(n_time), std::move(values),
                       freq_max);
}

void export_pgm(const Spectrogram& spec, const std::string& path) {
    double lo = spec.values()[0];
    double hi = lo;
    for (double v : spec.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    std::string buf;
    buf += "P5\n" + std::to_string(spec.n_time()) + " " + std::to_string(spec.n_freq()) + "\n255\n";
    buf.reserve(buf.size() + spec.size());
    for (int f = spec.n_freq() - 1; f >= 0; --f) { // top row = highest frequency
        for (int t = 0; t < spec.n_time(); ++t) {
            int pixel = 128;
            if (range > 0.0) {
                pixel = static_cast<int>(std::lround(255.0 * (spec.at(f, t) - lo) / range));
            }
            buf.push_back(static_cast<char>(std::clamp(pixel, 0, 255)));
        }
    }
    write_file(path, buf);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError("config key '" + key + "' has non-numeric value '" + value + "'");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError("config key '" + key + "' has non-integer value '" + value + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError("config key '" + key + "' has invalid unsigned value '" + value + "'");
    }
    return v;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
        handlers = {
            {"schedule.beta0", [&](const std::string& k, const std::string& v) { cfg.beta0 = parse_double(k, v); }},
            {"schedule.betaT", [&](const std::string& k, const std::string& v) { cfg.beta_t = parse_double(k, v); }},
            {"schedule.steps", [&](const std::string& k, const std::string& v) { cfg.steps = static_cast<int>(parse_int(k, v)); }},
            {"guidance.n_f", [&](const std::string& k, const std::string& v) { cfg.filter.n_f = static_cast<int>(parse_int(k, v)); }},
            {"guidance.n_t", [&](const std::string& k, const std::string& v) { cfg.filter.n_t = static_cast<int>(parse_int(k, v)); }},
            {"guidance.kernel_a", [&](const std::string& k, const std::string& v) { cfg.filter.kernel_a = parse_double(k, v); }},
            {"guidance.stop_step", [&](const std::string& k, const std::string& v) { cfg.stop_step = static_cast<int>(parse_int(k, v)); }},
            {"guidance.temperature", [&](const std::string& k, const std::string& v) { cfg.temperature = parse_double(k, v); }},
            {"guidance.align",
             [&](const std::string& k, const std::string& v) {
                 if (v == "stretch") cfg.align = AlignMode::Stretch;
                 else if (v == "pad") cfg.align = AlignMode::Pad;
                 else if (v == "crop") cfg.align = AlignMode::Crop;
                 else throw ValidationError("config key '" + k + "' must be stretch|pad|crop, got '" + v + "'");
             }},
            {"score.model",
             [&](const std::string& k, const std::string& v) {
                 if (v != "analytic" && v != "template") {
                     throw ValidationError("config key '" + k + "' must be analytic|template, got '" + v + "'");
                 }
                 cfg.score_model = v;
             }},
            {"score.sigma", [&](const std::string& k, const std::string& v) { cfg.score_sigma = parse_double(k, v); }},
            {"score.f0", [&](const std::string& k, const std::string& v) { cfg.score_f0 = parse_double(k, v); }},
            {"score.vibrato_depth", [&](const std::string& k, const std::string& v) { cfg.score_vibrato_depth = parse_double(k, v); }},
            {"score.vibrato_rate", [&](const std::string& k, const std::string& v) { cfg.score_vibrato_rate = parse_double(k, v); }},
            {"run.seed", [&](const std::string& k, const std::string& v) { cfg.seed = parse_u64(k, v); }},
        };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "schedule" && section != "guidance" && section != "score" &&
                section != "run") {
                throw ValidationError("config has unknown section '" + section + "'");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ValidationError("config key '" + key + "' appears before any [section]");
        }
        const std::string full = section + "." + key;
        auto it = handlers.find(full);
        if (it == handlers.end()) {
            throw ValidationError("config has unknown key '" + full + "'");
        }
        it->second(full, value);
    }

    // Cross-field constraints, each named after its key.
    if (!(cfg.beta0 > 0.0)) throw ValidationError("config key 'schedule.beta0' must be > 0");
    if (!(cfg.beta_t > cfg.beta0)) {
        throw ValidationError("config key 'schedule.betaT' must exceed beta0");
    }
    if (cfg.steps < 1) throw ValidationError("config key 'schedule.steps' must be >= 1");
    if (cfg.filter.n_f < 1) throw ValidationError("config key 'guidance.n_f' must be >= 1");
    if (cfg.filter.n_t < 1) throw ValidationError("config key 'guidance.n_t' must be >= 1");
    if (cfg.stop_step < 0 || cfg.stop_step > cfg.steps) {
        throw ValidationError("config key 'guidance.stop_step' must lie in [0, steps]");
    }
    if (!(cfg.temperature > 0.0)) {
        throw ValidationError("config key 'guidance.temperature' must be > 0");
    }
    if (!(cfg.score_sigma > 0.0)) {
        throw ValidationError("config key 'score.sigma' must be > 0");
    }
    if (!(cfg.score_f0 > 0.0)) {
        throw ValidationError("config key 'score.f0' must be > 0");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

} // namespace specdiff
