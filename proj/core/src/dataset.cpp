#include "fsru/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fsru/checkpoint.hpp"
#include "fsru/fft.hpp"
#include "fsru/rng.hpp"

namespace fsru {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_bands(const std::vector<int>& bands, int length, const char* what) {
    for (int b : bands) {
        if (b < 0 || b >= length / 2)
            throw std::invalid_argument(
                std::string("invalid band index ") + std::to_string(b) +
                " >= " + std::to_string(length / 2) + " for " + what);
    }
}

// Sum of unit cosines at the planted bins with random phases, plus noise.
std::vector<double> planted_signal(const std::vector<int>& bands, int length,
                                   double noise, Rng& rng) {
    std::vector<double> signal(length, 0.0);
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(bands.size()));
    for (int b : bands) {
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        for (int i = 0; i < length; ++i)
            signal[i] += amplitude * std::cos(2.0 * kPi * b * i / length + phase);
    }
    for (int i = 0; i < length; ++i) signal[i] += noise * rng.normal();
    return signal;
}

// Maps a real signal to [0, 1] by its own range.
std::vector<double> to_unit_range(const std::vector<double>& signal) {
    double lo = signal[0], hi = signal[0];
    for (double v : signal) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    std::vector<double> out(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i)
        out[i] = span > 0.0 ? (signal[i] - lo) / span : 0.5;
    return out;
}

// Energy of a mean-removed real signal at the given bins.
double band_energy(const std::vector<double>& signal,
                   const std::vector<int>& bands) {
    const std::size_t n = signal.size();
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(n);
    double energy = 0.0;
    for (int b : bands) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * kPi * b * static_cast<double>(i) /
                               static_cast<double>(n);
            re += (signal[i] - mean) * std::cos(ang);
            im += (signal[i] - mean) * std::sin(ang);
        }
        energy += re * re + im * im;
    }
    return energy;
}

}  // namespace

namespace base64 {

namespace {
constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    throw std::invalid_argument("base64: bad character");
}
}  // namespace

std::string encode(const std::vector<double>& values) {
    std::vector<unsigned char> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &values[i], 8);
        for (int b = 0; b < 8; ++b)
            bytes[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    }
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        const bool has2 = i + 1 < bytes.size(), has3 = i + 2 < bytes.size();
        if (has2) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (has3) chunk |= bytes[i + 2];
        out.push_back(kAlphabet[(chunk >> 18) & 63]);
        out.push_back(kAlphabet[(chunk >> 12) & 63]);
        out.push_back(has2 ? kAlphabet[(chunk >> 6) & 63] : '=');
        out.push_back(has3 ? kAlphabet[chunk & 63] : '=');
    }
    return out;
}

std::vector<double> decode(const std::string& text) {
    std::vector<unsigned char> bytes;
    bytes.reserve(text.size() / 4 * 3);
    std::uint32_t chunk = 0;
    int have = 0;
    for (char c : text) {
        if (c == '=') break;
        chunk = (chunk << 6) | static_cast<std::uint32_t>(decode_char(c));
        if (++have == 4) {
            bytes.push_back((chunk >> 16) & 0xff);
            bytes.push_back((chunk >> 8) & 0xff);
            bytes.push_back(chunk & 0xff);
            have = 0;
            chunk = 0;
        }
    }
    if (have == 2) {
        bytes.push_back((chunk >> 4) & 0xff);
    } else if (have == 3) {
        bytes.push_back((chunk >> 10) & 0xff);
        bytes.push_back((chunk >> 2) & 0xff);
    }
    if (bytes.size() % 8 != 0)
        throw std::invalid_argument("base64: payload is not a whole number of f64");
    std::vector<double> values(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        std::memcpy(&values[i], &bits, 8);
    }
    return values;
}

}  // namespace base64

std::string render_dataset(const Dataset& dataset) {
    std::ostringstream out;
    out << "# fsru-dataset v1 text_len=" << dataset.text_len
        << " grid_h=" << dataset.grid_h << " grid_w=" << dataset.grid_w
        << " patch_size=" << dataset.patch_size
        << " vocab=" << dataset.vocab_size << "\n";
    for (const Sample& s : dataset.samples) {
        out << s.label << '\t';
        for (std::size_t i = 0; i < s.text.token_ids.size(); ++i) {
            if (i) out << ' ';
            out << s.text.token_ids[i];
        }
        out << '\t' << base64::encode(s.image.pixels) << '\n';
    }
    return out.str();
}

Dataset parse_dataset(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# fsru-dataset v1", 0) != 0)
        throw std::runtime_error("dataset: missing '# fsru-dataset v1' header");
    Dataset dataset;
    {
        std::istringstream header(line);
        std::string token;
        while (header >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq);
            const int value = std::stoi(token.substr(eq + 1));
            if (key == "text_len") dataset.text_len = value;
            else if (key == "grid_h") dataset.grid_h = value;
            else if (key == "grid_w") dataset.grid_w = value;
            else if (key == "patch_size") dataset.patch_size = value;
            else if (key == "vocab") dataset.vocab_size = value;
        }
    }
    if (dataset.text_len <= 0 || dataset.grid_h <= 0 || dataset.grid_w <= 0 ||
        dataset.patch_size <= 0 || dataset.vocab_size <= 0)
        throw std::runtime_error("dataset: incomplete header dimensions");

    const int pixel_count = dataset.grid_h * dataset.grid_w *
                            dataset.patch_size * dataset.patch_size;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos
                              ? std::string::npos
                              : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos)
            throw std::runtime_error("dataset: malformed record at line " +
                                     std::to_string(line_no));
        Sample sample;
        sample.label = std::stoi(line.substr(0, tab1));
        if (sample.label != 0 && sample.label != 1)
            throw std::runtime_error("dataset: label must be 0/1 at line " +
                                     std::to_string(line_no));
        std::istringstream ids(line.substr(tab1 + 1, tab2 - tab1 - 1));
        int id;
        while (ids >> id) sample.text.token_ids.push_back(id);
        if (static_cast<int>(sample.text.token_ids.size()) != dataset.text_len)
            throw std::runtime_error("dataset: token count mismatch at line " +
                                     std::to_string(line_no));
        sample.text.mask.assign(sample.text.token_ids.size(), 1);
        sample.image.grid_h = dataset.grid_h;
        sample.image.grid_w = dataset.grid_w;
        sample.image.patch_size = dataset.patch_size;
        sample.image.pixels = base64::decode(line.substr(tab2 + 1));
        if (static_cast<int>(sample.image.pixels.size()) != pixel_count)
            throw std::runtime_error("dataset: pixel count mismatch at line " +
                                     std::to_string(line_no));
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

Dataset generate_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.sample_count < 4)
        throw std::invalid_argument("generate: sample count must be >= 4");
    check_bands(spec.text_bands_rumor, spec.text_len, "text");
    check_bands(spec.text_bands_nonrumor, spec.text_len, "text");
    check_bands(spec.image_bands_rumor, spec.patch_count(), "image");
    check_bands(spec.image_bands_nonrumor, spec.patch_count(), "image");

    Rng rng(seed);
    const int rumor_count = static_cast<int>(
        std::lround(spec.class_balance * spec.sample_count));
    std::vector<int> labels(spec.sample_count, 0);
    std::fill(labels.begin(), labels.begin() + rumor_count, 1);
    rng.shuffle(labels);

    Dataset dataset;
    dataset.text_len = spec.text_len;
    dataset.grid_h = spec.grid_h;
    dataset.grid_w = spec.grid_w;
    dataset.patch_size = spec.patch_size;
    dataset.vocab_size = spec.vocab_size;
    dataset.samples.reserve(spec.sample_count);

    const int pp = spec.patch_size * spec.patch_size;
    for (int label : labels) {
        Sample sample;
        sample.label = label;

        const auto& text_bands =
            label == 1 ? spec.text_bands_rumor : spec.text_bands_nonrumor;
        const std::vector<double> text_signal =
            planted_signal(text_bands, spec.text_len, spec.noise, rng);
        const std::vector<double> text_unit = to_unit_range(text_signal);
        sample.text.token_ids.resize(spec.text_len);
        sample.text.mask.assign(spec.text_len, 1);
        for (int i = 0; i < spec.text_len; ++i)
            sample.text.token_ids[i] = static_cast<int>(
                std::lround(text_unit[i] * (spec.vocab_size - 1)));

        const bool image_agrees = rng.uniform() < spec.consistency;
        const int image_label = image_agrees ? label : 1 - label;
        const auto& image_bands = image_label == 1 ? spec.image_bands_rumor
                                                   : spec.image_bands_nonrumor;
        const std::vector<double> patch_signal =
            planted_signal(image_bands, spec.patch_count(), spec.noise, rng);
        double peak = 1e-12;
        for (double v : patch_signal) peak = std::max(peak, std::abs(v));
        sample.image.grid_h = spec.grid_h;
        sample.image.grid_w = spec.grid_w;
        sample.image.patch_size = spec.patch_size;
        sample.image.pixels.resize(
            static_cast<std::size_t>(spec.patch_count()) * pp);
        for (int i = 0; i < spec.patch_count(); ++i) {
            const double base = 0.5 + 0.45 * patch_signal[i] / peak;
            for (int p = 0; p < pp; ++p) {
                const double jitter = 0.02 * spec.noise * rng.normal();
                sample.image.pixels[static_cast<std::size_t>(i) * pp + p] =
                    std::clamp(base + jitter, 0.0, 1.0);
            }
        }
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

void generate(const SyntheticSpec& spec, std::uint64_t seed,
              const std::string& path) {
    write_file_atomic(path, render_dataset(generate_dataset(spec, seed)));
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_dataset(text);
}

double threshold_oracle_accuracy(const Dataset& dataset,
                                 const SyntheticSpec& spec) {
    if (dataset.samples.empty()) return 0.0;
    long correct = 0;
    const int pp = dataset.patch_size * dataset.patch_size;
    for (const Sample& sample : dataset.samples) {
        std::vector<double> text_signal(sample.text.token_ids.begin(),
                                        sample.text.token_ids.end());
        const double t1 = band_energy(text_signal, spec.text_bands_rumor);
        const double t0 = band_energy(text_signal, spec.text_bands_nonrumor);

        std::vector<double> patch_means(dataset.grid_h * dataset.grid_w, 0.0);
        for (std::size_t i = 0; i < patch_means.size(); ++i) {
            double acc = 0.0;
            for (int p = 0; p < pp; ++p)
                acc += sample.image.pixels[i * static_cast<std::size_t>(pp) + p];
            patch_means[i] = acc / pp;
        }
        const double v1 = band_energy(patch_means, spec.image_bands_rumor);
        const double v0 = band_energy(patch_means, spec.image_bands_nonrumor);

        const double margin = (t1 - t0) / (t1 + t0 + 1e-12) +
                              (v1 - v0) / (v1 + v0 + 1e-12);
        const int predicted = margin > 0.0 ? 1 : 0;
        correct += predicted == sample.label;
    }
    return static_cast<double>(correct) /
           static_cast<double>(dataset.samples.size());
}

}  // namespace fsru
