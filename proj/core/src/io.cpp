#include "mubsa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace mubsa {
namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

std::string format_complex(const std::complex<double>& z) {
    return format_double(z.real()) + "," + format_double(z.imag());
}

std::complex<double> parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw std::runtime_error("malformed complex entry: " + text);
    }
    return {parse_double(text.substr(0, comma)),
            parse_double(text.substr(comma + 1))};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(line.substr(start));
            break;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

void write_block(std::ostream& out, const Eigen::MatrixXcd& m, int tag) {
    out << m.rows() << ' ' << tag << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ';';
            out << format_complex(m(r, c));
        }
        out << '\n';
    }
}

Eigen::MatrixXcd read_block(std::istream& in, int expected_cols, int* tag) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing header");
    std::istringstream header(line);
    int d = 0, k = 0;
    if (!(header >> d >> k) || d < 1) {
        throw std::runtime_error("malformed block header: " + line);
    }
    if (tag) *tag = k;
    const int cols = expected_cols > 0 ? expected_cols : d;
    Eigen::MatrixXcd m(d, cols);
    for (int r = 0; r < d; ++r) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("truncated matrix block");
        }
        const auto parts = split(trimmed(line), ';');
        if (static_cast<int>(parts.size()) != cols) {
            throw std::runtime_error("row has wrong entry count");
        }
        for (int c = 0; c < cols; ++c) m(r, c) = parse_complex(parts[c]);
    }
    return m;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc()) throw std::runtime_error("format failure");
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    const std::string t = trimmed(text);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw std::runtime_error("malformed number: " + text);
    }
    return value;
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m,
                       int tag) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("matrix blocks are square");
    }
    auto out = open_out(path);
    write_block(out, m, tag);
}

Eigen::MatrixXcd read_matrix_file(const std::string& path, int* tag) {
    auto in = open_in(path);
    return read_block(in, 0, tag);
}

void write_family_file(const std::string& path, const MubFamily& family) {
    auto out = open_out(path);
    for (int k = 1; k <= family.dim() + 1; ++k) {
        write_block(out, family.base(k), k);
    }
}

MubFamily read_family_file(const std::string& path) {
    auto in = open_in(path);
    std::vector<Eigen::MatrixXcd> bases;
    int tag = 0;
    Eigen::MatrixXcd first = read_block(in, 0, &tag);
    const int d = static_cast<int>(first.rows());
    bases.push_back(std::move(first));
    for (int k = 2; k <= d + 1; ++k) {
        bases.push_back(read_block(in, d, &tag));
    }
    return MubFamily::from_bases(bases);
}

void write_vector_file(const std::string& path, const Eigen::VectorXcd& v) {
    auto out = open_out(path);
    out << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out << format_complex(v[i]) << '\n';
    }
}

Eigen::VectorXcd read_vector_file(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing header");
    const int d = std::stoi(line);
    if (d < 1) throw std::runtime_error("malformed vector header");
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("truncated vector file");
        }
        v[i] = parse_complex(trimmed(line));
    }
    return v;
}

void write_samples_file(const std::string& path,
                        const Eigen::MatrixXcd& samples) {
    auto out = open_out(path);
    out << samples.cols() << ' ' << samples.rows() << '\n';
    for (Eigen::Index s = 0; s < samples.cols(); ++s) {
        for (Eigen::Index r = 0; r < samples.rows(); ++r) {
            if (r) out << ';';
            out << format_complex(samples(r, s));
        }
        out << '\n';
    }
}

Eigen::MatrixXcd read_samples_file(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing header");
    std::istringstream header(line);
    Eigen::Index count = 0, d = 0;
    if (!(header >> count >> d) || count < 1 || d < 1) {
        throw std::runtime_error("malformed samples header");
    }
    Eigen::MatrixXcd samples(d, count);
    for (Eigen::Index s = 0; s < count; ++s) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("truncated samples file");
        }
        const auto parts = split(trimmed(line), ';');
        if (static_cast<Eigen::Index>(parts.size()) != d) {
            throw std::runtime_error("sample has wrong entry count");
        }
        for (Eigen::Index r = 0; r < d; ++r) {
            samples(r, s) = parse_complex(parts[r]);
        }
    }
    return samples;
}

void write_spectra_file(const std::string& path,
                        const CompleteSpectra& spectra) {
    auto out = open_out(path);
    out << spectra.d << ',' << format_double(spectra.trace) << '\n';
    for (int k = 0; k <= spectra.d; ++k) {
        for (int j = 0; j < spectra.d; ++j) {
            if (j) out << ',';
            out << format_double(spectra.vectors(k, j));
        }
        out << '\n';
    }
}

CompleteSpectra read_spectra_file(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing header");
    const auto header = split(trimmed(line), ',');
    if (header.size() != 2) throw std::runtime_error("malformed spectra header");
    CompleteSpectra spectra;
    spectra.d = std::stoi(header[0]);
    spectra.trace = parse_double(header[1]);
    if (spectra.d < 1) throw std::runtime_error("malformed spectra header");
    spectra.vectors.resize(spectra.d + 1, spectra.d);
    for (int k = 0; k <= spectra.d; ++k) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("truncated spectra file");
        }
        const auto parts = split(trimmed(line), ',');
        if (static_cast<int>(parts.size()) != spectra.d) {
            throw std::runtime_error("spectra row has wrong entry count");
        }
        for (int j = 0; j < spectra.d; ++j) {
            spectra.vectors(k, j) = parse_double(parts[j]);
        }
    }
    return spectra;
}

void write_protocol_config(const std::string& path,
                           const ProtocolConfig& config) {
    auto out = open_out(path);
    out << "d = " << config.d << '\n';
    out << "n = " << config.n << '\n';
    out << "slots_per_user = " << config.slots_per_user << '\n';
    out << "rounds = " << config.rounds << '\n';
    out << "noise_power = " << format_double(config.noise_power) << '\n';
    out << "quant_mag = " << config.quant_magnitude_levels << '\n';
    out << "quant_phase = " << config.quant_phase_levels << '\n';
    out << "gap = " << format_double(config.gap) << '\n';
    out << "replicates = " << config.replicates << '\n';
    if (config.has_seed) out << "seed = " << config.seed << '\n';
}

ProtocolConfig read_protocol_config(const std::string& path) {
    auto in = open_in(path);
    ProtocolConfig config;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("malformed config line: " + line);
        }
        const std::string key = trimmed(t.substr(0, eq));
        const std::string value = trimmed(t.substr(eq + 1));
        if (key == "d") {
            config.d = std::stoi(value);
        } else if (key == "n") {
            config.n = std::stoi(value);
        } else if (key == "slots_per_user") {
            config.slots_per_user = std::stoi(value);
        } else if (key == "rounds") {
            config.rounds = std::stoi(value);
        } else if (key == "noise_power") {
            config.noise_power = parse_double(value);
        } else if (key == "quant_mag") {
            config.quant_magnitude_levels = std::stoi(value);
        } else if (key == "quant_phase") {
            config.quant_phase_levels = std::stoi(value);
        } else if (key == "gap") {
            config.gap = parse_double(value);
        } else if (key == "replicates") {
            config.replicates = std::stoi(value);
        } else if (key == "seed") {
            config.seed = std::stoull(value);
            config.has_seed = true;
        } else {
            throw std::runtime_error("unknown config key: " + key);
        }
    }
    return config;
}

void write_metrics_file(const std::string& path,
                        const ProtocolMetrics& metrics) {
    auto out = open_out(path);
    out << "kind,sender,receiver,accuracy,ci_low,ci_high,rounds_to_two_thirds,"
           "estimator_bias,estimator_variance,variance_bound_ratio,"
           "quantization_error,foreign_energy\n";
    for (const auto& p : metrics.pairs) {
        out << "pair," << p.sender << ',' << p.receiver << ','
            << format_double(p.accuracy) << ',' << format_double(p.ci_low)
            << ',' << format_double(p.ci_high) << ",,,,,,\n";
    }
    out << "summary,,," << format_double(metrics.min_accuracy) << ",,,"
        << metrics.rounds_to_two_thirds << ','
        << format_double(metrics.estimator_bias) << ','
        << format_double(metrics.estimator_variance) << ','
        << format_double(metrics.variance_bound_ratio) << ','
        << format_double(metrics.quantization_error) << ','
        << format_double(metrics.mean_foreign_energy) << '\n';
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path + " for digest");
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char hex[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        hex[i] = digits[hash & 0xf];
        hash >>= 4;
    }
    hex[16] = '\0';
    return std::string(hex);
}

} // namespace mubsa
