#include "support.hpp"

#include "crn/errors.hpp"
#include "crn/gallery.hpp"

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

namespace fs = std::filesystem;

namespace crnscale {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

void print_diagnostics(const std::string& path, const std::vector<crn::io::ParseDiagnostic>& diags) {
    for (const auto& d : diags) {
        std::cerr << path << ":" << crn::io::to_string(d) << "\n";
    }
}

template <class T>
T take(crn::io::ParseResult<T> r, const std::string& path) {
    print_diagnostics(path, r.diagnostics);
    if (!r.ok() || r.has_errors()) {
        throw DiagnosticsFailed(path + " has errors");
    }
    return std::move(*r.value);
}

std::mutex progress_mutex;

}  // namespace

InputFile read_input(const std::string& path) {
    InputFile in;
    in.path = path;
    std::ifstream f(path, std::ios::binary);
    if (f) {
        std::ostringstream os;
        os << f.rdbuf();
        in.text = os.str();
        return in;
    }
    const std::string base = fs::path(path).filename().string();
    try {
        in.text = std::string(crn::gallery::file(base));
        in.from_gallery = true;
        std::cerr << "note: " << path << " not found; using built-in " << base << "\n";
        return in;
    } catch (const std::out_of_range&) {
        throw UsageError("cannot read " + path);
    }
}

crn::Network load_network(const InputFile& in, bool strict) {
    crn::io::NetworkParseOptions opt;
    opt.strict = strict;
    return take(crn::io::parse_network(in.text, opt), in.path);
}

crn::ScalingSpec load_scaling(const InputFile& in, const crn::Network& network) {
    return take(crn::io::parse_scaling(in.text, network), in.path);
}

crn::State resolve_initial_state(const crn::Network& network, const std::string& network_path,
                                 bool network_from_gallery, const std::string& x0, const std::string& init_path,
                                 std::map<std::string, std::string>& inputs) {
    const std::size_t n = network.num_species();
    crn::State x(n, 0);
    if (!x0.empty()) {
        std::vector<std::string> parts;
        std::stringstream ss(x0);
        for (std::string p; std::getline(ss, p, ',');) {
            parts.push_back(trim(p));
        }
        bool named = x0.find('=') != std::string::npos;
        if (!named && parts.size() != n) {
            throw UsageError("--x0 has " + std::to_string(parts.size()) + " entries, network has " +
                             std::to_string(n) + " species");
        }
        for (std::size_t j = 0; j < parts.size(); ++j) {
            std::string value = parts[j];
            std::size_t i = j;
            if (named) {
                auto [name, v] = split_assignment(parts[j], "--x0");
                auto idx = network.species_index(name);
                if (!idx) {
                    throw UsageError("--x0: unknown species '" + name + "'");
                }
                i = *idx;
                value = v;
            }
            try {
                std::size_t used = 0;
                long long c = std::stoll(value, &used);
                if (used != value.size() || c < 0) {
                    throw std::invalid_argument(value);
                }
                x[i] = c;
            } catch (const std::logic_error&) {
                throw UsageError("--x0: '" + value + "' is not a nonnegative integer");
            }
        }
        return x;
    }
    std::string path = init_path;
    if (path.empty()) {
        fs::path sibling = fs::path(network_path).replace_extension(".init");
        if (fs::exists(sibling)) {
            path = sibling.string();
            std::cerr << "note: initial state from " << path << "\n";
        } else if (network_from_gallery) {
            path = sibling.filename().string();
            try {
                crn::gallery::file(path);
            } catch (const std::out_of_range&) {
                return x;
            }
        } else {
            return x;
        }
    }
    InputFile in = read_input(path);
    inputs[in.path] = crn::report::fnv1a_hex(in.text);
    return take(crn::io::parse_initial_state(in.text, network), in.path);
}

crn::RationalVector parse_combination(const std::string& text, const std::vector<std::string>& names) {
    crn::RationalVector theta(names.size());
    std::string s;
    for (char c : text) {
        if (c != ' ' && c != '\t') {
            s += c;
        }
    }
    if (s.empty()) {
        throw UsageError("empty linear combination");
    }
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = s.find('+', pos);
        std::string term = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? s.size() : end + 1;
        // Split a leading coefficient (digits, '/', '.') from the species name.
        std::size_t k = 0;
        while (k < term.size() && (std::isdigit(static_cast<unsigned char>(term[k])) || term[k] == '/' ||
                                   term[k] == '.')) {
            ++k;
        }
        crn::Rational c(1);
        if (k > 0) {
            auto q = crn::parse_rational(term.substr(0, k));
            if (!q) {
                throw UsageError("bad coefficient in '" + text + "'");
            }
            c = *q;
        }
        std::string name = term.substr(k);
        if (!name.empty() && name[0] == '*') {
            name.erase(0, 1);
        }
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw UsageError("unknown species '" + name + "' in '" + text + "'");
        }
        theta[static_cast<std::size_t>(it - names.begin())] += c;
    }
    return theta;
}

crn::Rational parse_gamma(const std::string& text) {
    auto q = crn::parse_rational(trim(text));
    if (!q) {
        throw UsageError("--gamma: '" + text + "' is not a rational number");
    }
    return *q;
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const std::string& flag) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw UsageError(flag + ": expected NAME=VALUE, got '" + text + "'");
    }
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

std::vector<double> make_grid(double t_end, std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        g[i] = t_end * static_cast<double>(i) / static_cast<double>(n);
    }
    g[n] = t_end;
    return g;
}

std::vector<std::string> species_names(const crn::Network& network) {
    std::vector<std::string> out;
    for (const auto& s : network.species()) {
        out.push_back(s.name);
    }
    return out;
}

void emit(const std::string& dir, const std::string& name, const std::string& content,
          crn::report::Manifest& manifest) {
    if (dir.empty()) {
        std::cout << content;
        return;
    }
    fs::create_directories(dir);
    fs::path p = fs::path(dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f || !(f << content)) {
        throw std::runtime_error("cannot write " + p.string());
    }
    manifest.outputs.push_back(p.string());
}

void write_manifest(const std::string& dir, crn::report::Manifest& manifest) {
    if (dir.empty()) {
        return;
    }
    fs::path p = fs::path(dir) / "manifest.json";
    manifest.outputs.push_back(p.string());
    std::ofstream f(p, std::ios::binary);
    if (!f || !(f << crn::report::manifest_json(manifest))) {
        throw std::runtime_error("cannot write " + p.string());
    }
}

Progress::Progress(std::string label, std::size_t total, bool enabled)
    : label_(std::move(label)), total_(total), enabled_(enabled) {}

void Progress::tick() {
    if (!enabled_) {
        return;
    }
    std::lock_guard lock(progress_mutex);
    ++done_;
    if (done_ >= next_report_ || done_ == total_) {
        std::cerr << label_ << ": " << done_ << "/" << total_ << "\n";
        next_report_ = done_ + std::max<std::size_t>(1, total_ / 10);
    }
}

}  // namespace crnscale
