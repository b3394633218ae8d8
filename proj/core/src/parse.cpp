#include "crn/parse.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace crn {

double rational_power(double base, const Rational& q) {
    if (denominator(q) == 1 && boost::multiprecision::abs(numerator(q)) < 64) {
        long long e = numerator(q).convert_to<long long>();
        double r = 1.0;
        for (long long i = 0; i < std::llabs(e); ++i) {
            r *= base;
        }
        return e < 0 ? 1.0 / r : r;
    }
    return std::pow(base, to_double(q));
}

ScalingSpec make_scaling_spec(const Network& network, double N0, RationalVector alpha,
                              RationalVector beta) {
    if (!(N0 > 1.0) || !std::isfinite(N0)) {
        throw std::invalid_argument("N0 must be a real number greater than 1");
    }
    if (alpha.size() != network.num_species() || beta.size() != network.num_reactions()) {
        throw std::invalid_argument("scaling exponents do not match the network dimensions");
    }
    for (const auto& a : alpha) {
        if (a < 0) {
            throw std::invalid_argument("abundance exponents must be nonnegative");
        }
    }
    ScalingSpec s;
    s.N0 = N0;
    s.alpha = std::move(alpha);
    s.beta = std::move(beta);
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        const Reaction& r = network.reaction(k);
        // Multiply or divide by an exact integer power so table constants such
        // as 0.083 * 100 come out as the nearest double to 8.3.
        double p = rational_power(N0, boost::multiprecision::abs(s.beta[k]));
        s.kappa.push_back(s.beta[k] > 0 ? r.rate_const() / p : r.rate_const() * p);
        Rational rho = s.beta[k];
        for (std::size_t i = 0; i < network.num_species(); ++i) {
            if (r.nu()[i] != 0) {
                rho += Rational(r.nu()[i]) * s.alpha[i];
            }
        }
        s.rho.push_back(rho);
    }
    return s;
}

}  // namespace crn

namespace crn::io {

namespace {

using Severity = ParseDiagnostic::Severity;

constexpr std::string_view kHeader = "# crn-v1";
constexpr Count kMaxCoefficient = Count{1} << 31;

bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Cursor over one source line; columns are 1-based byte offsets.
class LineCursor {
  public:
    LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) {
            ++pos_;
        }
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool consume(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }
    std::string_view identifier() {
        skip_space();
        std::size_t start = pos_;
        if (pos_ < text_.size() && is_ident_start(text_[pos_])) {
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
                ++pos_;
            }
        }
        return text_.substr(start, pos_ - start);
    }
    std::string_view digits() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }
    // A number token: everything up to whitespace or a comma.
    std::string_view number_token() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != ',') {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }
    std::size_t column() {
        skip_space();
        return pos_ + 1;
    }
    std::size_t line() const { return line_; }
    std::string_view rest() {
        skip_space();
        return text_.substr(pos_);
    }
    void set_pos(std::size_t p) { pos_ = p; }
    std::size_t pos() const { return pos_; }

  private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct Term {
    Count coefficient;
    std::string species;
    std::size_t column;
};

struct ReactionLine {
    std::string label;
    std::vector<Term> lhs;
    std::vector<Term> rhs;
    bool reversible = false;
    std::vector<double> rates;
    std::size_t line = 0;
};

class NetworkParser {
  public:
    NetworkParser(std::string_view text, const NetworkParseOptions& opts)
        : text_(text), opts_(opts) {}

    ParseResult<Network> run() {
        std::size_t line_no = 0;
        std::size_t start = 0;
        bool saw_header = false;
        while (start <= text_.size()) {
            std::size_t end = text_.find('\n', start);
            if (end == std::string_view::npos) {
                end = text_.size();
            }
            std::string_view line = text_.substr(start, end - start);
            ++line_no;
            if (line_no == 1 && line.substr(0, kHeader.size()) == kHeader) {
                saw_header = true;
            } else if (line_no == 1 && line.rfind("# crn-v", 0) == 0) {
                error(1, 1, "unsupported format version '" + std::string(trim(line).substr(2)) + "'");
            }
            parse_line(line, line_no);
            if (end == text_.size()) {
                break;
            }
            start = end + 1;
        }
        if (!saw_header) {
            warn(1, 1, "missing '# crn-v1' header line");
        }
        ParseResult<Network> result;
        result.diagnostics = std::move(diags_);
        if (has_error_) {
            return result;
        }
        std::vector<Reaction> reactions;
        const std::size_t n = species_.size();
        for (const auto& rl : lines_) {
            std::vector<Count> lhs(n, 0);
            std::vector<Count> rhs(n, 0);
            for (const auto& t : rl.lhs) {
                lhs[index_.at(t.species)] += t.coefficient;
            }
            for (const auto& t : rl.rhs) {
                rhs[index_.at(t.species)] += t.coefficient;
            }
            reactions.emplace_back(lhs, rhs, rl.rates[0], rl.label);
            if (rl.reversible) {
                reactions.emplace_back(rhs, lhs, rl.rates[1],
                                       rl.label.empty() ? std::string{} : rl.label + "_rev");
            }
        }
        try {
            result.value.emplace(species_, std::move(reactions), volume_);
        } catch (const std::exception& e) {
            result.diagnostics.push_back({1, 1, e.what(), Severity::Error});
        }
        return result;
    }

  private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (is_space(s.front()) || s.front() == '\n')) {
            s.remove_prefix(1);
        }
        while (!s.empty() && (is_space(s.back()) || s.back() == '\n')) {
            s.remove_suffix(1);
        }
        return s;
    }

    void error(std::size_t line, std::size_t col, std::string msg) {
        has_error_ = true;
        diags_.push_back({line, col, std::move(msg), Severity::Error});
    }
    void warn(std::size_t line, std::size_t col, std::string msg) {
        diags_.push_back({line, col, std::move(msg), Severity::Warning});
    }

    void parse_line(std::string_view raw, std::size_t line_no) {
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        for (std::size_t i = 0; i < line.size(); ++i) {
            unsigned char c = static_cast<unsigned char>(line[i]);
            if ((c < 0x20 && c != '\t' && c != '\r') || c >= 0x7f) {
                error(line_no, i + 1, "unexpected character");
                return;
            }
        }
        LineCursor cur(line, line_no);
        if (cur.at_end()) {
            return;
        }
        std::size_t save = cur.pos();
        std::string_view word = cur.identifier();
        if (word == "species" && (cur.at_end() || is_ident_start(cur.peek()))) {
            parse_species(cur);
            return;
        }
        if (word == "volume" && (is_digit(cur.peek()) || cur.peek() == '.' || cur.peek() == '-')) {
            parse_volume(cur);
            return;
        }
        ReactionLine rl;
        rl.line = line_no;
        if (!word.empty() && cur.peek() == ':') {
            cur.consume(":");
            rl.label = std::string(word);
            if (labels_.count(rl.label)) {
                error(line_no, save + 1, "duplicate reaction label '" + rl.label + "'");
                return;
            }
        } else {
            cur.set_pos(save);
        }
        if (!parse_side(cur, rl.lhs)) {
            return;
        }
        if (cur.consume("<->")) {
            rl.reversible = true;
        } else if (!cur.consume("->")) {
            error(line_no, cur.column(), "expected '->' or '<->'");
            return;
        }
        if (!parse_side(cur, rl.rhs)) {
            return;
        }
        if (!cur.consume("@")) {
            error(line_no, cur.column(), "expected '@' followed by a rate constant");
            return;
        }
        std::size_t expected = rl.reversible ? 2 : 1;
        for (std::size_t i = 0; i < expected; ++i) {
            if (i > 0 && !cur.consume(",")) {
                error(line_no, cur.column(), "reversible reaction needs two rate constants");
                return;
            }
            std::size_t col = cur.column();
            std::string_view tok = cur.number_token();
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size() ||
                !std::isfinite(v)) {
                error(line_no, col, "invalid rate constant '" + std::string(tok) + "'");
                return;
            }
            if (!(v > 0.0)) {
                error(line_no, col, "rate constant must be positive");
                return;
            }
            rl.rates.push_back(v);
        }
        if (!cur.at_end()) {
            error(line_no, cur.column(), "unexpected token '" + std::string(cur.rest()) + "'");
            return;
        }
        for (const auto* side : {&rl.lhs, &rl.rhs}) {
            for (const auto& t : *side) {
                declare(t.species, line_no, t.column, true);
            }
        }
        if (!rl.label.empty()) {
            labels_.insert(rl.label);
            if (rl.reversible) {
                labels_.insert(rl.label + "_rev");
            }
        }
        lines_.push_back(std::move(rl));
    }

    bool parse_side(LineCursor& cur, std::vector<Term>& side) {
        if (cur.peek() == '0') {
            std::size_t save = cur.pos();
            std::size_t col = cur.column();
            std::string_view d = cur.digits();
            if (d == "0" && !is_ident_start(cur.peek())) {
                (void)col;
                return true;
            }
            cur.set_pos(save);
        }
        for (;;) {
            std::size_t col = cur.column();
            Count coefficient = 1;
            if (is_digit(cur.peek())) {
                std::string_view d = cur.digits();
                if (d.size() > 12) {
                    error(cur.line(), col, "coefficient exceeds 2^31");
                    return false;
                }
                Count c = 0;
                std::from_chars(d.data(), d.data() + d.size(), c);
                if (c >= kMaxCoefficient) {
                    error(cur.line(), col, "coefficient exceeds 2^31");
                    return false;
                }
                if (c == 0) {
                    error(cur.line(), col, "coefficient must be positive");
                    return false;
                }
                coefficient = c;
            }
            std::size_t name_col = cur.column();
            std::string_view name = cur.identifier();
            if (name.empty()) {
                error(cur.line(), name_col, "expected species name");
                return false;
            }
            side.push_back(Term{coefficient, std::string(name), name_col});
            if (!cur.consume("+")) {
                return true;
            }
        }
    }

    void parse_species(LineCursor& cur) {
        if (cur.at_end()) {
            return;
        }
        for (;;) {
            std::size_t col = cur.column();
            std::string_view name = cur.identifier();
            if (name.empty()) {
                error(cur.line(), col, "expected species name");
                return;
            }
            if (index_.count(std::string(name))) {
                error(cur.line(), col, "species '" + std::string(name) + "' declared twice");
                return;
            }
            declare(std::string(name), cur.line(), col, false);
            if (cur.at_end()) {
                return;
            }
            if (!cur.consume(",")) {
                error(cur.line(), cur.column(), "expected ',' between species names");
                return;
            }
        }
    }

    void parse_volume(LineCursor& cur) {
        std::size_t col = cur.column();
        std::string_view tok = cur.number_token();
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size() ||
            !std::isfinite(v) || !(v > 0.0)) {
            error(cur.line(), col, "volume must be a positive number");
            return;
        }
        if (!cur.at_end()) {
            error(cur.line(), cur.column(), "unexpected token after volume");
            return;
        }
        volume_ = v;
    }

    void declare(const std::string& name, std::size_t line, std::size_t col, bool implicit) {
        if (index_.count(name)) {
            return;
        }
        if (implicit) {
            std::string msg = "species '" + name + "' declared implicitly";
            if (opts_.strict) {
                error(line, col, msg);
            } else {
                warn(line, col, msg);
            }
        }
        index_.emplace(name, species_.size());
        species_.push_back(name);
    }

    std::string_view text_;
    NetworkParseOptions opts_;
    std::vector<ParseDiagnostic> diags_;
    bool has_error_ = false;
    std::vector<std::string> species_;
    std::unordered_map<std::string, std::size_t> index_;
    std::set<std::string> labels_;
    std::vector<ReactionLine> lines_;
    double volume_ = 1.0;
};

std::string format_side(const Network& network, const std::vector<Count>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += " + ";
        }
        if (v[i] != 1) {
            out += std::to_string(v[i]) + " ";
        }
        out += network.species()[i].name;
    }
    return out.empty() ? "0" : out;
}

ParseDiagnostic located(const YAML::Mark& mark, std::string msg) {
    ParseDiagnostic d;
    d.line = mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 1;
    d.column = mark.column >= 0 ? static_cast<std::size_t>(mark.column) + 1 : 1;
    d.message = std::move(msg);
    return d;
}

std::optional<YAML::Node> load_yaml(std::string_view text, std::vector<ParseDiagnostic>& diags) {
    try {
        YAML::Node root = YAML::Load(std::string(text));
        if (!root.IsMap()) {
            diags.push_back(located(root.Mark(), "expected a key-value document"));
            return std::nullopt;
        }
        return root;
    } catch (const YAML::Exception& e) {
        diags.push_back(located(e.mark, e.msg));
        return std::nullopt;
    }
}

std::optional<Rational> scalar_rational(const YAML::Node& node,
                                        std::vector<ParseDiagnostic>& diags) {
    if (!node.IsScalar()) {
        diags.push_back(located(node.Mark(), "expected a rational number"));
        return std::nullopt;
    }
    auto v = parse_rational(node.Scalar());
    if (!v) {
        diags.push_back(located(node.Mark(), "invalid rational '" + node.Scalar() + "'"));
    }
    return v;
}

}  // namespace

std::string to_string(const ParseDiagnostic& d) {
    return std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
           (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") + ": " +
           d.message;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

ParseResult<Network> parse_network(std::string_view text, const NetworkParseOptions& options) {
    return NetworkParser(text, options).run();
}

std::string format_network(const Network& network) {
    std::ostringstream out;
    out << kHeader << "\n";
    out << "species";
    for (std::size_t i = 0; i < network.num_species(); ++i) {
        out << (i == 0 ? " " : ", ") << network.species()[i].name;
    }
    out << "\n";
    if (network.volume() != 1.0) {
        out << "volume " << format_double(network.volume()) << "\n";
    }
    for (const auto& r : network.reactions()) {
        if (!r.label().empty()) {
            out << r.label() << ": ";
        }
        out << format_side(network, r.nu()) << " -> " << format_side(network, r.nu_prime())
            << " @ " << format_double(r.rate_const()) << "\n";
    }
    return out.str();
}

ParseResult<ScalingSpec> parse_scaling(std::string_view text, const Network& network) {
    ParseResult<ScalingSpec> result;
    auto& diags = result.diagnostics;
    auto root = load_yaml(text, diags);
    if (!root) {
        return result;
    }
    std::optional<double> N0;
    RationalVector alpha(network.num_species());
    RationalVector beta(network.num_reactions());
    bool bad = false;
    for (const auto& kv : *root) {
        const std::string key = kv.first.Scalar();
        const YAML::Node& val = kv.second;
        if (key == "N0") {
            double v = 0.0;
            const std::string s = val.IsScalar() ? val.Scalar() : std::string{};
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !(v > 1.0) ||
                !std::isfinite(v)) {
                diags.push_back(located(val.Mark(), "N0 must be a real number greater than 1"));
                bad = true;
            } else {
                N0 = v;
            }
        } else if (key == "alpha" || key == "beta") {
            if (val.IsNull()) {
                continue;
            }
            if (!val.IsMap()) {
                diags.push_back(located(val.Mark(), "'" + key + "' must be a map"));
                bad = true;
                continue;
            }
            for (const auto& entry : val) {
                const std::string name = entry.first.Scalar();
                auto q = scalar_rational(entry.second, diags);
                if (!q) {
                    bad = true;
                    continue;
                }
                if (key == "alpha") {
                    auto i = network.species_index(name);
                    if (!i) {
                        diags.push_back(located(entry.first.Mark(), "unknown species '" + name + "'"));
                        bad = true;
                    } else if (*q < 0) {
                        diags.push_back(located(entry.second.Mark(),
                                                "abundance exponent must be nonnegative"));
                        bad = true;
                    } else {
                        alpha[*i] = *q;
                    }
                } else {
                    auto k = network.reaction_index(name);
                    if (!k) {
                        std::size_t idx = 0;
                        auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
                        if (ec == std::errc() && p == name.data() + name.size() && idx >= 1 &&
                            idx <= network.num_reactions()) {
                            k = idx - 1;
                        }
                    }
                    if (!k) {
                        diags.push_back(located(entry.first.Mark(), "unknown reaction '" + name + "'"));
                        bad = true;
                    } else {
                        beta[*k] = *q;
                    }
                }
            }
        } else {
            diags.push_back(located(kv.first.Mark(), "unknown key '" + key + "'"));
            bad = true;
        }
    }
    if (!N0 && !bad) {
        diags.push_back(located(root->Mark(), "missing N0"));
        bad = true;
    }
    if (bad) {
        for (auto& d : diags) {
            d.severity = ParseDiagnostic::Severity::Error;
        }
        return result;
    }
    result.value = make_scaling_spec(network, *N0, std::move(alpha), std::move(beta));
    return result;
}

std::string format_scaling(const ScalingSpec& spec, const Network& network) {
    std::ostringstream out;
    out << "N0: " << format_double(spec.N0) << "\n";
    out << "alpha:\n";
    for (std::size_t i = 0; i < network.num_species(); ++i) {
        out << "  " << network.species()[i].name << ": " << crn::to_string(spec.alpha[i]) << "\n";
    }
    out << "beta:\n";
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
        out << "  " << (network.reaction(k).label().empty() ? std::to_string(k + 1)
                                                              : network.reaction(k).label())
            << ": " << crn::to_string(spec.beta[k]) << "\n";
    }
    return out.str();
}

ParseResult<State> parse_initial_state(std::string_view text, const Network& network) {
    ParseResult<State> result;
    auto root = load_yaml(text, result.diagnostics);
    if (!root) {
        return result;
    }
    State x(network.num_species(), 0);
    bool bad = false;
    for (const auto& kv : *root) {
        const std::string name = kv.first.Scalar();
        auto i = network.species_index(name);
        if (!i) {
            result.diagnostics.push_back(located(kv.first.Mark(), "unknown species '" + name + "'"));
            bad = true;
            continue;
        }
        const std::string s = kv.second.IsScalar() ? kv.second.Scalar() : std::string{};
        Count c = -1;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), c);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size() || c < 0) {
            result.diagnostics.push_back(
                located(kv.second.Mark(), "count must be a nonnegative integer"));
            bad = true;
            continue;
        }
        x[*i] = c;
    }
    if (!bad) {
        result.value = std::move(x);
    }
    return result;
}

std::string format_initial_state(const State& x, const Network& network) {
    std::ostringstream out;
    for (std::size_t i = 0; i < network.num_species(); ++i) {
        out << network.species()[i].name << ": " << x[i] << "\n";
    }
    return out.str();
}

}  // namespace crn::io
