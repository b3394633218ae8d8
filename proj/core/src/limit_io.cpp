#include "crn/limit_io.hpp"

#include "crn/errors.hpp"
#include "crn/expr.hpp"

#include <charconv>
#include <sstream>

namespace crn::io {

namespace {

constexpr std::string_view kTag = "#@ limit-v1";

std::string num(double v) { return format_double(v); }
std::string rat(const Rational& r) { return crn::to_string(r); }

std::string kind_name(reduce::Channel::RateSource s) {
    switch (s) {
        case reduce::Channel::RateSource::MassAction:
            return "massaction";
        case reduce::Channel::RateSource::Generic:
            return "generic";
        case reduce::Channel::RateSource::Expression:
            return "rate";
    }
    return "?";
}

std::string trim(std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) {
        return {};
    }
    std::size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t p = s.find(sep, start);
        out.push_back(trim(std::string_view(s).substr(start, p == std::string::npos ? p : p - start)));
        if (p == std::string::npos) {
            return out;
        }
        start = p + 1;
    }
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

std::string format_limit_model(const reduce::LimitModel& m) {
    const auto& net = m.network;
    std::ostringstream os;
    os << format_network(net);
    os << kTag << "\n";
    os << "#@ N0 " << num(m.spec.N0) << "\n";
    os << "#@ alpha";
    for (const auto& a : m.spec.alpha) {
        os << ' ' << rat(a);
    }
    os << "\n#@ beta";
    for (const auto& b : m.spec.beta) {
        os << ' ' << rat(b);
    }
    os << "\n#@ gamma " << rat(m.gamma) << "\n";
    os << "#@ init";
    for (double z : m.initial_z) {
        os << ' ' << num(z);
    }
    os << "\n";
    for (const auto& v : m.variables) {
        os << "#@ var " << v.name << ' ' << reduce::to_string(v.kind) << ' ' << num(v.initial);
        if (v.species) {
            os << " species " << net.species()[*v.species].name;
        } else {
            os << " theta";
            for (const auto& t : v.theta) {
                os << ' ' << rat(t);
            }
        }
        os << "\n";
    }
    for (const auto& [name, expr] : m.lets) {
        os << "#@ let " << name << " = " << expr << "\n";
    }
    for (const auto& ch : m.channels) {
        os << "#@ channel " << ch.name;
        if (ch.reaction) {
            os << " reaction " << net.reaction_name(*ch.reaction);
        }
        os << ' ' << kind_name(ch.source);
        if (ch.source == reduce::Channel::RateSource::Expression) {
            os << ' ' << ch.rate;
        }
        for (const auto& [v, d] : ch.jumps) {
            os << " ; jump " << m.variables[v].name << ' ' << num(d);
        }
        for (const auto& [v, d] : ch.drifts) {
            os << " ; drift " << m.variables[v].name << ' ' << num(d);
        }
        os << "\n";
    }
    for (const auto& t : m.terms) {
        os << "#@ term " << m.variables[t.variable].name << ' ' << net.reaction_name(t.reaction) << ' '
           << reduce::to_string(t.cls) << ' ' << rat(t.exponent_gap) << ' ' << rat(t.coefficient)
           << ' ' << rat(t.drift_coefficient) << "\n";
    }
    for (const auto& u : m.unresolved) {
        os << "#@ unresolved " << u << "\n";
    }
    for (const auto& n : m.notes) {
        os << "#@ note " << n << "\n";
    }
    return os.str();
}

bool is_limit_model(std::string_view text) {
    std::size_t p = 0;
    while (p < text.size()) {
        std::size_t e = text.find('\n', p);
        std::string line = trim(text.substr(p, e == std::string_view::npos ? e : e - p));
        if (line == kTag) {
            return true;
        }
        if (e == std::string_view::npos) {
            break;
        }
        p = e + 1;
    }
    return false;
}

ParseResult<reduce::LimitModel> parse_limit_model(std::string_view text) {
    ParseResult<reduce::LimitModel> result;
    auto net = parse_network(text);
    result.diagnostics = net.diagnostics;
    if (!net.ok()) {
        return result;
    }
    const Network& network = *net.value;
    const std::size_t n = network.num_species();
    const std::size_t R = network.num_reactions();
    reduce::LimitModel m;
    m.network = network;
    double N0 = 0.0;
    RationalVector alpha(n), beta(R);
    bool tagged = false;
    bool bad = false;
    std::size_t line_no = 0;
    auto error = [&](const std::string& msg) {
        result.diagnostics.push_back({line_no, 1, msg, ParseDiagnostic::Severity::Error});
        bad = true;
    };
    struct PendingChannel {
        std::size_t line;
        std::string text;
    };
    std::vector<PendingChannel> channels;
    std::vector<std::pair<std::size_t, std::string>> terms;

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.rfind("#@", 0) != 0) {
            continue;
        }
        if (line == kTag) {
            tagged = true;
            continue;
        }
        std::istringstream ls(line.substr(2));
        std::string key;
        ls >> key;
        std::string rest;
        std::getline(ls, rest);
        rest = trim(rest);
        std::istringstream rs(rest);
        auto read_rationals = [&](RationalVector& out, const char* what) {
            for (auto& x : out) {
                std::string tok;
                if (!(rs >> tok)) {
                    error(std::string("too few ") + what + " entries");
                    return;
                }
                auto r = parse_rational(tok);
                if (!r) {
                    error(std::string("invalid ") + what + " entry '" + tok + "'");
                    return;
                }
                x = *r;
            }
        };
        if (key == "N0") {
            auto v = parse_double(rest);
            if (!v) {
                error("invalid N0");
            } else {
                N0 = *v;
            }
        } else if (key == "alpha") {
            read_rationals(alpha, "alpha");
        } else if (key == "beta") {
            read_rationals(beta, "beta");
        } else if (key == "gamma") {
            auto g = parse_rational(rest);
            if (!g) {
                error("invalid gamma");
            } else {
                m.gamma = *g;
            }
        } else if (key == "init") {
            std::string tok;
            while (rs >> tok) {
                auto v = parse_double(tok);
                if (!v) {
                    error("invalid initial value '" + tok + "'");
                    break;
                }
                m.initial_z.push_back(*v);
            }
            if (m.initial_z.size() != n) {
                error("init needs one value per species");
            }
        } else if (key == "var") {
            reduce::LimitVariable v;
            std::string kind, init, form;
            rs >> v.name >> kind >> init >> form;
            if (kind == "frozen") {
                v.kind = reduce::VarKind::Frozen;
            } else if (kind == "continuous") {
                v.kind = reduce::VarKind::Continuous;
            } else if (kind == "discrete") {
                v.kind = reduce::VarKind::Discrete;
            } else {
                error("unknown variable kind '" + kind + "'");
                continue;
            }
            auto iv = parse_double(init);
            if (!iv) {
                error("invalid initial value for " + v.name);
                continue;
            }
            v.initial = *iv;
            v.theta.assign(n, Rational(0));
            if (form == "species") {
                std::string sp;
                rs >> sp;
                auto idx = network.species_index(sp);
                if (!idx) {
                    error("unknown species '" + sp + "'");
                    continue;
                }
                v.species = *idx;
                v.theta[*idx] = 1;
            } else if (form == "theta") {
                read_rationals(v.theta, "theta");
            } else {
                error("variable " + v.name + " needs 'species' or 'theta'");
                continue;
            }
            m.variables.push_back(std::move(v));
        } else if (key == "let") {
            auto eq = rest.find('=');
            if (eq == std::string::npos) {
                error("let needs 'name = expression'");
                continue;
            }
            m.lets.emplace_back(trim(rest.substr(0, eq)), trim(rest.substr(eq + 1)));
        } else if (key == "channel") {
            channels.push_back({line_no, rest});
        } else if (key == "term") {
            terms.emplace_back(line_no, rest);
        } else if (key == "unresolved") {
            m.unresolved.push_back(rest);
        } else if (key == "note") {
            m.notes.push_back(rest);
        } else {
            error("unknown annotation '" + key + "'");
        }
    }
    if (!tagged) {
        line_no = 1;
        error("missing '#@ limit-v1' annotation");
    }
    if (bad) {
        return result;
    }
    if (m.initial_z.empty()) {
        m.initial_z.assign(n, 0.0);
    }
    try {
        m.spec = make_scaling_spec(network, N0, alpha, beta);
    } catch (const std::exception& e) {
        line_no = 1;
        error(e.what());
        return result;
    }
    for (auto& v : m.variables) {
        Rational a = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (v.theta[i] != 0 && m.spec.alpha[i] > a) {
                a = m.spec.alpha[i];
            }
        }
        v.alpha = a;
    }

    for (const auto& pc : channels) {
        line_no = pc.line;
        auto parts = split(pc.text, ';');
        std::istringstream hs(parts[0]);
        reduce::Channel ch;
        std::string word;
        hs >> ch.name >> word;
        if (word == "reaction") {
            std::string rn;
            hs >> rn;
            ch.reaction = network.reaction_index(rn);
            if (!ch.reaction) {
                error("unknown reaction '" + rn + "'");
                continue;
            }
            hs >> word;
        }
        if (word == "massaction") {
            ch.source = reduce::Channel::RateSource::MassAction;
        } else if (word == "generic") {
            ch.source = reduce::Channel::RateSource::Generic;
        } else if (word == "rate") {
            ch.source = reduce::Channel::RateSource::Expression;
            std::getline(hs, ch.rate);
            ch.rate = trim(ch.rate);
            try {
                (void)Expr::parse(ch.rate);
            } catch (const ExprError& e) {
                error(e.what());
                continue;
            }
        } else {
            error("channel " + ch.name + " needs massaction, generic or rate");
            continue;
        }
        if (ch.source != reduce::Channel::RateSource::Expression && !ch.reaction) {
            error("channel " + ch.name + " needs a reaction for its rate");
            continue;
        }
        for (std::size_t j = 1; j < parts.size(); ++j) {
            std::istringstream ps(parts[j]);
            std::string what, var, val;
            ps >> what >> var >> val;
            auto idx = m.variable_index(var);
            auto d = parse_double(val);
            if (!idx || !d || (what != "jump" && what != "drift")) {
                error("malformed channel increment '" + parts[j] + "'");
                continue;
            }
            (what == "jump" ? ch.jumps : ch.drifts).emplace_back(*idx, *d);
        }
        m.channels.push_back(std::move(ch));
    }
    for (const auto& [ln, t] : terms) {
        line_no = ln;
        std::istringstream ts(t);
        std::string var, rn, cls, gap, coef, top;
        ts >> var >> rn >> cls >> gap >> coef >> top;
        auto vi = m.variable_index(var);
        auto ki = network.reaction_index(rn);
        auto g = parse_rational(gap);
        auto c = parse_rational(coef);
        auto d = parse_rational(top);
        std::optional<reduce::TermKind> kind;
        for (auto k : {reduce::TermKind::Vanishing, reduce::TermKind::Jump, reduce::TermKind::Drift,
                       reduce::TermKind::Fast}) {
            if (reduce::to_string(k) == cls) {
                kind = k;
            }
        }
        if (!vi || !ki || !g || !c || !d || !kind) {
            error("malformed term '" + t + "'");
            continue;
        }
        m.terms.push_back({*ki, *vi, *g, *kind, *c, *d});
    }
    if (bad) {
        return result;
    }
    m.fast_block = reduce::find_fast_block(network, m.spec, m.gamma);
    m.closed = m.unresolved.empty();
    result.value = std::move(m);
    return result;
}

}  // namespace crn::io
