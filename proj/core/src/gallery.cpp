#include "crn/gallery.hpp"

#include "crn/errors.hpp"
#include "crn/limit_io.hpp"
#include "crn/parse.hpp"

#include <span>
#include <stdexcept>
#include <utility>

namespace crn::detail {
std::span<const std::pair<std::string_view, std::string_view>> gallery_entries();
}

namespace crn::gallery {

namespace {

template <class T>
T unwrap(io::ParseResult<T> r, std::string_view name) {
    if (!r.ok() || r.has_errors()) {
        std::string msg = "gallery file " + std::string(name);
        for (const auto& d : r.diagnostics) {
            if (d.severity == io::ParseDiagnostic::Severity::Error) {
                msg += ": " + io::to_string(d);
                break;
            }
        }
        throw ParseError(msg);
    }
    return std::move(*r.value);
}

}  // namespace

std::vector<std::string> files() {
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::gallery_entries()) {
        out.emplace_back(name);
    }
    return out;
}

std::string_view file(std::string_view name) {
    for (const auto& [n, text] : detail::gallery_entries()) {
        if (n == name) {
            return text;
        }
    }
    throw std::out_of_range("no gallery file named " + std::string(name));
}

Network network(std::string_view name) { return unwrap(io::parse_network(file(name)), name); }

ScalingSpec scaling(std::string_view name, const Network& network) {
    return unwrap(io::parse_scaling(file(name), network), name);
}

State initial_state(std::string_view name, const Network& network) {
    return unwrap(io::parse_initial_state(file(name), network), name);
}

reduce::LimitModel limit_model(std::string_view name) {
    return unwrap(io::parse_limit_model(file(name)), name);
}

}  // namespace crn::gallery
