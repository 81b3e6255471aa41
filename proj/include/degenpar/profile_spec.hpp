#pragma once

#include "degenpar/degeneracy.hpp"

#include <string>
#include <variant>
#include <vector>

namespace degenpar {

/// Generic call syntax used by profile and data specs: name(arg, ...), where an
/// argument is a quoted string, a bracketed list, a parenthesized tuple, or raw text.
struct SpecValue {
    enum class Kind { Raw, String, List, Tuple };
    Kind kind = Kind::Raw;
    std::string text;
    std::vector<SpecValue> items;

    double as_number() const;
    /// Raw text or string contents.
    const std::string& as_text() const;
};

struct SpecCall {
    std::string name;
    std::vector<SpecValue> args;
};

SpecCall parse_spec_call(const std::string& source);

/// constant(c) | power(alpha) | oscillatory() | power_log(alpha, b) | expr("...")
/// | piecewise([(t0, "expr0"), ...])
DegeneracyProfile parse_profile(const std::string& spec, double horizon = 10.0);

/// Same grammar without the sign constraint; used for coefficient entries.
ScalarPath parse_scalar_path(const std::string& spec);

}  // namespace degenpar
